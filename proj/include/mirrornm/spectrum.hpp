/**
 * @file spectrum.hpp
 * @brief Spectral density of the waveguide modes seen by the emitter,
 *        J(Delta) = (gamma/pi) sin^2(t_d Delta / 2 + phi / 2).
 *
 * Assumes the dispersion is linear around the atomic frequency over a band
 * wider than gamma and 1/t_d; that condition is not checked here.
 */
#pragma once

#include "mirrornm/core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mirrornm {

struct SpectralPoint {
    double detuning = 0.0;  ///< omega - omega_0
    double density = 0.0;
};

inline double spectral_density(const ModelParams& params, double detuning) {
    if (!std::isfinite(detuning)) {
        throw std::invalid_argument("spectral_density: detuning must be finite");
    }
    const double s = std::sin(0.5 * params.t_d() * detuning + 0.5 * params.phi_canonical());
    return params.gamma() / std::numbers::pi * s * s;
}

/// n_points samples of J over [delta_min, delta_max], both ends included.
inline std::vector<SpectralPoint> spectrum_scan(const ModelParams& params, double delta_min,
                                                double delta_max, int n_points) {
    if (!std::isfinite(delta_min) || !std::isfinite(delta_max) || !(delta_min < delta_max)) {
        throw std::invalid_argument("spectrum_scan: need finite delta_min < delta_max");
    }
    if (n_points < 2) {
        throw std::invalid_argument("spectrum_scan: n_points must be >= 2");
    }
    std::vector<SpectralPoint> out;
    out.reserve(static_cast<std::size_t>(n_points));
    const double span = delta_max - delta_min;
    for (int i = 0; i < n_points; ++i) {
        const double d =
            i + 1 == n_points ? delta_max : delta_min + span * i / static_cast<double>(n_points - 1);
        out.push_back({d, spectral_density(params, d)});
    }
    return out;
}

}  // namespace mirrornm
