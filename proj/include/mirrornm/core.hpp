/**
 * @file core.hpp
 * @brief Model parameters and the qubit amplitude-damping map for an emitter
 *        facing a mirror in a 1D waveguide.
 *
 * Time is measured in the same units as 1/gamma. Only the atomic reduced
 * dynamics is represented; the photonic field is never materialized.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mirrornm {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduce a phase to [0, 2pi). Throws std::invalid_argument for non-finite input.
inline double canonicalize_phase(double phi) {
    if (!std::isfinite(phi)) {
        throw std::invalid_argument("canonicalize_phase: phase must be finite");
    }
    double r = std::fmod(phi, two_pi);
    if (r < 0.0) {
        r += two_pi;
        // -tiny + 2pi rounds to 2pi
        if (r >= two_pi) {
            r = 0.0;
        }
    }
    return r;
}

/**
 * Physical parameters of the emitter-mirror system.
 *
 * The dynamics depends only on (gamma * t_d, phi) once time is rescaled by
 * gamma. The raw phase is kept for echoing; everything downstream uses the
 * canonical phase so that phi and phi + 2pi produce identical numbers.
 */
class ModelParams {
public:
    ModelParams(double gamma, double t_d, double phi)
        : gamma_(gamma), t_d_(t_d), phi_(phi), phi_canonical_(canonicalize_phase(phi)),
          dimensionless_delay_(gamma * t_d) {
        if (!(std::isfinite(gamma) && gamma > 0.0)) {
            throw std::invalid_argument("ModelParams: gamma must be finite and > 0");
        }
        if (!(std::isfinite(t_d) && t_d >= 0.0)) {
            throw std::invalid_argument("ModelParams: t_d must be finite and >= 0");
        }
        feedback_ = std::polar(1.0, phi_canonical_);
    }

    /// Parameters in rescaled units (gamma = 1, t_d = gamma * t_d).
    static ModelParams rescaled(double gamma_td, double phi) { return {1.0, gamma_td, phi}; }

    double gamma() const noexcept { return gamma_; }
    double t_d() const noexcept { return t_d_; }
    double phi() const noexcept { return phi_; }
    double phi_canonical() const noexcept { return phi_canonical_; }
    double dimensionless_delay() const noexcept { return dimensionless_delay_; }
    /// e^{i phi} evaluated at the canonical phase.
    cplx feedback_phase() const noexcept { return feedback_; }
    /// Canonical phase equal to 0, i.e. phi = 2 n pi: an atom-photon bound state forms.
    bool bound_state() const noexcept { return phi_canonical_ == 0.0; }

    ModelParams with_phase(double phi) const { return {gamma_, t_d_, phi}; }
    ModelParams with_delay(double t_d) const { return {gamma_, t_d, phi_}; }

private:
    double gamma_;
    double t_d_;
    double phi_;
    double phi_canonical_;
    double dimensionless_delay_;
    cplx feedback_;
};

/// Slack added to the positivity bound to absorb round-off.
inline constexpr double positivity_slack = 1e-12;

/**
 * Atomic density matrix stored as (rho_ee, rho_ge). rho_gg = 1 - rho_ee and
 * rho_eg = conj(rho_ge) are implied, so trace and hermiticity hold by construction.
 */
class QubitState {
public:
    QubitState(double rho_ee, cplx rho_ge) : rho_ee_(rho_ee), rho_ge_(rho_ge) {
        if (!std::isfinite(rho_ee) || !std::isfinite(rho_ge.real()) ||
            !std::isfinite(rho_ge.imag())) {
            throw std::invalid_argument("QubitState: entries must be finite");
        }
        if (rho_ee < 0.0 || rho_ee > 1.0) {
            std::ostringstream os;
            os << "QubitState: rho_ee = " << rho_ee << " outside [0, 1]";
            throw std::invalid_argument(os.str());
        }
        const double bound = rho_ee * (1.0 - rho_ee) + positivity_slack;
        if (std::norm(rho_ge) > bound) {
            std::ostringstream os;
            os << "QubitState: positivity violated, |rho_ge|^2 = " << std::norm(rho_ge)
               << " > rho_ee (1 - rho_ee) = " << rho_ee * (1.0 - rho_ee);
            throw std::invalid_argument(os.str());
        }
    }

    static QubitState ground() { return {0.0, 0.0}; }
    static QubitState excited() { return {1.0, 0.0}; }

    double rho_ee() const noexcept { return rho_ee_; }
    double rho_gg() const noexcept { return 1.0 - rho_ee_; }
    cplx rho_ge() const noexcept { return rho_ge_; }
    cplx rho_eg() const noexcept { return std::conj(rho_ge_); }

    friend bool operator==(const QubitState&, const QubitState&) = default;

private:
    double rho_ee_;
    cplx rho_ge_;
};

/// Excited-state amplitude in the frame rotating at the atomic frequency.
class Amplitude {
public:
    explicit Amplitude(cplx value) : value_(value) {
        if (!(std::abs(value) <= 1.0 + 1e-9)) {
            throw std::invalid_argument("Amplitude: |eps| must not exceed 1");
        }
    }
    cplx value() const noexcept { return value_; }

private:
    cplx value_;
};

/// Amplitude-damping map: rho_ee -> |eps|^2 rho_ee, rho_ge -> conj(eps) rho_ge.
inline QubitState evolve_state(const QubitState& rho0, const Amplitude& eps) {
    const cplx e = eps.value();
    const double p = std::min(std::norm(e), 1.0);
    return {p * rho0.rho_ee(), std::conj(e) * rho0.rho_ge()};
}

}  // namespace mirrornm
