/**
 * @file solver.hpp
 * @brief Excited-state amplitude eps(t) of an emitter in front of a mirror.
 *
 * The amplitude obeys the delay equation
 *
 *     d eps/dt = -(gamma/2) eps(t) + (gamma/2) e^{i phi} eps(t - t_d) theta(t - t_d)
 *
 * and is computed three independent ways: the exact finite series, a
 * method-of-steps integrator, and the memoryless (t_d -> 0) limit.
 */
#pragma once

#include "mirrornm/core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mirrornm {

inline constexpr int default_mesh_per_delay = 512;
inline constexpr int min_mesh_per_delay = 16;

namespace detail {

// std::complex multiplication carries inf/nan recovery branches; the
// integrator only ever sees finite values.
inline cplx cmul(cplx a, cplx b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// Neumaier compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) noexcept {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    double value() const noexcept { return sum + carry; }
};

}  // namespace detail

/// Markovian limit exp[(gamma/2)(e^{i phi} - 1) t].
inline cplx lindblad_amplitude(double gamma, double phi, double t) {
    if (!std::isfinite(gamma) || !std::isfinite(phi) || !std::isfinite(t)) {
        throw std::invalid_argument("lindblad_amplitude: non-finite input");
    }
    if (t < 0.0) {
        throw std::invalid_argument("lindblad_amplitude: t must be >= 0");
    }
    const double p = canonicalize_phase(phi);
    const double rate = 0.5 * gamma * (1.0 - std::cos(p));
    return std::polar(std::exp(-rate * t), 0.5 * gamma * std::sin(p) * t);
}

/// Upper limit on the number of series terms before evaluation is refused.
inline constexpr double max_series_terms = 1e8;

/**
 * Exact finite series for eps(t), t_d > 0.
 *
 * Each term is assembled in log-magnitude form so that the growing factor
 * (gamma/2 e^{gamma t_d/2})^n never overflows on its own. Throws
 * std::overflow_error rather than returning a non-finite value.
 */
inline cplx amplitude_series(const ModelParams& params, double t) {
    if (!std::isfinite(t) || t < 0.0) {
        throw std::invalid_argument("amplitude_series: t must be finite and >= 0");
    }
    const double t_d = params.t_d();
    if (!(t_d > 0.0)) {
        throw std::invalid_argument("amplitude_series: requires t_d > 0 (use lindblad_amplitude)");
    }
    const double gamma = params.gamma();
    const double ratio = t / t_d;
    if (ratio > max_series_terms) {
        throw std::overflow_error("amplitude_series: t / t_d exceeds the supported term count");
    }
    auto n_max = static_cast<long>(std::floor(ratio));
    while (n_max > 0 && t - static_cast<double>(n_max) * t_d < 0.0) {
        --n_max;
    }

    const double log_coupling = std::log(0.5 * gamma) + 0.5 * gamma * t_d;
    const double phi = params.phi_canonical();
    const auto log_mag = [&](long n) {
        if (n == 0) {
            return -0.5 * gamma * t;
        }
        const double nd = static_cast<double>(n);
        const double x = t - nd * t_d;
        if (x <= 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        return -0.5 * gamma * t + nd * (log_coupling + std::log(x)) - std::lgamma(nd + 1.0);
    };

    // log_mag is concave in n: locate the largest term, then sum outwards
    // until terms fall below e^-60 of it.
    long lo = 0;
    long hi = n_max;
    while (lo < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (log_mag(mid + 1) > log_mag(mid)) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    const long peak = lo;
    const double log_peak = log_mag(peak);
    if (!std::isfinite(log_peak) || log_peak > std::log(std::numeric_limits<double>::max())) {
        throw std::overflow_error("amplitude_series: term magnitude overflows (n = " +
                                  std::to_string(peak) + ")");
    }
    const double cutoff = std::max(log_peak - 60.0, -745.0);

    detail::CompensatedSum re;
    detail::CompensatedSum im;
    const auto add_term = [&](long n, double lm) {
        const double mag = std::exp(lm);
        const double angle = std::fmod(static_cast<double>(n) * phi, two_pi);
        re.add(mag * std::cos(angle));
        im.add(mag * std::sin(angle));
    };
    for (long n = peak; n >= 0; --n) {
        const double lm = log_mag(n);
        if (lm < cutoff) {
            break;
        }
        add_term(n, lm);
    }
    for (long n = peak + 1; n <= n_max; ++n) {
        const double lm = log_mag(n);
        if (lm < cutoff) {
            break;
        }
        add_term(n, lm);
    }
    const cplx out{re.value(), im.value()};
    if (!std::isfinite(out.real()) || !std::isfinite(out.imag())) {
        throw std::overflow_error("amplitude_series: non-finite result");
    }
    return out;
}

/// Exact amplitude: series for t_d > 0, closed-form memoryless limit at t_d = 0.
inline cplx amplitude_exact(const ModelParams& params, double t) {
    if (params.t_d() == 0.0) {
        return lindblad_amplitude(params.gamma(), params.phi_canonical(), t);
    }
    return amplitude_series(params, t);
}

/**
 * eps(t) sampled on a mesh of step t_d / K, with segment boundaries m * t_d as
 * exact nodes. Alongside the values it keeps the right-sided derivative at
 * every node, which gives a C1 piecewise-cubic (Hermite) interpolant.
 *
 * When t_d = 0 the mesh step is (1/gamma) / K and values are the closed-form
 * memoryless amplitude.
 */
class AmplitudeTrajectory {
public:
    const ModelParams& params() const noexcept { return params_; }
    int mesh_per_delay() const noexcept { return mesh_per_delay_; }
    double step() const noexcept { return step_; }
    std::size_t size() const noexcept { return values_.size(); }
    double horizon() const noexcept { return values_.empty() ? 0.0 : time(values_.size() - 1); }

    const std::vector<cplx>& values() const noexcept { return values_; }
    cplx value(std::size_t i) const { return values_.at(i); }

    /// Node time; multiples of t_d are reproduced as m * t_d.
    double time(std::size_t i) const noexcept {
        if (params_.t_d() == 0.0) {
            return static_cast<double>(i) * step_;
        }
        const auto k = static_cast<std::size_t>(mesh_per_delay_);
        return static_cast<double>(i / k) * params_.t_d() + static_cast<double>(i % k) * step_;
    }

    std::vector<double> times() const {
        std::vector<double> out(values_.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = time(i);
        }
        return out;
    }

    /// Derivative on interval i at its left node.
    cplx slope_right(std::size_t i) const noexcept { return slopes_[i]; }

    /// Derivative on interval i-1 at its right node (differs only at t = t_d).
    cplx slope_left(std::size_t i) const noexcept {
        if (params_.t_d() > 0.0 && i == static_cast<std::size_t>(mesh_per_delay_)) {
            return -0.5 * params_.gamma() * values_[i];
        }
        return slopes_[i];
    }

    /// Hermite interpolant on interval [i, i+1] at fraction s in [0, 1].
    cplx interpolate(std::size_t i, double s) const noexcept {
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        const double h10 = s3 - 2.0 * s2 + s;
        const double h01 = -2.0 * s3 + 3.0 * s2;
        const double h11 = s3 - s2;
        return h00 * values_[i] + (h10 * step_) * slopes_[i] + h01 * values_[i + 1] +
               (h11 * step_) * slope_left(i + 1);
    }

    /// eps at an arbitrary time inside [0, horizon()].
    cplx value_at(double t) const {
        if (!(t >= 0.0) || t > horizon()) {
            throw std::out_of_range("AmplitudeTrajectory::value_at: t outside the mesh");
        }
        const auto [i, s] = locate(t);
        return interpolate(i, s);
    }

    /// Interval index and fraction for time t (clamped to the mesh).
    std::pair<std::size_t, double> locate(double t) const noexcept {
        const std::size_t last = values_.size() - 2;
        std::size_t i = 0;
        if (params_.t_d() == 0.0) {
            i = static_cast<std::size_t>(std::max(0.0, std::floor(t / step_)));
        } else {
            const double td = params_.t_d();
            const auto m = static_cast<std::size_t>(std::max(0.0, std::floor(t / td)));
            const double r = t - static_cast<double>(m) * td;
            auto j = static_cast<std::size_t>(std::max(0.0, std::floor(r / step_)));
            j = std::min(j, static_cast<std::size_t>(mesh_per_delay_ - 1));
            i = m * static_cast<std::size_t>(mesh_per_delay_) + j;
        }
        i = std::min(i, last);
        const double s = std::clamp((t - time(i)) / step_, 0.0, 1.0);
        return {i, s};
    }

private:
    friend class MethodOfSteps;

    AmplitudeTrajectory(ModelParams params, int mesh_per_delay, double step)
        : params_(params), mesh_per_delay_(mesh_per_delay), step_(step) {}

    ModelParams params_;
    int mesh_per_delay_;
    double step_;
    std::vector<cplx> values_;
    std::vector<cplx> slopes_;
};

/**
 * Method-of-steps integrator for the delay equation.
 *
 * On segment [m t_d, (m+1) t_d] the delayed amplitude is already known: it is
 * the analytic pure decay e^{-gamma t/2} for m = 1 and the stored previous
 * segment otherwise. Each step is classical RK4 with step t_d / K, so the
 * delayed node values are mesh nodes and only the half-step stage needs the
 * cubic Hermite interpolant of the previous segment.
 *
 * The trajectory can be extended repeatedly with advance_to().
 */
class MethodOfSteps {
public:
    /// Nodes beyond this count are refused with std::length_error.
    static constexpr std::size_t default_max_nodes = 40'000'000;

    MethodOfSteps(const ModelParams& params, int mesh_per_delay,
                  std::size_t max_nodes = default_max_nodes)
        : traj_(params, mesh_per_delay, mesh_step(params, mesh_per_delay)), max_nodes_(max_nodes) {
        traj_.values_.push_back(1.0);
        traj_.slopes_.push_back(params.t_d() == 0.0 ? lindblad_rate(params)
                                                    : cplx(-0.5 * params.gamma()));
    }

    const AmplitudeTrajectory& trajectory() const& noexcept { return traj_; }
    AmplitudeTrajectory take() && { return std::move(traj_); }

    /// Number of nodes needed so that the last node time is >= horizon.
    std::size_t nodes_for(double horizon) const {
        const double approx = std::ceil(horizon / traj_.step_);
        if (!(approx < static_cast<double>(max_nodes_))) {
            throw std::length_error("MethodOfSteps: horizon needs more than " +
                                    std::to_string(max_nodes_) + " mesh nodes");
        }
        auto last = static_cast<std::size_t>(std::max(0.0, approx));
        while (last > 0 && traj_.time(last - 1) >= horizon) {
            --last;
        }
        while (traj_.time(last) < horizon) {
            ++last;
        }
        return std::max<std::size_t>(last + 1, 2);
    }

    bool nodes_fit(double horizon) const noexcept {
        return std::ceil(horizon / traj_.step_) + 2.0 < static_cast<double>(max_nodes_);
    }

    /// Extend the mesh so that it covers [0, horizon].
    void advance_to(double horizon) {
        if (!std::isfinite(horizon) || !(horizon > 0.0)) {
            throw std::invalid_argument("MethodOfSteps: horizon must be finite and > 0");
        }
        const std::size_t target = nodes_for(horizon);
        if (target <= traj_.values_.size()) {
            return;
        }
        traj_.values_.reserve(target);
        traj_.slopes_.reserve(target);
        if (traj_.params_.t_d() == 0.0) {
            fill_memoryless(target);
        } else {
            fill_delayed(target);
        }
    }

private:
    static double mesh_step(const ModelParams& params, int mesh_per_delay) {
        if (mesh_per_delay < min_mesh_per_delay) {
            throw std::invalid_argument("MethodOfSteps: mesh_per_delay must be >= " +
                                        std::to_string(min_mesh_per_delay));
        }
        const double unit = params.t_d() > 0.0 ? params.t_d() : 1.0 / params.gamma();
        return unit / static_cast<double>(mesh_per_delay);
    }

    static cplx lindblad_rate(const ModelParams& p) {
        return 0.5 * p.gamma() * (p.feedback_phase() - 1.0);
    }

    void fill_memoryless(std::size_t target) {
        const auto& p = traj_.params_;
        const cplx rate = lindblad_rate(p);
        for (std::size_t i = traj_.values_.size(); i < target; ++i) {
            const cplx v = lindblad_amplitude(p.gamma(), p.phi_canonical(), traj_.time(i));
            traj_.values_.push_back(v);
            traj_.slopes_.push_back(detail::cmul(rate, v));
        }
    }

    void fill_delayed(std::size_t target) {
        const auto& p = traj_.params_;
        const auto k = static_cast<std::size_t>(traj_.mesh_per_delay_);
        const double half_gamma = 0.5 * p.gamma();
        const cplx coupling = half_gamma * p.feedback_phase();
        const double h = traj_.step_;
        auto& y = traj_.values_;
        auto& dy = traj_.slopes_;

        // Segment 0 is pure decay; node k carries the right-sided slope.
        while (y.size() < target && y.size() <= k) {
            const std::size_t i = y.size();
            const cplx v = std::exp(-half_gamma * traj_.time(i));
            y.push_back(v);
            dy.push_back(i < k ? -half_gamma * v : -half_gamma * v + coupling);
        }

        const auto rhs = [&](cplx value, cplx delayed) {
            return -half_gamma * value + detail::cmul(coupling, delayed);
        };

        for (std::size_t i = y.size() - 1; i + 1 < target; ++i) {
            const std::size_t j = i - k;  // delayed interval
            cplx d0;
            cplx dm;
            cplx d1;
            if (j < k) {
                const double tj = traj_.time(j);
                d0 = std::exp(-half_gamma * tj);
                dm = std::exp(-half_gamma * (tj + 0.5 * h));
                d1 = std::exp(-half_gamma * traj_.time(j + 1));
            } else {
                d0 = y[j];
                d1 = y[j + 1];
                dm = 0.5 * (d0 + d1) + (0.125 * h) * (dy[j] - traj_.slope_left(j + 1));
            }
            const cplx yi = y[i];
            const cplx k1 = rhs(yi, d0);
            const cplx k2 = rhs(yi + (0.5 * h) * k1, dm);
            const cplx k3 = rhs(yi + (0.5 * h) * k2, dm);
            const cplx k4 = rhs(yi + h * k3, d1);
            const cplx next = yi + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
            y.push_back(next);
            dy.push_back(rhs(next, d1));
        }
    }

    AmplitudeTrajectory traj_;
    std::size_t max_nodes_;
};

/// Integrate eps on [0, horizon] with K = mesh_per_delay steps per delay.
inline AmplitudeTrajectory amplitude_mos(const ModelParams& params, double horizon,
                                         int mesh_per_delay = default_mesh_per_delay) {
    MethodOfSteps mos(params, mesh_per_delay);
    mos.advance_to(horizon);
    return std::move(mos).take();
}

}  // namespace mirrornm
