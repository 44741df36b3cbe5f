/**
 * @file nonmarkov.hpp
 * @brief Markovianity criterion and geometric non-Markovianity measure for the
 *        amplitude-damping dynamics of the emitter.
 *
 * For the amplitude-damping map the volume of accessible Bloch-ball states is
 * |eps|^4 (relative to t = 0), and the measure is the total increase of that
 * volume over every interval where it grows. Growth of |eps|^4 happens exactly
 * where d|eps|^2/dt > 0, which is evaluated in closed form from the delay
 * equation rather than by finite differences.
 */
#pragma once

#include "mirrornm/core.hpp"
#include "mirrornm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mirrornm {

/// Volume of accessible states, |eps|^4.
inline double volume(cplx eps) noexcept {
    const double p = std::norm(eps);
    return p * p;
}

/**
 * d|eps|^2/dt = -gamma |eps|^2 + gamma Re[e^{i phi} eps(t - t_d) conj(eps(t))].
 * Pass eps_delayed = 0 for t < t_d.
 */
inline double d_eps2_dt(const ModelParams& params, cplx eps_now, cplx eps_delayed) noexcept {
    const cplx fed = detail::cmul(params.feedback_phase(), eps_delayed);
    const double overlap = fed.real() * eps_now.real() + fed.imag() * eps_now.imag();
    return params.gamma() * (overlap - std::norm(eps_now));
}

/// Maximal interval on which |eps|^4 increases.
struct GrowthInterval {
    double start = 0.0;
    double end = 0.0;
    double volume_gain = 0.0;
};

struct NMOptions {
    /// Initial horizon in units of time; 0 selects max(40/gamma, 10 t_d).
    double horizon = 0.0;
    /// Steps per delay; 0 selects auto_mesh_per_delay().
    int mesh_per_delay = 0;
    double classify_tol = 1e-6;
    /// Double the horizon until the tail is resolved (or max_horizon is hit).
    bool adaptive_horizon = true;
    /// In units of 1/gamma.
    double max_horizon = 2e5;
    std::size_t max_nodes = MethodOfSteps::default_max_nodes;
    /// Time resolution of sign-change refinement, as a fraction of t_d.
    double root_resolution = 1e-6;
    /// Stop extending the horizon once the measure exceeds classify_tol.
    bool stop_when_non_markovian = false;
};

struct NMResult {
    ModelParams params;
    double measure = 0.0;
    std::vector<GrowthInterval> intervals;
    /// Total decrease of |eps|^4 over the non-growing pieces.
    double volume_loss = 0.0;
    /// |eps(horizon_used)|^4
    double final_volume = 1.0;
    double horizon_used = 0.0;
    double truncation_bound = 0.0;
    bool markovian = true;
    bool converged = true;
    int mesh_per_delay = 0;
    double classify_tol = 0.0;

    double measure_upper() const noexcept { return measure + truncation_bound; }
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maximum mesh step (in units of 1/gamma) used by the automatic mesh choice.
inline constexpr double auto_mesh_step = 0.02;

/**
 * Steps per delay chosen so that the step is at most auto_mesh_step / gamma,
 * clamped to [16, 512]. Short delays therefore do not force microscopic
 * steps over long horizons.
 */
inline int auto_mesh_per_delay(const ModelParams& params) {
    const double gtd = params.dimensionless_delay();
    const double k = std::ceil(gtd / auto_mesh_step);
    return static_cast<int>(
        std::clamp(k, double(min_mesh_per_delay), double(default_mesh_per_delay)));
}

namespace detail {

struct GrowthScan {
    std::vector<GrowthInterval> intervals;
    double gain = 0.0;
    double loss = 0.0;
    double final_volume = 1.0;
};

// d|eps|^2/dt on interval i at fraction s, using the same one-sided branch
// of theta(t - t_d) as the interval itself.
inline double interval_rate(const AmplitudeTrajectory& traj, std::size_t i, double s) {
    const ModelParams& p = traj.params();
    const cplx now = traj.interpolate(i, s);
    if (p.t_d() == 0.0) {
        return d_eps2_dt(p, now, now);
    }
    const auto k = static_cast<std::size_t>(traj.mesh_per_delay());
    const cplx delayed = i >= k ? traj.interpolate(i - k, s) : cplx(0.0);
    return d_eps2_dt(p, now, delayed);
}

inline GrowthScan scan_growth(const AmplitudeTrajectory& traj, double time_resolution) {
    GrowthScan out;
    const std::size_t n = traj.size();
    if (n < 2) {
        return out;
    }
    const double h = traj.step();

    bool growing = false;
    double piece_start_t = 0.0;
    double piece_start_v = volume(traj.value(0));

    const auto close_piece = [&](double t, double v) {
        const double delta = v - piece_start_v;
        if (growing && delta > 0.0) {
            out.intervals.push_back({piece_start_t, t, delta});
            out.gain += delta;
        } else {
            out.loss -= delta;
        }
        piece_start_t = t;
        piece_start_v = v;
        growing = !growing;
    };

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const bool up_left = interval_rate(traj, i, 0.0) > 0.0;
        if (up_left != growing) {
            close_piece(traj.time(i), volume(traj.values()[i]));
        }
        const bool up_right = interval_rate(traj, i, 1.0) > 0.0;
        if (up_right != up_left) {
            double lo = 0.0;
            double hi = 1.0;
            while ((hi - lo) * h > time_resolution) {
                const double mid = 0.5 * (lo + hi);
                if ((interval_rate(traj, i, mid) > 0.0) == up_left) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            const double s = 0.5 * (lo + hi);
            close_piece(traj.time(i) + s * h, volume(traj.interpolate(i, s)));
        }
    }
    const double v_end = volume(traj.values()[n - 1]);
    // Flip once more so that close_piece books the final piece under its own sign.
    close_piece(traj.time(n - 1), v_end);
    out.final_volume = v_end;
    return out;
}

struct TailStatus {
    double envelope = 0.0;
    bool converged = false;
    double truncation_bound = 0.0;
};

inline double trapped_value(const ModelParams& p) { return 1.0 / (1.0 + 0.5 * p.dimensionless_delay()); }

// Inspect |eps|^4 over the last max(t_d, 1/gamma) of the trajectory.
inline TailStatus tail_status(const AmplitudeTrajectory& traj, double classify_tol) {
    const ModelParams& p = traj.params();
    const double window = std::max(p.t_d(), 1.0 / p.gamma());
    const double t_end = traj.horizon();
    const double target = classify_tol * 1e-2;
    TailStatus st;
    if (p.bound_state()) {
        const double trap4 = std::pow(trapped_value(p), 4);
        for (std::size_t i = traj.size(); i-- > 0 && traj.time(i) >= t_end - window;) {
            st.envelope = std::max(st.envelope, std::abs(volume(traj.values()[i]) - trap4));
        }
        st.converged = st.envelope < target;
        st.truncation_bound = 2.0 * st.envelope;
        return st;
    }

    std::size_t first = traj.size() - 1;
    while (first > 0 && traj.time(first - 1) >= t_end - window) {
        --first;
    }
    const std::size_t last = traj.size() - 1;
    for (std::size_t i = first; i <= last; ++i) {
        st.envelope = std::max(st.envelope, volume(traj.values()[i]));
    }
    if (st.envelope < target) {
        st.converged = true;
        return st;
    }

    // Near phi = 2 n pi a single slow mode survives long after every other
    // one has died out. Once |eps|^4 follows that exponential to within the
    // target, no further growth is possible.
    const double v0 = volume(traj.values()[first]);
    const double v1 = volume(traj.values()[last]);
    if (last > first && v0 > 0.0 && v1 > 0.0 && v1 <= v0) {
        const double t0 = traj.time(first);
        const double rate = std::log(v1 / v0) / (traj.time(last) - t0);
        double dev = 0.0;
        for (std::size_t i = first; i <= last; ++i) {
            const double env = v0 * std::exp(rate * (traj.time(i) - t0));
            dev = std::max(dev, std::abs(volume(traj.values()[i]) - env));
        }
        if (dev < target) {
            st.converged = true;
            st.truncation_bound = 2.0 * dev;
            return st;
        }
    }
    st.truncation_bound = st.envelope;
    return st;
}

}  // namespace detail

/**
 * Non-Markovianity measure N: sum of |eps(b)|^4 - |eps(a)|^4 over the maximal
 * growth intervals [a, b] of |eps|^4.
 *
 * Interval endpoints are sign changes of d|eps|^2/dt, bracketed on the mesh
 * and refined by bisection. Nodes at multiples of t_d act as brackets too,
 * since the derivative jumps there. The horizon is doubled until |eps|^4 over
 * the last delay segment is below classify_tol / 100 (or, for a bound state,
 * until it has settled within that distance of the trapped value). Hitting
 * max_horizon yields converged = false with a nonzero truncation_bound.
 */
inline NMResult nm_measure(const ModelParams& params, const NMOptions& opts = {}) {
    if (!(opts.classify_tol > 0.0)) {
        throw std::invalid_argument("nm_measure: classify_tol must be > 0");
    }
    if (opts.horizon < 0.0 || !std::isfinite(opts.horizon)) {
        throw std::invalid_argument("nm_measure: horizon must be finite and >= 0");
    }
    const double gamma = params.gamma();
    const int k = opts.mesh_per_delay > 0 ? opts.mesh_per_delay : auto_mesh_per_delay(params);
    const double max_horizon = opts.max_horizon / gamma;
    double horizon =
        opts.horizon > 0.0 ? opts.horizon : std::max(40.0 / gamma, 10.0 * params.t_d());
    const double resolution =
        opts.root_resolution * (params.t_d() > 0.0 ? params.t_d() : 1.0 / gamma);

    MethodOfSteps mos(params, k, opts.max_nodes);
    NMResult res{.params = params, .intervals = {}};
    res.mesh_per_delay = k;
    res.classify_tol = opts.classify_tol;

    while (true) {
        mos.advance_to(horizon);
        const auto& traj = mos.trajectory();
        const auto tail = detail::tail_status(traj, opts.classify_tol);
        const bool can_extend = opts.adaptive_horizon && 2.0 * horizon <= max_horizon &&
                                mos.nodes_fit(2.0 * horizon);

        const bool need_scan = tail.converged || !can_extend || opts.stop_when_non_markovian;
        detail::GrowthScan scan;
        if (need_scan) {
            scan = detail::scan_growth(traj, resolution);
        }
        const bool proven_nm = opts.stop_when_non_markovian && scan.gain > opts.classify_tol;
        if (tail.converged || !can_extend || proven_nm) {
            res.measure = scan.gain;
            res.intervals = std::move(scan.intervals);
            res.volume_loss = scan.loss;
            res.final_volume = scan.final_volume;
            res.horizon_used = traj.horizon();
            res.truncation_bound = tail.truncation_bound;
            res.converged = tail.converged;
            break;
        }
        horizon *= 2.0;
    }
    res.markovian =
        res.measure <= opts.classify_tol && res.truncation_bound <= opts.classify_tol;
    return res;
}

/**
 * Markovian verdict: no growth of |eps| beyond classify_tol in the measure,
 * with the unresolved tail also below classify_tol. Throws ConvergenceError
 * when the tail cannot be resolved and no growth has been found.
 */
inline bool is_markovian(const ModelParams& params, NMOptions opts = {}) {
    opts.stop_when_non_markovian = true;
    const NMResult r = nm_measure(params, opts);
    if (r.measure > opts.classify_tol) {
        return false;
    }
    if (r.truncation_bound > opts.classify_tol) {
        throw ConvergenceError("is_markovian: tail not resolved by horizon " +
                               std::to_string(r.horizon_used) + " (truncation bound " +
                               std::to_string(r.truncation_bound) + ")");
    }
    return true;
}

/// One summand m^{4m} e^{-4m} / (m!)^4 of the large-delay measure, in log space.
inline double asymptotic_term(int m) {
    if (m < 1) {
        throw std::invalid_argument("asymptotic_term: m must be >= 1");
    }
    const double md = m;
    return std::exp(4.0 * (md * std::log(md) - md - std::lgamma(md + 1.0)));
}

struct AsymptoticMeasure {
    double value = 0.0;
    /// Upper bound on the omitted terms m > m_max: each is below (2 pi m)^-2.
    double tail_bound = 0.0;
};

/// Partial sum of the large-delay measure up to m_max.
inline AsymptoticMeasure asymptotic_measure(int m_max) {
    if (m_max < 1) {
        throw std::invalid_argument("asymptotic_measure: m_max must be >= 1");
    }
    detail::CompensatedSum s;
    for (int m = 1; m <= m_max; ++m) {
        s.add(asymptotic_term(m));
    }
    constexpr double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    return {s.value(), 1.0 / (four_pi2 * m_max)};
}

/**
 * Large-delay approximation of |eps(t)|^4: only the last non-zero series term
 * on [m t_d, (m+1) t_d]. Phase independent; peaks at t = m t_d + 2m/gamma.
 */
inline double asymptotic_eps4(const ModelParams& params, double t) {
    if (!std::isfinite(t) || t < 0.0) {
        throw std::invalid_argument("asymptotic_eps4: t must be finite and >= 0");
    }
    const double gamma = params.gamma();
    const double t_d = params.t_d();
    if (!(t_d > 0.0)) {
        return std::exp(-2.0 * gamma * t);
    }
    auto m = static_cast<long>(std::floor(t / t_d));
    while (m > 0 && t - static_cast<double>(m) * t_d < 0.0) {
        --m;
    }
    if (m == 0) {
        return std::exp(-2.0 * gamma * t);
    }
    const double md = static_cast<double>(m);
    const double x = t - md * t_d;
    if (x <= 0.0) {
        return 0.0;
    }
    const double log_coupling = std::log(0.5 * gamma) + 0.5 * gamma * t_d;
    const double log_val =
        4.0 * (md * log_coupling - std::lgamma(md + 1.0) + md * std::log(x)) - 2.0 * gamma * t;
    return std::exp(log_val);
}

struct TrappedAmplitude {
    double value = 1.0;
    /// False when the canonical phase is not 0; value is then only formal.
    bool bound_state = true;
};

/// Long-time amplitude 1 / (1 + gamma t_d / 2) left in the atom when phi = 2 n pi.
inline TrappedAmplitude trapped_amplitude(const ModelParams& params) noexcept {
    return {detail::trapped_value(params), params.bound_state()};
}

}  // namespace mirrornm
