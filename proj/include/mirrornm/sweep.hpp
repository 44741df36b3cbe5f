/**
 * @file sweep.hpp
 * @brief Phase diagram of the non-Markovianity measure over (phi, gamma t_d)
 *        and the Markovian / non-Markovian threshold curve.
 *
 * All work is done in rescaled units (gamma = 1). Cells are independent; they
 * are split statically across worker threads (cell c goes to worker c mod W)
 * and every worker writes only its own cells, so the output does not depend
 * on the worker count.
 */
#pragma once

#include "mirrornm/core.hpp"
#include "mirrornm/nonmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mirrornm {

struct ComputeOptions {
    NMOptions nm{};
    unsigned workers = 1;
};

struct CellDiagnostics {
    double horizon = 0.0;
    double truncation_bound = 0.0;
    int mesh_per_delay = 0;
    bool converged = false;
    std::string error;
};

/// Measure N on a (gamma t_d) x phi grid; row = gamma t_d, column = phi.
struct SweepGrid {
    std::vector<double> phi_values;
    std::vector<double> gtd_values;
    std::vector<double> measures;
    std::vector<CellDiagnostics> diagnostics;
    double classify_tol = 0.0;

    std::size_t rows() const noexcept { return gtd_values.size(); }
    std::size_t cols() const noexcept { return phi_values.size(); }
    double at(std::size_t row, std::size_t col) const { return measures.at(row * cols() + col); }
    const CellDiagnostics& diag(std::size_t row, std::size_t col) const {
        return diagnostics.at(row * cols() + col);
    }
    std::size_t non_converged() const noexcept {
        return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                      [](const auto& d) { return !d.converged; }));
    }
};

/// n evenly spaced points on [lo, hi], both ends included.
inline std::vector<double> linear_axis(double lo, double hi, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("linear_axis: n must be >= 1");
    }
    if (n == 1) {
        return {lo};
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    out.back() = hi;
    return out;
}

inline std::vector<double> log_axis(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0 && hi >= lo)) {
        throw std::invalid_argument("log_axis: need 0 < lo <= hi");
    }
    auto out = linear_axis(std::log(lo), std::log(hi), n);
    for (auto& v : out) {
        v = std::exp(v);
    }
    out.front() = lo;
    if (n > 1) {
        out.back() = hi;
    }
    return out;
}

inline std::vector<double> default_phi_axis() { return linear_axis(0.0, two_pi, 81); }
inline std::vector<double> default_gtd_axis() { return log_axis(0.02, 30.0, 60); }

namespace detail {

inline void check_sorted(const std::vector<double>& axis, const char* what) {
    if (axis.empty()) {
        throw std::invalid_argument(std::string(what) + " axis is empty");
    }
    if (!std::is_sorted(axis.begin(), axis.end())) {
        throw std::invalid_argument(std::string(what) + " axis is not sorted");
    }
    for (double v : axis) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + " axis has a non-finite entry");
        }
    }
}

// Run task(i) for i in [0, n) on `workers` threads; worker w takes i = w, w + W, ...
inline void parallel_cells(std::size_t n, unsigned workers,
                           const std::function<void(std::size_t)>& task) {
    const unsigned w_count =
        std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (w_count == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            task(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(w_count);
    for (unsigned w = 0; w < w_count; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += w_count) {
                task(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

}  // namespace detail

/**
 * N at every (gamma t_d, phi) cell. A cell whose tail did not converge, or
 * whose computation threw, keeps converged = false in its diagnostics; a
 * thrown cell stores NaN as its measure.
 */
inline SweepGrid sweep_measure(const std::vector<double>& phi_axis,
                               const std::vector<double>& gtd_axis,
                               const ComputeOptions& options = {}) {
    detail::check_sorted(phi_axis, "phi");
    detail::check_sorted(gtd_axis, "gamma t_d");
    if (phi_axis.front() < 0.0 || phi_axis.back() > two_pi) {
        throw std::invalid_argument("sweep_measure: phi axis must lie in [0, 2 pi]");
    }
    if (!(gtd_axis.front() > 0.0)) {
        throw std::invalid_argument("sweep_measure: gamma t_d axis must be > 0");
    }

    SweepGrid grid;
    grid.phi_values = phi_axis;
    grid.gtd_values = gtd_axis;
    grid.classify_tol = options.nm.classify_tol;
    const std::size_t n = phi_axis.size() * gtd_axis.size();
    grid.measures.assign(n, 0.0);
    grid.diagnostics.assign(n, {});

    detail::parallel_cells(n, options.workers, [&](std::size_t c) {
        const std::size_t row = c / phi_axis.size();
        const std::size_t col = c % phi_axis.size();
        CellDiagnostics& d = grid.diagnostics[c];
        try {
            const NMResult r = nm_measure(ModelParams::rescaled(gtd_axis[row], phi_axis[col]),
                                          options.nm);
            grid.measures[c] = r.measure;
            d.horizon = r.horizon_used;
            d.truncation_bound = r.truncation_bound;
            d.mesh_per_delay = r.mesh_per_delay;
            d.converged = r.converged;
        } catch (const std::exception& e) {
            grid.measures[c] = std::numeric_limits<double>::quiet_NaN();
            d.converged = false;
            d.error = e.what();
        }
    });
    return grid;
}

/// Number of Markovian / non-Markovian verdict changes along a sequence of measures.
inline int count_verdict_flips(const std::vector<double>& measures, double classify_tol) {
    int flips = 0;
    for (std::size_t i = 1; i < measures.size(); ++i) {
        if ((measures[i] > classify_tol) != (measures[i - 1] > classify_tol)) {
            ++flips;
        }
    }
    return flips;
}

/// Columns of the grid whose verdict changes more than once along gamma t_d.
inline std::vector<std::size_t> multi_flip_columns(const SweepGrid& grid) {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < grid.cols(); ++c) {
        std::vector<double> column(grid.rows());
        for (std::size_t r = 0; r < grid.rows(); ++r) {
            column[r] = grid.at(r, c);
        }
        if (count_verdict_flips(column, grid.classify_tol) > 1) {
            out.push_back(c);
        }
    }
    return out;
}

enum class ThresholdStatus {
    ok,
    /// Still Markovian at gtd_max: no threshold below gtd_max.
    not_bracketed,
    /// Probing along gamma t_d found more than one verdict change.
    multi_flip,
    failed,
};

inline const char* to_string(ThresholdStatus s) noexcept {
    switch (s) {
        case ThresholdStatus::ok: return "ok";
        case ThresholdStatus::not_bracketed: return "not_bracketed";
        case ThresholdStatus::multi_flip: return "multi_flip";
        case ThresholdStatus::failed: return "failed";
    }
    return "unknown";
}

struct ThresholdOptions {
    double gtd_max = 5.0;
    double bisection_tol = 0.01;
    NMOptions nm{};
    /// Extra log-spaced verdict probes on [gtd_max/250, gtd_max] to detect multiple flips; 0 disables.
    int probe_points = 8;
    unsigned workers = 1;
};

/// Per-phase critical gamma t_d; critical = midpoint of the final bracket [lower, upper].
struct ThresholdCurve {
    std::vector<double> phi_values;
    std::vector<double> critical_gtd;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<ThresholdStatus> status;
    std::vector<std::string> message;
    double bisection_tol = 0.0;
    double gtd_max = 0.0;
    double classify_tol = 0.0;
};

/**
 * Bisect on gamma t_d in (0, gtd_max] for the first non-Markovian verdict at
 * each phase. Assumes a single verdict change per phase; the optional probes
 * flag phases where that assumption visibly fails.
 */
inline ThresholdCurve threshold_curve(const std::vector<double>& phi_axis,
                                      const ThresholdOptions& options = {}) {
    detail::check_sorted(phi_axis, "phi");
    if (!(options.gtd_max > 0.0) || !(options.bisection_tol > 0.0)) {
        throw std::invalid_argument("threshold_curve: gtd_max and bisection_tol must be > 0");
    }
    ThresholdCurve curve;
    const std::size_t n = phi_axis.size();
    curve.phi_values = phi_axis;
    curve.critical_gtd.assign(n, std::numeric_limits<double>::quiet_NaN());
    curve.lower.assign(n, 0.0);
    curve.upper.assign(n, options.gtd_max);
    curve.status.assign(n, ThresholdStatus::ok);
    curve.message.assign(n, {});
    curve.bisection_tol = options.bisection_tol;
    curve.gtd_max = options.gtd_max;
    curve.classify_tol = options.nm.classify_tol;

    detail::parallel_cells(n, options.workers, [&](std::size_t i) {
        const double phi = phi_axis[i];
        const auto markovian = [&](double gtd) {
            return is_markovian(ModelParams::rescaled(gtd, phi), options.nm);
        };
        try {
            if (markovian(options.gtd_max)) {
                curve.status[i] = ThresholdStatus::not_bracketed;
                curve.message[i] = "Markovian at gtd_max";
                return;
            }
            double lo = 0.0;
            double hi = options.gtd_max;
            while (hi - lo > options.bisection_tol) {
                const double mid = 0.5 * (lo + hi);
                if (markovian(mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            curve.lower[i] = lo;
            curve.upper[i] = hi;
            curve.critical_gtd[i] = 0.5 * (lo + hi);

            if (options.probe_points > 1) {
                const auto probes = log_axis(options.gtd_max / 250.0, options.gtd_max,
                                             static_cast<std::size_t>(options.probe_points));
                int flips = 0;
                bool prev = markovian(probes.front());
                for (std::size_t p = 1; p < probes.size(); ++p) {
                    const bool cur = markovian(probes[p]);
                    flips += cur != prev ? 1 : 0;
                    prev = cur;
                }
                if (flips > 1) {
                    curve.status[i] = ThresholdStatus::multi_flip;
                    curve.message[i] = std::to_string(flips) + " verdict changes along gamma t_d";
                }
            }
        } catch (const std::exception& e) {
            curve.status[i] = ThresholdStatus::failed;
            curve.message[i] = e.what();
        }
    });
    return curve;
}

}  // namespace mirrornm
