// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "mirrornm/mirrornm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

using namespace mirrornm;

namespace {

constexpr double pi = std::numbers::pi;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + ("violated: " + what);
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

unsigned hardware_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v.pass = false;
        v.note(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= budget_s) {
        v.pass = false;
        v.note("runtime " + fmt("%.2f", secs) + " s over budget " + fmt("%.0f", budget_s) + " s");
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s [%.2f s / %.0f s]\n", v.pass ? "PASS" : "FAIL", id, title,
                v.detail.c_str(), secs, budget_s);
    std::fflush(stdout);
}

// Time of the largest |eps|^4 on (m t_d, (m+1) t_d), from the series, to ~1e-9.
double spike_time(const ModelParams& p, int m) {
    const auto f = [&](double t) { return volume(amplitude_series(p, t)); };
    const double a = m * p.t_d();
    const double b = (m + 1) * p.t_d();
    const int n = 4000;
    double best_t = a;
    double best_v = -1.0;
    for (int i = 1; i < n; ++i) {
        const double t = a + (b - a) * i / n;
        if (const double v = f(t); v > best_v) {
            best_v = v;
            best_t = t;
        }
    }
    double lo = best_t - (b - a) / n;
    double hi = best_t + (b - a) / n;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    while (hi - lo > 1e-9) {
        const double x1 = hi - g * (hi - lo);
        const double x2 = lo + g * (hi - lo);
        (f(x1) < f(x2) ? lo : hi) = f(x1) < f(x2) ? x1 : x2;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

int main() {
    const AsymptoticMeasure a50 = asymptotic_measure(50);

    criterion(1, "asymptotic measure", 1.0, [&] {
        Verdict v;
        v.note("asymptotic_measure(50) = " + fmt("%.6f", a50.value));
        v.require(a50.value >= 0.028 && a50.value <= 0.038, "value in [0.028, 0.038]");
        return v;
    });

    criterion(2, "large-delay convergence", 60.0, [&] {
        Verdict v;
        std::vector<double> values;
        std::string list;
        for (double phi : {0.0, pi / 4, pi / 2, pi}) {
            const NMResult r = nm_measure(ModelParams::rescaled(20.0, phi));
            values.push_back(r.measure);
            list += (list.empty() ? "" : ", ") + fmt("%.6f", r.measure);
            v.require(r.converged, "converged at phi = " + fmt("%.4f", phi));
            v.require(std::abs(r.measure - a50.value) <= 0.005,
                      "|N - asymptotic| <= 0.005 at phi = " + fmt("%.4f", phi));
        }
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        v.note("N(gtd=20; phi=0,pi/4,pi/2,pi) = {" + list + "}, spread " + fmt("%.2e", *hi - *lo));
        v.require(*hi - *lo < 0.002, "spread < 0.002");
        return v;
    });

    criterion(3, "threshold curve", 300.0, [&] {
        Verdict v;
        ThresholdOptions opts;
        opts.bisection_tol = 0.01;
        const auto phi = linear_axis(0.0, two_pi, 41);
        const ThresholdCurve c = threshold_curve(phi, opts);
        const double at_half_pi = c.critical_gtd[10];
        const double at_zero = c.critical_gtd[0];
        v.note("critical gtd at pi/2 = " + fmt("%.4f", at_half_pi) + ", at 0 = " +
               fmt("%.4f", at_zero) + ", at 2pi = " + fmt("%.4f", c.critical_gtd[40]));
        v.require(std::abs(phi[10] - pi / 2) < 1e-12, "axis contains pi/2");
        v.require(std::abs(at_half_pi - 1.4) <= 0.1, "pi/2 threshold = 1.4 +- 0.1");
        v.require(std::abs(at_zero) <= opts.bisection_tol, "phi = 0 threshold = 0 within 0.01");
        const auto bad = std::count_if(c.status.begin(), c.status.end(),
                                       [](auto s) { return s != ThresholdStatus::ok; });
        v.require(bad == 0, "every phase bracketed with a single verdict change");
        return v;
    });

    criterion(4, "global maximum of the phase diagram", 900.0, [&] {
        Verdict v;
        ComputeOptions opts;
        opts.workers = hardware_workers();
        const SweepGrid g = sweep_measure(default_phi_axis(), default_gtd_axis(), opts);
        const auto it = std::max_element(g.measures.begin(), g.measures.end());
        const auto idx = static_cast<std::size_t>(it - g.measures.begin());
        const std::size_t row = idx / g.cols();
        const std::size_t col = idx % g.cols();
        const double phi_at = g.phi_values[col];
        v.note("max N = " + fmt("%.5f", *it) + " at gtd = " + fmt("%.4f", g.gtd_values[row]) +
               ", phi = " + fmt("%.4f", phi_at) + ", " + std::to_string(g.rows()) + "x" +
               std::to_string(g.cols()) + " grid, " + std::to_string(opts.workers) + " workers");
        v.require(std::abs(*it - 0.07) <= 0.01, "max N = 0.07 +- 0.01");
        v.require(canonicalize_phase(phi_at) == 0.0 || std::abs(phi_at - two_pi) < 1e-12,
                  "maximum in the phi = 0 (mod 2pi) column");
        v.require(g.non_converged() == 0, "all cells converged");
        return v;
    });

    criterion(5, "bound-state trapping", 10.0, [&] {
        Verdict v;
        for (double gtd : {0.5, 1.0, 2.0}) {
            const auto traj = amplitude_mos(ModelParams::rescaled(gtd, 0.0), 300.0);
            const double last = std::abs(traj.value(traj.size() - 1));
            const double target = 1.0 / (1.0 + 0.5 * gtd);
            v.note("gtd " + fmt("%.1f", gtd) + ": |eps(300)| - trapped = " +
                   fmt("%.2e", last - target));
            v.require(std::abs(last - target) <= 1e-3, "within 1e-3 at gtd = " + fmt("%.1f", gtd));
        }
        return v;
    });

    criterion(6, "series vs method of steps", 60.0, [&] {
        Verdict v;
        double worst = 0.0;
        for (double gtd : {0.02, 0.2, 1.0, 5.0, 20.0}) {
            for (double phi : {0.0, pi / 4, pi / 2, pi, 3 * pi / 2}) {
                const ModelParams p = ModelParams::rescaled(gtd, phi);
                const auto traj = amplitude_mos(p, 30.0, 512);
                for (std::size_t i = 0; i < traj.size() && traj.time(i) <= 30.0; ++i) {
                    worst = std::max(worst,
                                     std::abs(traj.value(i) - amplitude_series(p, traj.time(i))));
                }
                // between nodes
                for (double t = 0.0; t <= 30.0; t += 0.0123) {
                    worst = std::max(worst, std::abs(traj.value_at(t) - amplitude_series(p, t)));
                }
            }
        }
        v.note("max |series - mos| over 25 points, t in [0, 30] = " + fmt("%.2e", worst));
        v.require(worst <= 1e-6, "max error <= 1e-6");
        return v;
    });

    criterion(7, "property suite", 120.0, [&] {
        Verdict v;
        std::mt19937_64 rng(424242);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_real_distribution<double> log_gtd(std::log(0.02), std::log(30.0));

        double sym = 0.0;
        double tele = 0.0;
        double max_abs = 0.0;
        double prefix = 0.0;
        for (int trial = 0; trial < 40; ++trial) {
            const double gtd = std::exp(log_gtd(rng));
            const double phi = pi * unit(rng);
            const NMResult a = nm_measure(ModelParams::rescaled(gtd, phi));
            const NMResult b = nm_measure(ModelParams::rescaled(gtd, two_pi - phi));
            sym = std::max(sym, std::abs(a.measure - b.measure));
            tele = std::max(tele, std::abs((a.measure - a.volume_loss) - (a.final_volume - 1.0)));

            const ModelParams p = ModelParams::rescaled(gtd, phi);
            const auto traj = amplitude_mos(p, std::max(30.0, 3.0 * gtd), 64);
            for (std::size_t i = 0; i < traj.size(); ++i) {
                max_abs = std::max(max_abs, std::abs(traj.value(i)));
                if (traj.time(i) <= gtd) {
                    prefix = std::max(prefix,
                                      std::abs(traj.value(i) - std::exp(-0.5 * traj.time(i))));
                    prefix = std::max(prefix, std::abs(amplitude_series(p, traj.time(i)) -
                                                       std::exp(-0.5 * traj.time(i))));
                }
            }
        }

        double compose = 0.0;
        for (int trial = 0; trial < 2000; ++trial) {
            const double ee = unit(rng);
            const QubitState rho(ee, std::polar(std::sqrt(ee * (1 - ee)) * unit(rng), two_pi * unit(rng)));
            const cplx e1 = std::polar(unit(rng), two_pi * unit(rng));
            const cplx e2 = std::polar(unit(rng), two_pi * unit(rng));
            const QubitState x = evolve_state(evolve_state(rho, Amplitude(e1)), Amplitude(e2));
            const QubitState y = evolve_state(rho, Amplitude(e1 * e2));
            compose = std::max({compose, std::abs(x.rho_ee() - y.rho_ee()),
                                std::abs(x.rho_ge() - y.rho_ge())});
        }

        double lindblad = 0.0;
        for (double phi : {0.5, pi / 2, pi, 4.0}) {
            const ModelParams p = ModelParams::rescaled(0.01, phi);
            for (double t = 0.0; t <= 20.0; t += 0.05) {
                lindblad = std::max(lindblad,
                                    std::abs(amplitude_exact(p, t) - lindblad_amplitude(1.0, phi, t)));
            }
        }

        v.note("symmetry " + fmt("%.1e", sym) + ", telescoping " + fmt("%.1e", tele) +
               ", max|eps| " + fmt("%.12f", max_abs) + ", prefix " + fmt("%.1e", prefix) +
               ", composition " + fmt("%.1e", compose) + ", Lindblad dev " + fmt("%.4f", lindblad));
        v.require(sym <= 1e-10, "N(phi) = N(2pi - phi)");
        v.require(tele <= 1e-12, "gains - losses = final - initial volume");
        v.require(max_abs <= 1.0 + 1e-12, "|eps| <= 1");
        v.require(prefix <= 1e-12, "pure decay on [0, t_d]");
        v.require(compose <= 1e-14, "composition law");
        v.require(lindblad <= 0.02, "Lindblad limit within 2% at gtd = 0.01");
        return v;
    });

    criterion(8, "spike positions at gtd = 20", 60.0, [&] {
        Verdict v;
        double worst = 0.0;
        for (double phi : {0.0, pi / 4, pi / 2, pi, 3 * pi / 2}) {
            const ModelParams p = ModelParams::rescaled(20.0, phi);
            for (int m = 1; m <= 3; ++m) {
                const double offset = spike_time(p, m) - m * 20.0;
                // relative to the predicted 2m/gamma lag behind the echo
                worst = std::max(worst, std::abs(offset - 2.0 * m) / (2.0 * m));
            }
        }
        v.note("max relative deviation of (t_peak - m t_d) from 2m = " + fmt("%.2e", worst));
        v.require(worst <= 0.01, "peaks at m t_d + 2m/gamma within 1%");
        return v;
    });

    std::printf("%s: %d of 8 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
