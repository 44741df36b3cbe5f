/**
 * @file cli.hpp
 * @brief Command-line front end: single-point amplitude and measure runs,
 *        phase-diagram sweeps, threshold curves and spectral densities,
 *        written as CSV or JSON.
 *
 * Times are reported in units of 1/gamma and detunings in units of gamma.
 *
 * CSV: first row is the header, comma separated, LF line endings, numbers
 * printed with 17 significant digits. The run configuration follows the data
 * as trailing "# key=value" comment lines.
 *
 * JSON: one object {"meta": {...}, "data": {...}}; "meta" echoes the
 * configuration and the tool version. The worker count is not echoed, so the
 * output is byte-identical for any number of workers.
 */
#pragma once

#include "mirrornm/core.hpp"
#include "mirrornm/nonmarkov.hpp"
#include "mirrornm/solver.hpp"
#include "mirrornm/spectrum.hpp"
#include "mirrornm/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef MIRRORNM_VERSION
#define MIRRORNM_VERSION "1.0.0"
#endif

namespace mirrornm::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_not_converged = 3;

/// Environment variable holding the default worker count.
inline constexpr const char* workers_env = "MIRRORNM_WORKERS";

/// amplitude: final time in units of 1/gamma when --horizon is not given.
inline constexpr double default_amplitude_horizon = 30.0;

enum class Subcommand { amplitude, measure, sweep, threshold, spectrum };
enum class Format { csv, json };
enum class AmplitudeMethod { mos, series, lindblad };

inline const char* to_string(Subcommand s) {
    switch (s) {
        case Subcommand::amplitude: return "amplitude";
        case Subcommand::measure: return "measure";
        case Subcommand::sweep: return "sweep";
        case Subcommand::threshold: return "threshold";
        case Subcommand::spectrum: return "spectrum";
    }
    return "?";
}

inline const char* to_string(AmplitudeMethod m) {
    switch (m) {
        case AmplitudeMethod::mos: return "mos";
        case AmplitudeMethod::series: return "series";
        case AmplitudeMethod::lindblad: return "lindblad";
    }
    return "?";
}

struct RunConfig {
    Subcommand subcommand = Subcommand::measure;
    std::string output_path = "-";
    Format format = Format::csv;
    bool allow_partial = false;
    unsigned workers = 1;

    double gamma = 1.0;
    double gtd = 1.0;
    double phi = 0.0;

    // amplitude / measure; horizon in units of 1/gamma, 0 = automatic
    double horizon = 0.0;
    int mesh_per_delay = 0;
    AmplitudeMethod method = AmplitudeMethod::mos;
    int every = 1;

    double classify_tol = 1e-6;
    /// Cap on the adaptive horizon, in units of 1/gamma.
    double max_horizon = NMOptions{}.max_horizon;

    // sweep
    int phi_points = 81;
    int gtd_points = 60;
    double gtd_min = 0.02;
    double gtd_max = 30.0;
    bool gtd_linear = false;

    // threshold
    int threshold_phi_points = 41;
    std::vector<double> phi_list;
    double threshold_gtd_max = 5.0;
    double bisection_tol = 0.01;
    int probe_points = 8;

    // spectrum, detunings in units of gamma
    double delta_min = -10.0;
    double delta_max = 10.0;
    int spectrum_points = 401;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 17 significant digits; reparsing gives back the same double.
inline std::string fmt_num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline unsigned default_workers() {
    if (const char* env = std::getenv(workers_env)) {
        try {
            const long w = std::stol(env);
            if (w > 0) {
                return static_cast<unsigned>(w);
            }
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

using nlohmann::ordered_json;

inline ordered_json config_echo(const RunConfig& c) {
    ordered_json j;
    j["subcommand"] = to_string(c.subcommand);
    j["format"] = c.format == Format::csv ? "csv" : "json";
    j["classify_tol"] = c.classify_tol;
    j["max_horizon"] = c.max_horizon;
    switch (c.subcommand) {
        case Subcommand::amplitude:
            j["gamma"] = c.gamma;
            j["gtd"] = c.gtd;
            j["phi"] = c.phi;
            j["horizon"] = c.horizon > 0.0 ? c.horizon : default_amplitude_horizon;
            j["mesh_per_delay"] = c.mesh_per_delay > 0 ? c.mesh_per_delay : default_mesh_per_delay;
            j["method"] = to_string(c.method);
            j["every"] = c.every;
            j.erase("classify_tol");
            j.erase("max_horizon");
            break;
        case Subcommand::measure:
            j["gamma"] = c.gamma;
            j["gtd"] = c.gtd;
            j["phi"] = c.phi;
            j["horizon"] = c.horizon;
            j["mesh_per_delay"] = c.mesh_per_delay;
            break;
        case Subcommand::sweep:
            j["phi_points"] = c.phi_points;
            j["gtd_points"] = c.gtd_points;
            j["gtd_min"] = c.gtd_min;
            j["gtd_max"] = c.gtd_max;
            j["gtd_spacing"] = c.gtd_linear ? "linear" : "log";
            j["mesh_per_delay"] = c.mesh_per_delay;
            break;
        case Subcommand::threshold:
            j["phi_points"] =
                c.phi_list.empty() ? c.threshold_phi_points : static_cast<int>(c.phi_list.size());
            j["phi_list"] = c.phi_list;
            j["gtd_max"] = c.threshold_gtd_max;
            j["bisection_tol"] = c.bisection_tol;
            j["probe_points"] = c.probe_points;
            j["mesh_per_delay"] = c.mesh_per_delay;
            break;
        case Subcommand::spectrum:
            j["gamma"] = c.gamma;
            j["gtd"] = c.gtd;
            j["phi"] = c.phi;
            j["delta_min"] = c.delta_min;
            j["delta_max"] = c.delta_max;
            j["points"] = c.spectrum_points;
            j.erase("classify_tol");
            j.erase("max_horizon");
            break;
    }
    return j;
}

inline ordered_json meta(const RunConfig& c) {
    ordered_json m;
    m["tool"] = "mirrornm";
    m["version"] = MIRRORNM_VERSION;
    m["config"] = config_echo(c);
    return m;
}

inline std::string csv_config_trailer(const RunConfig& c) {
    std::ostringstream os;
    os << "# tool=mirrornm\n# version=" << MIRRORNM_VERSION << '\n';
    const ordered_json echo = config_echo(c);
    for (const auto& [key, value] : echo.items()) {
        os << "# " << key << '=';
        if (value.is_string()) {
            os << value.get<std::string>();
        } else if (value.is_number_float()) {
            os << fmt_num(value.get<double>());
        } else if (value.is_array()) {
            bool first = true;
            for (const auto& e : value) {
                os << (first ? "" : ";") << fmt_num(e.get<double>());
                first = false;
            }
        } else {
            os << value.dump();
        }
        os << '\n';
    }
    return os.str();
}

inline std::string json_document(const RunConfig& c, ordered_json data) {
    ordered_json doc;
    doc["meta"] = meta(c);
    doc["data"] = std::move(data);
    return doc.dump(2) + "\n";
}

// JSON has no NaN; non-finite cells become null.
inline ordered_json json_num(double v) {
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

inline ModelParams physical_params(const RunConfig& c) {
    return ModelParams(c.gamma, c.gtd / c.gamma, c.phi);
}

inline NMOptions nm_options(const RunConfig& c) {
    NMOptions o;
    o.classify_tol = c.classify_tol;
    o.mesh_per_delay = c.mesh_per_delay;
    o.max_horizon = c.max_horizon;
    return o;
}

struct Rendered {
    std::string text;
    int status = exit_ok;
    std::string diagnostic;
};

inline Rendered render_amplitude(const RunConfig& c) {
    const ModelParams p = physical_params(c);
    const double horizon_scaled = c.horizon > 0.0 ? c.horizon : default_amplitude_horizon;
    const double horizon = horizon_scaled / c.gamma;
    const int k = c.mesh_per_delay > 0 ? c.mesh_per_delay : default_mesh_per_delay;
    const AmplitudeTrajectory traj = amplitude_mos(p, horizon, k);

    std::vector<double> t;
    std::vector<cplx> eps;
    const auto stride = static_cast<std::size_t>(c.every);
    for (std::size_t i = 0; i < traj.size(); i += stride) {
        const double ti = traj.time(i);
        t.push_back(ti * c.gamma);
        switch (c.method) {
            case AmplitudeMethod::mos: eps.push_back(traj.value(i)); break;
            case AmplitudeMethod::series: eps.push_back(amplitude_exact(p, ti)); break;
            case AmplitudeMethod::lindblad:
                eps.push_back(lindblad_amplitude(p.gamma(), p.phi(), ti));
                break;
        }
    }

    Rendered r;
    if (c.format == Format::csv) {
        std::ostringstream os;
        os << "t_gamma,re_eps,im_eps,abs_eps2,abs_eps4\n";
        for (std::size_t i = 0; i < t.size(); ++i) {
            os << fmt_num(t[i]) << ',' << fmt_num(eps[i].real()) << ',' << fmt_num(eps[i].imag())
               << ',' << fmt_num(std::norm(eps[i])) << ',' << fmt_num(volume(eps[i])) << '\n';
        }
        os << csv_config_trailer(c);
        r.text = os.str();
    } else {
        ordered_json d;
        std::vector<double> re, im, a2, a4;
        for (const auto& e : eps) {
            re.push_back(e.real());
            im.push_back(e.imag());
            a2.push_back(std::norm(e));
            a4.push_back(volume(e));
        }
        d["t_gamma"] = t;
        d["re_eps"] = re;
        d["im_eps"] = im;
        d["abs_eps2"] = a2;
        d["abs_eps4"] = a4;
        r.text = json_document(c, std::move(d));
    }
    return r;
}

inline Rendered render_measure(const RunConfig& c) {
    const ModelParams p = physical_params(c);
    NMOptions o = nm_options(c);
    o.horizon = c.horizon / c.gamma;
    const NMResult res = nm_measure(p, o);

    Rendered r;
    if (!res.converged) {
        r.status = exit_not_converged;
        r.diagnostic = "measure: tail not converged at horizon " +
                       fmt_num(res.horizon_used * c.gamma) + " (truncation bound " +
                       fmt_num(res.truncation_bound) + ")";
    }
    const char* verdict = res.markovian ? "markovian" : "non-markovian";
    if (c.format == Format::csv) {
        std::ostringstream os;
        os << "record,start,end,value\n";
        os << "measure,,," << fmt_num(res.measure) << '\n';
        os << "measure_upper,,," << fmt_num(res.measure_upper()) << '\n';
        os << "truncation_bound,,," << fmt_num(res.truncation_bound) << '\n';
        os << "horizon,,," << fmt_num(res.horizon_used * c.gamma) << '\n';
        os << "markovian,,," << (res.markovian ? 1 : 0) << '\n';
        os << "converged,,," << (res.converged ? 1 : 0) << '\n';
        for (const auto& iv : res.intervals) {
            os << "interval," << fmt_num(iv.start * c.gamma) << ',' << fmt_num(iv.end * c.gamma)
               << ',' << fmt_num(iv.volume_gain) << '\n';
        }
        os << "# verdict=" << verdict << '\n';
        os << csv_config_trailer(c);
        r.text = os.str();
    } else {
        ordered_json d;
        d["measure"] = res.measure;
        d["measure_upper"] = res.measure_upper();
        d["truncation_bound"] = res.truncation_bound;
        d["horizon_gamma"] = res.horizon_used * c.gamma;
        d["verdict"] = verdict;
        d["markovian"] = res.markovian;
        d["converged"] = res.converged;
        d["mesh_per_delay"] = res.mesh_per_delay;
        d["volume_loss"] = res.volume_loss;
        d["final_volume"] = res.final_volume;
        ordered_json ivs = ordered_json::array();
        for (const auto& iv : res.intervals) {
            ivs.push_back({{"start_gamma", iv.start * c.gamma},
                           {"end_gamma", iv.end * c.gamma},
                           {"volume_gain", iv.volume_gain}});
        }
        d["intervals"] = std::move(ivs);
        r.text = json_document(c, std::move(d));
    }
    return r;
}

inline Rendered render_sweep(const RunConfig& c) {
    const auto phi_axis = linear_axis(0.0, two_pi, static_cast<std::size_t>(c.phi_points));
    const auto gtd_axis = c.gtd_linear
                              ? linear_axis(c.gtd_min, c.gtd_max, static_cast<std::size_t>(c.gtd_points))
                              : log_axis(c.gtd_min, c.gtd_max, static_cast<std::size_t>(c.gtd_points));
    ComputeOptions o;
    o.nm = nm_options(c);
    o.workers = c.workers;
    const SweepGrid grid = sweep_measure(phi_axis, gtd_axis, o);

    Rendered r;
    if (const std::size_t bad = grid.non_converged(); bad > 0) {
        r.status = exit_not_converged;
        r.diagnostic = "sweep: " + std::to_string(bad) + " cell(s) did not converge";
    }
    if (c.format == Format::csv) {
        std::ostringstream os;
        os << "gamma_td\\phi";
        for (double phi : grid.phi_values) {
            os << ',' << fmt_num(phi);
        }
        os << '\n';
        for (std::size_t row = 0; row < grid.rows(); ++row) {
            os << fmt_num(grid.gtd_values[row]);
            for (std::size_t col = 0; col < grid.cols(); ++col) {
                os << ',' << fmt_num(grid.at(row, col));
            }
            os << '\n';
        }
        for (std::size_t row = 0; row < grid.rows(); ++row) {
            for (std::size_t col = 0; col < grid.cols(); ++col) {
                const auto& d = grid.diag(row, col);
                if (!d.converged) {
                    os << "# not_converged gamma_td=" << fmt_num(grid.gtd_values[row])
                       << " phi=" << fmt_num(grid.phi_values[col])
                       << " truncation_bound=" << fmt_num(d.truncation_bound)
                       << (d.error.empty() ? "" : " error=" + d.error) << '\n';
                }
            }
        }
        os << csv_config_trailer(c);
        r.text = os.str();
    } else {
        ordered_json d;
        d["phi"] = grid.phi_values;
        d["gamma_td"] = grid.gtd_values;
        ordered_json m = ordered_json::array();
        ordered_json hz = ordered_json::array();
        ordered_json tb = ordered_json::array();
        ordered_json cv = ordered_json::array();
        for (std::size_t row = 0; row < grid.rows(); ++row) {
            ordered_json mr = ordered_json::array();
            ordered_json hr = ordered_json::array();
            ordered_json tr = ordered_json::array();
            ordered_json cr = ordered_json::array();
            for (std::size_t col = 0; col < grid.cols(); ++col) {
                const auto& dg = grid.diag(row, col);
                mr.push_back(json_num(grid.at(row, col)));
                hr.push_back(dg.horizon);
                tr.push_back(dg.truncation_bound);
                cr.push_back(dg.converged);
            }
            m.push_back(std::move(mr));
            hz.push_back(std::move(hr));
            tb.push_back(std::move(tr));
            cv.push_back(std::move(cr));
        }
        d["measure"] = std::move(m);
        d["diagnostics"] = {{"horizon_gamma", std::move(hz)},
                            {"truncation_bound", std::move(tb)},
                            {"converged", std::move(cv)}};
        const auto flips = multi_flip_columns(grid);
        d["multi_flip_columns"] = flips;
        r.text = json_document(c, std::move(d));
    }
    return r;
}

inline Rendered render_threshold(const RunConfig& c) {
    const auto phi_axis = !c.phi_list.empty()
                              ? c.phi_list
                              : linear_axis(0.0, two_pi,
                                            static_cast<std::size_t>(c.threshold_phi_points));
    ThresholdOptions o;
    o.gtd_max = c.threshold_gtd_max;
    o.bisection_tol = c.bisection_tol;
    o.nm = nm_options(c);
    o.probe_points = c.probe_points;
    o.workers = c.workers;
    const ThresholdCurve curve = threshold_curve(phi_axis, o);

    Rendered r;
    int failures = 0;
    for (auto s : curve.status) {
        failures += s == ThresholdStatus::ok ? 0 : 1;
    }
    if (failures > 0) {
        r.status = exit_not_converged;
        r.diagnostic = "threshold: " + std::to_string(failures) + " phase(s) without a clean threshold";
    }
    if (c.format == Format::csv) {
        std::ostringstream os;
        os << "phi,critical_gtd,lower,upper,status\n";
        for (std::size_t i = 0; i < curve.phi_values.size(); ++i) {
            os << fmt_num(curve.phi_values[i]) << ',' << fmt_num(curve.critical_gtd[i]) << ','
               << fmt_num(curve.lower[i]) << ',' << fmt_num(curve.upper[i]) << ','
               << to_string(curve.status[i]) << '\n';
        }
        os << csv_config_trailer(c);
        r.text = os.str();
    } else {
        ordered_json d;
        d["phi"] = curve.phi_values;
        ordered_json crit = ordered_json::array();
        for (double v : curve.critical_gtd) {
            crit.push_back(json_num(v));
        }
        d["critical_gtd"] = std::move(crit);
        d["lower"] = curve.lower;
        d["upper"] = curve.upper;
        ordered_json st = ordered_json::array();
        for (auto s : curve.status) {
            st.push_back(to_string(s));
        }
        d["status"] = std::move(st);
        d["message"] = curve.message;
        r.text = json_document(c, std::move(d));
    }
    return r;
}

inline Rendered render_spectrum(const RunConfig& c) {
    const ModelParams p = physical_params(c);
    const auto pts =
        spectrum_scan(p, c.delta_min * c.gamma, c.delta_max * c.gamma, c.spectrum_points);
    const double scale = std::numbers::pi / c.gamma;
    Rendered r;
    if (c.format == Format::csv) {
        std::ostringstream os;
        os << "delta_over_gamma,j_pi_over_gamma\n";
        for (const auto& sp : pts) {
            os << fmt_num(sp.detuning / c.gamma) << ',' << fmt_num(sp.density * scale) << '\n';
        }
        os << csv_config_trailer(c);
        r.text = os.str();
    } else {
        std::vector<double> d_axis, j_axis;
        for (const auto& sp : pts) {
            d_axis.push_back(sp.detuning / c.gamma);
            j_axis.push_back(sp.density * scale);
        }
        ordered_json d;
        d["delta_over_gamma"] = d_axis;
        d["j_pi_over_gamma"] = j_axis;
        r.text = json_document(c, std::move(d));
    }
    return r;
}

inline void validate(const RunConfig& c) {
    const auto positive = [](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0)) {
            throw UsageError(std::string(name) + " must be a positive number");
        }
    };
    positive(c.gamma, "--gamma");
    positive(c.classify_tol, "--classify-tol");
    positive(c.max_horizon, "--max-horizon");
    if (!std::isfinite(c.phi)) {
        throw UsageError("--phi must be finite");
    }
    if (!(std::isfinite(c.horizon) && c.horizon >= 0.0)) {
        throw UsageError("--horizon must be >= 0");
    }
    if (c.mesh_per_delay != 0 && c.mesh_per_delay < min_mesh_per_delay) {
        throw UsageError("--mesh must be >= " + std::to_string(min_mesh_per_delay));
    }
    if (c.workers == 0) {
        throw UsageError("--workers must be >= 1");
    }
    switch (c.subcommand) {
        case Subcommand::amplitude:
            if (!(std::isfinite(c.gtd) && c.gtd >= 0.0)) {
                throw UsageError("--gtd must be >= 0");
            }
            if (c.every < 1) {
                throw UsageError("--every must be >= 1");
            }
            break;
        case Subcommand::measure:
        case Subcommand::spectrum:
            if (!(std::isfinite(c.gtd) && c.gtd >= 0.0)) {
                throw UsageError("--gtd must be >= 0");
            }
            if (c.subcommand == Subcommand::spectrum &&
                (!(c.delta_min < c.delta_max) || c.spectrum_points < 2)) {
                throw UsageError("spectrum: need --delta-min < --delta-max and --points >= 2");
            }
            break;
        case Subcommand::sweep:
            if (c.phi_points < 1 || c.gtd_points < 1) {
                throw UsageError("sweep: axis sizes must be >= 1");
            }
            positive(c.gtd_min, "--gtd-min");
            if (!(c.gtd_max >= c.gtd_min)) {
                throw UsageError("sweep: need --gtd-max >= --gtd-min");
            }
            break;
        case Subcommand::threshold:
            positive(c.threshold_gtd_max, "--gtd-max");
            positive(c.bisection_tol, "--bisection-tol");
            if (c.phi_list.empty() && c.threshold_phi_points < 1) {
                throw UsageError("threshold: --phi-points must be >= 1");
            }
            if (!c.phi_list.empty()) {
                if (!std::is_sorted(c.phi_list.begin(), c.phi_list.end())) {
                    throw UsageError("threshold: --list must be sorted");
                }
                for (double v : c.phi_list) {
                    if (!std::isfinite(v)) {
                        throw UsageError("threshold: --list entries must be finite");
                    }
                }
            }
            break;
    }
}

}  // namespace detail

/// Compute and write the requested output. Returns the process exit status.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    detail::Rendered r;
    try {
        detail::validate(config);
        switch (config.subcommand) {
            case Subcommand::amplitude: r = detail::render_amplitude(config); break;
            case Subcommand::measure: r = detail::render_measure(config); break;
            case Subcommand::sweep: r = detail::render_sweep(config); break;
            case Subcommand::threshold: r = detail::render_threshold(config); break;
            case Subcommand::spectrum: r = detail::render_spectrum(config); break;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_not_converged;
    }

    if (config.output_path.empty() || config.output_path == "-") {
        out << r.text;
        out.flush();
    } else {
        std::ofstream f(config.output_path, std::ios::binary | std::ios::trunc);
        if (!f) {
            err << "error: cannot open '" << config.output_path << "' for writing\n";
            return exit_usage;
        }
        f << r.text;
        f.close();
        if (!f) {
            err << "error: failed writing '" << config.output_path << "'\n";
            return exit_usage;
        }
    }
    if (r.status != exit_ok) {
        err << (config.allow_partial ? "warning: " : "error: ") << r.diagnostic << '\n';
        return config.allow_partial ? exit_ok : r.status;
    }
    return exit_ok;
}

/// Parse argv into a RunConfig; throws CLI::ParseError (including --help) or UsageError.
inline RunConfig parse(int argc, const char* const* argv, CLI::App& app) {
    RunConfig c;
    c.workers = default_workers();
    app.require_subcommand(1);

    const std::map<std::string, Format> formats{{"csv", Format::csv}, {"json", Format::json}};
    const std::map<std::string, AmplitudeMethod> methods{{"mos", AmplitudeMethod::mos},
                                                         {"series", AmplitudeMethod::series},
                                                         {"lindblad", AmplitudeMethod::lindblad}};

    const auto common = [&](CLI::App* sub) {
        sub->add_option("-o,--output", c.output_path, "Output file ('-' for stdout)");
        sub->add_option("--format", c.format, "Output format: csv or json")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
        sub->add_option("--workers", c.workers,
                        std::string("Worker threads (default from ") + workers_env + ")");
        sub->add_flag("--allow-partial", c.allow_partial,
                      "Exit 0 even if some cells did not converge");
        sub->add_option("--mesh", c.mesh_per_delay, "Steps per delay (0 = automatic)");
    };
    const auto measured = [&](CLI::App* sub) {
        sub->add_option("--classify-tol", c.classify_tol, "Markovian verdict tolerance on N");
        sub->add_option("--max-horizon", c.max_horizon,
                        "Cap on the adaptive horizon in units of 1/gamma");
    };
    const auto point = [&](CLI::App* sub) {
        sub->add_option("--gtd", c.gtd, "Dimensionless delay gamma * t_d")->required();
        sub->add_option("--phi", c.phi, "Round-trip phase in radians")->required();
        sub->add_option("--gamma", c.gamma, "Decay rate gamma (sets the time unit)");
    };

    auto* amp = app.add_subcommand("amplitude", "Excited-state amplitude eps(t)");
    common(amp);
    point(amp);
    amp->add_option("--horizon", c.horizon, "Final time in units of 1/gamma (default 30)");
    amp->add_option("--method", c.method, "mos, series or lindblad")
        ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
    amp->add_option("--every", c.every, "Write every n-th mesh node");

    auto* meas = app.add_subcommand("measure", "Non-Markovianity measure at one point");
    common(meas);
    point(meas);
    meas->add_option("--horizon", c.horizon,
                     "Initial horizon in units of 1/gamma (0 = automatic)");
    measured(meas);

    auto* sw = app.add_subcommand("sweep", "Measure over a (phi, gamma t_d) grid");
    common(sw);
    sw->add_option("--phi-points", c.phi_points, "Phase samples on [0, 2 pi]");
    sw->add_option("--gtd-points", c.gtd_points, "Delay samples");
    sw->add_option("--gtd-min", c.gtd_min, "Smallest gamma t_d");
    sw->add_option("--gtd-max", c.gtd_max, "Largest gamma t_d");
    sw->add_flag("--gtd-linear", c.gtd_linear, "Linear instead of logarithmic delay spacing");
    measured(sw);

    auto* th = app.add_subcommand("threshold", "Critical gamma t_d per phase");
    common(th);
    auto* phi_points_opt =
        th->add_option("--phi-points", c.threshold_phi_points, "Phase samples on [0, 2 pi]");
    th->add_option("--list", c.phi_list, "Comma-separated phases")->delimiter(',');
    th->add_option("--gtd-max", c.threshold_gtd_max, "Upper end of the bisection bracket");
    th->add_option("--bisection-tol", c.bisection_tol, "Resolution in gamma t_d");
    th->add_option("--probe-points", c.probe_points, "Extra verdict probes per phase (0 = off)");
    measured(th);

    auto* sp = app.add_subcommand("spectrum", "Spectral density J(Delta)");
    common(sp);
    point(sp);
    sp->add_option("--delta-min", c.delta_min, "Lowest detuning in units of gamma");
    sp->add_option("--delta-max", c.delta_max, "Highest detuning in units of gamma");
    sp->add_option("--points", c.spectrum_points, "Number of samples");

    app.parse(argc, argv);

    if (amp->parsed()) {
        c.subcommand = Subcommand::amplitude;
    } else if (meas->parsed()) {
        c.subcommand = Subcommand::measure;
    } else if (sw->parsed()) {
        c.subcommand = Subcommand::sweep;
    } else if (th->parsed()) {
        c.subcommand = Subcommand::threshold;
        if (!c.phi_list.empty() && phi_points_opt->count() > 0 &&
            static_cast<std::size_t>(c.threshold_phi_points) != c.phi_list.size()) {
            throw UsageError("threshold: --phi-points does not match the length of --list");
        }
    } else {
        c.subcommand = Subcommand::spectrum;
    }
    return c;
}

/// Full command-line entry point.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Non-Markovian dynamics of an emitter in front of a mirror", "mirrornm"};
    RunConfig config;
    try {
        config = parse(argc, argv, app);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return run(config, out, err);
}

}  // namespace mirrornm::cli
