// Command-line front end: closed-form visibilities, parameter sweeps, the
// time-delayed feedback model, and the closed-form-vs-oracle check suite.
#include <clocale>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "dilacoh/feedback.hpp"
#include "dilacoh/quadrature.hpp"
#include "dilacoh/frame_explorer.hpp"
#include "dilacoh/io.hpp"
#include "dilacoh/model_core.hpp"
#include "dilacoh/oracle.hpp"
#include "dilacoh/three_d.hpp"

using namespace dilacoh;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitGuard = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    int threads = 0;
};

std::map<std::string, std::string> g_config;

// config-file fallback for options not given on the command line
template <typename T>
void fill_from_config(CLI::Option* opt, const std::string& key, T& value) {
    if (opt->count() > 0) return;
    const auto it = g_config.find(key);
    if (it == g_config.end()) return;
    std::istringstream ss(it->second);
    ss >> value;
    if (ss.fail()) throw ConfigError("config value for " + key + " unreadable");
}

void apply_threads(int threads) {
    if (threads <= 0) {
        if (const char* env = std::getenv("DILACOH_THREADS"))
            threads = std::atoi(env);
    }
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

void emit_record(const std::vector<std::pair<std::string, std::string>>& kv,
                 const std::string& command, const CommonOpts& common) {
    std::ostringstream ss;
    ss << "# dilacoh-v1 " << command << "\n";
    for (const auto& [k, v] : kv) ss << k << "=" << v << "\n";
    std::cout << ss.str();
    if (!common.out_path.empty()) {
        std::ofstream out(common.out_path, std::ios::binary);
        if (!out) throw IoError("cannot open output file: " + common.out_path);
        out << ss.str();
        if (!out) throw IoError("write failed: " + common.out_path);
    }
}

void emit_rows(const std::string& command, const CommonOpts& common,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& trailing = {}) {
    if (common.out_path.empty()) {
        std::cout << "# dilacoh-v1 " << command << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            std::cout << (i ? "," : "") << columns[i];
        std::cout << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                std::cout << (i ? "," : "") << format_float(row[i]);
            std::cout << "\n";
        }
        for (const auto& line : trailing) std::cout << "# " << line << "\n";
        return;
    }
    if (common.format == "json")
        write_curve_json(common.out_path, command, columns, rows);
    else
        write_curve_csv(common.out_path, command, columns, rows, trailing);
}

struct CheckRow {
    std::string name;
    double value;
    double tolerance;
    bool pass;
    bool informational = false;
};

void print_check_table(const std::vector<CheckRow>& rows) {
    for (const auto& r : rows) {
        std::cout << (r.informational ? "[info] " : (r.pass ? "[pass] " : "[FAIL] "))
                  << r.name << ": " << format_float(r.value);
        if (!r.informational)
            std::cout << " (tolerance " << format_float(r.tolerance) << ")";
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C");

    CLI::App app{"dilacoh: visibility of a spatial superposition under "
                 "dilated spontaneous emission"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--config", common.config_path,
                   "key=value config file with [section] headers");
    app.add_option("--threads", common.threads,
                   "worker threads (env DILACOH_THREADS as fallback)");

    // model parameters shared by the subcommands
    double lambda1 = 1.0, lambda2 = 1.0, delta = 0.0;
    double w0 = 1e6, kappa_tau = 1e-2;
    std::string direction = "up";
    bool delta_given_via = false;

    const auto add_model = [&](CLI::App* cmd, bool with_lambda2) {
        auto* l1 = cmd->add_option("--lambda1", lambda1, "dilation factor of branch 1");
        auto* d = cmd->add_option("--delta", delta, "lambda2 - lambda1");
        CLI::Option* l2 = nullptr;
        if (with_lambda2)
            l2 = cmd->add_option("--lambda2", lambda2, "dilation factor of branch 2");
        auto* w = cmd->add_option("--w0", w0, "transition frequency in kappa");
        auto* kt = cmd->add_option("--kappa-tau", kappa_tau,
                                   "light travel time between branches, in 1/kappa");
        auto* dir = cmd->add_option("--direction", direction, "up | down");
        return std::tuple{l1, d, l2, w, kt, dir};
    };

    std::string out_path, format = "csv";
    const auto add_output = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "output file path");
        cmd->add_option("--format", format, "csv | json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    // visibility
    auto* cmd_vis = app.add_subcommand(
        "visibility", "closed-form visibilities at one parameter point");
    double dom_threshold = 0.1;
    auto vis_opts = add_model(cmd_vis, true);
    cmd_vis->add_option("--dominance-threshold", dom_threshold,
                        "ratio at which dilation decoherence counts as dominant");
    add_output(cmd_vis);

    // sweep-frame
    auto* cmd_sweep = app.add_subcommand(
        "sweep-frame", "scan the frame parameter lambda1 at fixed Delta");
    double lam_lo = 0.0025, lam_hi = 5.0;
    std::size_t steps = 2000;
    bool with_optimal = false;
    auto sweep_opts = add_model(cmd_sweep, false);
    cmd_sweep->add_option("--lambda-min", lam_lo, "scan start");
    cmd_sweep->add_option("--lambda-max", lam_hi, "scan end");
    cmd_sweep->add_option("--steps", steps, "number of grid points");
    cmd_sweep->add_flag("--optimal", with_optimal,
                        "append the refined optimal-frame summary");
    add_output(cmd_sweep);

    // sweep-3d
    auto* cmd_3d = app.add_subcommand(
        "sweep-3d", "all-direction emission visibility vs kappa*tau");
    double kt_lo = 0.0, kt_hi = 1.0;
    std::size_t steps3d = 101;
    double quad_tol = 1e-10;
    auto sweep3d_opts = add_model(cmd_3d, true);
    cmd_3d->add_option("--kt-min", kt_lo, "kappa*tau scan start");
    cmd_3d->add_option("--kt-max", kt_hi, "kappa*tau scan end");
    cmd_3d->add_option("--steps", steps3d, "number of grid points");
    cmd_3d->add_option("--quad-tol", quad_tol, "angular quadrature tolerance");
    add_output(cmd_3d);

    // feedback
    auto* cmd_fb = app.add_subcommand(
        "feedback", "time-delayed feedback (atom-mirror) trajectories");
    int res_n = 1;
    double r_phase = 0.0;  // 0: solve for exact resonance
    double fb_t_max = 20.0;
    std::size_t fb_modes = 16400;
    double fb_dt = 0.0;
    auto fb_opts = add_model(cmd_fb, false);
    cmd_fb->add_option("--n", res_n, "resonance integer");
    cmd_fb->add_option("--r-phase", r_phase,
                       "branch-2 round-trip phase (default: n*pi, resonant)");
    cmd_fb->add_option("--t-max", fb_t_max, "integration horizon in 1/kappa");
    cmd_fb->add_option("--n-modes", fb_modes, "mirror-grid mode count");
    cmd_fb->add_option("--dt", fb_dt, "oracle step (default: auto)");
    add_output(cmd_fb);

    // oracle-check
    auto* cmd_check = app.add_subcommand(
        "oracle-check", "closed forms against the mode-discretized dynamics");
    std::size_t check_modes = 13100;
    double check_t_max = 16.0;
    double check_dt = 0.0;
    cmd_check->add_option("--n-modes", check_modes, "free-space grid modes");
    cmd_check->add_option("--t-max", check_t_max, "free-space horizon");
    cmd_check->add_option("--dt", check_dt, "step (default: auto)");
    add_output(cmd_check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (!common.config_path.empty())
            g_config = parse_config_file(common.config_path);

        const auto fill_model = [&](auto& opts) {
            auto& [l1, d, l2, w, kt, dir] = opts;
            fill_from_config(l1, "model.lambda1", lambda1);
            fill_from_config(d, "model.delta", delta);
            if (l2) fill_from_config(l2, "model.lambda2", lambda2);
            fill_from_config(w, "model.w0", w0);
            fill_from_config(kt, "model.kappa_tau", kappa_tau);
            fill_from_config(dir, "model.direction", direction);
            delta_given_via = d->count() > 0 || g_config.count("model.delta");
        };

        {
            const auto it = g_config.find("threads");
            if (common.threads == 0 && it != g_config.end())
                common.threads = std::atoi(it->second.c_str());
        }
        apply_threads(common.threads);
        common.out_path = out_path;
        common.format = format;
        if (common.out_path.empty() && g_config.count("output.path"))
            common.out_path = g_config.at("output.path");
        if (g_config.count("output.format") && format == "csv")
            common.format = g_config.at("output.format");

        const auto parse_direction = [&]() {
            if (direction == "up") return Direction::Upward;
            if (direction == "down") return Direction::Downward;
            throw ConfigError("direction must be 'up' or 'down'");
        };

        if (*cmd_vis) {
            fill_model(vis_opts);
            fill_from_config(std::get<1>(vis_opts), "model.dominance_threshold",
                             dom_threshold);
            const double l2v = delta_given_via ? lambda1 + delta : lambda2;
            const auto cfg = make_config(lambda1, l2v, w0, kappa_tau,
                                         parse_direction());
            auto rev = cfg;
            rev.direction = cfg.direction == Direction::Upward
                                ? Direction::Downward
                                : Direction::Upward;
            const auto margin = dominance_margin(cfg, dom_threshold);
            std::vector<std::pair<std::string, std::string>> kv;
            kv.emplace_back("lambda1", format_float(cfg.lambda1));
            kv.emplace_back("lambda2", format_float(cfg.lambda2));
            kv.emplace_back("delta", format_float(cfg.delta()));
            kv.emplace_back("w0", format_float(cfg.w0));
            kv.emplace_back("kappa_tau", format_float(cfg.kappa_tau));
            kv.emplace_back("direction",
                            cfg.direction == Direction::Upward ? "up" : "down");
            kv.emplace_back("v_asymptotic",
                            format_float(visibility_asymptotic(cfg)));
            kv.emplace_back("v_reversed",
                            format_float(visibility_asymptotic(rev)));
            kv.emplace_back("v_frame",
                            format_float(visibility_frame(cfg.lambda1,
                                                          cfg.delta(), cfg.w0,
                                                          cfg.kappa_tau)));
            if (std::fabs(cfg.delta()) < 2.0)
                kv.emplace_back("v_center",
                                format_float(visibility_center(
                                    cfg.delta(), cfg.w0, cfg.kappa_tau)));
            kv.emplace_back("v_time_limit",
                            format_float(visibility_time_limit(cfg)));
            kv.emplace_back("baseline", format_float(std::exp(-cfg.kappa_tau)));
            kv.emplace_back("dominance_ratio", format_float(margin.ratio));
            kv.emplace_back("dominant", margin.dominant ? "true" : "false");
            kv.emplace_back("necessary_factor",
                            format_float(margin.necessary_factor));
            emit_record(kv, "visibility", common);
            return kExitOk;
        }

        if (*cmd_sweep) {
            fill_model(sweep_opts);
            const auto curve =
                sweep_lambda(delta, w0, kappa_tau, lam_lo, lam_hi, steps);
            std::vector<std::vector<double>> rows;
            rows.reserve(curve.points.size());
            for (const auto& p : curve.points)
                rows.push_back({p.abscissa, p.v});
            std::vector<std::string> trailing;
            if (with_optimal) {
                const auto opt = optimal_frame(delta, w0, kappa_tau);
                trailing.push_back("optimal lambda1=" +
                                   format_float(opt.lambda_star) +
                                   " v=" + format_float(opt.v_star) +
                                   (opt.boundary ? " boundary" : "") +
                                   (opt.unimodal_warning ? " multimodal" : ""));
            }
            emit_rows("sweep-frame", common, {"lambda1", "V"}, rows, trailing);
            return kExitOk;
        }

        if (*cmd_3d) {
            fill_model(sweep3d_opts);
            if (steps3d < 2) throw ConfigError("steps must be >= 2");
            const double l2v = delta_given_via ? lambda1 + delta : lambda2;
            std::vector<std::vector<double>> rows(steps3d);
            const double h = (kt_hi - kt_lo) / static_cast<double>(steps3d - 1);
            std::exception_ptr error;
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < static_cast<long long>(steps3d); ++i) {
                try {
                    const double kt = kt_lo + h * static_cast<double>(i);
                    const auto cfg =
                        make_config(lambda1, l2v, w0, kt, parse_direction());
                    rows[i] = {kt, visibility_asymptotic(cfg),
                               visibility_3d_closed(cfg),
                               visibility_3d_quadrature(cfg, quad_tol)};
                } catch (...) {
#pragma omp critical
                    error = std::current_exception();
                }
            }
            if (error) std::rethrow_exception(error);
            emit_rows("sweep-3d", common,
                      {"kappa_tau", "V", "V3_closed", "V3_quadrature"}, rows);
            return kExitOk;
        }

        if (*cmd_fb) {
            fill_model(fb_opts);
            fill_from_config(cmd_fb->get_option("--n"), "feedback.n", res_n);
            fill_from_config(cmd_fb->get_option("--r-phase"),
                             "feedback.r_phase", r_phase);
            fill_from_config(cmd_fb->get_option("--t-max"), "feedback.t_max",
                             fb_t_max);
            fill_from_config(cmd_fb->get_option("--n-modes"),
                             "feedback.n_modes", fb_modes);
            const auto cfg = make_config(1.0 - 0.5 * delta, 1.0 + 0.5 * delta,
                                         w0, kappa_tau, parse_direction());
            const double r_over_c =
                r_phase > 0.0
                    ? r_phase / (2.0 * w0 * (1.0 + 0.5 * delta))
                    : solve_mirror_distance(res_n, w0, delta);
            const auto fb = feedback_physical(r_over_c, kappa_tau, w0, delta,
                                              res_n);
            FeedbackRunOptions opts;
            opts.n_modes = fb_modes;
            opts.dt = fb_dt;
            const auto rep = run_feedback(cfg, fb, fb_t_max, opts);

            std::vector<std::vector<double>> rows;
            rows.reserve(rep.oracle.samples.size());
            const auto curve = visibility_numeric(rep.oracle, cfg);
            for (std::size_t i = 0; i < rep.oracle.samples.size(); ++i) {
                const auto& s = rep.oracle.samples[i];
                rows.push_back({s.t, 2.0 * std::norm(s.c1),
                                2.0 * std::norm(s.c2), curve.points[i].v});
            }
            std::vector<std::string> trailing;
            trailing.push_back(
                std::string("resonance phi2=") + format_float(fb.phi2) +
                " on_resonance=" +
                (rep.resonance.on_resonance_2 ? "true" : "false") +
                " phi1_excluded=" +
                (rep.resonance.excluded_1 ? "true" : "false"));
            if (rep.c2_asymptotic > 0.0)
                trailing.push_back("c2_asymptotic=" +
                                   format_float(rep.c2_asymptotic));
            trailing.push_back("c2_final_sq=" + format_float(rep.c2_final_sq));
            trailing.push_back("visibility=" + format_float(rep.visibility));
            trailing.push_back("dde_oracle_dev=" +
                               format_float(rep.dde_oracle_dev));
            emit_rows("feedback", common, {"t", "c1_sq", "c2_sq", "V"}, rows,
                      trailing);
            return kExitOk;
        }

        if (*cmd_check) {
            std::vector<CheckRow> table;

            // free space: rescaled groups w0*Delta = 1, kappa tau = 1e-2
            const auto cfg = make_config_delta(1.0, 5e-3, 200.0, 1e-2);
            const auto grid = build_grid(cfg, check_t_max, check_modes);
            double dt = check_dt;
            if (dt <= 0.0) {
                const double lim =
                    0.05 / std::max(cfg.gamma2(),
                                    0.5 * (grid.w_hi - grid.w_lo));
                dt = check_t_max / std::ceil(check_t_max / lim);
            }
            const auto run = integrate(cfg, grid, check_t_max, dt);
            double drift = 0.0;
            for (const auto& s : run.samples)
                drift = std::max({drift, std::fabs(s.norm1 - 0.5),
                                  std::fabs(s.norm2 - 0.5)});
            const double v_end =
                visibility_numeric(run, cfg).points.back().v;
            const double v_closed = visibility_time(cfg, check_t_max);
            const double rate = fit_decay_rate(run, 1, 1.0, 5.0);

            table.push_back({"free-space visibility vs closed form (rel)",
                             std::fabs(v_end - v_closed) / v_closed, 0.01,
                             std::fabs(v_end - v_closed) / v_closed <= 0.01});
            table.push_back({"per-branch norm drift", drift, 1e-7,
                             drift <= 1e-7});
            table.push_back(
                {"|C1| decay rate vs lambda1^2/2 (rel)",
                 std::fabs(rate / (0.5 * cfg.gamma1()) - 1.0), 0.01,
                 std::fabs(rate / (0.5 * cfg.gamma1()) - 1.0) <= 0.01});
            table.push_back(
                {"deviation from the published full-width asymptote (rel)",
                 std::fabs(v_end - visibility_asymptotic(cfg)) /
                     visibility_asymptotic(cfg),
                 0.0, true, true});

            // residue closed form vs direct spectral quadrature
            double overlap_dev = 0.0;
            const PhysicsConfig ocfgs[] = {
                make_config_delta(1.0, 1e-6, 1e6, 1e-2),
                make_config(0.8, 1.3, 5.0, 0.3),
                make_config(1.0, 1.0, 10.0, 0.5),
            };
            for (const auto& ocfg : ocfgs)
                for (double t : {0.15, 0.3, 0.6, 1.7, 5.0})
                    overlap_dev = std::max(
                        overlap_dev,
                        std::abs(photon_overlap(ocfg, t) -
                                 overlap_quadrature(ocfg, t, 1e-10)));
            table.push_back({"photon overlap vs quadrature (abs)", overlap_dev,
                             1e-8, overlap_dev <= 1e-8});

            // mirror feedback at resonance
            const double w0_fb = 1e3, delta_fb = 1e-3;
            const auto cfg_fb = make_config(1.0 - 0.5 * delta_fb,
                                            1.0 + 0.5 * delta_fb, w0_fb,
                                            delta_fb);
            const auto fb = feedback_physical(
                solve_mirror_distance(1, w0_fb, delta_fb), delta_fb, w0_fb,
                delta_fb, 1);
            FeedbackRunOptions fb_opts_run;
            fb_opts_run.n_modes = 16400;
            const auto rep = run_feedback(cfg_fb, fb, 20.0, fb_opts_run);
            const double c2_dev =
                std::fabs(rep.c2_final_sq / rep.c2_asymptotic - 1.0);
            table.push_back({"mirror |c2|^2 vs suppression formula (rel)",
                             c2_dev, 0.02, c2_dev <= 0.02});
            table.push_back({"mirror DDE vs oracle |c2| (abs)",
                             rep.dde_oracle_dev, 0.01,
                             rep.dde_oracle_dev <= 0.01});
            table.push_back({"resonant-asymmetric visibility", rep.visibility,
                             0.05, rep.visibility <= 0.05});

            // all-direction emission, dynamics-convention closed form
            const auto cfg3 = make_config(1.0, 1.05, 200.0, 0.05);
            const auto grid3 = build_grid_3d(cfg3, 8.0, 3500, 16, 15.0);
            const double dt3 =
                8.0 / std::ceil(8.0 * 0.5 * (grid3.w_hi - grid3.w_lo) / 0.05);
            const auto run3 = integrate(cfg3, grid3, 8.0, dt3);
            const double v3 = visibility_numeric(run3, cfg3).points.back().v;
            const double v3_dev =
                std::fabs(v3 / visibility_3d_time_limit(cfg3) - 1.0);
            table.push_back({"all-direction oracle vs closed form (rel)",
                             v3_dev, 0.06, v3_dev <= 0.06});
            table.push_back(
                {"all-direction deviation from full-width form (rel)",
                 std::fabs(v3 / visibility_3d_closed(cfg3) - 1.0), 0.0, true,
                 true});

            print_check_table(table);
            bool all_pass = true;
            for (const auto& r : table)
                if (!r.informational) all_pass = all_pass && r.pass;
            if (!common.out_path.empty()) {
                std::ofstream out(common.out_path, std::ios::binary);
                if (!out)
                    throw IoError("cannot open output file: " + common.out_path);
                for (const auto& r : table)
                    out << (r.informational ? "info" : (r.pass ? "pass" : "fail"))
                        << "," << r.name << "," << format_float(r.value) << ","
                        << format_float(r.tolerance) << "\n";
            }
            std::cout << (all_pass ? "all checks passed\n"
                                   : "some checks FAILED\n");
            return all_pass ? kExitOk : kExitGuard;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const GuardError& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return kExitGuard;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return kExitGuard;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
