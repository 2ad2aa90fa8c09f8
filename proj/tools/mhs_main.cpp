// mhs — command-line laboratory for the modified Hunter-Saxton family on
// the circle: Eulerian pseudospectral, Lagrangian flow-map and time-Taylor
// integrators, wave-breaking estimation, norm analytics and the property
// verification suites.

#include "mhs/breaking.hpp"
#include "mhs/config.hpp"
#include "mhs/corpus.hpp"
#include "mhs/eulerian.hpp"
#include "mhs/format.hpp"
#include "mhs/init_expr.hpp"
#include "mhs/lagrangian.hpp"
#include "mhs/run_io.hpp"
#include "mhs/taylor_series.hpp"
#include "mhs/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace mhs;

void add_scenario_options(CLI::App* cmd, ScenarioConfig& cfg, std::string& config_sink) {
    cmd->add_option("--p", cfg.p, "nonlinearity exponent p >= 1");
    cmd->add_option("--init", cfg.init, "initial datum, e.g. \"0.1*sin(2*pi*x)\"");
    cmd->add_option("--n", cfg.n_modes, "grid size, power of two >= 32");
    cmd->add_option("--dt", cfg.dt, "time step");
    cmd->add_option("--t-end", cfg.t_end, "final time");
    cmd->add_option("--method", cfg.method, "eulerian|lagrangian|taylor|compare");
    cmd->add_option("--record-every", cfg.record_every, "steps between history records");
    cmd->add_option("--out", cfg.out, "history CSV path");
    cmd->add_option("--snapshots", cfg.snapshots, "snapshot JSONL path");
    cmd->add_option("--s", cfg.s, "scale parameter in (0,1)");
    cmd->add_option("--sigma", cfg.sigma, "inner Sobolev index");
    cmd->add_option("--kmax", cfg.kmax, "scale-norm truncation order");
    cmd->add_option("--seed", cfg.seed, "corpus seed");
    cmd->add_option("--taylor-order", cfg.taylor_order, "Taylor order J");
    cmd->add_option("--taylor-step", cfg.taylor_step, "Taylor re-expansion interval");
    cmd->add_option("--radius-floor", cfg.radius_floor, "analyticity-radius floor");
    cmd->add_flag("--no-dealias",
                  [&cfg](std::int64_t count) { cfg.dealias = count == 0; },
                  "disable the 2/3 rule");
    // the file itself is applied before parsing (see main), so flags override
    cmd->add_option("--config", config_sink, "flat key=value config file (flags override)");
}

SpectralField initial_field(const ScenarioConfig& cfg) {
    return realize(parse_init(cfg.init), cfg.n_modes);
}

IntegrateOptions eulerian_options(const ScenarioConfig& cfg) {
    IntegrateOptions opt;
    opt.record_every = cfg.record_every;
    opt.diag.scale = cfg.scale_params();
    return opt;
}

struct OutputFiles {
    std::optional<std::ofstream> csv;
    std::optional<std::ofstream> jsonl;

    explicit OutputFiles(const ScenarioConfig& cfg) {
        if (!cfg.out.empty()) {
            csv.emplace(cfg.out, std::ios::trunc);
            if (!*csv) throw ConfigError("cannot open output file: " + cfg.out);
        }
        if (!cfg.snapshots.empty()) {
            jsonl.emplace(cfg.snapshots, std::ios::trunc);
            if (!*jsonl) throw ConfigError("cannot open snapshot file: " + cfg.snapshots);
        }
    }
};

void print_summary(const std::string& method, double final_t, double energy_drift, BreakdownCode code,
                   const std::string& extra = "") {
    std::cout << "method=" << method << " final_t=" << format_double(final_t)
              << " energy_drift=" << format_double(energy_drift) << " breakdown=" << to_string(code);
    if (!extra.empty()) std::cout << " " << extra;
    std::cout << "\n";
}

double relative_energy_drift(const std::vector<RunRecord>& history) {
    if (history.empty()) return 0.0;
    const double e0 = history.front().energy;
    if (e0 == 0.0) return 0.0;
    double worst = 0.0;
    for (const RunRecord& r : history) worst = std::max(worst, std::abs(r.energy - e0) / e0);
    return worst;
}

int solve_eulerian(const ScenarioConfig& cfg, OutputFiles& files) {
    EulerianRun run(initial_field(cfg), cfg.model_params(), cfg.dt);
    IntegrateOptions opt = eulerian_options(cfg);
    if (files.jsonl)
        opt.on_record = [&files](const SpectralField& u, double t) {
            *files.jsonl << snapshot_jsonl_line(t, u) << "\n";
        };
    integrate(run, cfg.t_end, opt);
    if (files.csv) write_history_csv(*files.csv, run.history, false);
    print_summary("eulerian", run.t, relative_energy_drift(run.history), run.breakdown);
    return run.breakdown == BreakdownCode::None ? kExitOk : kExitBreakdown;
}

int solve_lagrangian(const ScenarioConfig& cfg, OutputFiles& files) {
    LagrangianRun run = LagrangianRun::from_initial(initial_field(cfg), cfg.model_params(), cfg.dt);
    LagrangianIntegrateOptions opt;
    opt.record_every = cfg.record_every;
    opt.diag.scale = cfg.scale_params();
    if (files.jsonl)
        opt.on_record = [&files](const LagrangianState& st) {
            *files.jsonl << snapshot_jsonl_line(st.t, "displacement", st.gamma.displacement()) << "\n";
            *files.jsonl << snapshot_jsonl_line(st.t, "zeta", st.zeta) << "\n";
        };
    integrate_lagrangian(run, cfg.t_end, opt);
    if (files.csv) write_history_csv(*files.csv, run.history, true);
    std::string extra = "min_gamma_x=" + format_double(run.state.gamma.min_slope());
    print_summary("lagrangian", run.state.t, relative_energy_drift(run.history), run.breakdown, extra);
    return run.breakdown == BreakdownCode::None ? kExitOk : kExitBreakdown;
}

int solve_taylor(const ScenarioConfig& cfg, OutputFiles& files) {
    SpectralField u = initial_field(cfg);
    const ModelParams mp = cfg.model_params();
    const DiagnosticsOptions diag = eulerian_options(cfg).diag;
    double t = 0.0;
    std::vector<RunRecord> history;
    history.push_back(detail::make_record(u, t, cfg.taylor_step, diag));
    if (files.jsonl) *files.jsonl << snapshot_jsonl_line(t, u) << "\n";
    BreakdownCode code = BreakdownCode::None;
    while (t < cfg.t_end - 1e-15) {
        const double step = std::min(cfg.taylor_step, cfg.t_end - t);
        u = taylor_step(u, mp, cfg.taylor_order, step);
        t += step;
        if (!u.all_finite()) {
            code = BreakdownCode::NonFinite;
            break;
        }
        history.push_back(detail::make_record(u, t, step, diag));
        if (files.jsonl) *files.jsonl << snapshot_jsonl_line(t, u) << "\n";
    }
    if (files.csv) write_history_csv(*files.csv, history, false);
    print_summary("taylor", t, relative_energy_drift(history), code);
    return code == BreakdownCode::None ? kExitOk : kExitBreakdown;
}

int solve_compare(const ScenarioConfig& cfg, OutputFiles& files) {
    const SpectralField u0 = initial_field(cfg);
    TrialityResult res;
    try {
        res = run_triality(u0, cfg.model_params(), cfg.dt, cfg.t_end, cfg.taylor_step, cfg.taylor_order);
    } catch (const BreakdownError& e) {
        std::cout << "compare: breakdown before t_end: " << e.what() << "\n";
        return kExitBreakdown;
    }
    if (files.csv) {
        *files.csv << "t,max_pairwise_deviation\n";
        for (std::size_t k = 0; k < res.times.size(); ++k) {
            const double d1 = (res.euler_u[k] - res.lagr_u[k]).sup_norm();
            const double d2 = (res.euler_u[k] - res.taylor_u[k]).sup_norm();
            const double d3 = (res.lagr_u[k] - res.taylor_u[k]).sup_norm();
            *files.csv << format_double(res.times[k]) << "," << format_double(std::max({d1, d2, d3})) << "\n";
        }
    }
    if (files.jsonl)
        for (std::size_t k = 0; k < res.times.size(); ++k)
            *files.jsonl << snapshot_jsonl_line(res.times[k], res.euler_u[k]) << "\n";
    std::cout << "method=compare final_t=" << format_double(res.times.back())
              << " max_deviation=" << format_double(res.max_pairwise)
              << " energy_drift=" << format_double(std::max({res.energy_drift_euler, res.energy_drift_lagr,
                                                             res.energy_drift_taylor}))
              << " mean_drift=" << format_double(std::max({res.mean_drift_euler, res.mean_drift_lagr,
                                                           res.mean_drift_taylor}))
              << "\n";
    return kExitOk;
}

int cmd_solve(const ScenarioConfig& cfg) {
    validate(cfg);
    OutputFiles files(cfg);
    if (cfg.method == "eulerian") return solve_eulerian(cfg, files);
    if (cfg.method == "lagrangian") return solve_lagrangian(cfg, files);
    if (cfg.method == "taylor") return solve_taylor(cfg, files);
    return solve_compare(cfg, files);
}

int cmd_blowup(const ScenarioConfig& cfg, double fit_lo, double fit_hi) {
    validate(cfg);
    OutputFiles files(cfg);
    EulerianRun run(initial_field(cfg), cfg.model_params(), cfg.dt);
    IntegrateOptions opt = eulerian_options(cfg);
    opt.diag.with_radius = false;
    opt.diag.with_scale_norm = false;
    integrate(run, cfg.t_end, opt);
    if (files.csv) write_history_csv(*files.csv, run.history, false);

    if (run.breakdown == BreakdownCode::None) {
        std::cout << "no breaking detected before t_end=" << format_double(cfg.t_end) << "\n";
        return kExitNoBreaking;
    }

    const auto fitted = fit_breaking_time(run.history, fit_lo, fit_hi);
    std::cout << "breakdown=" << to_string(run.breakdown) << " at t=" << format_double(run.t) << "\n";
    if (!fitted) {
        std::cout << "extrapolation failed: too few records in the fit window [" << format_double(fit_lo)
                  << ", " << format_double(fit_hi) << "]\n";
        return kExitNoBreaking;
    }
    std::cout << "estimated_t_star=" << format_double(*fitted) << "\n";
    if (cfg.p == 1) {
        const auto oracle = riccati_breaking_time(initial_field(cfg));
        if (oracle) {
            std::cout << "oracle_t_star=" << format_double(*oracle)
                      << " relative_error=" << format_double(std::abs(*fitted - *oracle) / *oracle) << "\n";
        }
    }
    return kExitOk;
}

int cmd_analyticity(const ScenarioConfig& cfg) {
    validate(cfg);
    OutputFiles files(cfg);
    EulerianRun run(initial_field(cfg), cfg.model_params(), cfg.dt);
    IntegrateOptions opt = eulerian_options(cfg);
    integrate(run, cfg.t_end, opt);
    if (files.csv) write_history_csv(*files.csv, run.history, false);
    if (run.breakdown != BreakdownCode::None) {
        std::cout << "breakdown=" << to_string(run.breakdown) << " at t=" << format_double(run.t) << "\n";
        return kExitBreakdown;
    }

    const int order = std::max(cfg.taylor_order, 8);
    const double t_radius = time_radius(taylor_coeffs(initial_field(cfg), cfg.model_params(), order));
    std::cout << "time_radius_j" << order << "=" << format_double(t_radius) << "\n";

    double worst = std::numeric_limits<double>::infinity();
    for (const RunRecord& r : run.history) {
        if (r.t == 0.0) continue;
        if (r.radius_est < worst) worst = r.radius_est; // NaN never compares below
    }
    std::cout << "min_radius_est=" << format_double(worst) << " floor=" << format_double(cfg.radius_floor) << "\n";
    if (worst < cfg.radius_floor) {
        std::cout << "radius collapsed below the floor\n";
        return kExitRadiusCollapse;
    }
    return kExitOk;
}

int cmd_norms(const ScenarioConfig& cfg, const std::string& which, int index) {
    if (cfg.snapshots.empty()) throw ConfigError("norms: --snapshots <file> is required");
    const std::vector<Snapshot> snaps = read_snapshots_file(cfg.snapshots);
    std::vector<const Snapshot*> filtered;
    for (const Snapshot& s : snaps)
        if (which.empty() ? s.which.empty() : s.which == which) filtered.push_back(&s);
    if (filtered.empty()) throw ConfigError("norms: no matching snapshots in " + cfg.snapshots);
    const std::size_t pick = index < 0 ? filtered.size() - 1 : std::size_t(index);
    if (pick >= filtered.size()) throw ConfigError("norms: snapshot index out of range");
    const Snapshot& snap = *filtered[pick];

    SpectralField centered = snap.field;
    centered.set_coeff(0, cplx{0.0, 0.0});
    const NormReport rep = scale_norm(centered, cfg.scale_params());
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!cfg.out.empty()) {
        file.open(cfg.out, std::ios::trunc);
        if (!file) throw ConfigError("cannot open output file: " + cfg.out);
        os = &file;
    }
    *os << "value,argmax_k,truncation_ok\n"
        << format_double(rep.value) << "," << rep.argmax_k << "," << (rep.truncation_ok ? "true" : "false")
        << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& suite, const std::string& report_path) {
    std::vector<PropertyResult> results;
    try {
        results = run_verify_suite(suite);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    bool all_pass = true;
    for (const PropertyResult& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " [" << r.suite << "] " << r.name
                  << " (measured=" << format_double(r.measured) << ", bound=" << format_double(r.threshold)
                  << ")";
        if (!r.witness.empty()) std::cout << " [" << r.witness << "]";
        std::cout << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "verify: all properties passed" : "verify: FAILURES present") << "\n";
    if (!all_pass) {
        nlohmann::json failures = nlohmann::json::array();
        for (const PropertyResult& r : results) {
            if (r.pass) continue;
            failures.push_back({{"suite", r.suite},
                                {"property", r.name},
                                {"witness", r.witness},
                                {"measured", r.measured},
                                {"threshold", r.threshold},
                                {"margin", r.measured - r.threshold}});
        }
        if (report_path.empty()) {
            std::cout << failures.dump() << "\n";
        } else {
            std::ofstream out(report_path, std::ios::trunc);
            out << failures.dump(2) << "\n";
        }
        return kExitVerifyFail;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral laboratory for the modified Hunter-Saxton equation family on the circle"};
    app.require_subcommand(1);

    ScenarioConfig cfg;
    std::string config_sink;

    // config file values load first so that explicit flags override them
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        std::string path;
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
        if (!path.empty()) {
            try {
                apply_config_file(path, cfg);
            } catch (const ConfigError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitConfig;
            }
        }
    }

    CLI::App* solve = app.add_subcommand("solve", "integrate one scenario and stream CSV/JSONL");
    add_scenario_options(solve, cfg, config_sink);

    CLI::App* compare = app.add_subcommand("compare", "solve with all three integrators and report deviations");
    add_scenario_options(compare, cfg, config_sink);

    CLI::App* blowup = app.add_subcommand("blowup", "run to breakdown and extrapolate the breaking time");
    double fit_lo = 15.0, fit_hi = 90.0;
    add_scenario_options(blowup, cfg, config_sink);
    blowup->add_option("--fit-lo", fit_lo, "lower sup|dx u| edge of the fit window");
    blowup->add_option("--fit-hi", fit_hi, "upper sup|dx u| edge of the fit window");

    CLI::App* analyt = app.add_subcommand("analyticity", "track the spatial radius and the Taylor time radius");
    add_scenario_options(analyt, cfg, config_sink);

    CLI::App* norms = app.add_subcommand("norms", "one-shot norm report for a snapshot file");
    std::string norms_which;
    int norms_index = -1;
    add_scenario_options(norms, cfg, config_sink);
    norms->add_option("--which", norms_which, "snapshot tag filter (displacement|zeta)");
    norms->add_option("--index", norms_index, "snapshot index (default: last)");

    CLI::App* verify = app.add_subcommand("verify", "run the property suites");
    std::string suite = "all";
    std::string report_path;
    verify->add_option("--suite", suite, "spectral|lemmas|derivatives|equivalence|conservation|taylor|all");
    verify->add_option("--report", report_path, "failure report JSON path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (solve->parsed()) return cmd_solve(cfg);
        if (compare->parsed()) {
            ScenarioConfig c = cfg;
            c.method = "compare";
            return cmd_solve(c);
        }
        if (blowup->parsed()) return cmd_blowup(cfg, fit_lo, fit_hi);
        if (analyt->parsed()) return cmd_analyticity(cfg);
        if (norms->parsed()) return cmd_norms(cfg, norms_which, norms_index);
        if (verify->parsed()) return cmd_verify(suite, report_path);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CflError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
