// Command-line front end for the damped-wave lab.
//
// Exit codes: 0 success, 1 config or input error, 2 numerical instability,
// 3 a check failed.

#include <dampwave/studies.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace dampwave;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kInstability = 2;
constexpr int kCheckFailed = 3;

struct Common {
    std::string config;
    std::string out;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true) {
    auto* opt = cmd->add_option("--config", c.config, "scenario config file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_flag("--quiet", c.quiet, "suppress the console report");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double parse_number(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw ConfigError("not a number: " + text);
    return v;
}

fs::path output_path(const Common& c, const std::string& configured, const std::string& fallback) {
    if (!c.out.empty()) return fs::path(c.out) / fallback;
    return configured;
}

int cmd_run(const Common& c) {
    const Scenario sc = load_scenario(c.config);
    const auto result = run_scenario(sc);
    const auto trace = output_path(c, sc.trace_path, sc.name + ".trace.csv");
    const auto summary = output_path(c, sc.summary_path, sc.name + ".summary.json");
    if (!trace.empty()) write_atomically(trace, trace_csv(result.trace.samples));
    if (!summary.empty()) write_atomically(summary, result.summary.dump(2) + "\n");
    if (!c.quiet) std::cout << result.summary.dump(2) << "\n";
    return result.checks_pass ? kOk : kCheckFailed;
}

int cmd_sweep(const Common& c, const std::string& parameter, const std::vector<double>& values, unsigned threads) {
    const Scenario base = load_scenario(c.config);
    const auto rows = sweep(base, parameter, values, threads);
    const std::string csv = sweep_csv(parameter, rows);
    if (!c.out.empty()) {
        write_atomically(fs::path(c.out) / (base.name + ".sweep.csv"), csv);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].ok)
                write_atomically(fs::path(c.out) / (base.name + ".sweep." + std::to_string(i) + ".summary.json"),
                                 rows[i].summary.dump(2) + "\n");
    }
    if (!c.quiet) std::cout << csv;
    for (const auto& r : rows)
        if (!r.ok || !r.checks_pass) return kCheckFailed;
    return kOk;
}

int cmd_converge(const Common& c, std::size_t levels) {
    const Scenario sc = load_scenario(c.config);
    const auto table = convergence_study(sc, levels);
    std::string csv = "dx,dt,error,order\n";
    char buf[128];
    for (const auto& l : table.levels) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", l.dx, l.dt, l.error);
        csv += buf;
        if (l.order) {
            std::snprintf(buf, sizeof buf, "%.17g", *l.order);
            csv += buf;
        } else {
            csv += "nan";
        }
        csv += '\n';
    }
    if (!c.out.empty()) write_atomically(fs::path(c.out) / (sc.name + ".convergence.csv"), csv);
    if (!c.quiet) {
        std::printf("checkpoint t = %g, reference dx = %g\n", table.checkpoint, table.reference_dx);
        std::printf("%12s %12s %14s %8s\n", "dx", "dt", "L2 error", "order");
        for (const auto& l : table.levels) {
            std::printf("%12.6g %12.6g %14.6e ", l.dx, l.dt, l.error);
            if (l.order) std::printf("%8.3f\n", *l.order);
            else std::printf("%8s\n", "-");
        }
    }
    return kOk;
}

int cmd_check_multipliers(const Common& c, const std::string& grid_csv, std::size_t nt, std::size_t nx) {
    const Scenario sc = load_scenario(c.config);
    const DampingProfile profile = sc.profile();
    const auto report = validate_assumption_A(profile, sc.sample_resolution, profile.L2() + 100.0);
    if (!report.decay_hypotheses_pass()) {
        std::cerr << "profile does not satisfy the hypotheses for the default multipliers\n"
                  << to_json(report).dump(2) << "\n";
        return kCheckFailed;
    }
    const auto constants = derive_constants(profile, sc.sample_resolution);
    Multipliers m;
    m.params = sc.multiplier_source == MultiplierSource::Explicit ? sc.explicit_params
                                                                  : default_params(constants.V0, constants.V_star);
    m.phi = PhiSpec(constants.L1, constants.L2);
    const auto feas = check_feasibility(m.params, constants);
    T0Grid grid;
    grid.t_max = sc.t0_max;
    grid.t_resolution = sc.t0_resolution;
    const auto search = find_t0(m, profile, sc.R, grid);

    if (!c.quiet) {
        std::printf("eps1 = %g  eps2 = %g  eps3 = %g  k = %g\n", m.params.eps1, m.params.eps2, m.params.eps3, m.params.k);
        std::printf("V0 = %g  V1 = %g  L1 = %g  L2 = %g  V_m = %g  V_M = %g  V* = %g\n", constants.V0, constants.V1,
                    constants.L1, constants.L2, constants.V_m, constants.V_M, constants.V_star);
        for (const auto& mg : feas.margins)
            std::printf("  %-24s %-40s %14.6g  %s\n", mg.key.c_str(), mg.formula.c_str(), mg.margin,
                        mg.pass() ? "ok" : "FAIL");
        if (search.t0)
            std::printf("t0 = %g (min margin %.6g at t = %g, x = %g)\n", *search.t0, search.min_margin, search.worst_t,
                        search.worst_x);
        else
            std::printf("no t0 up to %g (last failure at t = %g)\n", grid.t_max, search.last_failure);
    }

    if (!grid_csv.empty()) {
        if (nt < 2 || nx < 2) throw ConfigError("grid needs at least 2 samples per axis");
        std::string csv = "t,x,ut_coefficient,ux_coefficient\n";
        char buf[128];
        const double x_end = sc.R + grid.t_max;
        for (std::size_t i = 0; i < nt; ++i) {
            const double t = grid.t_max * static_cast<double>(i) / static_cast<double>(nt - 1);
            for (std::size_t j = 0; j < nx; ++j) {
                const double x = x_end * static_cast<double>(j) / static_cast<double>(nx - 1);
                if (x > sc.R + t) break;
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t, x, ut_coefficient(t, x, m, profile),
                              ux_coefficient(t, x, m, profile));
                csv += buf;
            }
        }
        write_atomically(grid_csv, csv);
    }
    return feas.pass && search.t0 ? kOk : kCheckFailed;
}

int cmd_fit(const std::string& trace_path, double t_lo, double t_hi) {
    const auto rows = parse_trace_csv(read_file(trace_path));
    const auto fit = fit_decay(rows, {t_lo, t_hi});
    auto j = to_json(fit.plain);
    j["envelope"] = fit.envelope ? to_json(*fit.envelope) : nlohmann::json(nullptr);
    std::cout << j.dump(2) << "\n";
    return kOk;
}

int cmd_validate_profile(const Common& c) {
    const Scenario sc = load_scenario(c.config);
    const DampingProfile profile = sc.profile();
    const double x_max = profile.L2() + std::max(100.0, sc.R + sc.solver.t_final);
    const auto report = validate_assumption_A(profile, sc.sample_resolution, x_max);
    auto j = to_json(report);
    if (report.structural_pass()) {
        const auto k = derive_constants(profile, sc.sample_resolution);
        j["constants"] = {{"V0", k.V0}, {"V1", k.V1}, {"L1", k.L1}, {"L2", k.L2},
                          {"V_m", k.V_m}, {"V_M", k.V_M}, {"V_star", k.V_star}};
    }
    if (!c.quiet) std::cout << j.dump(2) << "\n";
    return report.structural_pass() ? kOk : kCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for u_tt - u_xx + V(x) u_t = 0"};
    app.require_subcommand(1);

    Common run_opts, sweep_opts, conv_opts, mult_opts, prof_opts;
    auto* run = app.add_subcommand("run", "run a scenario and write its trace and summary");
    add_common(run, run_opts);

    auto* sw = app.add_subcommand("sweep", "run a scenario for a list of parameter values");
    add_common(sw, sweep_opts);
    std::string parameter;
    std::vector<std::string> value_args; // a bare --values yields one empty string
    unsigned threads = 1;
    sw->add_option("--param", parameter, "V0, L2, dead_zone_end, R or dx")->required();
    sw->add_option("--values", value_args, "parameter values")->expected(0, -1);
    sw->add_option("--threads", threads, "concurrent runs")->check(CLI::PositiveNumber);

    auto* conv = app.add_subcommand("converge", "grid refinement study at t_final");
    add_common(conv, conv_opts);
    std::size_t levels = 4;
    conv->add_option("--levels", levels, "number of refinement levels (>= 3)");

    auto* mult = app.add_subcommand("check-multipliers", "feasibility margins and activation time t0");
    add_common(mult, mult_opts);
    std::string grid_csv;
    std::size_t nt = 101, nx = 101;
    mult->add_option("--grid-csv", grid_csv, "write both coefficients on a (t, x) grid");
    mult->add_option("--grid-t", nt, "time samples");
    mult->add_option("--grid-x", nx, "space samples");

    auto* fit = app.add_subcommand("fit", "fit a decay rate to a trace CSV");
    std::string trace_path;
    double t_lo = 0.0, t_hi = 0.0;
    fit->add_option("--trace", trace_path, "trace CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--t-lo", t_lo, "window start")->required();
    fit->add_option("--t-hi", t_hi, "window end")->required();

    auto* prof = app.add_subcommand("validate-profile", "check the damping profile against the decay hypotheses");
    add_common(prof, prof_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return cmd_run(run_opts);
        if (*sw) {
            std::vector<double> values;
            for (const auto& v : value_args)
                if (!v.empty()) values.push_back(parse_number(v));
            return cmd_sweep(sweep_opts, parameter, values, threads);
        }
        if (*conv) return cmd_converge(conv_opts, levels);
        if (*mult) return cmd_check_multipliers(mult_opts, grid_csv, nt, nx);
        if (*fit) return cmd_fit(trace_path, t_lo, t_hi);
        if (*prof) return cmd_validate_profile(prof_opts);
    } catch (const InstabilityError& e) {
        std::cerr << "instability: " << e.what() << "\n";
        return kInstability;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kOk;
}
