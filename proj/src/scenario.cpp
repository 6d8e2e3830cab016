#include <dampwave/scenario.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace dampwave {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_number(const ConfigMap& c, const std::string& key) {
    const std::string& v = c.at(key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
    }
}

bool to_bool(const ConfigMap& c, const std::string& key) {
    const std::string& v = c.at(key);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("key '" + key + "' expects true or false, got '" + v + "'");
}

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

ConfigMap parse_config(const std::string& text) {
    ConfigMap out;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.erase(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (!section.empty()) key = section + "." + key;
        if (!out.emplace(key, value).second)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    return out;
}

ConfigMap load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::function<double(double)> make_shape(const ShapeSpec& shape, double R, bool mirrored) {
    const double a = shape.amplitude;
    std::function<double(double)> base;
    if (shape.name == "zero") {
        base = [](double) { return 0.0; };
    } else if (shape.name == "hat") {
        base = [a, R](double x) { return (x < 0.0 || x > R) ? 0.0 : a * (1.0 - std::fabs(2.0 * x / R - 1.0)); };
    } else if (shape.name == "bump") {
        base = [a, R](double x) {
            if (x < 0.0 || x > R) return 0.0;
            const double c = std::cos(std::numbers::pi * (x - 0.5 * R) / R);
            return a * c * c;
        };
    } else if (shape.name == "bump4") {
        base = [a, R](double x) {
            if (x < 0.0 || x > R) return 0.0;
            const double c = std::cos(std::numbers::pi * (x - 0.5 * R) / R);
            return a * c * c * c * c;
        };
    } else if (shape.name == "box") {
        base = [a, R](double x) { return (x < 0.0 || x > R) ? 0.0 : a; };
    } else {
        throw ConfigError("unknown data shape '" + shape.name + "'");
    }
    if (!mirrored) return base;
    return [base](double x) { return base(std::fabs(x)); };
}

DampingProfile Scenario::profile() const {
    switch (profile_kind) {
    case ProfileKind::DeadZoneCritical: return DampingProfile::dead_zone(amplitude, dead_zone_end, L2);
    case ProfileKind::PureCritical: return DampingProfile::pure_critical(amplitude, L2);
    case ProfileKind::Constant: return DampingProfile::constant(amplitude);
    case ProfileKind::Zero: return DampingProfile::zero();
    }
    return DampingProfile::zero();
}

InitialData Scenario::initial_data() const {
    const bool mirrored = mode == DomainMode::WholeLine;
    return {make_shape(u0, R, mirrored), make_shape(u1, R, mirrored), R};
}

SolverConfig Scenario::resolved_solver() const {
    SolverConfig c = solver;
    if (record_samples) c.record_stride = std::max<std::size_t>(1, c.step_count() / std::max<std::size_t>(1, *record_samples));
    return c;
}

Scenario scenario_from_config(const ConfigMap& c) {
    static const std::set<std::string> known = {
        "name", "domain_mode",
        "profile.kind", "profile.amplitude", "profile.L2", "profile.dead_zone_end", "profile.validate",
        "data.u0", "data.u0_amplitude", "data.u1", "data.u1_amplitude", "data.R",
        "solver.dx", "solver.cfl", "solver.t_final", "solver.wavefront_margin", "solver.record_stride",
        "solver.record_samples",
        "multipliers.source", "multipliers.eps1", "multipliers.eps2", "multipliers.eps3", "multipliers.k",
        "multipliers.t0_max", "multipliers.t0_resolution", "multipliers.sample_resolution",
        "fit.t_lo", "fit.t_hi", "fit.exponent",
        "checks.alpha_min", "checks.alpha_max", "checks.weighted_ratio_max", "checks.energy_drift_max",
        "output.trace", "output.summary",
    };
    for (const auto& [key, value] : c)
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

    Scenario s;
    auto has = [&](const char* k) { return c.count(k) > 0; };
    try {
        if (has("name")) s.name = c.at("name");
        if (has("domain_mode")) s.mode = parse_domain_mode(c.at("domain_mode"));
        if (has("profile.kind")) s.profile_kind = parse_profile_kind(c.at("profile.kind"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (has("profile.amplitude")) s.amplitude = to_number(c, "profile.amplitude");
    if (has("profile.L2")) s.L2 = to_number(c, "profile.L2");
    if (has("profile.dead_zone_end")) s.dead_zone_end = to_number(c, "profile.dead_zone_end");
    if (has("profile.validate")) s.validate_profile = to_bool(c, "profile.validate");

    if (has("data.u0")) s.u0.name = c.at("data.u0");
    if (has("data.u0_amplitude")) s.u0.amplitude = to_number(c, "data.u0_amplitude");
    if (has("data.u1")) s.u1.name = c.at("data.u1");
    if (has("data.u1_amplitude")) s.u1.amplitude = to_number(c, "data.u1_amplitude");
    if (has("data.R")) s.R = to_number(c, "data.R");
    if (s.u0.name == "box") throw ConfigError("box is a velocity shape; u0 must vanish at the boundary");

    if (has("solver.dx")) s.solver.dx = to_number(c, "solver.dx");
    if (has("solver.cfl")) s.solver.cfl = to_number(c, "solver.cfl");
    if (has("solver.t_final")) s.solver.t_final = to_number(c, "solver.t_final");
    if (has("solver.wavefront_margin"))
        s.solver.wavefront_margin = static_cast<std::size_t>(to_number(c, "solver.wavefront_margin"));
    if (has("solver.record_stride"))
        s.solver.record_stride = static_cast<std::size_t>(to_number(c, "solver.record_stride"));
    if (has("solver.record_samples"))
        s.record_samples = static_cast<std::size_t>(to_number(c, "solver.record_samples"));
    s.solver.mode = s.mode;

    if (has("multipliers.source")) {
        const auto& v = c.at("multipliers.source");
        if (v == "paper-defaults") s.multiplier_source = MultiplierSource::Defaults;
        else if (v == "explicit") s.multiplier_source = MultiplierSource::Explicit;
        else if (v == "none") s.multiplier_source = MultiplierSource::None;
        else throw ConfigError("multipliers.source must be paper-defaults, explicit or none");
    }
    if (s.multiplier_source == MultiplierSource::Explicit) {
        for (const char* k : {"multipliers.eps1", "multipliers.eps2", "multipliers.eps3", "multipliers.k"})
            if (!has(k)) throw ConfigError(std::string("explicit multipliers need ") + k);
        s.explicit_params.eps1 = to_number(c, "multipliers.eps1");
        s.explicit_params.eps2 = to_number(c, "multipliers.eps2");
        s.explicit_params.eps3 = to_number(c, "multipliers.eps3");
        s.explicit_params.k = to_number(c, "multipliers.k");
    }
    if (has("multipliers.t0_max")) s.t0_max = to_number(c, "multipliers.t0_max");
    if (has("multipliers.t0_resolution")) s.t0_resolution = to_number(c, "multipliers.t0_resolution");
    if (has("multipliers.sample_resolution")) s.sample_resolution = to_number(c, "multipliers.sample_resolution");

    if (has("fit.t_lo") != has("fit.t_hi")) throw ConfigError("fit.t_lo and fit.t_hi go together");
    if (has("fit.t_lo")) s.fit_window = FitWindow{to_number(c, "fit.t_lo"), to_number(c, "fit.t_hi")};
    if (has("fit.exponent")) s.weighted_exponent = to_number(c, "fit.exponent");

    if (has("checks.alpha_min")) s.alpha_min = to_number(c, "checks.alpha_min");
    if (has("checks.alpha_max")) s.alpha_max = to_number(c, "checks.alpha_max");
    if (has("checks.weighted_ratio_max")) s.weighted_ratio_max = to_number(c, "checks.weighted_ratio_max");
    if (has("checks.energy_drift_max")) s.energy_drift_max = to_number(c, "checks.energy_drift_max");

    if (has("output.trace")) s.trace_path = c.at("output.trace");
    if (has("output.summary")) s.summary_path = c.at("output.summary");

    if (!(s.R > 0.0)) throw ConfigError("data.R must be positive");
    try {
        s.solver.validate();
        (void)s.profile();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_config(load_config(path)); }

void set_parameter(Scenario& s, const std::string& name, double value) {
    if (name == "V0") s.amplitude = value;
    else if (name == "L2") s.L2 = value;
    else if (name == "dead_zone_end") s.dead_zone_end = value;
    else if (name == "R") s.R = value;
    else if (name == "dx") s.solver.dx = value;
    else throw ConfigError("sweep parameter must be one of V0, L2, dead_zone_end, R, dx");
}

nlohmann::json to_json(const RateFit& fit) {
    return {{"alpha", fit.alpha},
            {"log_intercept", fit.log_intercept},
            {"window", {fit.window.t_lo, fit.window.t_hi}},
            {"rms_residual", fit.rms_residual},
            {"sample_count", fit.sample_count}};
}

nlohmann::json to_json(const AssumptionReport& report) {
    auto clause = [](const ClauseResult& c) {
        return nlohmann::json{
            {"name", c.name}, {"pass", c.pass}, {"worst_x", c.worst_x}, {"worst_margin", number_or_null(c.worst_margin)}};
    };
    nlohmann::json clauses = nlohmann::json::array();
    for (const auto& c : report.clauses) clauses.push_back(clause(c));
    return {{"structural_pass", report.structural_pass()}, {"clauses", clauses}, {"v0_above_two", clause(report.v0_above_two)}};
}

nlohmann::json to_json(const FeasibilityReport& report) {
    nlohmann::json margins = nlohmann::json::object();
    for (const auto& m : report.margins) margins[m.key] = m.margin;
    return {{"pass", report.pass}, {"margins", margins}};
}

std::string trace_csv(const std::vector<FunctionalSample>& samples) {
    std::string out = kTraceHeader;
    out += '\n';
    for (const auto& r : samples) {
        const double cols[] = {r.t,          r.E,    r.calE,
                               r.calF,       r.hardy_ratio, r.lyap_combo,
                               r.u_l2,       r.damped_mass_accum, r.weighted_budget_lhs,
                               r.weighted_budget_rhs};
        for (std::size_t i = 0; i < std::size(cols); ++i) {
            if (i) out += ',';
            out += format_number(cols[i]);
        }
        out += '\n';
    }
    return out;
}

std::vector<FunctionalSample> parse_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != kTraceHeader)
        throw ConfigError("trace CSV header does not match the expected columns");
    std::vector<FunctionalSample> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        std::vector<double> v;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            cell = trim(cell);
            if (cell == "nan" || cell == "NaN") {
                v.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            try {
                v.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("trace CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (v.size() != 10) throw ConfigError("trace CSV line " + std::to_string(lineno) + ": expected 10 columns");
        rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]});
    }
    return rows;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

ScenarioResult run_scenario(const Scenario& sc) {
    const DampingProfile profile = sc.profile();
    const InitialData data = sc.initial_data();
    const SolverConfig config = sc.resolved_solver();
    const bool half = sc.mode == DomainMode::HalfLine;

    nlohmann::json summary;
    summary["name"] = sc.name;
    summary["domain_mode"] = std::string(to_string(sc.mode));
    summary["profile"] = {{"kind", std::string(to_string(profile.kind()))},
                          {"amplitude", profile.amplitude()},
                          {"L2", profile.L2()},
                          {"dead_zone_end", profile.dead_zone_end()}};

    // Profile hypotheses and the multiplier machinery.
    std::optional<AssumptionReport> assumption;
    std::optional<ProfileConstants> constants;
    const double x_max = profile.L2() + std::max(100.0, sc.R + config.t_final);
    assumption = validate_assumption_A(profile, sc.sample_resolution, x_max);
    if (sc.validate_profile && !assumption->structural_pass())
        throw ConfigError("profile fails the structural hypotheses; set profile.validate = false for comparison runs");
    if (assumption->structural_pass()) constants = derive_constants(profile, sc.sample_resolution);
    summary["profile_validation"] = to_json(*assumption);

    std::optional<Multipliers> multipliers;
    nlohmann::json checks = nlohmann::json::object();
    if (sc.multiplier_source == MultiplierSource::Defaults && constants && assumption->v0_above_two.pass) {
        Multipliers m;
        m.params = default_params(constants->V0, constants->V_star);
        m.phi = PhiSpec(constants->L1, constants->L2);
        multipliers = m;
    } else if (sc.multiplier_source == MultiplierSource::Explicit) {
        Multipliers m;
        m.params = sc.explicit_params;
        m.phi = constants ? PhiSpec(constants->L1, constants->L2) : PhiSpec();
        multipliers = m;
    }

    summary["constants"] = nullptr;
    if (constants)
        summary["constants"] = {{"V0", constants->V0},   {"V1", constants->V1},   {"L1", constants->L1},
                                {"L2", constants->L2},   {"V_m", constants->V_m}, {"V_M", constants->V_M},
                                {"V_star", constants->V_star}};

    summary["multipliers"] = nullptr;
    summary["feasibility"] = nullptr;
    summary["t0"] = nullptr;
    summary["t0_min_margin"] = nullptr;
    if (multipliers) {
        summary["multipliers"] = {{"eps1", multipliers->params.eps1},
                                  {"eps2", multipliers->params.eps2},
                                  {"eps3", multipliers->params.eps3},
                                  {"k", multipliers->params.k},
                                  {"source", sc.multiplier_source == MultiplierSource::Explicit ? "explicit" : "paper-defaults"}};
        if (constants && half) {
            const auto feas = check_feasibility(multipliers->params, *constants);
            summary["feasibility"] = to_json(feas);
            if (sc.multiplier_source == MultiplierSource::Defaults) {
                checks["feasibility"] = feas.pass;
                T0Grid grid;
                grid.t_max = sc.t0_max;
                grid.t_resolution = sc.t0_resolution;
                const auto search = find_t0(*multipliers, profile, sc.R, grid);
                if (search.t0) {
                    multipliers->params.t0 = search.t0;
                    summary["t0"] = *search.t0;
                    summary["t0_min_margin"] = search.min_margin;
                }
                checks["t0_found"] = search.t0.has_value();
            }
        }
    }

    // Simulation.
    ScenarioResult result;
    result.trace = run(data, profile, config, multipliers);
    const auto& rows = result.trace.samples;
    summary["dt"] = result.trace.dt;
    summary["steps"] = config.step_count();
    summary["record_stride"] = config.record_stride;
    summary["samples"] = rows.size();
    summary["E0"] = rows.front().E;
    summary["E_final"] = rows.back().E;
    summary["energy_ratio"] = number_or_null(rows.back().E / rows.front().E);
    summary["weighted_source_norm"] = result.trace.source_norm;

    double hardy = 0.0, budget_margin = std::numeric_limits<double>::infinity();
    bool budget_ok = true, mass_monotone = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (std::isfinite(r.hardy_ratio)) hardy = std::max(hardy, r.hardy_ratio);
        if (std::isfinite(r.weighted_budget_lhs)) {
            const double margin = (r.weighted_budget_rhs - r.weighted_budget_lhs) / std::max(r.weighted_budget_rhs, 1e-300);
            budget_margin = std::min(budget_margin, margin);
            if (r.weighted_budget_lhs > r.weighted_budget_rhs * (1.0 + 1e-6)) budget_ok = false;
        }
        if (i > 0 && r.damped_mass_accum < rows[i - 1].damped_mass_accum) mass_monotone = false;
    }
    const double hardy_bound = 1.0 + 10.0 * config.dx;
    summary["hardy_bound"] = hardy_bound;
    summary["max_hardy_ratio"] = half ? nlohmann::json(hardy) : nlohmann::json(nullptr);
    summary["budget_min_margin"] = half ? number_or_null(budget_margin) : nlohmann::json(nullptr);
    checks["damped_mass_monotone"] = mass_monotone;
    if (half) {
        checks["hardy"] = hardy <= hardy_bound;
        checks["weighted_budget"] = budget_ok;
    }

    summary["rate_fit"] = nullptr;
    summary["envelope_fit"] = nullptr;
    summary["weighted_energy"] = nullptr;
    if (sc.fit_window) {
        const auto fit = fit_decay(rows, *sc.fit_window);
        summary["rate_fit"] = to_json(fit.plain);
        if (fit.envelope) summary["envelope_fit"] = to_json(*fit.envelope);
        const auto bound = bounded_weighted_energy(rows, sc.weighted_exponent, *sc.fit_window);
        summary["weighted_energy"] = {{"exponent", sc.weighted_exponent},
                                      {"sup", bound.sup},
                                      {"first", bound.first},
                                      {"last", bound.last},
                                      {"ratio_sup_first", bound.ratio_sup_first()},
                                      {"ratio_last_first", bound.ratio_last_first()}};
        if (sc.alpha_min) checks["alpha_min"] = fit.plain.alpha >= *sc.alpha_min;
        if (sc.alpha_max) checks["alpha_max"] = fit.plain.alpha <= *sc.alpha_max;
        if (sc.weighted_ratio_max) checks["weighted_ratio"] = bound.ratio_sup_first() <= *sc.weighted_ratio_max;
    }
    if (sc.energy_drift_max) checks["energy_drift"] = std::fabs(rows.back().E / rows.front().E - 1.0) <= *sc.energy_drift_max;

    summary["lyap_combo_max_after_t0"] = nullptr;
    summary["quadratic_bound"] = nullptr;
    if (multipliers && multipliers->params.t0 && *multipliers->params.t0 <= config.t_final) {
        const double t0 = *multipliers->params.t0;
        const auto q = quadratic_bound_check(rows, *multipliers, t0);
        summary["lyap_combo_max_after_t0"] = number_or_null(q.combo_max);
        summary["quadratic_bound"] = {{"C_est", number_or_null(q.C_est)},
                                      {"coercivity_min", number_or_null(q.coercivity_min)},
                                      {"min_margin", number_or_null(q.min_margin)},
                                      {"worst_t", q.worst_t},
                                      {"checked", q.checked},
                                      {"pass", q.pass}};
        checks["quadratic_bound"] = q.pass;
    }

    result.checks_pass = true;
    for (const auto& [key, value] : checks.items()) result.checks_pass = result.checks_pass && value.get<bool>();
    summary["checks"] = checks;
    summary["status"] = result.checks_pass ? "pass" : "check-failed";
    result.summary = std::move(summary);
    return result;
}

} // namespace dampwave
