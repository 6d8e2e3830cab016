// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// line fails. Runs every scenario in the catalog once.

#include <dampwave/studies.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>

using namespace dampwave;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
    std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct CatalogRun {
    Scenario scenario;
    ScenarioResult result;
    double seconds = 0.0;
    std::string error;
};

std::map<std::string, CatalogRun> run_catalog() {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(DAMPWAVE_SCENARIO_DIR))
        if (e.path().extension() == ".cfg") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::map<std::string, CatalogRun> runs;
    for (const auto& f : files) {
        CatalogRun r;
        try {
            r.scenario = load_scenario(f);
            const auto start = std::chrono::steady_clock::now();
            r.result = run_scenario(r.scenario);
            r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        std::printf("      ran %-32s %7.1f s%s%s\n", f.stem().c_str(), r.seconds, r.error.empty() ? "" : "  error: ",
                    r.error.c_str());
        runs[f.stem().string()] = std::move(r);
    }
    return runs;
}

const CatalogRun* find(const std::map<std::string, CatalogRun>& runs, const std::string& name) {
    auto it = runs.find(name);
    if (it == runs.end() || !it->second.error.empty()) {
        report(false, name, it == runs.end() ? "scenario missing from the catalog" : "run failed: " + it->second.error);
        return nullptr;
    }
    return &it->second;
}

double json_number(const nlohmann::json& j) { return j.is_number() ? j.get<double>() : std::nan(""); }

void decay_criterion(const std::map<std::string, CatalogRun>& runs) {
    const auto* r = find(runs, "theorem-1-1");
    if (!r) return;
    const auto& s = r->result.summary;
    const double alpha = json_number(s["rate_fit"]["alpha"]);
    const double ratio = json_number(s["weighted_energy"]["ratio_sup_first"]);
    report(alpha >= 1.7 && ratio <= 2.0, "theorem-1-1 decay",
           fmt("alpha = %.4f (>= 1.7), sup E(1+t)^2 / value at t=500 = %.4f (<= 2)", alpha, ratio));
    report(r->seconds < 120.0, "theorem-1-1 runtime", fmt("%.1f s (< 120 s)", r->seconds));
}

void whole_line_criterion(const std::map<std::string, CatalogRun>& runs) {
    const auto* r = find(runs, "wholeline-remark-1-1");
    if (!r) return;
    const auto& s = r->result.summary;
    const double alpha = json_number(s["rate_fit"]["alpha"]);
    const double ratio = json_number(s["weighted_energy"]["ratio_sup_first"]);
    report(alpha >= 0.8 && alpha <= 1.4 && ratio <= 2.0, "whole-line decay",
           fmt("alpha = %.4f (in [0.8, 1.4]), sup E(1+t) / value at t=500 = %.4f (<= 2)", alpha, ratio));
}

void conjecture_criterion(const std::map<std::string, CatalogRun>& runs) {
    const auto* a = find(runs, "halfline-subcritical-1");
    const auto* b = find(runs, "halfline-subcritical-1-5");
    const auto* c = find(runs, "theorem-1-1");
    if (!a || !b || !c) return;
    const double a1 = json_number(a->result.summary["rate_fit"]["alpha"]);
    const double a15 = json_number(b->result.summary["rate_fit"]["alpha"]);
    const double a6 = json_number(c->result.summary["rate_fit"]["alpha"]);
    report(a15 - a1 >= 0.15 && a6 - a15 >= 0.15, "subcritical ordering",
           fmt("alpha(V0=1) = %.4f < alpha(V0=1.5) = %.4f < alpha(V0=6) = %.4f, gaps %.3f, %.3f (>= 0.15)", a1, a15, a6,
               a15 - a1, a6 - a15));
}

void feasibility_criterion() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> V0d(2.0, 100.0), Vsd(0.1, 100.0);
    int pass = 0;
    double worst = 0.0;
    const int draws = 1000;
    for (int i = 0; i < draws; ++i) {
        double V0 = V0d(rng);
        if (V0 == 2.0) V0 = std::nextafter(2.0, 3.0);
        double Vs = Vsd(rng);
        if (Vs == 0.1) Vs = std::nextafter(0.1, 1.0);
        ProfileConstants c;
        c.V0 = c.V1 = V0;
        c.V_star = Vs;
        const auto r = check_feasibility(default_params(V0, Vs), c);
        const double e = V0 - 2.0;
        const double expected[] = {e, e, 0.5 * e};
        const double got[] = {r.at("near_boundary").margin, r.at("tail_velocity").margin,
                              r.at("unified_gradient").margin};
        bool ok = r.pass;
        for (int k = 0; k < 3; ++k) {
            const double rel = std::fabs(got[k] - expected[k]) / expected[k];
            worst = std::max(worst, rel);
            ok = ok && rel <= 1e-12;
        }
        pass += ok;
    }
    report(pass == draws, "feasibility suite",
           fmt("%d/%d draws pass, worst relative margin error %.2e (<= 1e-12)", pass, draws, worst));
}

void t0_criterion() {
    const auto profile = DampingProfile::dead_zone(6.0, 1.0, 2.0);
    const auto m = default_multipliers(profile, 0.01);
    if (!m) {
        report(false, "activation time", "profile rejected");
        return;
    }
    T0Grid grid;
    grid.t_max = 1e4;
    const auto search = find_t0(*m, profile, 2.0, grid);
    const bool ok = search.t0 && *search.t0 <= 1e3 && search.min_margin > 0.0;
    report(ok, "activation time",
           search.t0 ? fmt("t0 = %g (<= 1000), min margin over [t0, 1e4] x [0, R+t] = %.3e (> 0)", *search.t0,
                           search.min_margin)
                     : fmt("no t0 up to 1e4 (last failure at t = %g)", search.last_failure));
}

// |d calE/dt + calF| at time T with a centered time difference, on the
// theorem-1-1 trajectory.
double identity_residual(double dt, double T) {
    const auto profile = DampingProfile::dead_zone(6.0, 1.0, 2.0);
    const auto m = default_multipliers(profile, 0.01);
    SolverConfig c;
    c.cfl = 0.9;
    c.dx = dt / c.cfl;
    c.t_final = T + dt;
    c.record_stride = 1;
    const InitialData data{make_shape({"bump", 1.0}, 2.0, false), make_shape({"zero", 0.0}, 2.0, false), 2.0};
    const auto trace = run(data, profile, c, m);
    const auto& rows = trace.samples;
    std::size_t n = 1;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i)
        if (std::fabs(rows[i].t - T) < std::fabs(rows[n].t - T)) n = i;
    return std::fabs((rows[n + 1].calE - rows[n - 1].calE) / (rows[n + 1].t - rows[n - 1].t) + rows[n].calF);
}

void identity_criterion() {
    const double coarse = identity_residual(0.04, 100.0);
    const double fine = identity_residual(0.02, 100.0);
    const double ratio = coarse / fine;
    // Early-time ratio for context only.
    const double early = identity_residual(0.04, 10.0) / identity_residual(0.02, 10.0);
    report(ratio >= 3.0 && ratio <= 5.0, "identity residual",
           fmt("residual at t=100: %.4e (dt=0.04), %.4e (dt=0.02), ratio %.3f (in [3, 5]); ratio at t=10: %.3f",
               coarse, fine, ratio, early));
}

void hardy_and_budget_criteria(const std::map<std::string, CatalogRun>& runs) {
    bool hardy_ok = true, budget_ok = true;
    std::size_t half_runs = 0;
    double worst_hardy = 0.0, worst_budget = std::numeric_limits<double>::infinity();
    std::string hardy_at, budget_at;
    for (const auto& [name, r] : runs) {
        if (!r.error.empty()) {
            hardy_ok = budget_ok = false;
            continue;
        }
        if (r.scenario.mode != DomainMode::HalfLine) continue;
        ++half_runs;
        const double bound = 1.0 + 10.0 * r.scenario.solver.dx;
        for (const auto& row : r.result.trace.samples) {
            const double h = row.hardy_ratio - bound;
            if (!(h <= 0.0)) hardy_ok = false;
            if (row.hardy_ratio / bound > worst_hardy) {
                worst_hardy = row.hardy_ratio / bound;
                hardy_at = name;
            }
            const double margin = (row.weighted_budget_rhs - row.weighted_budget_lhs) / row.weighted_budget_rhs;
            if (!(row.weighted_budget_lhs <= row.weighted_budget_rhs * (1.0 + 1e-6))) budget_ok = false;
            if (margin < worst_budget) {
                worst_budget = margin;
                budget_at = name;
            }
        }
    }
    report(hardy_ok, "Hardy suite",
           fmt("%zu half-line runs, max ratio / (1 + 10 dx) = %.4f (<= 1) in %s", half_runs, worst_hardy,
               hardy_at.c_str()));
    report(budget_ok, "weighted budget",
           fmt("%zu half-line runs, min relative margin (rhs - lhs)/rhs = %.4f (>= -1e-6) in %s", half_runs,
               worst_budget, budget_at.c_str()));
}

void conservation_criterion(const std::map<std::string, CatalogRun>& runs) {
    const auto* r = find(runs, "undamped-conservation");
    if (!r) return;
    const auto& rows = r->result.trace.samples;
    const double drift = std::fabs(rows.back().E / rows.front().E - 1.0);
    report(drift <= 1e-3, "undamped conservation", fmt("|E(50)/E(0) - 1| = %.3e (<= 1e-3) at cfl 0.9", drift));

    // cos^4 data vanishes to fourth order at x = 0, so the one-sided boundary
    // derivative in the t = 0 energy is exact to O(dx^7).
    Scenario exact = r->scenario;
    exact.solver.cfl = 1.0;
    exact.u0.name = "bump4";
    exact.energy_drift_max.reset();
    const auto e = run_scenario(exact);
    const auto& er = e.trace.samples;
    const double drift1 = std::fabs(er.back().E / er.front().E - 1.0);
    report(drift1 <= 1e-10, "undamped conservation cfl=1", fmt("|E(50)/E(0) - 1| = %.3e (<= 1e-10), cos^4 data", drift1));
}

void convergence_criterion() {
    const auto sc = load_scenario(fs::path(DAMPWAVE_SCENARIO_DIR) / "smooth-bump-convergence.cfg");
    const auto table = convergence_study(sc, 4);
    bool ok = true;
    std::string orders;
    for (const auto& l : table.levels) {
        if (!l.order) continue;
        ok = ok && std::fabs(*l.order - 2.0) <= 0.2;
        orders += fmt("%s%.3f", orders.empty() ? "" : ", ", *l.order);
    }
    report(ok, "convergence order", "observed orders " + orders + " (2.0 +/- 0.2)");
}

void quadratic_bound_criterion(const std::map<std::string, CatalogRun>& runs) {
    const auto* r = find(runs, "theorem-1-1");
    if (!r) return;
    const auto& q = r->result.summary["quadratic_bound"];
    if (q.is_null()) {
        report(false, "quadratic bound", "not evaluated: no t0 within the run");
        return;
    }
    report(q["pass"].get<bool>(), "quadratic bound",
           fmt("%zu samples after t0 = %g, C_est = %.4g, min margin %.3e (>= 0)", q["checked"].get<std::size_t>(),
               json_number(r->result.summary["t0"]), json_number(q["C_est"]), json_number(q["min_margin"])));
}

} // namespace

int main() {
    feasibility_criterion();
    t0_criterion();
    identity_criterion();
    convergence_criterion();

    const auto runs = run_catalog();
    decay_criterion(runs);
    whole_line_criterion(runs);
    conjecture_criterion(runs);
    hardy_and_budget_criteria(runs);
    conservation_criterion(runs);
    quadratic_bound_criterion(runs);

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
