#pragma once

#include <dampwave/multipliers.hpp>
#include <dampwave/rates.hpp>
#include <dampwave/simulation.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace dampwave {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat key/value config: `key = value` lines, `[section]` headers prefix
/// the keys that follow with `section.`, `#` starts a comment, values may
/// be double-quoted.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_config(const std::string& text);
ConfigMap load_config(const std::filesystem::path& path);

/// Named initial-data shapes on [0, R]:
///   zero, hat (peak at R/2), bump (cos^2 window vanishing at 0 and R),
///   bump4 (cos^4 window, three continuous derivatives), box (constant on
///   [0, R], velocity only).
struct ShapeSpec {
    std::string name = "zero";
    double amplitude = 1.0;
};
std::function<double(double)> make_shape(const ShapeSpec& shape, double R, bool mirrored);

enum class MultiplierSource { Defaults, Explicit, None };

struct Scenario {
    std::string name = "scenario";
    DomainMode mode = DomainMode::HalfLine;

    ProfileKind profile_kind = ProfileKind::Zero;
    double amplitude = 0.0;
    double L2 = 0.0;
    double dead_zone_end = 0.0;
    bool validate_profile = true;

    ShapeSpec u0{"bump", 1.0};
    ShapeSpec u1{"zero", 0.0};
    double R = 2.0;

    SolverConfig solver;
    std::optional<std::size_t> record_samples; // overrides solver.record_stride

    MultiplierSource multiplier_source = MultiplierSource::Defaults;
    MultiplierParams explicit_params;
    double t0_max = 1e4;
    double t0_resolution = 1.0;
    double sample_resolution = 0.01;

    std::optional<FitWindow> fit_window;
    double weighted_exponent = 2.0;

    // Optional pass/fail thresholds checked by run_scenario.
    std::optional<double> alpha_min;
    std::optional<double> alpha_max;
    std::optional<double> weighted_ratio_max;
    std::optional<double> energy_drift_max;

    std::string trace_path;
    std::string summary_path;

    DampingProfile profile() const;
    InitialData initial_data() const;
    /// Solver config with the record stride resolved from record_samples.
    SolverConfig resolved_solver() const;
};

Scenario scenario_from_config(const ConfigMap& config);
Scenario load_scenario(const std::filesystem::path& path);

/// Sets one sweepable parameter: V0, L2, dead_zone_end, R or dx.
void set_parameter(Scenario& scenario, const std::string& name, double value);

struct ScenarioResult {
    EnergyTrace trace;
    nlohmann::json summary;
    bool checks_pass = true;
};

/// Runs the scenario with every probe attached and builds the summary.
/// Throws ConfigError for invalid setups and InstabilityError from the solver.
ScenarioResult run_scenario(const Scenario& scenario);

/// Trace CSV with the documented column order.
std::string trace_csv(const std::vector<FunctionalSample>& samples);
std::vector<FunctionalSample> parse_trace_csv(const std::string& text);

inline constexpr const char* kTraceHeader =
    "t,E,calE,calF,hardy_ratio,lyap_combo,u_l2,damped_mass_accum,weighted_budget_lhs,weighted_budget_rhs";

/// Writes via a temporary file and rename.
void write_atomically(const std::filesystem::path& path, const std::string& content);

nlohmann::json to_json(const RateFit& fit);
nlohmann::json to_json(const AssumptionReport& report);
nlohmann::json to_json(const FeasibilityReport& report);

} // namespace dampwave
