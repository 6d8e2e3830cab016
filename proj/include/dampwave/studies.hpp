#pragma once

#include <dampwave/scenario.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dampwave {

struct ConvergenceLevel {
    double dx = 0.0;
    double dt = 0.0;
    double error = 0.0;           // discrete L2 distance to the reference at t_final
    std::optional<double> order;  // log2(e_prev / e_this), from the second level on
};

struct ConvergenceTable {
    std::vector<ConvergenceLevel> levels;
    double reference_dx = 0.0;
    double checkpoint = 0.0;
};

/// Runs the scenario at dx, dx/2, ..., dx/2^(levels-1) and compares u at
/// t_final with a reference four times finer than the finest level, on the
/// coarse nodes. The cfl number is kept fixed so dt halves with dx.
/// Throws std::invalid_argument for levels < 3.
ConvergenceTable convergence_study(const Scenario& scenario, std::size_t levels);

struct SweepRow {
    double value = 0.0;
    bool ok = false;              // the run completed
    bool checks_pass = false;
    std::optional<double> alpha;
    std::string error;            // set when the run failed
    nlohmann::json summary;
};

/// Runs one scenario per value, up to `threads` at a time. A failing value
/// is recorded in its row and the sweep continues.
std::vector<SweepRow> sweep(const Scenario& base, const std::string& parameter, const std::vector<double>& values,
                            unsigned threads = 1);

/// Aggregated CSV: parameter,value,status,alpha,checks_pass,error.
std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows);

} // namespace dampwave
