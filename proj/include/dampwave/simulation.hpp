#pragma once

#include <dampwave/functionals.hpp>

#include <functional>
#include <optional>
#include <vector>

namespace dampwave {

struct EnergyTrace {
    std::vector<FunctionalSample> samples;
    WaveState final_state; // levels t_final - dt and t_final
    double dt = 0.0;
    double source_norm = 0.0; // ||V u0 + u1|| in the weighted L1 norm
};

/// Called with every recorded snapshot (w attached) and its computed row.
using TraceProbe = std::function<void(const Snapshot&, const FunctionalSample&)>;

/// Integrates to config.t_final, recording a row every record_stride steps
/// and at t_final. Multiplier columns are NaN when `multipliers` is empty.
/// Throws InstabilityError carrying the failing time.
EnergyTrace run(const InitialData& data, const DampingProfile& profile, const SolverConfig& config,
                const std::optional<Multipliers>& multipliers, const std::vector<TraceProbe>& probes = {});

} // namespace dampwave
