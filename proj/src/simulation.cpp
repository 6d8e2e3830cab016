#include <dampwave/simulation.hpp>

namespace dampwave {

namespace {

void attach_w(Snapshot& snap, const WaveState& st, const AuxiliaryState& aux) {
    const std::size_t first = st.mode == DomainMode::HalfLine ? st.origin : st.lo - 1;
    snap.w.assign(aux.w.begin() + static_cast<std::ptrdiff_t>(first),
                  aux.w.begin() + static_cast<std::ptrdiff_t>(first + snap.size()));
}

} // namespace

EnergyTrace run(const InitialData& data, const DampingProfile& profile, const SolverConfig& config,
                const std::optional<Multipliers>& multipliers, const std::vector<TraceProbe>& probes) {
    const WaveSolver solver(profile, config, data.support_radius);
    EnergyTrace trace;
    trace.dt = solver.dt();

    const auto source = weighted_source_norm(data, profile, config.dx, config.mode);
    trace.source_norm = source.value;

    auto emit = [&](const Snapshot& snap, double damped_mass, double rhs) {
        const auto row = evaluate_sample(snap, multipliers, damped_mass, rhs);
        trace.samples.push_back(row);
        for (const auto& probe : probes) probe(snap, row);
    };

    Snapshot first = solver.initial_snapshot(data);
    first.w.assign(first.size(), 0.0);
    const double rhs = weighted_budget_rhs(l2_squared(first), source);
    emit(first, 0.0, rhs);

    WaveState state = solver.initialize(data);
    AuxiliaryState aux = start_auxiliary(state, solver);
    const std::size_t n_steps = solver.step_count();
    const std::size_t stride = config.record_stride;
    trace.samples.reserve(n_steps / stride + 2);

    if (n_steps == 0) {
        trace.final_state = state;
        return trace;
    }

    std::vector<double> before;
    for (std::size_t n = 1; n <= n_steps; ++n) {
        const bool record = n % stride == 0 || n == n_steps;
        if (n == n_steps) trace.final_state = state;
        if (!record) {
            solver.step(state, aux);
            continue;
        }
        before = state.u_prev;
        const double damped_mass = aux.damped_mass;
        solver.step(state);
        // aux still holds level n until the step is folded in below.
        Snapshot snap = solver.snapshot(state, before);
        attach_w(snap, state, aux);
        emit(snap, damped_mass, rhs);
        accumulate_auxiliary(aux, state, solver);
    }
    return trace;
}

} // namespace dampwave
