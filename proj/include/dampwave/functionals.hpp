#pragma once

#include <dampwave/multipliers.hpp>
#include <dampwave/solver.hpp>

#include <optional>
#include <vector>

namespace dampwave {

struct FunctionalSample {
    double t = 0.0;
    double E = 0.0;
    double calE = 0.0;
    double calF = 0.0;
    double hardy_ratio = 0.0;
    double lyap_combo = 0.0;
    double u_l2 = 0.0;             // ||u(t)||^2
    double damped_mass_accum = 0.0; // int_0^t int V u^2 dx ds
    double weighted_budget_lhs = 0.0;
    double weighted_budget_rhs = 0.0;
};

struct WeightedDataNorm {
    double value = 0.0; // int sqrt(1+|x|) |V u0 + u1| dx
    double squared() const { return value * value; }
};

/// 1/2 int (u_t^2 + u_x^2) dx.
double energy(const Snapshot& s);

/// ||u||^2.
double l2_squared(const Snapshot& s);

/// (u, v) for two grid functions aligned with the snapshot.
double inner(const Snapshot& s, const std::vector<double>& a, const std::vector<double>& b);

/// [max_x |u| / sqrt(1+x)] / ||u_x||, 0 for ||u_x|| = 0. NaN on the whole line,
/// where the inequality does not apply.
double hardy_ratio(const Snapshot& s);

/// 1/2 int [f(u_t^2+u_x^2) + 2g u u_t + (gV - g_t) u^2 + 2h u_x u_t] dx.
double lyapunov_E(const Snapshot& s, const Multipliers& m);

/// Dissipation functional; on the half-line it includes the boundary flux
/// -1/2 int (h u_x^2)_x dx = 1/2 h(t,0) u_x(t,0)^2.
double dissipation_F(const Snapshot& s, const Multipliers& m);

/// f E + g (u, u_t) + 2 (h u_x, u_t).
double lyapunov_combo(const Snapshot& s, const Multipliers& m);

/// Weighted L1 norm of V u0 + u1 on [0, R] (or [-R, R] on the whole line),
/// by trapezoidal quadrature with the given spacing.
WeightedDataNorm weighted_source_norm(const InitialData& data, const DampingProfile& profile, double dx,
                                      DomainMode mode = DomainMode::HalfLine);

/// Starts the accumulation at t = 0 from u0 (the state's u_prev after
/// initialize) and folds in the first step to u_curr.
AuxiliaryState start_auxiliary(const WaveState& initial, const WaveSolver& solver);

/// Adds the trapezoidal contribution of the step that produced `state.u_curr`
/// from `state.u_prev`.
void accumulate_auxiliary(AuxiliaryState& aux, const WaveState& state, const WaveSolver& solver);

/// Left side of the auxiliary-function budget:
///   1/2 ||u||^2 + 1/4 ||w_x||^2 + int_0^t int V u^2.
/// Requires the snapshot's w.
double weighted_budget_lhs(const Snapshot& s, double damped_mass);

/// Right side: 1/2 ||u0||^2 + ||V u0 + u1||^2 in the weighted L1 norm.
double weighted_budget_rhs(double u0_l2_squared, const WeightedDataNorm& source);

/// Every column of a trace row. Multiplier columns are NaN without
/// multipliers; budget columns are NaN on the whole line.
FunctionalSample evaluate_sample(const Snapshot& s, const std::optional<Multipliers>& m, double damped_mass,
                                 double budget_rhs);

} // namespace dampwave
