#pragma once

#include <dampwave/profiles.hpp>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace dampwave {

enum class DomainMode { HalfLine, WholeLine };

std::string_view to_string(DomainMode mode);
DomainMode parse_domain_mode(std::string_view name);

struct SolverConfig {
    double dx = 0.05;
    double cfl = 0.9;
    double t_final = 1.0;
    DomainMode mode = DomainMode::HalfLine;
    std::size_t wavefront_margin = 2; // zero guard cells past the numerical domain of dependence
    std::size_t record_stride = 1;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
    /// Number of steps; dt is shrunk so that steps * dt == t_final.
    std::size_t step_count() const;
    double time_step() const;
};

/// Initial displacement and velocity, supported in [0, R]. In whole-line
/// mode the functions are evaluated at signed x; callers that want mirrored
/// data pass functions of |x|.
struct InitialData {
    std::function<double(double)> u0;
    std::function<double(double)> u1;
    double support_radius = 1.0;
};

class InstabilityError : public std::runtime_error {
public:
    InstabilityError(double t, const std::string& what) : std::runtime_error(what), time_(t) {}
    double time() const { return time_; }

private:
    double time_;
};

/// Two consecutive time levels on the grid x_i = (i - origin) dx. Cells
/// outside [lo, hi] are exactly zero.
struct WaveState {
    double t = 0.0;
    std::size_t step = 0;
    std::vector<double> u_prev;
    std::vector<double> u_curr;
    std::size_t origin = 0;
    std::size_t lo = 0;
    std::size_t hi = 0;
    double dx = 0.0;
    double dt = 0.0;
    DomainMode mode = DomainMode::HalfLine;

    double x(std::size_t i) const { return (static_cast<double>(i) - static_cast<double>(origin)) * dx; }
    /// Index of the last possibly-nonzero cell.
    std::size_t active_extent() const { return hi; }
};

/// A field snapshot at one time level restricted to the active range plus
/// one zero cell on each open side. Spatial derivatives use central
/// differences in the interior and a one-sided second-order stencil at the
/// half-line boundary.
struct Snapshot {
    double t = 0.0;
    double dx = 0.0;
    DomainMode mode = DomainMode::HalfLine;
    double x_first = 0.0;
    std::vector<double> u;
    std::vector<double> u_t;
    std::vector<double> u_x;
    std::vector<double> V;
    std::vector<double> w; // time integral of u; empty when not tracked

    std::size_t size() const { return u.size(); }
    double x(std::size_t i) const { return x_first + static_cast<double>(i) * dx; }
    /// Trapezoidal weight of node i (dx, halved at both array ends).
    double weight(std::size_t i) const { return (i == 0 || i + 1 == u.size()) ? 0.5 * dx : dx; }
};

/// Central-difference derivative of samples; at index 0 the one-sided
/// second-order stencil is used when `boundary_at_start` is set.
std::vector<double> grid_derivative(const std::vector<double>& v, double dx, bool boundary_at_start);

/// Running time integral w of u and the damped mass int_0^t int V u^2,
/// accumulated with the trapezoidal rule in time. Indexed like WaveState.
struct AuxiliaryState {
    std::vector<double> w;
    double damped_mass = 0.0;
    double last_density = 0.0; // int V u^2 at the most recent level
};

/// Leapfrog scheme for u_tt - u_xx + V u_t = 0 with trapezoidal treatment
/// of the damping term:
///   (1 + V dt/2) u^{n+1} = 2u^n - (1 - V dt/2) u^{n-1} + (dt/dx)^2 D+D- u^n
/// The active grid grows by one cell per step from the data support, which
/// is the exact numerical domain of dependence; a tighter cut at x = R + t
/// would discard the scheme's precursors and bias long runs.
class WaveSolver {
public:
    WaveSolver(DampingProfile profile, SolverConfig config, double support_radius);

    const SolverConfig& config() const { return config_; }
    const DampingProfile& profile() const { return profile_; }
    double dt() const { return dt_; }
    std::size_t step_count() const { return steps_; }
    double support_radius() const { return radius_; }

    /// Samples u0 into u_prev and the second-order start level
    /// u0 + dt u1 + dt^2/2 (u0'' - V u1) into u_curr; state.t = dt.
    WaveState initialize(const InitialData& data) const;

    /// Advances one step. Throws InstabilityError on non-finite values and
    /// std::out_of_range when stepping past the preallocated horizon.
    void step(WaveState& state) const;
    /// Same update, folding the step into the auxiliary accumulators.
    void step(WaveState& state, AuxiliaryState& aux) const;

    /// Snapshot of level n taken right after stepping from n to n+1:
    /// `after_step.u_prev` is u^n, `after_step.u_curr` is u^{n+1} and
    /// `u_before` is u^{n-1}; u_t is the centered difference.
    Snapshot snapshot(const WaveState& after_step, const std::vector<double>& u_before) const;
    /// Snapshot at t = 0 from the initial data, with u_t = u1 exactly.
    Snapshot initial_snapshot(const InitialData& data) const;

    /// Damping coefficient sampled on the grid.
    const std::vector<double>& damping() const { return V_; }

    /// Index range [lo, hi] that can be nonzero at time level n. The stencil
    /// spreads one cell per step, so everything outside is exactly zero.
    std::pair<std::size_t, std::size_t> active_range(std::size_t level) const;

private:
    template <bool WithAux>
    void advance(WaveState& state, AuxiliaryState* aux) const;

    DampingProfile profile_;
    SolverConfig config_;
    double radius_;
    double dt_;
    std::size_t steps_;
    std::size_t origin_;
    std::size_t capacity_;
    std::size_t base_cells_;
    std::vector<double> V_;
    std::vector<double> inv_diag_;  // 1 / (1 + V dt/2)
    std::vector<double> prev_coef_; // 1 - V dt/2
};

/// Staggered discrete energy between levels n and n+1:
///   1/2 dx sum [((u^{n+1}-u^n)/dt)^2 + D+u^{n+1} D+u^n]
/// exactly conserved by the scheme when V = 0 and nonincreasing otherwise.
double staggered_energy(const WaveState& state);

} // namespace dampwave
