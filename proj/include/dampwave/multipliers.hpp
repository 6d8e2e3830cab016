#pragma once

#include <dampwave/profiles.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace dampwave {

/// Monotone bridge function: 1+x on [0, L1], 1+L2 on [L2, inf), joined by a
/// quintic Hermite segment with slopes (1, 0) and zero curvature at both ends.
class PhiSpec {
public:
    PhiSpec() = default;
    /// Throws std::invalid_argument unless 0 <= L1 < L2 or L1 = L2 = 0, and
    /// std::domain_error if the sampled slope dips below -1e-12.
    PhiSpec(double L1, double L2);

    double L1() const { return L1_; }
    double L2() const { return L2_; }

    double value(double x) const;
    double slope(double x) const;

private:
    double L1_ = 0.0;
    double L2_ = 0.0;
};

struct MultiplierParams {
    double eps1 = 1.0;
    double eps2 = 0.0;
    double eps3 = 0.0;
    double k = 1.0;
    std::optional<double> t0;

    // Uniform bounds g_t - gV <= C1 and g_t V - g_tt <= C2 V; both equal eps2
    // for the linear g.
    double C1() const { return eps2; }
    double C2() const { return eps2; }
};

/// f(t) = eps1 (1+t)^2, g(t) = eps2 (1+t), h(t,x) = eps3 (1+t) phi(x),
/// with phi extended evenly for whole-line use.
struct Multipliers {
    MultiplierParams params;
    PhiSpec phi;

    double f(double t) const { return params.eps1 * (1.0 + t) * (1.0 + t); }
    double f_t(double t) const { return 2.0 * params.eps1 * (1.0 + t); }
    double g(double t) const { return params.eps2 * (1.0 + t); }
    double g_t(double) const { return params.eps2; }
    double g_tt(double) const { return 0.0; }
    double h(double t, double x) const { return params.eps3 * (1.0 + t) * phi.value(std::abs(x)); }
    double h_x(double t, double x) const {
        const double s = x < 0.0 ? -1.0 : 1.0;
        return s * params.eps3 * (1.0 + t) * phi.slope(std::abs(x));
    }
    double h_t(double, double x) const { return params.eps3 * phi.value(std::abs(x)); }
};

struct ParamWarning {
    bool near_singular = false; // V0 - 2 < 0.1, k blows up
};

/// The explicit choice eps1 = 1, eps2 = V0/2, eps3 = 2 V0, k = 4 V0 V*/(V0-2).
/// Throws std::domain_error for V0 <= 2 and std::invalid_argument for V* <= 0.
MultiplierParams default_params(double V0, double V_star, ParamWarning* warning = nullptr);

struct InequalityMargin {
    std::string key;     // stable identifier used in JSON output
    std::string formula; // human-readable left-hand side
    double margin = 0.0;
    bool pass() const { return margin > 0.0; }
};

struct FeasibilityReport {
    // near_boundary, tail_velocity, near_boundary_gradient, bridge_gradient,
    // tail_gradient, then unified_gradient which implies the three before it.
    std::vector<InequalityMargin> margins;
    bool pass = false; // near_boundary, tail_velocity and unified_gradient positive
    const InequalityMargin& at(const std::string& key) const;
};

FeasibilityReport check_feasibility(const MultiplierParams& params, const ProfileConstants& constants);

/// Exact coefficient of u_t^2 in the dissipation functional after the
/// Young split with parameter k: 2fV - f_t - 2g + h_x - k h V - h_t.
double ut_coefficient(double t, double x, const Multipliers& m, const DampingProfile& profile);
/// Exact coefficient of u_x^2: 2g - f_t + h_x - h V / k - h_t.
double ux_coefficient(double t, double x, const Multipliers& m, const DampingProfile& profile);

struct CaseBounds {
    double ut = 0.0;
    double ux = 0.0;
};
/// Lower bounds from the three-case split [0,L1], [L1,L2], [L2,inf) used to
/// establish positivity; x is limited to [0, R+t].
CaseBounds condition_case_bounds(double t, double x, const Multipliers& m, const DampingProfile& profile,
                                 const ProfileConstants& c, double R);

struct ActivationSearch {
    std::optional<double> t0;
    double min_margin = 0.0;  // min over sampled (t, x) with t >= t0 of both conditions
    double worst_t = 0.0;
    double worst_x = 0.0;
    double last_failure = -1.0; // latest sampled t with a nonpositive condition
};

struct T0Grid {
    double t_max = 1e4;
    double t_resolution = 1.0;
    double x_resolution = 0.05; // uniform spacing near the boundary
    double x_growth = 1.01;     // geometric spacing factor far out
};

/// Smallest sampled t such that both coefficients are strictly positive for
/// all sampled x in [0, R+t'] and all sampled t' in [t, t_max].
ActivationSearch find_t0(const Multipliers& m, const DampingProfile& profile, double R, const T0Grid& grid);

/// Spatial sample points in [0, x_end] used by the t0 scan.
std::vector<double> condition_x_samples(double x_end, double L2, const T0Grid& grid);

/// inf over x of (f(t) - 2h(t,x)) / f(t) = 1 - 2 eps3 (1+L2) / (eps1 (1+t)).
double coercivity_ratio(const MultiplierParams& params, double L2, double t);

/// t beyond which coercivity_ratio >= 1/2.
double coercivity_half_threshold(const MultiplierParams& params, double L2);

/// Builds default multipliers for a profile; std::nullopt when the
/// profile does not satisfy the hypotheses.
std::optional<Multipliers> default_multipliers(const DampingProfile& profile, double sample_resolution);

} // namespace dampwave
