#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dampwave {

enum class ProfileKind { DeadZoneCritical, PureCritical, Constant, Zero };

std::string_view to_string(ProfileKind kind);
ProfileKind parse_profile_kind(std::string_view name);

/// Damping coefficient V(x) on the half-line.
///
/// DeadZoneCritical: V = 0 on [0, dead_zone_end], cubic Hermite ramp with
/// zero end slopes up to amplitude/(1+L2) on [dead_zone_end, L2], and
/// amplitude/(1+x) beyond L2.
/// PureCritical: V = amplitude/(1+x) everywhere.
/// Constant: V = amplitude everywhere.
/// Zero: V = 0.
///
/// Whole-line evaluation uses V(|x|).
class DampingProfile {
public:
    static DampingProfile dead_zone(double amplitude, double dead_zone_end, double L2);
    static DampingProfile pure_critical(double amplitude, double L2 = 0.0);
    static DampingProfile constant(double value);
    static DampingProfile zero();

    double operator()(double x) const;

    ProfileKind kind() const { return kind_; }
    double amplitude() const { return amplitude_; }
    double L2() const { return L2_; }
    double dead_zone_end() const { return dead_zone_end_; }

    /// Tail constants (V0, V1) the profile puts forward for the tail assumptions.
    /// For the critical kinds V0 = V1 = amplitude; for Constant the bound is
    /// anchored at L2, which the upper tail bound then fails to sustain.
    double claimed_V0() const;
    double claimed_V1() const;

    bool operator==(const DampingProfile&) const = default;

private:
    DampingProfile(ProfileKind kind, double amplitude, double dead_zone_end, double L2);

    ProfileKind kind_;
    double amplitude_;
    double dead_zone_end_;
    double L2_;
};

struct ClauseResult {
    std::string name;
    bool pass = true;
    double worst_x = 0.0;      // sample point with the smallest margin
    double worst_margin = 0.0; // negative when the clause fails
};

struct AssumptionReport {
    std::vector<ClauseResult> clauses; // structural clauses
    ClauseResult v0_above_two;         // the V0 > 2 hypothesis, reported apart
    bool structural_pass() const;
    bool decay_hypotheses_pass() const { return structural_pass() && v0_above_two.pass; }
};

/// Sampling-based check of the profile assumptions on [0, x_max] at the given
/// resolution. Throws std::invalid_argument for resolution <= 0.
AssumptionReport validate_assumption_A(const DampingProfile& profile, double sample_resolution,
                                       double x_max);

struct ProfileConstants {
    double V0 = 0.0;
    double V1 = 0.0;
    double L1 = 0.0;
    double L2 = 0.0;
    double V_m = 0.0;
    double V_M = 0.0;
    double V_star = 0.0;
};

/// Derives L1, V_m, V_M and V* by grid scan. Throws std::domain_error when
/// V(L2) = 0, which contradicts the tail assumption.
ProfileConstants derive_constants(const DampingProfile& profile, double sample_resolution);

} // namespace dampwave
