#include <dampwave/profiles.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dampwave {

std::string_view to_string(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::DeadZoneCritical: return "dead-zone";
    case ProfileKind::PureCritical: return "pure-critical";
    case ProfileKind::Constant: return "constant";
    case ProfileKind::Zero: return "zero";
    }
    return "unknown";
}

ProfileKind parse_profile_kind(std::string_view name) {
    if (name == "dead-zone" || name == "critical-tail-with-dead-zone") return ProfileKind::DeadZoneCritical;
    if (name == "pure-critical") return ProfileKind::PureCritical;
    if (name == "constant") return ProfileKind::Constant;
    if (name == "zero") return ProfileKind::Zero;
    throw std::invalid_argument("unknown profile kind '" + std::string(name) + "'");
}

DampingProfile::DampingProfile(ProfileKind kind, double amplitude, double dead_zone_end, double L2)
    : kind_(kind), amplitude_(amplitude), dead_zone_end_(dead_zone_end), L2_(L2) {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
        throw std::invalid_argument("profile amplitude must be finite and nonnegative");
    if (!(L2 >= 0.0) || !std::isfinite(L2))
        throw std::invalid_argument("profile L2 must be finite and nonnegative");
    if (kind == ProfileKind::DeadZoneCritical && !(dead_zone_end >= 0.0 && dead_zone_end < L2))
        throw std::invalid_argument("dead zone must satisfy 0 <= dead_zone_end < L2");
}

DampingProfile DampingProfile::dead_zone(double amplitude, double dead_zone_end, double L2) {
    return {ProfileKind::DeadZoneCritical, amplitude, dead_zone_end, L2};
}

DampingProfile DampingProfile::pure_critical(double amplitude, double L2) {
    return {ProfileKind::PureCritical, amplitude, 0.0, L2};
}

DampingProfile DampingProfile::constant(double value) {
    return {ProfileKind::Constant, value, 0.0, 0.0};
}

DampingProfile DampingProfile::zero() {
    return {ProfileKind::Zero, 0.0, 0.0, 0.0};
}

double DampingProfile::operator()(double x) const {
    x = std::fabs(x);
    switch (kind_) {
    case ProfileKind::DeadZoneCritical: {
        if (x <= dead_zone_end_) return 0.0;
        if (x >= L2_) return amplitude_ / (1.0 + x);
        const double s = (x - dead_zone_end_) / (L2_ - dead_zone_end_);
        return amplitude_ / (1.0 + L2_) * s * s * (3.0 - 2.0 * s);
    }
    case ProfileKind::PureCritical: return amplitude_ / (1.0 + x);
    case ProfileKind::Constant: return amplitude_;
    case ProfileKind::Zero: return 0.0;
    }
    return 0.0;
}

double DampingProfile::claimed_V0() const {
    switch (kind_) {
    case ProfileKind::DeadZoneCritical:
    case ProfileKind::PureCritical: return amplitude_;
    case ProfileKind::Constant: return amplitude_ * (1.0 + L2_);
    case ProfileKind::Zero: return 0.0;
    }
    return 0.0;
}

double DampingProfile::claimed_V1() const { return claimed_V0(); }

bool AssumptionReport::structural_pass() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.pass; });
}

namespace {

// Tracks the smallest margin seen for one clause.
struct MarginTracker {
    ClauseResult result;
    explicit MarginTracker(std::string name) {
        result.name = std::move(name);
        result.worst_margin = std::numeric_limits<double>::infinity();
    }
    void observe(double x, double margin) {
        if (margin < result.worst_margin) {
            result.worst_margin = margin;
            result.worst_x = x;
        }
    }
    ClauseResult finish(double tolerance) {
        if (!std::isfinite(result.worst_margin)) result.worst_margin = 0.0;
        result.pass = result.worst_margin >= -tolerance;
        return result;
    }
};

std::size_t sample_count(double from, double to, double resolution) {
    return static_cast<std::size_t>(std::ceil((to - from) / resolution - 1e-9));
}

} // namespace

AssumptionReport validate_assumption_A(const DampingProfile& profile, double sample_resolution,
                                       double x_max) {
    if (!(sample_resolution > 0.0)) throw std::invalid_argument("sample_resolution must be positive");
    if (!(x_max > profile.L2())) throw std::invalid_argument("x_max must exceed L2");

    const double V0 = profile.claimed_V0();
    const double V1 = profile.claimed_V1();
    const double L2 = profile.L2();

    MarginTracker nonneg("V(x) >= 0");
    MarginTracker bounded("V bounded");
    MarginTracker continuity("V continuous (sampled)");
    MarginTracker lower("V0/(1+x) <= V(x) for x >= L2");
    MarginTracker upper("V(x) <= V1/(1+x) for x >= L2");

    // Continuity probe: a jump at a sample shows up as a nonvanishing
    // one-sided difference over a tiny offset.
    const double probe = 1e-9;
    double sup = 0.0;
    const std::size_t n = sample_count(0.0, x_max, sample_resolution);
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = std::min(x_max, static_cast<double>(i) * sample_resolution);
        const double v = profile(x);
        sup = std::max(sup, std::fabs(v));
        nonneg.observe(x, v);
        bounded.observe(x, std::isfinite(v) ? 0.0 : -1.0);
        const double jump = std::fabs(profile(x + probe) - v);
        continuity.observe(x, 1e-6 - jump);
        if (x >= L2) {
            lower.observe(x, (1.0 + x) * v - V0);
            upper.observe(x, V1 - (1.0 + x) * v);
        }
    }
    // Also sample L2 itself, which the grid can miss.
    lower.observe(L2, (1.0 + L2) * profile(L2) - V0);
    upper.observe(L2, V1 - (1.0 + L2) * profile(L2));

    const double tail_tol = 1e-12 * std::max(1.0, V1);
    AssumptionReport report;
    report.clauses.push_back(nonneg.finish(0.0));
    report.clauses.push_back(bounded.finish(0.0));
    report.clauses.push_back(continuity.finish(0.0));

    MarginTracker order("0 < V0 <= V1");
    order.observe(L2, std::min(V0, V1 - V0));
    report.clauses.push_back(order.finish(0.0));
    if (V0 <= 0.0) report.clauses.back().pass = false;

    report.clauses.push_back(lower.finish(tail_tol));
    report.clauses.push_back(upper.finish(tail_tol));

    report.v0_above_two.name = "V0 > 2";
    report.v0_above_two.worst_x = L2;
    report.v0_above_two.worst_margin = V0 - 2.0;
    report.v0_above_two.pass = V0 > 2.0;
    return report;
}

ProfileConstants derive_constants(const DampingProfile& profile, double sample_resolution) {
    if (!(sample_resolution > 0.0)) throw std::invalid_argument("sample_resolution must be positive");
    ProfileConstants c;
    c.V0 = profile.claimed_V0();
    c.V1 = profile.claimed_V1();
    c.L2 = profile.L2();
    const double v_at_L2 = profile(c.L2);
    if (!(v_at_L2 > 0.0)) throw std::domain_error("V(L2) = 0 contradicts the tail assumption");

    // Scan left from L2 while V stays at or above half its value at L2.
    const double threshold = 0.5 * v_at_L2;
    double L1 = c.L2;
    double min_on_interval = v_at_L2;
    const std::size_t n = sample_count(0.0, c.L2, sample_resolution);
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = std::max(0.0, c.L2 - static_cast<double>(i) * sample_resolution);
        const double v = profile(x);
        if (!(v >= threshold)) break;
        L1 = x;
        min_on_interval = std::min(min_on_interval, v);
    }
    if (c.L2 > 0.0 && L1 >= c.L2) {
        L1 = std::max(0.0, c.L2 - sample_resolution);
        min_on_interval = std::min(min_on_interval, profile(L1));
    }
    c.L1 = L1;
    c.V_m = 0.5 * min_on_interval;

    double sup = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = std::min(c.L2, static_cast<double>(i) * sample_resolution);
        sup = std::max(sup, profile(x));
    }
    c.V_M = std::max(sup, v_at_L2);
    c.V_star = std::max((1.0 + c.L2) * c.V_M, c.V1);
    return c;
}

} // namespace dampwave
