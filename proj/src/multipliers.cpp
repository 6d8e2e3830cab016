#include <dampwave/multipliers.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dampwave {

namespace {

// Quintic Hermite on [0,1]: q(0)=0, q(1)=1, q'(0)=1, q'(1)=0, q''(0)=q''(1)=0.
// q'(s) = (1-s)^2 (15 s^2 + 2 s + 1) >= 0.
double bridge(double s) { return s * (1.0 + s * s * (4.0 + s * (-7.0 + 3.0 * s))); }
double bridge_slope(double s) { return 1.0 + s * s * (12.0 + s * (-28.0 + 15.0 * s)); }

} // namespace

PhiSpec::PhiSpec(double L1, double L2) : L1_(L1), L2_(L2) {
    const bool degenerate = L1 == 0.0 && L2 == 0.0;
    if (!degenerate && !(L1 >= 0.0 && L1 < L2))
        throw std::invalid_argument("bridge interval must satisfy 0 <= L1 < L2");
    if (degenerate) return;
    constexpr int samples = 1000;
    for (int i = 0; i <= samples; ++i) {
        const double x = L1 + (L2 - L1) * i / samples;
        if (slope(x) < -1e-12) throw std::domain_error("bridge function is not monotone");
    }
}

double PhiSpec::value(double x) const {
    if (x >= L2_) return 1.0 + L2_;
    if (x < L1_) return 1.0 + x;
    const double width = L2_ - L1_;
    return 1.0 + L1_ + width * bridge((x - L1_) / width);
}

double PhiSpec::slope(double x) const {
    if (x >= L2_) return 0.0;
    if (x < L1_) return 1.0;
    return bridge_slope((x - L1_) / (L2_ - L1_));
}

MultiplierParams default_params(double V0, double V_star, ParamWarning* warning) {
    if (!(V0 > 2.0)) throw std::domain_error("default multipliers need V0 > 2");
    if (!(V_star > 0.0)) throw std::invalid_argument("V* must be positive");
    if (warning) warning->near_singular = V0 - 2.0 < 0.1;
    MultiplierParams p;
    p.eps1 = 1.0;
    p.eps2 = V0 / 2.0;
    p.eps3 = 2.0 * V0;
    p.k = 4.0 * V0 * V_star / (V0 - 2.0);
    return p;
}

const InequalityMargin& FeasibilityReport::at(const std::string& key) const {
    for (const auto& m : margins)
        if (m.key == key) return m;
    throw std::out_of_range("no feasibility margin named " + key);
}

FeasibilityReport check_feasibility(const MultiplierParams& p, const ProfileConstants& c) {
    const double e1 = p.eps1, e2 = p.eps2, e3 = p.eps3, k = p.k;
    FeasibilityReport r;
    r.margins = {
        {"near_boundary", "eps3 - 2 eps1 - 2 eps2", e3 - 2.0 * e1 - 2.0 * e2},
        {"tail_velocity", "2 eps1 V0 - 2 eps1 - 2 eps2", 2.0 * e1 * c.V0 - 2.0 * e1 - 2.0 * e2},
        {"near_boundary_gradient", "2 eps2 - 2 eps1 + eps3 - (eps3/k)(1+L1) V_M",
         2.0 * e2 - 2.0 * e1 + e3 - e3 / k * (1.0 + c.L1) * c.V_M},
        {"bridge_gradient", "2 eps2 - 2 eps1 - (eps3/k)(1+L2) V_M",
         2.0 * e2 - 2.0 * e1 - e3 / k * (1.0 + c.L2) * c.V_M},
        {"tail_gradient", "2 eps2 - 2 eps1 - (eps3/k) V1", 2.0 * e2 - 2.0 * e1 - e3 / k * c.V1},
        {"unified_gradient", "2 eps2 - 2 eps1 - (eps3/k) V*", 2.0 * e2 - 2.0 * e1 - e3 / k * c.V_star},
    };
    r.pass = r.at("near_boundary").pass() && r.at("tail_velocity").pass() && r.at("unified_gradient").pass();
    return r;
}

double ut_coefficient(double t, double x, const Multipliers& m, const DampingProfile& profile) {
    const double V = profile(x);
    return 2.0 * m.f(t) * V - m.f_t(t) - 2.0 * m.g(t) + m.h_x(t, x) - m.params.k * m.h(t, x) * V - m.h_t(t, x);
}

double ux_coefficient(double t, double x, const Multipliers& m, const DampingProfile& profile) {
    const double V = profile(x);
    return 2.0 * m.g(t) - m.f_t(t) + m.h_x(t, x) - m.h(t, x) * V / m.params.k - m.h_t(t, x);
}

CaseBounds condition_case_bounds(double t, double x, const Multipliers& m, const DampingProfile& profile,
                                 const ProfileConstants& c, double R) {
    const double e1 = m.params.eps1, e2 = m.params.eps2, e3 = m.params.eps3, k = m.params.k;
    const double T = 1.0 + t;
    CaseBounds b;
    if (x < c.L1) {
        b.ut = T * T * (2.0 * e1 - k * e3 * (1.0 + c.L1) / T) * profile(x) +
               T * (e3 - 2.0 * e1 - 2.0 * e2 - e3 * (1.0 + c.L1) / T);
        b.ux = T * (2.0 * e2 - 2.0 * e1 + e3 - e3 / k * (1.0 + c.L1) * c.V_M - e3 * (1.0 + c.L1) / T);
    } else if (x < c.L2) {
        b.ut = T * T *
               (2.0 * e1 * c.V_m - 2.0 * e1 / T - 2.0 * e2 / T - k * e3 * c.V_M * (1.0 + c.L2) / T -
                e3 * (1.0 + c.L2) / (T * T));
        b.ux = T * (2.0 * e2 - 2.0 * e1 - e3 / k * (1.0 + c.L2) * c.V_M - e3 * (1.0 + c.L2) / T);
    } else {
        const double reach = (1.0 + R + t) / T;
        b.ut = T * T / (1.0 + x) *
               (2.0 * e1 * c.V0 - 2.0 * e1 * reach - 2.0 * e2 * reach - k * e3 * (1.0 + c.L2) * c.V1 / T -
                e3 * (1.0 + c.L2) * reach / T);
        b.ux = T * (2.0 * e2 - 2.0 * e1 - e3 / k * c.V1 - e3 * (1.0 + c.L2) / T);
    }
    return b;
}

std::vector<double> condition_x_samples(double x_end, double L2, const T0Grid& grid) {
    std::vector<double> xs;
    const double uniform_end = std::min(x_end, L2 + 1.0);
    const auto n = static_cast<std::size_t>(std::ceil(uniform_end / grid.x_resolution));
    for (std::size_t i = 0; i < n; ++i) xs.push_back(static_cast<double>(i) * grid.x_resolution);
    double x = uniform_end;
    while (x < x_end) {
        xs.push_back(x);
        x = std::max(x + grid.x_resolution, (1.0 + x) * grid.x_growth - 1.0);
    }
    xs.push_back(x_end);
    return xs;
}

ActivationSearch find_t0(const Multipliers& m, const DampingProfile& profile, double R, const T0Grid& grid) {
    if (!(grid.t_resolution > 0.0) || !(grid.x_resolution > 0.0) || !(grid.x_growth > 1.0))
        throw std::invalid_argument("t0 search grid must have positive resolutions");
    const auto nt = static_cast<std::size_t>(std::floor(grid.t_max / grid.t_resolution + 1e-9));

    struct Row {
        double t, margin, worst_x;
    };
    std::vector<Row> rows;
    rows.reserve(nt + 1);
    for (std::size_t i = 0; i <= nt; ++i) {
        const double t = static_cast<double>(i) * grid.t_resolution;
        Row row{t, std::numeric_limits<double>::infinity(), 0.0};
        for (double x : condition_x_samples(R + t, profile.L2(), grid)) {
            const double v = std::min(ut_coefficient(t, x, m, profile), ux_coefficient(t, x, m, profile));
            if (v < row.margin) {
                row.margin = v;
                row.worst_x = x;
            }
        }
        rows.push_back(row);
    }

    ActivationSearch out;
    std::size_t first_good = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!(rows[i].margin > 0.0)) {
            first_good = i + 1;
            out.last_failure = rows[i].t;
        }
    }
    if (first_good >= rows.size()) return out;
    out.t0 = rows[first_good].t;
    out.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = first_good; i < rows.size(); ++i) {
        if (rows[i].margin < out.min_margin) {
            out.min_margin = rows[i].margin;
            out.worst_t = rows[i].t;
            out.worst_x = rows[i].worst_x;
        }
    }
    return out;
}

double coercivity_ratio(const MultiplierParams& p, double L2, double t) {
    return 1.0 - 2.0 * p.eps3 * (1.0 + L2) / (p.eps1 * (1.0 + t));
}

double coercivity_half_threshold(const MultiplierParams& p, double L2) {
    return 4.0 * p.eps3 * (1.0 + L2) / p.eps1 - 1.0;
}

std::optional<Multipliers> default_multipliers(const DampingProfile& profile, double sample_resolution) {
    const double x_max = profile.L2() + 100.0;
    const auto report = validate_assumption_A(profile, sample_resolution, x_max);
    if (!report.decay_hypotheses_pass()) return std::nullopt;
    const auto c = derive_constants(profile, sample_resolution);
    Multipliers m;
    m.params = default_params(c.V0, c.V_star);
    m.phi = PhiSpec(c.L1, c.L2);
    return m;
}

} // namespace dampwave
