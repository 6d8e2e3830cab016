#include <dampwave/functionals.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dampwave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool half_line(const Snapshot& s) { return s.mode == DomainMode::HalfLine; }

std::size_t first_index(const WaveState& st) { return st.mode == DomainMode::HalfLine ? st.origin : st.lo - 1; }

double damped_density(const WaveState& st, const std::vector<double>& u, const WaveSolver& solver) {
    const auto& V = solver.damping();
    double sum = 0.0;
    const std::size_t last = st.hi + 1;
#pragma omp simd reduction(+ : sum)
    for (std::size_t j = first_index(st); j <= last; ++j) sum += V[j] * u[j] * u[j];
    return sum * st.dx;
}

} // namespace

double energy(const Snapshot& s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) sum += s.weight(i) * (s.u_t[i] * s.u_t[i] + s.u_x[i] * s.u_x[i]);
    return 0.5 * sum;
}

double l2_squared(const Snapshot& s) { return inner(s, s.u, s.u); }

double inner(const Snapshot& s, const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != s.size() || b.size() != s.size()) throw std::invalid_argument("grid function size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) sum += s.weight(i) * a[i] * b[i];
    return sum;
}

double hardy_ratio(const Snapshot& s) {
    if (!half_line(s)) return kNaN;
    const double grad = std::sqrt(inner(s, s.u_x, s.u_x));
    if (grad == 0.0) return 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) peak = std::max(peak, std::fabs(s.u[i]) / std::sqrt(1.0 + s.x(i)));
    return peak / grad;
}

double lyapunov_E(const Snapshot& s, const Multipliers& m) {
    const double t = s.t;
    const double f = m.f(t), g = m.g(t), gt = m.g_t(t);
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double u = s.u[i], ut = s.u_t[i], ux = s.u_x[i];
        const double bracket = f * (ut * ut + ux * ux) + 2.0 * g * u * ut + (g * s.V[i] - gt) * u * u +
                               2.0 * m.h(t, s.x(i)) * ux * ut;
        sum += s.weight(i) * bracket;
    }
    return 0.5 * sum;
}

double dissipation_F(const Snapshot& s, const Multipliers& m) {
    const double t = s.t;
    const double f = m.f(t), ft = m.f_t(t), g = m.g(t), gt = m.g_t(t), gtt = m.g_tt(t);
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double x = s.x(i), V = s.V[i];
        const double u = s.u[i], ut = s.u_t[i], ux = s.u_x[i];
        const double h = m.h(t, x), hx = m.h_x(t, x), ht = m.h_t(t, x);
        const double density = 0.5 * (2.0 * f * V - ft - 2.0 * g + hx) * ut * ut +
                               0.5 * (2.0 * g - ft + hx) * ux * ux + 0.5 * (gtt - gt * V) * u * u +
                               (h * V - ht) * ux * ut;
        sum += s.weight(i) * density;
    }
    if (half_line(s) && s.size() > 0) sum += 0.5 * m.h(t, s.x(0)) * s.u_x[0] * s.u_x[0];
    return sum;
}

double lyapunov_combo(const Snapshot& s, const Multipliers& m) {
    const double t = s.t;
    double cross = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) cross += s.weight(i) * m.h(t, s.x(i)) * s.u_x[i] * s.u_t[i];
    return m.f(t) * energy(s) + m.g(t) * inner(s, s.u, s.u_t) + 2.0 * cross;
}

WeightedDataNorm weighted_source_norm(const InitialData& data, const DampingProfile& profile, double dx,
                                      DomainMode mode) {
    if (!(dx > 0.0)) throw std::invalid_argument("quadrature spacing must be positive");
    const double R = data.support_radius;
    const auto n = static_cast<std::size_t>(std::ceil(R / dx - 1e-9));
    const double h = R / static_cast<double>(std::max<std::size_t>(n, 1));
    auto integrand = [&](double x) { return std::sqrt(1.0 + std::fabs(x)) * std::fabs(profile(x) * data.u0(x) + data.u1(x)); };
    double sum = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) * h;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        sum += w * integrand(x);
        if (mode == DomainMode::WholeLine) sum += w * integrand(-x);
    }
    return {sum * h};
}

AuxiliaryState start_auxiliary(const WaveState& initial, const WaveSolver& solver) {
    AuxiliaryState aux;
    aux.w.assign(initial.u_curr.size(), 0.0);
    aux.last_density = damped_density(initial, initial.u_prev, solver);
    accumulate_auxiliary(aux, initial, solver);
    return aux;
}

void accumulate_auxiliary(AuxiliaryState& aux, const WaveState& st, const WaveSolver& solver) {
    const double half_dt = 0.5 * st.dt;
    double* w = aux.w.data();
    const double* a = st.u_prev.data();
    const double* b = st.u_curr.data();
    const std::size_t last = st.hi + 1;
    for (std::size_t j = first_index(st); j <= last; ++j) w[j] += half_dt * (a[j] + b[j]);
    const double density = damped_density(st, st.u_curr, solver);
    aux.damped_mass += half_dt * (aux.last_density + density);
    aux.last_density = density;
}

double weighted_budget_lhs(const Snapshot& s, double damped_mass) {
    if (s.w.size() != s.size()) throw std::invalid_argument("snapshot carries no auxiliary function");
    const auto wx = grid_derivative(s.w, s.dx, half_line(s));
    return 0.5 * l2_squared(s) + 0.25 * inner(s, wx, wx) + damped_mass;
}

double weighted_budget_rhs(double u0_l2_squared, const WeightedDataNorm& source) {
    return 0.5 * u0_l2_squared + source.squared();
}

FunctionalSample evaluate_sample(const Snapshot& s, const std::optional<Multipliers>& m, double damped_mass,
                                 double budget_rhs) {
    FunctionalSample r;
    r.t = s.t;
    r.damped_mass_accum = damped_mass;

    // One pass over the grid for every column; the standalone evaluators
    // above compute the same sums term by term.
    const double t = s.t;
    const bool mult = m.has_value();
    const double f = mult ? m->f(t) : 0.0, ft = mult ? m->f_t(t) : 0.0;
    const double g = mult ? m->g(t) : 0.0, gt = mult ? m->g_t(t) : 0.0, gtt = mult ? m->g_tt(t) : 0.0;
    double kinetic = 0.0, grad = 0.0, mass = 0.0, cross_g = 0.0, cross_h = 0.0, potential = 0.0, dissipation = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double wt = s.weight(i), x = s.x(i), V = s.V[i];
        const double u = s.u[i], ut = s.u_t[i], ux = s.u_x[i];
        kinetic += wt * ut * ut;
        grad += wt * ux * ux;
        mass += wt * u * u;
        peak = std::max(peak, std::fabs(u) / std::sqrt(1.0 + x));
        if (mult) {
            const double h = m->h(t, x), hx = m->h_x(t, x), ht = m->h_t(t, x);
            cross_g += wt * u * ut;
            cross_h += wt * h * ux * ut;
            potential += wt * (g * V - gt) * u * u;
            dissipation += wt * (0.5 * (2.0 * f * V - ft - 2.0 * g + hx) * ut * ut + 0.5 * (2.0 * g - ft + hx) * ux * ux +
                                 0.5 * (gtt - gt * V) * u * u + (h * V - ht) * ux * ut);
        }
    }
    r.E = 0.5 * (kinetic + grad);
    r.u_l2 = mass;
    if (!half_line(s)) r.hardy_ratio = kNaN;
    else r.hardy_ratio = grad == 0.0 ? 0.0 : peak / std::sqrt(grad);

    if (mult) {
        r.calE = 0.5 * (f * (kinetic + grad) + 2.0 * g * cross_g + potential + 2.0 * cross_h);
        r.calF = dissipation;
        if (half_line(s) && s.size() > 0) r.calF += 0.5 * m->h(t, s.x(0)) * s.u_x[0] * s.u_x[0];
        r.lyap_combo = f * r.E + g * cross_g + 2.0 * cross_h;
    } else {
        r.calE = r.calF = r.lyap_combo = kNaN;
    }
    if (half_line(s) && s.w.size() == s.size()) {
        r.weighted_budget_lhs = weighted_budget_lhs(s, damped_mass);
        r.weighted_budget_rhs = budget_rhs;
    } else {
        r.weighted_budget_lhs = r.weighted_budget_rhs = kNaN;
    }
    return r;
}

} // namespace dampwave
