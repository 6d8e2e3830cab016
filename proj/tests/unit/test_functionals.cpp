#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dampwave/simulation.hpp>

#include <cmath>
#include <numbers>

using namespace dampwave;

namespace {

constexpr double pi = std::numbers::pi;

// Half-line snapshot of the given fields on [0, L] at spacing dx.
Snapshot make_snapshot(double L, double dx, double (*u)(double), double (*ut)(double), double V = 0.0) {
    Snapshot s;
    s.dx = dx;
    s.mode = DomainMode::HalfLine;
    const auto n = static_cast<std::size_t>(std::lround(L / dx)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) * dx;
        s.u.push_back(u(x));
        s.u_t.push_back(ut(x));
        s.V.push_back(V);
    }
    s.u_x = grid_derivative(s.u, dx, true);
    return s;
}

double zero(double) { return 0.0; }
double sine(double x) { return x <= 1.0 ? std::sin(pi * x) : 0.0; }
double parabola(double x) { return x <= 1.0 ? x * (1.0 - x) : 0.0; }
double smooth(double x) { return x <= 2.0 ? std::pow(std::sin(pi * x / 2.0), 4) : 0.0; }
double smooth_velocity(double x) { return x <= 2.0 ? std::sin(pi * x / 2.0) * std::sin(pi * x / 2.0) : 0.0; }

Multipliers sample_multipliers(double e1, double e2, double e3, double k) {
    Multipliers m;
    m.params = {e1, e2, e3, k, std::nullopt};
    m.phi = PhiSpec(0.5, 1.5);
    return m;
}

} // namespace

TEST_CASE("zero state") {
    const auto s = make_snapshot(2.0, 0.01, zero, zero);
    const auto m = sample_multipliers(1, 2, 3, 4);
    CHECK(energy(s) == 0.0);
    CHECK(hardy_ratio(s) == 0.0);
    CHECK(lyapunov_E(s, m) == 0.0);
    CHECK(dissipation_F(s, m) == 0.0);
    CHECK(lyapunov_combo(s, m) == 0.0);
}

TEST_CASE("energy of a frozen sine arch") {
    const auto s = make_snapshot(1.5, 1e-3, sine, zero);
    CHECK(energy(s) == doctest::Approx(pi * pi / 4.0).epsilon(2e-3));
}

TEST_CASE("initial energy of a hat") {
    SolverConfig c;
    c.dx = 0.01;
    c.t_final = 0.0;
    const InitialData data{[](double x) { return x <= 2.0 ? 1.0 - std::fabs(x - 1.0) : 0.0; }, zero, 2.0};
    const auto trace = run(data, DampingProfile::zero(), c, std::nullopt);
    REQUIRE(trace.samples.size() == 1);
    CHECK(trace.samples[0].t == 0.0);
    CHECK(trace.samples[0].E == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("Hardy ratio of x(1-x)") {
    const auto s = make_snapshot(2.0, 1e-4, parabola, zero);
    double peak = 0.0;
    for (double x = 0.0; x <= 1.0; x += 1e-6) peak = std::max(peak, parabola(x) / std::sqrt(1.0 + x));
    const double oracle = peak / std::sqrt(1.0 / 3.0);
    CHECK(oracle == doctest::Approx(0.356).epsilon(2e-3));
    CHECK(hardy_ratio(s) == doctest::Approx(oracle).epsilon(1e-3));
    Snapshot whole = s;
    whole.mode = DomainMode::WholeLine;
    CHECK(std::isnan(hardy_ratio(whole)));
}

TEST_CASE("Lyapunov functional, velocity only") {
    const auto s = make_snapshot(3.0, 1e-3, zero, smooth_velocity);
    const auto m = sample_multipliers(1.3, 2, 3, 4);
    const double t = 5.0;
    Snapshot st = s;
    st.t = t;
    CHECK(lyapunov_E(st, m) == doctest::Approx(0.5 * m.f(t) * inner(st, st.u_t, st.u_t)));
}

TEST_CASE("pure-f dissipation is -f_t E") {
    auto s = make_snapshot(3.0, 1e-3, smooth, smooth_velocity);
    s.t = 2.0;
    const auto m = sample_multipliers(0.7, 0, 0, 1);
    CHECK(dissipation_F(s, m) == doctest::Approx(-m.f_t(s.t) * energy(s)));
}

TEST_CASE("term-by-term quadrature oracle") {
    auto s = make_snapshot(3.0, 2e-3, smooth, smooth_velocity, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) s.V[i] = 2.0 / (1.0 + s.x(i));
    s.t = 3.0;
    const auto m = sample_multipliers(1.1, 0.6, 2.5, 7.0);
    const double t = s.t;
    auto integrate = [&](auto fn) {
        double sum = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) sum += s.weight(i) * fn(i);
        return sum;
    };
    const double t1 = integrate([&](std::size_t i) { return m.f(t) * (s.u_t[i] * s.u_t[i] + s.u_x[i] * s.u_x[i]); });
    const double t2 = integrate([&](std::size_t i) { return 2 * m.g(t) * s.u[i] * s.u_t[i]; });
    const double t3 = integrate([&](std::size_t i) { return (m.g(t) * s.V[i] - m.g_t(t)) * s.u[i] * s.u[i]; });
    const double t4 = integrate([&](std::size_t i) { return 2 * m.h(t, s.x(i)) * s.u_x[i] * s.u_t[i]; });
    CHECK(lyapunov_E(s, m) == doctest::Approx(0.5 * (t1 + t2 + t3 + t4)).epsilon(1e-13));

    // The fused sample agrees with the standalone evaluators.
    s.w.assign(s.size(), 0.0);
    const auto r = evaluate_sample(s, m, 0.0, 1.0);
    CHECK(r.E == doctest::Approx(energy(s)).epsilon(1e-13));
    CHECK(r.calE == doctest::Approx(lyapunov_E(s, m)).epsilon(1e-13));
    CHECK(r.calF == doctest::Approx(dissipation_F(s, m)).epsilon(1e-13));
    CHECK(r.lyap_combo == doctest::Approx(lyapunov_combo(s, m)).epsilon(1e-13));
    CHECK(r.hardy_ratio == doctest::Approx(hardy_ratio(s)).epsilon(1e-13));
    CHECK(r.u_l2 == doctest::Approx(l2_squared(s)).epsilon(1e-13));

    const auto bare = evaluate_sample(s, std::nullopt, 0.0, 1.0);
    CHECK(std::isnan(bare.calE));
    CHECK(std::isnan(bare.calF));
    CHECK(std::isnan(bare.lyap_combo));
}

TEST_CASE("combination at t = 0") {
    auto s = make_snapshot(3.0, 1e-3, smooth, smooth_velocity);
    const auto m = sample_multipliers(1.5, 0.5, 2.0, 3.0);
    std::vector<double> phi_ux(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) phi_ux[i] = m.phi.value(s.x(i)) * s.u_x[i];
    const double expected = 1.5 * energy(s) + 0.5 * inner(s, s.u, s.u_t) + 2 * 2.0 * inner(s, phi_ux, s.u_t);
    CHECK(lyapunov_combo(s, m) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("weighted source norm") {
    const InitialData none{zero, zero, 2.0};
    CHECK(weighted_source_norm(none, DampingProfile::zero(), 0.01).value == 0.0);

    const InitialData box{zero, [](double x) { return x <= 1.0 ? 1.0 : 0.0; }, 1.0};
    CHECK(weighted_source_norm(box, DampingProfile::zero(), 1e-4).value ==
          doctest::Approx(2.0 / 3.0 * (2.0 * std::sqrt(2.0) - 1.0)).epsilon(1e-6));

    const auto V = DampingProfile::dead_zone(6, 0.5, 1.0);
    const InitialData cancel{smooth, [V](double x) { return -V(x) * smooth(x); }, 2.0};
    CHECK(weighted_source_norm(cancel, V, 0.01).value == 0.0);
    CHECK_THROWS_AS(weighted_source_norm(box, V, 0.0), std::invalid_argument);
}

TEST_CASE("budget with zero data and without damping") {
    SolverConfig c;
    c.dx = 0.02;
    c.t_final = 20.0;
    c.record_stride = 25;
    auto zero_trace = run({zero, zero, 2.0}, DampingProfile::zero(), c, std::nullopt);
    for (const auto& r : zero_trace.samples) {
        CHECK(r.weighted_budget_lhs == 0.0);
        CHECK(r.weighted_budget_rhs == 0.0);
    }
    auto trace = run({smooth, smooth_velocity, 2.0}, DampingProfile::zero(), c, std::nullopt);
    const double rhs = 0.5 * trace.samples[0].u_l2 + trace.source_norm * trace.source_norm;
    for (const auto& r : trace.samples) {
        CHECK(r.weighted_budget_rhs == doctest::Approx(rhs));
        CHECK(r.weighted_budget_lhs <= r.weighted_budget_rhs * (1 + 1e-6));
        CHECK(r.damped_mass_accum == 0.0);
    }
}

TEST_CASE("whole-line rows mark the half-line columns as not applicable") {
    SolverConfig c;
    c.dx = 0.05;
    c.t_final = 2.0;
    c.mode = DomainMode::WholeLine;
    auto even = [](double x) { return smooth(std::fabs(x)); };
    auto trace = run({even, zero, 2.0}, DampingProfile::pure_critical(4.0), c, std::nullopt);
    for (const auto& r : trace.samples) {
        CHECK(std::isnan(r.hardy_ratio));
        CHECK(std::isnan(r.weighted_budget_lhs));
        CHECK(r.E > 0.0);
    }
}

TEST_CASE("probes see every recorded row") {
    SolverConfig c;
    c.dx = 0.05;
    c.t_final = 3.0;
    c.record_stride = 4;
    std::size_t calls = 0;
    double last_t = -1.0;
    TraceProbe probe = [&](const Snapshot& s, const FunctionalSample& r) {
        ++calls;
        CHECK(s.t == r.t);
        CHECK(r.t > last_t);
        last_t = r.t;
    };
    auto trace = run({smooth, zero, 2.0}, DampingProfile::dead_zone(6, 1, 2), c, std::nullopt, {probe});
    CHECK(calls == trace.samples.size());
    CHECK(trace.samples.back().t == doctest::Approx(3.0));
    CHECK(trace.final_state.t == doctest::Approx(3.0));
}
