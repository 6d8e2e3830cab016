#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dampwave/rates.hpp>

#include <cmath>

using namespace dampwave;

namespace {

template <class F>
std::vector<FunctionalSample> synthetic(F energy, double t_end = 5000.0, std::size_t n = 2001) {
    std::vector<FunctionalSample> rows;
    for (std::size_t i = 0; i < n; ++i) {
        FunctionalSample r;
        r.t = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
        r.E = energy(r.t);
        rows.push_back(r);
    }
    return rows;
}

} // namespace

TEST_CASE("exact power laws") {
    const FitWindow w{500, 5000};
    auto a = fit_decay_rate(synthetic([](double t) { return std::pow(1 + t, -2.0); }), w);
    CHECK(a.alpha == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(a.rms_residual < 1e-9);
    CHECK(a.sample_count >= 8);
    auto b = fit_decay_rate(synthetic([](double t) { return 5 * std::pow(1 + t, -1.5); }), w);
    CHECK(b.alpha == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(b.log_intercept == doctest::Approx(std::log(5.0)).epsilon(1e-9));
    auto c = fit_decay_rate(synthetic([](double) { return 3.0; }), w);
    CHECK(std::fabs(c.alpha) < 1e-12);
}

TEST_CASE("scaling E moves only the intercept") {
    const FitWindow w{100, 4000};
    auto base = synthetic([](double t) { return std::pow(1 + t, -1.7) * (1.2 + 0.3 * std::sin(t)); });
    auto scaled = base;
    for (auto& r : scaled) r.E *= 42.0;
    const auto a = fit_decay_rate(base, w), b = fit_decay_rate(scaled, w);
    CHECK(std::fabs(a.alpha - b.alpha) < 1e-12);
    CHECK(b.log_intercept - a.log_intercept == doctest::Approx(std::log(42.0)).epsilon(1e-12));
}

TEST_CASE("fit errors") {
    const auto rows = synthetic([](double t) { return 1 / (1 + t); });
    CHECK_THROWS_AS(fit_decay_rate(rows, {500, 9000}), FitError);
    CHECK_THROWS_AS(fit_decay_rate(rows, {600, 500}), FitError);
    CHECK_THROWS_AS(fit_decay_rate(rows, {0.0, 500}), FitError);
    CHECK_THROWS_AS(fit_decay_rate(synthetic([](double) { return 0.0; }), {500, 5000}), FitError);
    CHECK_THROWS_AS(fit_decay_rate(synthetic([](double t) { return 1 / (1 + t); }, 5000, 5), {500, 5000}), FitError);
    CHECK_THROWS_AS(fit_decay_rate({}, {500, 5000}), FitError);
}

TEST_CASE("envelope through local maxima") {
    const auto rows = synthetic([](double t) { return std::pow(1 + t, -2.0) * (1.5 + std::cos(0.05 * t)); }, 5000, 20001);
    const auto fit = fit_decay(rows, {500, 5000});
    REQUIRE(fit.envelope);
    CHECK(fit.envelope->alpha == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("weighted energy") {
    const FitWindow w{500, 5000};
    auto b = bounded_weighted_energy(synthetic([](double t) { return std::pow(1 + t, -2.0); }), 2.0, w);
    CHECK(b.sup == doctest::Approx(1.0));
    CHECK(b.ratio_last_first() == doctest::Approx(1.0));
    auto c = bounded_weighted_energy(synthetic([](double t) { return 1 / (1 + t); }), 2.0, w);
    CHECK(c.ratio_last_first() == doctest::Approx(5001.0 / 501.0));
    CHECK_THROWS_AS(bounded_weighted_energy({}, 2.0, w), FitError);
}

TEST_CASE("fitted exponent and weighted energy agree") {
    const FitWindow w{200, 5000};
    for (double a : {0.8, 1.3, 2.0, 2.9}) {
        const auto rows = synthetic([a](double t) { return std::pow(1 + t, -a) * (1 + 0.02 * std::sin(t / 7)); });
        const auto fit = fit_decay_rate(rows, w);
        REQUIRE(fit.rms_residual < 0.05);
        const auto b = bounded_weighted_energy(rows, fit.alpha, w);
        CHECK(b.ratio_last_first() >= 0.5);
        CHECK(b.ratio_last_first() <= 2.0);
    }
}

TEST_CASE("closed-form quadratic bound") {
    // Saturating f X^2 - C g X - C = 0 gives zero margin.
    const double C = 0.7, f = 9.0, g = 2.0;
    const double X = quadratic_bound(C, f, g);
    CHECK(f * X * X - C * g * X - C == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

    Multipliers m;
    m.params = {1.0, 3.0, 12.0, 36.0, std::nullopt};
    m.phi = PhiSpec(1.5, 2.0);
    std::vector<FunctionalSample> zero(10);
    for (std::size_t i = 0; i < zero.size(); ++i) zero[i].t = 100.0 * static_cast<double>(i);
    const auto rep = quadratic_bound_check(zero, m, 100.0);
    CHECK(rep.pass);
    CHECK(rep.checked == 9);
    CHECK(rep.min_margin >= 0.0);
}
