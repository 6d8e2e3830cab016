#include <dampwave/rates.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dampwave {

namespace {

RateFit least_squares(const std::vector<const FunctionalSample*>& rows, FitWindow window) {
    const auto n = static_cast<double>(rows.size());
    double sx = 0.0, sy = 0.0;
    for (const auto* r : rows) {
        if (!(r->E > 0.0)) throw FitError("nonpositive energy at t = " + std::to_string(r->t) + "; shrink the window");
        sx += std::log1p(r->t);
        sy += std::log(r->E);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto* r : rows) {
        const double dx = std::log1p(r->t) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(r->E) - my);
    }
    if (!(sxx > 0.0)) throw FitError("fit window spans a single time");
    RateFit fit;
    const double slope = sxy / sxx;
    fit.alpha = -slope;
    fit.log_intercept = my - slope * mx;
    fit.window = window;
    fit.sample_count = rows.size();
    double ss = 0.0;
    for (const auto* r : rows) {
        const double e = std::log(r->E) - (fit.log_intercept + slope * std::log1p(r->t));
        ss += e * e;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

std::vector<const FunctionalSample*> rows_in(const std::vector<FunctionalSample>& trace, FitWindow w) {
    std::vector<const FunctionalSample*> rows;
    for (const auto& r : trace)
        if (r.t >= w.t_lo && r.t <= w.t_hi) rows.push_back(&r);
    return rows;
}

void check_window(const std::vector<FunctionalSample>& trace, FitWindow w) {
    if (trace.empty()) throw FitError("empty trace");
    if (!(w.t_lo >= 1.0 - 1e-12) || !(w.t_hi > w.t_lo)) throw FitError("fit window must satisfy 1 <= t_lo < t_hi");
    const double slack = 1e-9 * std::max(1.0, w.t_hi);
    if (trace.front().t > w.t_lo + slack || trace.back().t < w.t_hi - slack)
        throw FitError("fit window lies outside the trace span");
}

} // namespace

RateFit fit_decay_rate(const std::vector<FunctionalSample>& trace, FitWindow window, std::size_t targets) {
    check_window(trace, window);
    const auto rows = rows_in(trace, window);
    if (rows.size() < 8) throw FitError("fewer than 8 trace rows in the fit window");

    const double a = std::log1p(window.t_lo), b = std::log1p(window.t_hi);
    std::vector<const FunctionalSample*> picked;
    for (std::size_t i = 0; i < targets; ++i) {
        const double target = std::expm1(a + (b - a) * static_cast<double>(i) / static_cast<double>(targets - 1));
        auto it = std::lower_bound(rows.begin(), rows.end(), target,
                                   [](const FunctionalSample* r, double t) { return r->t < t; });
        if (it == rows.end()) it = std::prev(it);
        if (it != rows.begin() && std::fabs((*std::prev(it))->t - target) <= std::fabs((*it)->t - target))
            it = std::prev(it);
        if (picked.empty() || picked.back() != *it) picked.push_back(*it);
    }
    if (picked.size() < 8) throw FitError("fewer than 8 distinct subsamples in the fit window");
    return least_squares(picked, window);
}

DecayFit fit_decay(const std::vector<FunctionalSample>& trace, FitWindow window) {
    DecayFit out;
    out.plain = fit_decay_rate(trace, window);
    const auto rows = rows_in(trace, window);
    std::vector<const FunctionalSample*> peaks;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i)
        if (rows[i]->E >= rows[i - 1]->E && rows[i]->E >= rows[i + 1]->E) peaks.push_back(rows[i]);
    if (peaks.size() >= 8) out.envelope = least_squares(peaks, window);
    return out;
}

WeightedEnergyBound bounded_weighted_energy(const std::vector<FunctionalSample>& trace, double exponent,
                                            FitWindow window) {
    const auto rows = rows_in(trace, window);
    if (rows.empty()) throw FitError("no trace rows in the window");
    WeightedEnergyBound out;
    out.sup = -std::numeric_limits<double>::infinity();
    for (const auto* r : rows) out.sup = std::max(out.sup, r->E * std::pow(1.0 + r->t, exponent));
    out.first = rows.front()->E * std::pow(1.0 + rows.front()->t, exponent);
    out.last = rows.back()->E * std::pow(1.0 + rows.back()->t, exponent);
    return out;
}

double quadratic_bound(double C, double f, double g) {
    return (C * g + std::sqrt(C * C * g * g + 4.0 * C * f)) / (2.0 * f);
}

QuadraticBoundReport quadratic_bound_check(const std::vector<FunctionalSample>& trace, const Multipliers& m,
                                           double t0) {
    QuadraticBoundReport rep;
    rep.combo_max = -std::numeric_limits<double>::infinity();
    rep.coercivity_min = std::numeric_limits<double>::infinity();
    double u_norm_max = 0.0;
    for (const auto& r : trace) {
        if (r.t < t0) continue;
        rep.combo_max = std::max(rep.combo_max, r.lyap_combo);
        rep.coercivity_min = std::min(rep.coercivity_min, coercivity_ratio(m.params, m.phi.L2(), r.t));
        u_norm_max = std::max(u_norm_max, std::sqrt(r.u_l2));
        ++rep.checked;
    }
    if (rep.checked == 0) return rep;
    if (!(rep.coercivity_min > 0.0)) {
        rep.pass = false;
        rep.C_est = std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.C_est = std::max({0.0, rep.combo_max, std::sqrt(2.0) * u_norm_max}) / rep.coercivity_min;

    rep.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& r : trace) {
        if (r.t < t0) continue;
        const double bound = quadratic_bound(rep.C_est, m.f(r.t), m.g(r.t));
        const double margin = bound - std::sqrt(r.E);
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.worst_t = r.t;
        }
        if (margin < -1e-12 * std::max(1.0, bound)) rep.pass = false;
    }
    return rep;
}

} // namespace dampwave
