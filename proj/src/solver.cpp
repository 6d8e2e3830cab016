#include <dampwave/solver.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#if defined(__SSE2__)
#include <immintrin.h>
#endif

namespace dampwave {

namespace {

// The precursor tail ahead of the physical front decays to subnormal values,
// which are very slow on x86. Flushing them to zero changes results by less
// than the smallest normal double.
class FlushDenormals {
public:
#if defined(__SSE2__)
    FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
    ~FlushDenormals() { _mm_setcsr(saved_); }

private:
    unsigned saved_;
#endif
};

} // namespace

std::string_view to_string(DomainMode mode) {
    return mode == DomainMode::HalfLine ? "half-line" : "whole-line";
}

DomainMode parse_domain_mode(std::string_view name) {
    if (name == "half-line") return DomainMode::HalfLine;
    if (name == "whole-line") return DomainMode::WholeLine;
    throw std::invalid_argument("unknown domain mode '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
    if (!(dx > 0.0) || !std::isfinite(dx)) throw std::invalid_argument("dx must be positive");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("t_final must be nonnegative");
    if (wavefront_margin < 2) throw std::invalid_argument("wavefront_margin must be at least 2");
    if (record_stride < 1) throw std::invalid_argument("record_stride must be at least 1");
}

std::size_t SolverConfig::step_count() const {
    if (t_final == 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(t_final / (cfl * dx) - 1e-9));
}

double SolverConfig::time_step() const {
    const std::size_t n = step_count();
    return n == 0 ? cfl * dx : t_final / static_cast<double>(n);
}

std::vector<double> grid_derivative(const std::vector<double>& v, double dx, bool boundary_at_start) {
    const std::size_t n = v.size();
    std::vector<double> d(n, 0.0);
    if (n == 0) return d;
    const double inv = 0.5 / dx;
    if (n == 1) return d;
    d[0] = v[1] * inv;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) * inv;
    d[n - 1] = -v[n - 2] * inv;
    if (boundary_at_start) d[0] = (-3.0 * v[0] + 4.0 * v[1] - (n > 2 ? v[2] : 0.0)) * inv;
    return d;
}

WaveSolver::WaveSolver(DampingProfile profile, SolverConfig config, double support_radius)
    : profile_(profile), config_(config), radius_(support_radius) {
    config_.validate();
    if (!(radius_ > 0.0)) throw std::invalid_argument("support radius must be positive");
    steps_ = config_.step_count();
    dt_ = config_.time_step();

    // Room for the final level, one extra level for centered u_t, and the
    // zero guard cell on each side.
    base_cells_ = static_cast<std::size_t>(std::floor(radius_ / config_.dx + 1e-9)) + config_.wavefront_margin;
    const std::size_t reach = base_cells_ + steps_ + 4;
    origin_ = config_.mode == DomainMode::HalfLine ? 0 : reach;
    capacity_ = origin_ + reach + 1;

    V_.resize(capacity_);
    inv_diag_.resize(capacity_);
    prev_coef_.resize(capacity_);
    for (std::size_t i = 0; i < capacity_; ++i) {
        const double x = (static_cast<double>(i) - static_cast<double>(origin_)) * config_.dx;
        V_[i] = profile_(x);
        const double a = 0.5 * V_[i] * dt_;
        inv_diag_[i] = 1.0 / (1.0 + a);
        prev_coef_[i] = 1.0 - a;
    }
}

std::pair<std::size_t, std::size_t> WaveSolver::active_range(std::size_t level) const {
    const std::size_t cells = base_cells_ + level;
    const std::size_t hi = origin_ + cells;
    const std::size_t lo = config_.mode == DomainMode::HalfLine ? 0 : origin_ - std::min(origin_, cells);
    return {lo, hi};
}

WaveState WaveSolver::initialize(const InitialData& data) const {
    if (!data.u0 || !data.u1) throw std::invalid_argument("initial data needs both u0 and u1");
    const double dx = config_.dx;
    const bool half = config_.mode == DomainMode::HalfLine;

    // Support and boundary compatibility, with one grid cell of tolerance.
    double scale = 0.0;
    const auto probe_cells = static_cast<std::size_t>(std::ceil(radius_ / dx)) + 4;
    for (std::size_t i = 0; i <= 4 * probe_cells; ++i) {
        const double x = 0.25 * static_cast<double>(i) * dx;
        for (double s : {x, -x}) {
            if (half && s < 0.0) continue;
            const double a = std::fabs(data.u0(s)), b = std::fabs(data.u1(s));
            scale = std::max({scale, a, b});
            if (std::fabs(s) > radius_ + dx && (a != 0.0 || b != 0.0))
                throw std::invalid_argument("initial data is not supported in [0, R]");
        }
    }
    if (half && std::fabs(data.u0(0.0)) > 1e-12 * std::max(1.0, scale))
        throw std::invalid_argument("u0 must vanish at x = 0 on the half-line");

    WaveState s;
    s.origin = origin_;
    s.dx = dx;
    s.dt = dt_;
    s.mode = config_.mode;
    s.u_prev.assign(capacity_, 0.0);
    s.u_curr.assign(capacity_, 0.0);

    const auto [lo0, hi0] = active_range(0);
    std::vector<double> u1(capacity_, 0.0);
    for (std::size_t i = lo0; i <= hi0; ++i) {
        s.u_prev[i] = data.u0(s.x(i));
        u1[i] = data.u1(s.x(i));
    }
    if (half) s.u_prev[origin_] = 0.0;

    const auto [lo1, hi1] = active_range(1);
    const double lambda2 = (dt_ / dx) * (dt_ / dx);
    for (std::size_t i = std::max<std::size_t>(lo1, 1); i <= hi1; ++i) {
        const double lap = s.u_prev[i + 1] - 2.0 * s.u_prev[i] + s.u_prev[i - 1];
        s.u_curr[i] = s.u_prev[i] + dt_ * u1[i] + 0.5 * lambda2 * lap - 0.5 * dt_ * dt_ * V_[i] * u1[i];
    }
    if (half) s.u_curr[origin_] = 0.0;
    s.lo = lo1;
    s.hi = hi1;
    s.t = dt_;
    s.step = 1;
    return s;
}

void WaveSolver::step(WaveState& s) const { advance<false>(s, nullptr); }

void WaveSolver::step(WaveState& s, AuxiliaryState& aux) const { advance<true>(s, &aux); }

template <bool WithAux>
void WaveSolver::advance(WaveState& s, AuxiliaryState* aux) const {
    const double t_next = static_cast<double>(s.step + 1) * dt_;
    const auto [lo, hi] = active_range(s.step + 1);
    if (hi + 1 >= capacity_ || (config_.mode == DomainMode::WholeLine && lo < 1))
        throw std::out_of_range("step exceeds the preallocated time horizon");

    const double lambda2 = (dt_ / config_.dx) * (dt_ / config_.dx);
    const bool half = config_.mode == DomainMode::HalfLine;
    const FlushDenormals ftz;
    const std::size_t first = half ? origin_ + 1 : lo;
    double* next = s.u_prev.data(); // overwritten in place
    const double* curr = s.u_curr.data();
    const double* inv = inv_diag_.data();
    const double* pc = prev_coef_.data();
    if constexpr (WithAux) {
        double* w = aux->w.data();
        const double* V = V_.data();
        const double half_dt = 0.5 * dt_;
        double density = 0.0;
#pragma omp simd reduction(+ : density)
        for (std::size_t j = first; j <= hi; ++j) {
            const double c = curr[j];
            const double v = inv[j] * (2.0 * c - pc[j] * next[j] + lambda2 * (curr[j + 1] - 2.0 * c + curr[j - 1]));
            next[j] = v;
            w[j] += half_dt * (c + v);
            density += V[j] * v * v;
        }
        density *= config_.dx;
        aux->damped_mass += half_dt * (aux->last_density + density);
        aux->last_density = density;
    } else {
        for (std::size_t j = first; j <= hi; ++j) {
            const double lap = curr[j + 1] - 2.0 * curr[j] + curr[j - 1];
            next[j] = inv[j] * (2.0 * curr[j] - pc[j] * next[j] + lambda2 * lap);
        }
    }
    if (half) next[origin_] = 0.0;
    // Any overflow or NaN spreads through the stencil, so a periodic scan
    // catches it within a few steps.
    if ((s.step + 1) % 16 == 0 || s.step + 1 >= steps_) {
        double probe = 0.0;
#pragma omp simd reduction(+ : probe)
        for (std::size_t j = first; j <= hi; ++j) probe += next[j] * 0.0;
        if (!std::isfinite(probe))
            throw InstabilityError(t_next, "non-finite solution at t = " + std::to_string(t_next));
    }

    std::swap(s.u_prev, s.u_curr);
    s.lo = lo;
    s.hi = hi;
    s.step += 1;
    s.t = t_next;
}

namespace {

Snapshot make_snapshot(double t, const WaveState& s, std::size_t first, std::size_t last,
                       const std::vector<double>& V) {
    Snapshot snap;
    snap.t = t;
    snap.dx = s.dx;
    snap.mode = s.mode;
    snap.x_first = s.x(first);
    snap.u.assign(s.u_prev.begin() + static_cast<std::ptrdiff_t>(first),
                  s.u_prev.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    snap.V.assign(V.begin() + static_cast<std::ptrdiff_t>(first), V.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    return snap;
}

} // namespace

Snapshot WaveSolver::snapshot(const WaveState& s, const std::vector<double>& u_before) const {
    const std::size_t first = config_.mode == DomainMode::HalfLine ? origin_ : s.lo - 1;
    const std::size_t last = s.hi + 1;
    Snapshot snap = make_snapshot(s.t - dt_, s, first, last, V_);
    snap.u_t.resize(snap.u.size());
    const double inv = 0.5 / dt_;
    for (std::size_t i = 0; i < snap.u.size(); ++i) snap.u_t[i] = (s.u_curr[first + i] - u_before[first + i]) * inv;
    snap.u_x = grid_derivative(snap.u, s.dx, config_.mode == DomainMode::HalfLine);
    return snap;
}

Snapshot WaveSolver::initial_snapshot(const InitialData& data) const {
    const auto [lo, hi] = active_range(0);
    const std::size_t first = config_.mode == DomainMode::HalfLine ? origin_ : lo - 1;
    Snapshot snap;
    snap.t = 0.0;
    snap.dx = config_.dx;
    snap.mode = config_.mode;
    snap.x_first = (static_cast<double>(first) - static_cast<double>(origin_)) * config_.dx;
    const std::size_t n = hi + 2 - first;
    snap.u.resize(n);
    snap.u_t.resize(n);
    snap.V.assign(V_.begin() + static_cast<std::ptrdiff_t>(first), V_.begin() + static_cast<std::ptrdiff_t>(first + n));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        snap.u[i] = data.u0(snap.x(i));
        snap.u_t[i] = data.u1(snap.x(i));
    }
    snap.u[n - 1] = snap.u_t[n - 1] = 0.0;
    if (config_.mode == DomainMode::HalfLine) snap.u[0] = 0.0;
    snap.u_x = grid_derivative(snap.u, config_.dx, config_.mode == DomainMode::HalfLine);
    return snap;
}

double staggered_energy(const WaveState& s) {
    const double idt = 1.0 / s.dt, idx = 1.0 / s.dx;
    const std::size_t first = s.mode == DomainMode::HalfLine ? s.origin : s.lo - 1;
    double kinetic = 0.0, potential = 0.0;
    for (std::size_t j = first; j <= s.hi + 1; ++j) {
        const double v = (s.u_curr[j] - s.u_prev[j]) * idt;
        kinetic += v * v;
        if (j + 1 < s.u_curr.size()) {
            const double a = (s.u_curr[j + 1] - s.u_curr[j]) * idx;
            const double b = (s.u_prev[j + 1] - s.u_prev[j]) * idx;
            potential += a * b;
        }
    }
    return 0.5 * s.dx * (kinetic + potential);
}

} // namespace dampwave
