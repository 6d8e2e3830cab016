#pragma once

#include <dampwave/functionals.hpp>
#include <dampwave/multipliers.hpp>

#include <optional>
#include <stdexcept>
#include <vector>

namespace dampwave {

struct FitWindow {
    double t_lo = 1.0;
    double t_hi = 1.0;
};

/// Least-squares fit of log E = c - alpha log(1+t).
struct RateFit {
    double alpha = 0.0;
    double log_intercept = 0.0;
    FitWindow window;
    double rms_residual = 0.0;
    std::size_t sample_count = 0;
};

struct DecayFit {
    RateFit plain;
    std::optional<RateFit> envelope; // through local maxima of E, when enough exist
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fits over log-spaced subsamples (nearest trace rows to targets evenly
/// spaced in log(1+t)). Throws FitError on nonpositive E in the window, a
/// window outside the trace, or fewer than 8 distinct rows.
RateFit fit_decay_rate(const std::vector<FunctionalSample>& trace, FitWindow window, std::size_t targets = 64);

/// Plain fit plus the local-maximum envelope fit.
DecayFit fit_decay(const std::vector<FunctionalSample>& trace, FitWindow window);

struct WeightedEnergyBound {
    double sup = 0.0;   // sup of E (1+t)^p over the window
    double first = 0.0; // value at the first row in the window
    double last = 0.0;  // value at the last row in the window
    double ratio_last_first() const { return last / first; }
    double ratio_sup_first() const { return sup / first; }
};

WeightedEnergyBound bounded_weighted_energy(const std::vector<FunctionalSample>& trace, double exponent,
                                            FitWindow window);

struct QuadraticBoundReport {
    double C_est = 0.0;         // constant used in the closed-form bound
    double combo_max = 0.0;     // sup of lyap_combo over t >= t0
    double coercivity_min = 0.0; // inf of the coercivity ratio over t >= t0
    double min_margin = 0.0;    // min of bound - sqrt(E) over t >= t0
    double worst_t = 0.0;
    std::size_t checked = 0;
    bool pass = true;
};

/// Checks sqrt(E) <= [C g + sqrt(C^2 g^2 + 4 C f)] / (2 f) at every row with
/// t >= t0. C is the empirical constant: the sup of lyap_combo after t0,
/// together with the sup of sqrt(2)||u|| that bounds the g(u,u_t) cross term,
/// both divided by the minimal coercivity ratio.
QuadraticBoundReport quadratic_bound_check(const std::vector<FunctionalSample>& trace, const Multipliers& m,
                                           double t0);

/// Evaluates the closed-form bound for a given constant.
double quadratic_bound(double C, double f, double g);

} // namespace dampwave
