#pragma once

#include <vector>

namespace loschmidt {

/// Exponential decay rate from least squares on ln(value) against t.
struct RateFit {
    int t_lo = 0;
    int t_hi = 0;
    double rate = 0.0;  // -slope
    double stderr_ = 0.0;
    double r_squared = 0.0;
    double intercept = 0.0;  // ln(value) at t = 0 on the fitted line
};

/// Fits values[t] for t in [t_lo, t_hi] (indices into `values`). Throws
/// InsufficientWindow for fewer than 3 points and NonpositiveValues if any
/// value in the window is not strictly positive.
RateFit fit_exponential_rate(const std::vector<double>& values, int t_lo, int t_hi);

/// Centered log-slope -d ln(value)/dt at t (one-sided at the ends).
double local_log_slope(const std::vector<double>& values, int t);

}  // namespace loschmidt
