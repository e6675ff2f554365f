#include "loschmidt/fit.hpp"

#include "loschmidt/errors.hpp"

#include <cmath>
#include <string>

namespace loschmidt {

RateFit fit_exponential_rate(const std::vector<double>& values, int t_lo, int t_hi)
{
    if (t_lo < 0 || t_hi >= static_cast<int>(values.size()) || t_hi - t_lo + 1 < 3)
        throw InsufficientWindow("rate fit needs at least 3 points inside the series, got window [" +
                                 std::to_string(t_lo) + ", " + std::to_string(t_hi) + "]");

    double st = 0.0, sy = 0.0;
    const int n = t_hi - t_lo + 1;
    for (int t = t_lo; t <= t_hi; ++t) {
        const double v = values[static_cast<std::size_t>(t)];
        if (!(v > 0.0) || !std::isfinite(v))
            throw NonpositiveValues("value at t = " + std::to_string(t) + " is not strictly positive");
        st += t;
        sy += std::log(v);
    }
    const double mt = st / n, my = sy / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (int t = t_lo; t <= t_hi; ++t) {
        const double dt = t - mt;
        const double dy = std::log(values[static_cast<std::size_t>(t)]) - my;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    const double slope = sty / stt;
    const double resid = std::max(0.0, syy - slope * sty);

    RateFit fit;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.rate = -slope;
    fit.intercept = my - slope * mt;
    fit.stderr_ = n > 2 ? std::sqrt(resid / (n - 2) / stt) : 0.0;
    fit.r_squared = syy > 0.0 ? 1.0 - resid / syy : 1.0;
    return fit;
}

double local_log_slope(const std::vector<double>& values, int t)
{
    const int last = static_cast<int>(values.size()) - 1;
    const int a = t > 0 ? t - 1 : t;
    const int b = t < last ? t + 1 : t;
    if (a == b)
        throw InsufficientWindow("local slope needs at least two points");
    const double va = values[static_cast<std::size_t>(a)], vb = values[static_cast<std::size_t>(b)];
    if (!(va > 0.0) || !(vb > 0.0))
        throw NonpositiveValues("local slope of non-positive values at t = " + std::to_string(t));
    return -(std::log(vb) - std::log(va)) / (b - a);
}

}  // namespace loschmidt
