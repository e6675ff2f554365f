#include "loschmidt/action.hpp"

#include "loschmidt/errors.hpp"
#include "loschmidt/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace loschmidt {

using std::numbers::pi;

PerturbationPotential::PerturbationPotential(const MapSpec& spec)
    : family_(spec.family),
      eta_(spec.eta),
      order_(spec.poly_i),
      norm_(spec.family == MapFamily::SawtoothPoly ? poly_norm(spec.poly_i) : 0.0)
{
}

double PerturbationPotential::value(double r) const
{
    const double x = r - pi;
    if (family_ == MapFamily::CatSawtooth)
        return -(0.5 * x * x - eta_ * std::cos(r));
    return -norm_ * (order_ == 2 ? x * x : x * x * x);
}

double PerturbationPotential::first(double r) const
{
    const double x = r - pi;
    if (family_ == MapFamily::CatSawtooth)
        return -(x + eta_ * std::sin(r));
    return -norm_ * (order_ == 2 ? 2.0 * x : 3.0 * x * x);
}

double PerturbationPotential::second(double r) const
{
    if (family_ == MapFamily::CatSawtooth)
        return -(1.0 + eta_ * std::cos(r));
    return -norm_ * (order_ == 2 ? 2.0 : 6.0 * (r - pi));
}

ActionSample action_sample(const MapSpec& spec, double r0, double p0, int t)
{
    const PerturbationPotential V(spec);
    ClassicalState s{wrap_angle(r0), wrap_angle(p0)};
    // Tangent column d(p_n, r_n)/dp0, starting from (1, 0).
    double dp = 1.0, dr = 0.0;
    double sum_v = 0.0, sum_k = 0.0;
    for (int n = 0; n < t; ++n) {
        sum_v += V.value(s.r);
        sum_k += V.first(s.r) * dr;
        const double d = spec.kick_derivative(s.r, false);
        dp += d * dr;
        dr += dp;
        s = step_classical(s, spec, false);
    }
    return {spec.epsilon * sum_v, sum_k};
}

double action_difference(const MapSpec& spec, double r0, double p0, int t)
{
    return action_sample(spec, r0, p0, t).dS;
}

double kp(const MapSpec& spec, double r0, double p0, int t)
{
    return action_sample(spec, r0, p0, t).kp;
}

double kp_slope_at_center(const MapSpec& spec, const PacketSpec& packet, int t)
{
    return kp(spec, packet.r_center, packet.p_center, t);
}

std::vector<double> kp_history(const MapSpec& spec, double r0, double p0, int t_max)
{
    const PerturbationPotential V(spec);
    std::vector<double> out(static_cast<std::size_t>(std::max(t_max, 0)) + 1, 0.0);
    ClassicalState s{wrap_angle(r0), wrap_angle(p0)};
    double dp = 1.0, dr = 0.0, sum_k = 0.0;
    for (int n = 0; n < t_max; ++n) {
        sum_k += V.first(s.r) * dr;
        out[static_cast<std::size_t>(n) + 1] = sum_k;
        const double d = spec.kick_derivative(s.r, false);
        dp += d * dr;
        dr += dp;
        s = step_classical(s, spec, false);
    }
    return out;
}

ActionProfile action_profile(const MapSpec& spec, double r0, int t, std::size_t grid_size)
{
    ActionProfile prof;
    prof.r0 = r0;
    prof.t = t;
    prof.grid.resize(grid_size);
    prof.dS.resize(grid_size);
    prof.kp.resize(grid_size);
    const double dp = two_pi / static_cast<double>(grid_size);
    for (std::size_t j = 0; j < grid_size; ++j) {
        const double p0 = dp * static_cast<double>(j);
        const ActionSample a = action_sample(spec, r0, p0, t);
        prof.grid[j] = p0;
        prof.dS[j] = a.dS;
        prof.kp[j] = a.kp;
    }
    return prof;
}

namespace {

std::size_t count_sign_changes(const std::vector<double>& k, std::size_t stride)
{
    const std::size_t n = k.size() / stride;
    std::size_t changes = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double a = k[j * stride];
        const double b = k[((j + 1) % n) * stride];
        if ((a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0))
            ++changes;
    }
    return changes;
}

std::vector<double> kp_grid(const MapSpec& spec, double r0, int t, std::size_t size)
{
    std::vector<double> k(size);
    const double dp = two_pi / static_cast<double>(size);
    for (std::size_t j = 0; j < size; ++j)
        k[j] = kp(spec, r0, dp * static_cast<double>(j), t);
    return k;
}

// Bisects [a, b] (unwrapped coordinates, ka and kb of opposite sign) to
// machine resolution and returns the endpoint with the smaller |k_p|.
double bisect_root(const MapSpec& spec, double r0, int t, double a, double b, double ka)
{
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b)
            break;
        const double km = kp(spec, r0, m, t);
        if (km == 0.0)
            return m;
        if ((km < 0.0) == (ka < 0.0)) {
            a = m;
            ka = km;
        } else {
            b = m;
        }
    }
    const double kb = kp(spec, r0, b, t);
    return std::abs(ka) <= std::abs(kb) ? a : b;
}

}  // namespace

std::vector<StationaryPoint> find_stationary_points(const MapSpec& spec, double r0, int t,
                                                    std::size_t grid_size)
{
    if (grid_size < 4)
        throw std::invalid_argument("find_stationary_points needs grid_size >= 4");
    // k_p vanishes identically for t <= 1: no isolated roots.
    if (t <= 1)
        return {};

    // The doubled grid contains the requested one at even indices.
    const std::vector<double> fine = kp_grid(spec, r0, t, 2 * grid_size);
    double max_abs = 0.0;
    for (double v : fine)
        max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0)
        return {};

    const std::size_t coarse_changes = count_sign_changes(fine, 2);
    const std::size_t fine_changes = count_sign_changes(fine, 1);
    if (coarse_changes != fine_changes)
        throw UnresolvedOscillations("k_p sign changes went from " + std::to_string(coarse_changes) +
                                     " to " + std::to_string(fine_changes) +
                                     " under grid doubling; increase grid_size");

    const std::size_t n = fine.size();
    const double dp = two_pi / static_cast<double>(n);
    const double tol = root_residual_fraction * max_abs;
    const double h = std::min(1e-6, 1e-3 * dp);

    std::vector<StationaryPoint> roots;
    for (std::size_t j = 0; j < n; ++j) {
        const double ka = fine[j];
        const double kb = fine[(j + 1) % n];
        const bool change = (ka < 0.0 && kb >= 0.0) || (ka >= 0.0 && kb < 0.0);
        if (!change)
            continue;
        const double a = dp * static_cast<double>(j);
        double root = kb == 0.0 ? a + dp : bisect_root(spec, r0, t, a, a + dp, ka);
        if (std::abs(kp(spec, r0, root, t)) >= tol)
            continue;  // jump discontinuity, not a root
        root = wrap_angle(root);
        StationaryPoint sp;
        sp.p0_alpha = root;
        sp.dS_at = action_difference(spec, r0, root, t);
        sp.d2S = spec.epsilon * (kp(spec, r0, root + h, t) - kp(spec, r0, root - h, t)) / (2.0 * h);
        sp.flat = std::abs(sp.d2S) < flat_curvature_threshold;
        roots.push_back(sp);
    }
    return roots;
}

std::size_t resolving_grid_size(const MapSpec& spec, double r0, int t, std::size_t initial,
                                std::size_t max_grid)
{
    std::size_t grid = std::max<std::size_t>(initial, 4);
    if (t <= 1)
        return grid;
    std::vector<double> fine = kp_grid(spec, r0, t, 2 * grid);
    for (;;) {
        if (count_sign_changes(fine, 2) == count_sign_changes(fine, 1))
            return grid;
        if (2 * grid > max_grid)
            throw UnresolvedOscillations("k_p oscillations not resolved at grid size " +
                                         std::to_string(max_grid));
        grid *= 2;
        fine = kp_grid(spec, r0, t, 2 * grid);
    }
}

std::size_t extremum_count(const MapSpec& spec, double r0, int t, std::size_t grid_size)
{
    // Work with dS/eps so the result does not depend on eps.
    const MapSpec unit = spec.with_epsilon(1.0);
    const double dp = two_pi / static_cast<double>(grid_size);
    std::vector<double> s(grid_size);
    for (std::size_t j = 0; j < grid_size; ++j)
        s[j] = action_difference(unit, r0, dp * static_cast<double>(j), t);
    std::size_t extrema = 0;
    for (std::size_t j = 0; j < grid_size; ++j) {
        const double prev = s[(j + grid_size - 1) % grid_size];
        const double next = s[(j + 1) % grid_size];
        if ((s[j] > prev && s[j] >= next) || (s[j] < prev && s[j] <= next))
            ++extrema;
    }
    return extrema;
}

}  // namespace loschmidt
