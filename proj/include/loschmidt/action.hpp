#pragma once

// First-order action difference between the perturbed and unperturbed map,
// accumulated along unperturbed trajectories started at (r0, p0):
//
//   dS(p0, r0; t) = eps * sum_{n=0}^{t-1} V(r_n)
//   k_p           = (1/eps) d dS / d p0 = sum_n V'(r_n) dr_n/dp0
//
// V is evaluated at the pre-kick positions r_0 .. r_{t-1}, which makes dS the
// exact first-order phase of the quantum kick U(r) -> U(r) + eps V(r).

#include "loschmidt/torus_map.hpp"

#include <cstddef>
#include <vector>

namespace loschmidt {

struct PacketSpec;

/// Perturbing potential V with the derivatives used by the action machinery.
/// -V' is exactly the extra kick force of the perturbed map per unit eps.
class PerturbationPotential {
public:
    explicit PerturbationPotential(const MapSpec& spec);

    double value(double r) const;
    double first(double r) const;
    double second(double r) const;

private:
    MapFamily family_;
    double eta_;
    int order_;
    double norm_;
};

double action_difference(const MapSpec& spec, double r0, double p0, int t);

double kp(const MapSpec& spec, double r0, double p0, int t);

/// dS and k_p together from one trajectory.
struct ActionSample {
    double dS = 0.0;
    double kp = 0.0;
};

ActionSample action_sample(const MapSpec& spec, double r0, double p0, int t);

/// k_p at the packet centre (r_center, p_center) as given, without snapping.
double kp_slope_at_center(const MapSpec& spec, const PacketSpec& packet, int t);

/// k_p(t) for t = 0..t_max along a single trajectory (k_p(0) = k_p(1) = 0).
std::vector<double> kp_history(const MapSpec& spec, double r0, double p0, int t_max);

struct ActionProfile {
    double r0 = 0.0;
    int t = 0;
    std::vector<double> grid;  // p0 samples
    std::vector<double> dS;
    std::vector<double> kp;
};

/// dS and k_p on a uniform grid of `grid_size` points over [0, 2pi).
ActionProfile action_profile(const MapSpec& spec, double r0, int t, std::size_t grid_size);

struct StationaryPoint {
    double p0_alpha = 0.0;
    double dS_at = 0.0;
    double d2S = 0.0;
    bool flat = false;  // |d2S| below flat_curvature_threshold
};

inline constexpr double flat_curvature_threshold = 1e-8;
/// A bracket is accepted as a root only if |k_p| there is below this
/// fraction of max |k_p| on the grid; otherwise it straddles a jump.
inline constexpr double root_residual_fraction = 1e-8;

/// Roots of k_p over p0 in [0, 2pi): uniform scan with `grid_size` points,
/// bisection of every sign change down to machine resolution, rejection of
/// brackets that straddle a discontinuity, and d2S from centered differences
/// of eps * k_p. Throws UnresolvedOscillations if the number of sign changes
/// differs on the doubled grid.
std::vector<StationaryPoint> find_stationary_points(const MapSpec& spec, double r0, int t,
                                                    std::size_t grid_size);

/// Grid size that resolves the oscillations of k_p at time t: starts from
/// `initial` and doubles until the sign-change count is stable, up to
/// `max_grid`. Throws UnresolvedOscillations when the cap is reached.
std::size_t resolving_grid_size(const MapSpec& spec, double r0, int t, std::size_t initial = 1024,
                                std::size_t max_grid = std::size_t{1} << 24);

/// Number of local extrema (maxima and minima) of dS over p0 in [0, 2pi) on
/// a uniform grid. For continuous dS this is the number of sign changes of
/// k_p; jumps of dS (the i = 3 polynomial) count like turning points.
std::size_t extremum_count(const MapSpec& spec, double r0, int t, std::size_t grid_size);

}  // namespace loschmidt
