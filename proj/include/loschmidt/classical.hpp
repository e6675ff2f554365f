#pragma once

// Ensemble diagnostics of the classical map: Lyapunov exponent, the
// finite-time inverse-expansion rate Lambda_1(t), and the classical echo.

#include "loschmidt/torus_map.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace loschmidt {

/// Unrecorded steps used to align the initial tangent vector with the
/// unstable direction before any expansion is measured.
inline constexpr int tangent_alignment_steps = 24;

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// Largest Lyapunov exponent of the unperturbed map: mean of the per-step
/// log expansion of an aligned tangent vector over `ensemble_size` uniform
/// initial points, each iterated `steps` times.
Estimate lyapunov_lambda(const MapSpec& spec, std::size_t ensemble_size, int steps,
                         std::uint64_t seed, unsigned workers = 0);

/// Closed-form exponent of the eta = 0 sawtooth, ln((2 + K + sqrt((2+K)^2 - 4)) / 2).
double sawtooth_lambda(double K);

struct Lambda1Point {
    int t = 0;
    double lambda1 = 0.0;       // -(1/t) ln <|dx(t)/dx(0)|^-1>
    double stderr_ = 0.0;       // delta-method standard error of lambda1
    double inverse_mean = 0.0;  // <|dx(t)/dx(0)|^-1> itself
};

/// Lambda_1(t) for t = 1..t_max from the ensemble average of the inverse
/// expansion factor. Every member starts from (1, 0) rotated onto the
/// unstable direction by `tangent_alignment_steps` unrecorded steps.
std::vector<Lambda1Point> lambda1_of_t(const MapSpec& spec, std::size_t ensemble_size, int t_max,
                                       std::uint64_t seed, unsigned workers = 0);

struct EchoOptions {
    /// When set, evolve forward with the unperturbed map and back with the
    /// inverse perturbed map instead.
    bool swap_roles = false;
    unsigned workers = 0;
};

/// Classical echo M_cl(t), t = 0..t_max: fraction of points sampled uniformly
/// in the disk of `radius` about `center` that return to that disk after t
/// perturbed steps followed by t inverse unperturbed steps.
std::vector<double> classical_fidelity(const MapSpec& spec, ClassicalState center, double radius,
                                       std::size_t samples, int t_max, std::uint64_t seed,
                                       const EchoOptions& options = {});

}  // namespace loschmidt
