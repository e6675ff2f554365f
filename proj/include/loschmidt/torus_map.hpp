#pragma once

// Kicked maps on the 2pi-torus:
//
//   p' = p + F(r)   (mod 2pi)
//   r' = r + p'     (mod 2pi)
//
// CatSawtooth:  F(r) = K [(r - pi) + eta sin r], perturbed by K -> K + eps.
// SawtoothPoly: F(r) = K (r - pi), perturbed kick adds eps i N_i (r - pi)^(i-1).

#include <numbers>

namespace loschmidt {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class MapFamily { CatSawtooth, SawtoothPoly };

/// Normalization N_i of the polynomial perturbation; i must be 2 or 3.
double poly_norm(int i);

struct MapSpec {
    MapFamily family = MapFamily::CatSawtooth;
    double K = 1.0;
    double eta = 0.0;
    int poly_i = 2;
    double epsilon = 0.0;

    static MapSpec cat_sawtooth(double K, double eta, double epsilon = 0.0);
    static MapSpec sawtooth_poly(double K, int i, double epsilon = 0.0);

    /// Same map with epsilon replaced.
    MapSpec with_epsilon(double eps) const;

    /// Kick force F(r) of the chosen branch.
    double kick(double r, bool perturbed) const;
    /// dF/dr of the chosen branch.
    double kick_derivative(double r, bool perturbed) const;

    /// Kick potential U with F = -U'; the quantum kick is exp(-i U(r) / hbar).
    double kick_potential(double r, bool perturbed) const;
};

/// Reduces x into [0, 2pi).
double wrap_angle(double x);

/// Signed torus difference a - b folded to [-pi, pi).
double torus_delta(double a, double b);

struct ClassicalState {
    double r = 0.0;
    double p = 0.0;
};

/// 2x2 matrix acting on tangent vectors ordered (dp, dr).
struct Mat2 {
    double pp = 1.0, pr = 0.0;
    double rp = 0.0, rr = 1.0;

    static constexpr Mat2 identity() { return {}; }
    double det() const { return pp * rr - pr * rp; }
    double trace() const { return pp + rr; }
};

Mat2 operator*(const Mat2& a, const Mat2& b);

struct TangentFrame {
    ClassicalState state;
    Mat2 jacobian = Mat2::identity();  // d(p_t, r_t) / d(p_0, r_0)
};

ClassicalState step_classical(ClassicalState s, const MapSpec& spec, bool perturbed);

/// Exact inverse of step_classical for the same branch.
ClassicalState step_inverse(ClassicalState s, const MapSpec& spec, bool perturbed);

/// One-step tangent matrix [[1, F'], [1, 1 + F']] at position r.
Mat2 tangent_matrix(double r, const MapSpec& spec, bool perturbed);

TangentFrame step_tangent(const TangentFrame& frame, const MapSpec& spec, bool perturbed);

}  // namespace loschmidt
