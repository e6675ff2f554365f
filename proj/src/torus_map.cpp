#include "loschmidt/torus_map.hpp"

#include <cmath>
#include <stdexcept>

namespace loschmidt {

using std::numbers::pi;

double poly_norm(int i)
{
    switch (i) {
    case 2:
        return 0.5;
    case 3:
        return std::sqrt(1.4) / (3.0 * pi);
    default:
        throw std::invalid_argument("polynomial perturbation order must be 2 or 3");
    }
}

MapSpec MapSpec::cat_sawtooth(double K, double eta, double epsilon)
{
    return MapSpec{MapFamily::CatSawtooth, K, eta, 2, epsilon};
}

MapSpec MapSpec::sawtooth_poly(double K, int i, double epsilon)
{
    (void)poly_norm(i);
    return MapSpec{MapFamily::SawtoothPoly, K, 0.0, i, epsilon};
}

MapSpec MapSpec::with_epsilon(double eps) const
{
    MapSpec s = *this;
    s.epsilon = eps;
    return s;
}

double MapSpec::kick(double r, bool perturbed) const
{
    const double x = r - pi;
    if (family == MapFamily::CatSawtooth) {
        const double k = perturbed ? K + epsilon : K;
        return k * (x + eta * std::sin(r));
    }
    double f = K * x;
    if (perturbed)
        f += epsilon * poly_i * poly_norm(poly_i) * (poly_i == 2 ? x : x * x);
    return f;
}

double MapSpec::kick_derivative(double r, bool perturbed) const
{
    if (family == MapFamily::CatSawtooth) {
        const double k = perturbed ? K + epsilon : K;
        return k * (1.0 + eta * std::cos(r));
    }
    double d = K;
    if (perturbed)
        d += epsilon * poly_i * (poly_i - 1) * poly_norm(poly_i) * (poly_i == 2 ? 1.0 : r - pi);
    return d;
}

double MapSpec::kick_potential(double r, bool perturbed) const
{
    const double x = r - pi;
    if (family == MapFamily::CatSawtooth) {
        const double k = perturbed ? K + epsilon : K;
        return -k * (0.5 * x * x - eta * std::cos(r));
    }
    double u = -0.5 * K * x * x;
    if (perturbed)
        u -= epsilon * poly_norm(poly_i) * std::pow(x, poly_i);
    return u;
}

double wrap_angle(double x)
{
    double y = x - two_pi * std::floor(x / two_pi);
    if (y >= two_pi)
        y -= two_pi;
    if (y < 0.0)
        y = 0.0;
    return y;
}

double torus_delta(double a, double b)
{
    return wrap_angle(a - b + pi) - pi;
}

Mat2 operator*(const Mat2& a, const Mat2& b)
{
    return {a.pp * b.pp + a.pr * b.rp, a.pp * b.pr + a.pr * b.rr,
            a.rp * b.pp + a.rr * b.rp, a.rp * b.pr + a.rr * b.rr};
}

ClassicalState step_classical(ClassicalState s, const MapSpec& spec, bool perturbed)
{
    const double p = wrap_angle(s.p + spec.kick(s.r, perturbed));
    return {wrap_angle(s.r + p), p};
}

ClassicalState step_inverse(ClassicalState s, const MapSpec& spec, bool perturbed)
{
    const double r = wrap_angle(s.r - s.p);
    return {r, wrap_angle(s.p - spec.kick(r, perturbed))};
}

Mat2 tangent_matrix(double r, const MapSpec& spec, bool perturbed)
{
    const double d = spec.kick_derivative(r, perturbed);
    return {1.0, d, 1.0, 1.0 + d};
}

TangentFrame step_tangent(const TangentFrame& frame, const MapSpec& spec, bool perturbed)
{
    return {step_classical(frame.state, spec, perturbed),
            tangent_matrix(frame.state.r, spec, perturbed) * frame.jacobian};
}

}  // namespace loschmidt
