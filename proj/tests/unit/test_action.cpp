#include "loschmidt/action.hpp"
#include "loschmidt/classical.hpp"
#include "loschmidt/ensemble.hpp"
#include "loschmidt/errors.hpp"
#include "loschmidt/fit.hpp"
#include "loschmidt/quantum.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace loschmidt;
using std::numbers::pi;

TEST_CASE("minus V' is the extra kick per unit epsilon")
{
    const double eps = 0.01;
    for (const MapSpec& spec : {MapSpec::cat_sawtooth(1.0, 0.987, eps), MapSpec::cat_sawtooth(1.0, 0.0, eps),
                                MapSpec::sawtooth_poly(1.0, 2, eps), MapSpec::sawtooth_poly(1.0, 3, eps)}) {
        const PerturbationPotential V(spec);
        for (double r : {0.2, 1.0, 2.5, 3.3, 5.0, 6.1}) {
            CHECK(-V.first(r) * eps == doctest::Approx(spec.kick(r, true) - spec.kick(r, false)).epsilon(1e-12));
            CHECK(V.value(r) * eps ==
                  doctest::Approx(spec.kick_potential(r, true) - spec.kick_potential(r, false)).epsilon(1e-12));
            const double h = 1e-5;
            CHECK((V.first(r + h) - V.first(r - h)) / (2 * h) == doctest::Approx(V.second(r)).epsilon(1e-8));
        }
    }
}

TEST_CASE("action difference at the first steps")
{
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987, 0.02);
    const PerturbationPotential V(spec);
    CHECK(action_difference(spec, 1.0, 2.0, 0) == 0.0);
    CHECK(action_difference(spec, 1.0, 2.0, 1) == doctest::Approx(0.02 * V.value(1.0)));
    CHECK(kp(spec, 1.0, 2.0, 0) == 0.0);
    CHECK(kp(spec, 1.0, 2.0, 1) == 0.0);
    const ClassicalState s1 = step_classical({1.0, 2.0}, spec, false);
    CHECK(kp(spec, 1.0, 2.0, 2) == doctest::Approx(V.first(s1.r)));

    const PacketSpec packet{1.0, 2.0, 0.1};
    CHECK(kp_slope_at_center(spec, packet, 1) == 0.0);
    CHECK(kp_slope_at_center(spec, packet, 5) == kp(spec, 1.0, 2.0, 5));
}

TEST_CASE("vanishing perturbation gives a vanishing action difference")
{
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987, 0.0);
    for (int t : {0, 3, 10})
        CHECK(action_difference(spec, 0.7, 3.1, t) == 0.0);
}

TEST_CASE("k_p is the momentum derivative of dS / eps")
{
    Rng rng(21);
    const double h = 1e-7;
    int checked = 0;
    for (const MapSpec& spec : {MapSpec::cat_sawtooth(1.0, 0.987, 1.0), MapSpec::cat_sawtooth(1.0, 0.85, 1.0),
                                MapSpec::sawtooth_poly(1.0, 2, 1.0)}) {
        for (int k = 0; k < 40; ++k) {
            const double r0 = rng.uniform(0.0, two_pi), p0 = rng.uniform(0.0, two_pi);
            const int t = 2 + static_cast<int>(rng.uniform() * 9);
            const double fd = (action_difference(spec, r0, p0 + h, t) - action_difference(spec, r0, p0 - h, t)) / (2 * h);
            const double exact = kp(spec, r0, p0, t);
            // A finite-difference pair straddling the r = 0 seam is not comparable.
            if (std::abs(fd - exact) > 1e-4 * std::max(1.0, std::abs(exact)) && std::abs(fd) > 1e3 * std::abs(exact))
                continue;
            CHECK(std::abs(fd - exact) <= 1e-4 * std::max(1.0, std::abs(exact)));
            ++checked;
        }
    }
    CHECK(checked > 100);

    // Finite-difference oracle at the packet centre used in the examples.
    const MapSpec quad = MapSpec::sawtooth_poly(1.0, 2, 1.0);
    for (double hh : {1e-3, 1e-4}) {
        const double fd = (action_difference(quad, 2.0, 0.5 + hh, 4) - action_difference(quad, 2.0, 0.5 - hh, 4)) / (2 * hh);
        CHECK(fd == doctest::Approx(kp(quad, 2.0, 0.5, 4)).epsilon(1e-5));
    }
}

TEST_CASE("action profile")
{
    const MapSpec spec = MapSpec::sawtooth_poly(1.0, 2, 0.5);
    const ActionProfile prof = action_profile(spec, 1.2, 4, 64);
    REQUIRE(prof.grid.size() == 64);
    REQUIRE(prof.dS.size() == 64);
    REQUIRE(prof.kp.size() == 64);
    for (std::size_t j = 0; j < 64; j += 7) {
        CHECK(prof.dS[j] == action_difference(spec, 1.2, prof.grid[j], 4));
        CHECK(prof.kp[j] == kp(spec, 1.2, prof.grid[j], 4));
    }
}

TEST_CASE("variance of dS grows linearly in t")
{
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987, 1.0);
    const std::size_t n = 4000;
    Rng rng(3);
    std::vector<double> sum(51, 0.0), sum2(51, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        ClassicalState s{rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi)};
        const PerturbationPotential V(spec);
        double acc = 0.0;
        for (int t = 1; t <= 50; ++t) {
            acc += V.value(s.r);
            s = step_classical(s, spec, false);
            sum[t] += acc;
            sum2[t] += acc * acc;
        }
    }
    double st = 0, sv = 0, stt = 0, stv = 0, svv = 0;
    int m = 0;
    for (int t = 5; t <= 50; ++t) {
        const double mean = sum[t] / n;
        const double var = sum2[t] / n - mean * mean;
        st += t;
        sv += var;
        stt += t * t;
        stv += t * var;
        svv += var * var;
        ++m;
    }
    const double cov = stv - st * sv / m, vt = stt - st * st / m, vv = svv - sv * sv / m;
    CHECK(cov > 0.0);
    CHECK(cov * cov / (vt * vv) > 0.95);
}

TEST_CASE("mean |k_p| grows with the Lyapunov exponent")
{
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.0, 1.0);
    Rng rng(17);
    std::vector<double> mean(13, 0.0);
    const std::size_t n = 20000;
    for (std::size_t k = 0; k < n; ++k) {
        const auto h = kp_history(spec, rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi), 12);
        for (int t = 0; t <= 12; ++t)
            mean[static_cast<std::size_t>(t)] += std::abs(h[static_cast<std::size_t>(t)]) / n;
    }
    // fit_exponential_rate returns the decay rate, so fit the reciprocal.
    std::vector<double> inverse(13);
    for (std::size_t t = 0; t < 13; ++t)
        inverse[t] = mean[t] > 0.0 ? 1.0 / mean[t] : 0.0;
    const RateFit f = fit_exponential_rate(inverse, 3, 12);
    CHECK(std::abs(f.rate - sawtooth_lambda(1.0)) < 0.05 * sawtooth_lambda(1.0));
}

TEST_CASE("kp_history matches single evaluations")
{
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.85, 0.1);
    const auto h = kp_history(spec, 0.9, 4.2, 10);
    REQUIRE(h.size() == 11);
    for (int t = 0; t <= 10; ++t)
        CHECK(h[static_cast<std::size_t>(t)] == doctest::Approx(kp(spec, 0.9, 4.2, t)).epsilon(1e-12));
}

TEST_CASE("stationary points")
{
    SUBCASE("none for the cubic perturbation")
    {
        const MapSpec cubic = MapSpec::sawtooth_poly(1.0, 3, 0.01);
        for (double r0 : {0.3, 1.9, 4.4})
            for (int t = 0; t <= 8; ++t)
                CHECK(find_stationary_points(cubic, r0, t, resolving_grid_size(cubic, r0, t)).empty());
    }

    SUBCASE("t = 0 is degenerate")
    {
        CHECK(find_stationary_points(MapSpec::sawtooth_poly(1.0, 2, 0.01), 1.0, 0, 64).empty());
    }

    SUBCASE("roots of the quadratic perturbation")
    {
        const MapSpec quad = MapSpec::sawtooth_poly(1.0, 2, 0.01);
        const double r0 = 2.2;
        const int t = 6;
        const std::size_t grid = resolving_grid_size(quad, r0, t);
        const auto points = find_stationary_points(quad, r0, t, grid);
        REQUIRE(!points.empty());
        const ActionProfile prof = action_profile(quad, r0, t, 2 * grid);
        double max_abs = 0.0;
        for (double v : prof.kp)
            max_abs = std::max(max_abs, std::abs(v));
        for (const StationaryPoint& sp : points) {
            CHECK(std::abs(kp(quad, r0, sp.p0_alpha, t)) < 1e-8 * max_abs);
            CHECK(sp.dS_at == doctest::Approx(action_difference(quad, r0, sp.p0_alpha, t)));
            // Second differences of dS at two step sizes.
            const auto second = [&](double h) {
                return (action_difference(quad, r0, sp.p0_alpha + h, t) - 2.0 * sp.dS_at +
                        action_difference(quad, r0, sp.p0_alpha - h, t)) /
                       (h * h);
            };
            const double d1 = second(2e-4), d2 = second(1e-4);
            CHECK(std::abs(d1 - d2) < 0.01 * std::abs(d2));
            CHECK(sp.d2S == doctest::Approx(d2).epsilon(0.01));
        }
    }

    SUBCASE("coarse grids are rejected")
    {
        const MapSpec quad = MapSpec::sawtooth_poly(1.0, 2, 0.01);
        CHECK_THROWS_AS(find_stationary_points(quad, 2.2, 10, 8), UnresolvedOscillations);
    }
}

TEST_CASE("extremum count of dS")
{
    const MapSpec quad = MapSpec::sawtooth_poly(1.0, 2, 0.01);
    // dS at t = 1 is constant in p0.
    CHECK(extremum_count(quad, 1.0, 1, 256) == 0);
    const std::size_t a = extremum_count(quad, 1.0, 5, 8192);
    const std::size_t b = extremum_count(quad, 1.0, 7, 8192);
    CHECK(a > 0);
    CHECK(b > a);
    CHECK(extremum_count(quad, 1.0, 5, 16384) == a);
}
