#include "loschmidt/classical.hpp"

#include <doctest.h>

#include <cmath>

using namespace loschmidt;

TEST_CASE("closed-form sawtooth exponent")
{
    CHECK(sawtooth_lambda(1.0) == doctest::Approx(std::log((3.0 + std::sqrt(5.0)) / 2.0)));
    for (double K : {0.5, 1.0, 2.0}) {
        const Estimate e = lyapunov_lambda(MapSpec::cat_sawtooth(K, 0.0), 2000, 60, 3);
        CHECK(std::abs(e.value - sawtooth_lambda(K)) < 1e-3);
    }
}

TEST_CASE("smooth family exponents")
{
    const Estimate a = lyapunov_lambda(MapSpec::cat_sawtooth(1.0, 0.987), 20000, 100, 4);
    CHECK(std::abs(a.value - 0.90) < 0.05);
    const Estimate b = lyapunov_lambda(MapSpec::cat_sawtooth(1.0, 0.85), 20000, 100, 4);
    CHECK(std::abs(b.value - 0.92) < 0.05);
}

TEST_CASE("exponents do not depend on the worker count")
{
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987);
    const Estimate one = lyapunov_lambda(spec, 5000, 30, 9, 1);
    const Estimate three = lyapunov_lambda(spec, 5000, 30, 9, 3);
    CHECK(one.value == three.value);
    CHECK(one.stderr_ == three.stderr_);

    const auto l1 = lambda1_of_t(spec, 5000, 10, 9, 1);
    const auto l3 = lambda1_of_t(spec, 5000, 10, 9, 3);
    for (std::size_t t = 0; t < l1.size(); ++t)
        CHECK(l1[t].lambda1 == l3[t].lambda1);
}

TEST_CASE("Lambda1 of the sawtooth equals lambda at every t")
{
    const double lambda = sawtooth_lambda(1.0);
    const auto points = lambda1_of_t(MapSpec::cat_sawtooth(1.0, 0.0), 2000, 30, 1);
    REQUIRE(points.size() == 30);
    for (const Lambda1Point& p : points) {
        CHECK(std::abs(p.lambda1 - lambda) < 1e-3);
        CHECK(p.inverse_mean == doctest::Approx(std::exp(-p.lambda1 * p.t)));
    }
}

TEST_CASE("Jensen ordering and decreasing finite-time rate")
{
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987);
    const Estimate lambda = lyapunov_lambda(spec, 20000, 100, 11);
    const auto points = lambda1_of_t(spec, 20000, 20, 12);
    for (const Lambda1Point& p : points)
        CHECK(p.lambda1 <= lambda.value + 3.0 * (lambda.stderr_ + p.stderr_));
    CHECK(points[1].lambda1 > points[9].lambda1);
    CHECK(points[9].lambda1 > points[19].lambda1);
    CHECK(points[19].lambda1 > 0.35);
}

TEST_CASE("classical echo")
{
    const ClassicalState center{2.0, 4.0};
    const double radius = 0.05;

    SUBCASE("vanishing perturbation returns every point")
    {
        const auto m = classical_fidelity(MapSpec::cat_sawtooth(1.0, 0.987, 0.0), center, radius, 2000, 15, 1);
        REQUIRE(m.size() == 16);
        for (double v : m)
            CHECK(v == 1.0);
    }

    SUBCASE("t = 0 and decay")
    {
        const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987, 0.01);
        const auto m = classical_fidelity(spec, center, radius, 4000, 20, 2);
        CHECK(m[0] == 1.0);
        CHECK(m[20] < 0.5);
    }

    SUBCASE("exchanging the roles of the maps is statistically neutral")
    {
        const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987, 0.01);
        const std::size_t n = 20000;
        EchoOptions swapped;
        swapped.swap_roles = true;
        const auto a = classical_fidelity(spec, center, radius, n, 12, 3);
        const auto b = classical_fidelity(spec, center, radius, n, 12, 4, swapped);
        for (std::size_t t = 0; t < a.size(); ++t) {
            const double p = 0.5 * (a[t] + b[t]);
            const double se = std::sqrt(2.0 * p * (1.0 - p) / static_cast<double>(n));
            CHECK(std::abs(a[t] - b[t]) <= 3.0 * se + 1e-12);
        }
    }

    CHECK_THROWS(classical_fidelity(MapSpec::cat_sawtooth(1.0, 0.0), center, 0.0, 10, 3, 1));
}
