#include "loschmidt/classical.hpp"
#include "loschmidt/errors.hpp"
#include "loschmidt/fit.hpp"
#include "loschmidt/semiclassics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace loschmidt;
using std::numbers::pi;

TEST_CASE("quadrature amplitude is one without perturbation or time")
{
    const HilbertSpec hs(16384);
    const PacketSpec packet = PacketSpec::minimal(hs, 1.7, 2.4);
    SemiclassicalConfig cfg;
    cfg.quad_points = 512;

    const MapSpec unperturbed = MapSpec::cat_sawtooth(1.0, 0.987, 0.0);
    for (int t : {0, 4, 9})
        CHECK(std::abs(std::norm(msc_quadrature(unperturbed, hs, packet, t, cfg)) - 1.0) < 1e-6);

    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987, 100 * hs.hbar);
    CHECK(std::abs(std::norm(msc_quadrature(spec, hs, packet, 0, cfg)) - 1.0) < 1e-6);
    // A constant phase at t = 1 leaves the modulus untouched.
    CHECK(std::abs(std::norm(msc_quadrature(spec, hs, packet, 1, cfg)) - 1.0) < 1e-6);
}

TEST_CASE("quadrature refuses underresolved oscillations")
{
    const HilbertSpec hs(16384);
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987, 100 * hs.hbar);
    const PacketSpec packet = PacketSpec::minimal(hs, 1.7, 2.4);
    SemiclassicalConfig cfg;
    cfg.quad_points = 16;
    cfg.max_quad_points = 64;
    CHECK_THROWS_AS(msc_quadrature(spec, hs, packet, 8, cfg), OscillationUnderresolved);

    // Refinement from a coarse start reaches the same value.
    cfg.max_quad_points = std::size_t{1} << 22;
    const double refined = std::norm(msc_quadrature(spec, hs, packet, 8, cfg));

    cfg.quad_points = required_quad_points(spec, hs, packet, 8);
    const double m = std::norm(msc_quadrature(spec, hs, packet, 8, cfg));
    CHECK(m >= 0.0);
    CHECK(m <= 1.0 + 1e-9);
    CHECK(std::abs(refined - m) <= 0.03 * m + 1e-12);
}

TEST_CASE("single-state law")
{
    const HilbertSpec hs(131072);
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.0, 100 * hs.hbar);
    const PacketSpec packet = PacketSpec::minimal(hs, 1.1, 0.6);
    SemiclassicalConfig cfg;

    const double m = single_state_law(spec, hs, packet, 8, cfg);
    const double p0 = hs.hbar * static_cast<double>(snap_momentum_index(hs, packet.p_center));
    const double k = kp(spec, packet.r_center, p0, 8);
    CHECK(m == doctest::Approx(1.0 / (100.0 * 100.0 * k * k)));

    SemiclassicalConfig doubled = cfg;
    doubled.sigma = 200.0;
    CHECK(single_state_law(spec, hs, packet, 8, doubled) == doctest::Approx(m / 4.0).epsilon(1e-12));

    // k_p vanishes identically at t <= 1.
    CHECK_THROWS_AS(single_state_law(spec, hs, packet, 1, cfg), RegimeViolation);
    SemiclassicalConfig weak = cfg;
    weak.sigma = 1e-6;
    CHECK_THROWS_AS(single_state_law(spec, hs, packet, 8, weak), RegimeViolation);

    const SinglePacketPrediction pred = predict_single_packet(spec, hs, packet, 8, cfg);
    CHECK(pred.branch == SemiclassicalBranch::SlopeLaw);
    CHECK(pred.fidelity == m);
}

TEST_CASE("stationary-phase amplitude of a single root")
{
    const HilbertSpec hs(4096);
    const PacketSpec packet = PacketSpec::minimal(hs, 2.0, 1.0);
    const double p0 = hs.hbar * static_cast<double>(snap_momentum_index(hs, packet.p_center));
    const double w = packet.momentum_width(hs);
    for (double d2 : {0.3, -2.0, 17.0}) {
        const std::vector<StationaryPoint> one{{p0, 0.123, d2, false}};
        const cplx a = stationary_phase_amplitude(one, hs, packet);
        CHECK(std::norm(a) == doctest::Approx(2.0 * hs.hbar / (w * w * std::abs(d2))).epsilon(1e-12));
    }
    // Flat points are skipped.
    const std::vector<StationaryPoint> flat{{p0, 0.0, 1e-12, true}};
    CHECK(stationary_phase_amplitude(flat, hs, packet) == cplx(0.0));
}

TEST_CASE("no stationary points for the cubic perturbation")
{
    const HilbertSpec hs(16384);
    const MapSpec cubic = MapSpec::sawtooth_poly(1.0, 3, 100 * hs.hbar);
    for (double r : {0.5, 2.9, 5.1})
        for (int t : {2, 5, 8})
            CHECK_THROWS_AS(stationary_phase_sum(cubic, hs, PacketSpec::minimal(hs, r, 1.0), t), NoStationaryPoints);
}

TEST_CASE("I_s decays with the Lyapunov exponent for the sawtooth")
{
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.0, 1.0);
    const double lambda = sawtooth_lambda(1.0);
    SemiclassicalConfig cfg;
    cfg.mc_samples = 40000;
    const auto is = I_s_series(spec, 11, cfg, 5);
    REQUIRE(is.size() == 12);
    CHECK(std::isnan(is[0]));
    CHECK(std::isnan(is[1]));
    for (int t = 4; t <= 10; ++t) {
        const double ratio = is[static_cast<std::size_t>(t + 1)] / is[static_cast<std::size_t>(t)];
        CHECK(std::abs(ratio / std::exp(-lambda) - 1.0) < 0.10);
    }
}

TEST_CASE("I_s rate is insensitive to the cut fraction")
{
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987, 1.0);
    SemiclassicalConfig a, b;
    a.mc_samples = b.mc_samples = 40000;
    a.drop_fraction = 0.01;
    b.drop_fraction = 0.05;
    const double ra = fit_exponential_rate(I_s_series(spec, 10, a, 8), 4, 10).rate;
    const double rb = fit_exponential_rate(I_s_series(spec, 10, b, 8), 4, 10).rate;
    CHECK(std::abs(ra - rb) < 0.05 * ra);
}

TEST_CASE("semiclassical series are deterministic in the worker count")
{
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987, 1.0);
    SemiclassicalConfig one, three;
    one.mc_samples = three.mc_samples = 9000;
    one.workers = 1;
    three.workers = 3;
    const auto a = I_s_series(spec, 8, one, 2), b = I_s_series(spec, 8, three, 2);
    for (std::size_t t = 2; t < a.size(); ++t)
        CHECK(a[t] == b[t]);
    const auto la = I_Lambda(spec, 8, one, 2), lb = I_Lambda(spec, 8, three, 2);
    for (std::size_t t = 0; t < la.size(); ++t)
        CHECK(la[t] == lb[t]);
    const auto sa = slope_law_series(spec, 0.05, 8, one, 2), sb = slope_law_series(spec, 0.05, 8, three, 2);
    for (std::size_t t = 2; t < sa.size(); ++t)
        CHECK((sa[t] == sb[t] || (std::isnan(sa[t]) && std::isnan(sb[t]))));
}

TEST_CASE("I_Lambda of the sawtooth is exp(-lambda t)")
{
    SemiclassicalConfig cfg;
    cfg.mc_samples = 2000;
    const auto il = I_Lambda(MapSpec::cat_sawtooth(1.0, 0.0), 15, cfg, 3);
    REQUIRE(il.size() == 16);
    CHECK(il[0] == 1.0);
    for (int t = 1; t <= 15; ++t)
        CHECK(il[static_cast<std::size_t>(t)] ==
              doctest::Approx(std::exp(-sawtooth_lambda(1.0) * t)).epsilon(1e-3 * t));
}

TEST_CASE("crossover time")
{
    CHECK(crossover_tau(0.9, 0.5, 0.01) == doctest::Approx(std::log(pi / 0.005) / 0.9));
    // Halving w_p moves the crossover by ln 2 / lambda.
    CHECK(crossover_tau(0.9, 0.5, 0.005) - crossover_tau(0.9, 0.5, 0.01) == doctest::Approx(std::log(2.0) / 0.9));

    const HilbertSpec hs(131072);
    const MapSpec spec = MapSpec::sawtooth_poly(1.0, 3, 100 * hs.hbar);
    SemiclassicalConfig cfg;
    cfg.tau_c0 = 0.5;
    const double xi = std::sqrt(hs.hbar);
    CHECK(crossover_tau(spec, xi, hs, cfg) ==
          doctest::Approx(crossover_tau(sawtooth_lambda(1.0), 0.5, hs.hbar / xi)));
}

TEST_CASE("estimated oscillation prefactor")
{
    const MapSpec spec = MapSpec::sawtooth_poly(1.0, 3, 1.0);
    const double c0 = estimate_c0(spec, sawtooth_lambda(1.0), 4);
    CHECK(c0 > 0.2);
    CHECK(c0 < 2.0);
    CHECK(estimate_c0(spec, sawtooth_lambda(1.0), 4) == c0);
    CHECK_THROWS_AS(estimate_c0(spec, -1.0, 4), std::invalid_argument);
}

TEST_CASE("configuration validation")
{
    SemiclassicalConfig cfg;
    cfg.drop_fraction = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.drop_fraction = 0.25;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.drop_fraction = 0.02;
    CHECK_NOTHROW(cfg.validate());
}
