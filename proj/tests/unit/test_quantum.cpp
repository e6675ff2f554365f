#include "loschmidt/errors.hpp"
#include "loschmidt/quantum.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace loschmidt;
using std::numbers::pi;

TEST_CASE("Hilbert space conventions")
{
    const HilbertSpec hs(1024);
    CHECK(hs.hbar * 1024 == doctest::Approx(two_pi));
    CHECK(hs.position(256) == doctest::Approx(pi / 2));
    CHECK(hs.momentum(1) == doctest::Approx(hs.hbar));
    CHECK(hs.momentum(1023) == doctest::Approx(-hs.hbar));
    CHECK(hs.momentum(512) == doctest::Approx(pi));
    CHECK_THROWS(HilbertSpec(1023));
    CHECK(snap_momentum_index(hs, 3.0 * hs.hbar + 0.4 * hs.hbar) == 3);
    CHECK(snap_momentum_index(hs, two_pi - 0.2 * hs.hbar) == 0);
}

TEST_CASE("Gaussian packets")
{
    const HilbertSpec hs(4096);
    const PacketSpec packet = PacketSpec::minimal(hs, 2.0, 1.5);
    const QuantumState psi = build_gaussian(hs, packet);
    CHECK(std::abs(psi.norm_squared() - 1.0) < 1e-12);

    const PositionMoments pos = position_moments(psi, hs);
    CHECK(std::abs(pos.mean - 2.0) < 1e-6);
    CHECK(pos.variance == doctest::Approx(packet.xi * packet.xi / 2).epsilon(0.01));

    const double w_p = packet.momentum_width(hs);
    const PositionMoments mom = momentum_moments(psi, hs);
    CHECK(mom.variance == doctest::Approx(w_p * w_p / 2).epsilon(0.01));
    CHECK(std::abs(mom.mean - hs.momentum(snap_momentum_index(hs, 1.5))) < 1e-9);

    // Packets straddling the seam are periodized.
    const QuantumState edge = build_gaussian(hs, PacketSpec::minimal(hs, 0.01, 0.0));
    CHECK(std::abs(position_moments(edge, hs).mean - 0.01) < 1e-6);

    CHECK_THROWS_AS(build_gaussian(hs, PacketSpec{1.0, 1.0, 3.0 * two_pi / 4096}), PacketUnresolvable);
}

TEST_CASE("unitarity and branch identity")
{
    const HilbertSpec hs(1024);
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987, 0.0);
    const FloquetOperator op(hs, spec);
    QuantumState a = build_gaussian(hs, PacketSpec::minimal(hs, 1.0, 2.0));
    QuantumState b = a;
    for (int n = 0; n < 100; ++n) {
        floquet_step(a, op, false);
        floquet_step(b, op, true);
    }
    CHECK(std::abs(a.norm_squared() - 1.0) < 1e-10);
    bool identical = true;
    for (std::size_t j = 0; j < hs.N; ++j)
        identical = identical && a.amplitudes[j] == b.amplitudes[j];
    CHECK(identical);

    const auto m = fidelity_series(op, PacketSpec::minimal(hs, 1.0, 2.0), 100);
    REQUIRE(m.size() == 101);
    for (double v : m)
        CHECK(std::abs(v - 1.0) < 1e-10);
}

TEST_CASE("overlap is conjugate symmetric")
{
    const HilbertSpec hs(512);
    const FloquetOperator op(hs, MapSpec::sawtooth_poly(1.0, 2, 100 * hs.hbar));
    QuantumState a = build_gaussian(hs, PacketSpec::minimal(hs, 1.0, 2.0));
    QuantumState b = a;
    for (int n = 0; n < 5; ++n) {
        floquet_step(a, op, false);
        floquet_step(b, op, true);
    }
    const cplx ab = overlap(a, b), ba = overlap(b, a);
    CHECK(std::abs(ab - std::conj(ba)) < 1e-12);
    CHECK(std::abs(std::norm(ab) - std::norm(ba)) < 1e-12);
}

TEST_CASE("free rotation returns momentum eigenstates")
{
    const HilbertSpec hs(256);
    const FloquetOperator op(hs, MapSpec::cat_sawtooth(0.0, 0.0, 0.0));
    for (std::size_t k : {0u, 3u, 100u, 200u}) {
        QuantumState psi;
        psi.amplitudes.resize(hs.N);
        for (std::size_t j = 0; j < hs.N; ++j)
            psi.amplitudes[j] = std::polar(1.0 / std::sqrt(256.0), two_pi * static_cast<double>(k * j % 256) / 256.0);
        const QuantumState start = psi;
        for (std::size_t n = 0; n < hs.N; ++n)
            floquet_step(psi, op, false);
        CHECK(std::abs(std::norm(overlap(start, psi)) - 1.0) < 1e-10);
    }
}

TEST_CASE("Ehrenfest correspondence for a few steps")
{
    const HilbertSpec hs(131072);
    const MapSpec spec = MapSpec::cat_sawtooth(1.0, 0.987, 0.0);
    const FloquetOperator op(hs, spec);
    const double xi = std::sqrt(hs.hbar);
    for (auto [r, p] : {std::pair{1.3, 2.1}, std::pair{4.0, 0.7}}) {
        const PacketSpec packet{r, p, xi};
        QuantumState psi = build_gaussian(hs, packet);
        ClassicalState s{r, hs.momentum(snap_momentum_index(hs, p))};
        for (int n = 0; n < 3; ++n) {
            floquet_step(psi, op, false);
            s = step_classical(s, spec, false);
        }
        CHECK(std::abs(torus_delta(position_moments(psi, hs).mean, s.r)) < 5 * xi);
        CHECK(std::abs(torus_delta(momentum_moments(psi, hs).mean, s.p)) < 5 * xi);
    }
}

TEST_CASE("fidelity saturates near 1/N")
{
    const HilbertSpec hs(512);
    const FloquetOperator op(hs, MapSpec::cat_sawtooth(1.0, 0.5, 100 * hs.hbar));
    const auto m = fidelity_series(op, PacketSpec::minimal(hs, 2.0, 3.0), 400);
    double mean = 0.0;
    for (int t = 100; t <= 400; ++t)
        mean += m[static_cast<std::size_t>(t)] / 301.0;
    CHECK(mean > 1.0 / (3.0 * 512));
    CHECK(mean < 3.0 / 512);
    CHECK(m[0] == 1.0);
}

TEST_CASE("ensemble average")
{
    const HilbertSpec hs(1024);
    const FloquetOperator op(hs, MapSpec::sawtooth_poly(1.0, 2, 100 * hs.hbar));
    const double xi = std::sqrt(hs.hbar);

    const FidelityAverage one = average_fidelity(op, xi, 1, 6, 77);
    const auto single = fidelity_series(op, one.packets[0], 6);
    for (std::size_t t = 0; t < single.size(); ++t)
        CHECK(one.mean[t] == single[t]);

    const FidelityAverage a = average_fidelity(op, xi, 40, 6, 5, 1);
    const FidelityAverage b = average_fidelity(op, xi, 40, 6, 5, 3);
    for (std::size_t t = 0; t < a.mean.size(); ++t) {
        CHECK(a.mean[t] == b.mean[t]);
        CHECK(a.stderr_[t] == b.stderr_[t]);
    }
    CHECK(a.mean[0] == 1.0);

    // Standard error is the packet-to-packet spread over sqrt(n).
    for (std::size_t t = 1; t < a.mean.size(); ++t) {
        double s = 0.0, s2 = 0.0;
        for (const PacketSpec& p : a.packets) {
            const double v = fidelity_series(op, p, static_cast<int>(t))[t];
            s += v;
            s2 += v * v;
        }
        const double mean = s / 40.0;
        const double sd = std::sqrt((s2 / 40.0 - mean * mean) * 40.0 / 39.0);
        CHECK(a.mean[t] == doctest::Approx(mean).epsilon(1e-12));
        CHECK(a.stderr_[t] == doctest::Approx(sd / std::sqrt(40.0)).epsilon(1e-6));
    }
}
