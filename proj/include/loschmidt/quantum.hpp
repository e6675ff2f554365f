#pragma once

// Quantized torus maps on an N-dimensional Hilbert space with hbar = 2pi/N.
// States live on the position grid r_j = 2pi j / N; the Floquet operator is
//
//   U = exp(-i p^2 / (2 hbar)) exp(-i U_kick(r) / hbar)
//
// applied as a diagonal kick, a forward DFT to momentum space, the free
// phase, and an inverse DFT.

#include "loschmidt/torus_map.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <new>
#include <vector>

namespace loschmidt {

using cplx = std::complex<double>;

template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using AmplitudeVector = std::vector<cplx, AlignedAllocator<cplx>>;

struct HilbertSpec {
    std::size_t N = 0;
    double hbar = 0.0;

    explicit HilbertSpec(std::size_t dim);

    double position(std::size_t j) const { return two_pi * static_cast<double>(j) / static_cast<double>(N); }
    /// Momentum of DFT index k folded to (-pi, pi].
    double momentum(std::size_t k) const;
};

struct PacketSpec {
    double r_center = 0.0;
    double p_center = 0.0;
    double xi = 0.0;

    double momentum_width(const HilbertSpec& hs) const { return hs.hbar / xi; }
    /// Packet with the minimal-uncertainty width xi = sqrt(hbar).
    static PacketSpec minimal(const HilbertSpec& hs, double r, double p);
};

struct QuantumState {
    AmplitudeVector amplitudes;

    double norm_squared() const;
};

/// <a|b>
cplx overlap(const QuantumState& a, const QuantumState& b);

/// Periodized Gaussian packet, normalized; p_center is snapped to the
/// nearest grid momentum. Throws PacketUnresolvable if xi < 4 (2pi/N).
QuantumState build_gaussian(const HilbertSpec& hs, const PacketSpec& packet);

/// Grid momentum index closest to p (mod N).
std::size_t snap_momentum_index(const HilbertSpec& hs, double p);

/// Position-space moments of |psi|^2: circular mean and variance about it.
struct PositionMoments {
    double mean = 0.0;
    double variance = 0.0;
};
PositionMoments position_moments(const QuantumState& psi, const HilbertSpec& hs);

/// Momentum-space moments (circular mean in [0, 2pi) and variance).
PositionMoments momentum_moments(const QuantumState& psi, const HilbertSpec& hs);

/// Precomputed Floquet propagator for one map and both branches. Immutable
/// after construction and safe to share between threads.
class FloquetOperator {
public:
    FloquetOperator(const HilbertSpec& hs, const MapSpec& spec);
    ~FloquetOperator();
    FloquetOperator(const FloquetOperator&) = delete;
    FloquetOperator& operator=(const FloquetOperator&) = delete;

    void apply(QuantumState& state, bool perturbed) const;

    /// Forward (position -> momentum) and inverse unnormalized DFTs in place.
    void to_momentum(AmplitudeVector& v) const;
    void to_position(AmplitudeVector& v) const;

    const HilbertSpec& hilbert() const { return hs_; }
    const MapSpec& map() const { return spec_; }

private:
    struct Plans;
    HilbertSpec hs_;
    MapSpec spec_;
    AmplitudeVector kick_unperturbed_;
    AmplitudeVector kick_perturbed_;
    AmplitudeVector free_phase_;  // includes the 1/N of the round trip
    std::unique_ptr<Plans> plans_;
};

void floquet_step(QuantumState& state, const FloquetOperator& op, bool perturbed);

/// M(t) = |<psi_pert(t)|psi(t)>|^2 for t = 0..t_max.
std::vector<double> fidelity_series(const FloquetOperator& op, const PacketSpec& packet, int t_max);

struct FidelityAverage {
    std::vector<double> mean;    // t = 0..t_max
    std::vector<double> stderr_;
    std::vector<PacketSpec> packets;
};

/// Packet centers drawn uniformly on the torus from `seed`; centre k depends
/// only on (seed, k).
PacketSpec random_packet(std::uint64_t seed, std::size_t index, double xi);

FidelityAverage average_fidelity(const FloquetOperator& op, double xi, std::size_t n_packets, int t_max,
                                 std::uint64_t seed, unsigned workers = 0);

}  // namespace loschmidt
