#pragma once

// Deterministic ensemble machinery shared by all Monte Carlo estimators.
//
// Work is split into fixed-size chunks; each chunk owns a random stream
// derived from (master seed, stream tag, chunk index). Workers pull chunks
// from a shared counter and write into per-chunk slots, and reductions run
// over the slots in index order. Results therefore do not depend on the
// number of workers or on scheduling.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace loschmidt {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

/// Small, fast generator (xoshiro256**) seeded through SplitMix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t s_[4];
};

/// Number of workers used when the caller passes 0.
unsigned default_workers();

/// Runs fn(i) for i in [0, count) on `workers` threads (0 = default).
/// The first exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values);

}  // namespace loschmidt
