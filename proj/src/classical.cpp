#include "loschmidt/classical.hpp"

#include "loschmidt/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loschmidt {

namespace {

constexpr std::size_t chunk_size = 1024;

enum Stream : std::uint64_t { lyapunov_stream = 1, lambda1_stream = 2, echo_stream = 3 };

std::size_t chunk_count(std::size_t n) { return (n + chunk_size - 1) / chunk_size; }

// Advances (dp, dr) one step and returns the log of the norm growth; the
// vector is left normalized.
double advance_tangent(ClassicalState& s, double& dp, double& dr, const MapSpec& spec)
{
    const Mat2 m = tangent_matrix(s.r, spec, false);
    const double np = m.pp * dp + m.pr * dr;
    const double nr = m.rp * dp + m.rr * dr;
    const double norm = std::hypot(np, nr);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw std::logic_error("tangent vector left floating-point range between renormalizations");
    dp = np / norm;
    dr = nr / norm;
    s = step_classical(s, spec, false);
    return std::log(norm);
}

// Burn-in that rotates (1, 0) onto the local unstable direction. The map
// preserves Lebesgue measure, so the point reached is still uniform.
ClassicalState aligned_start(Rng& rng, double& dp, double& dr, const MapSpec& spec)
{
    ClassicalState s{rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi)};
    dp = 1.0;
    dr = 0.0;
    for (int n = 0; n < tangent_alignment_steps; ++n)
        advance_tangent(s, dp, dr, spec);
    return s;
}

}  // namespace

double sawtooth_lambda(double K)
{
    const double a = 2.0 + K;
    return std::log((a + std::sqrt(a * a - 4.0)) / 2.0);
}

Estimate lyapunov_lambda(const MapSpec& spec, std::size_t ensemble_size, int steps,
                         std::uint64_t seed, unsigned workers)
{
    if (ensemble_size == 0 || steps <= 0)
        throw std::invalid_argument("lyapunov_lambda needs ensemble_size >= 1 and steps >= 1");

    const std::size_t chunks = chunk_count(ensemble_size);
    std::vector<double> sums(chunks), squares(chunks);

    parallel_for(chunks, workers, [&](std::size_t c) {
        Rng rng(derive_seed(seed, lyapunov_stream, c));
        const std::size_t begin = c * chunk_size;
        const std::size_t end = std::min(ensemble_size, begin + chunk_size);
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
            double dp, dr, log_growth = 0.0;
            ClassicalState s = aligned_start(rng, dp, dr, spec);
            for (int n = 0; n < steps; ++n)
                log_growth += advance_tangent(s, dp, dr, spec);
            const double rate = log_growth / steps;
            s1 += rate;
            s2 += rate * rate;
        }
        sums[c] = s1;
        squares[c] = s2;
    });

    const double n = static_cast<double>(ensemble_size);
    const double mean = pairwise_sum(sums) / n;
    const double var = std::max(0.0, pairwise_sum(squares) / n - mean * mean);
    return {mean, ensemble_size > 1 ? std::sqrt(var / (n - 1.0)) : 0.0};
}

std::vector<Lambda1Point> lambda1_of_t(const MapSpec& spec, std::size_t ensemble_size, int t_max,
                                       std::uint64_t seed, unsigned workers)
{
    if (ensemble_size == 0 || t_max <= 0)
        throw std::invalid_argument("lambda1_of_t needs ensemble_size >= 1 and t_max >= 1");

    const std::size_t chunks = chunk_count(ensemble_size);
    const auto T = static_cast<std::size_t>(t_max);
    // Row c holds the chunk's sums of exp(-L_t) and exp(-2 L_t) for t = 1..t_max.
    std::vector<double> sums(chunks * T), squares(chunks * T);

    parallel_for(chunks, workers, [&](std::size_t c) {
        Rng rng(derive_seed(seed, lambda1_stream, c));
        const std::size_t begin = c * chunk_size;
        const std::size_t end = std::min(ensemble_size, begin + chunk_size);
        double* row = &sums[c * T];
        double* row2 = &squares[c * T];
        for (std::size_t k = begin; k < end; ++k) {
            double dp, dr, log_growth = 0.0;
            ClassicalState s = aligned_start(rng, dp, dr, spec);
            for (std::size_t t = 0; t < T; ++t) {
                log_growth += advance_tangent(s, dp, dr, spec);
                const double inv = std::exp(-log_growth);
                row[t] += inv;
                row2[t] += inv * inv;
            }
        }
    });

    const double n = static_cast<double>(ensemble_size);
    std::vector<Lambda1Point> out;
    out.reserve(T);
    std::vector<double> column(chunks), column2(chunks);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t c = 0; c < chunks; ++c) {
            column[c] = sums[c * T + t];
            column2[c] = squares[c * T + t];
        }
        const double mean = pairwise_sum(column) / n;
        const double var = std::max(0.0, pairwise_sum(column2) / n - mean * mean);
        const double se_mean = ensemble_size > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
        const double tt = static_cast<double>(t + 1);
        out.push_back({static_cast<int>(t + 1), -std::log(mean) / tt, se_mean / (mean * tt), mean});
    }
    return out;
}

std::vector<double> classical_fidelity(const MapSpec& spec, ClassicalState center, double radius,
                                       std::size_t samples, int t_max, std::uint64_t seed,
                                       const EchoOptions& options)
{
    if (!(radius > 0.0) || samples == 0 || t_max < 0)
        throw std::invalid_argument("classical_fidelity needs radius > 0, samples >= 1, t_max >= 0");

    const bool forward_perturbed = !options.swap_roles;
    const std::size_t chunks = chunk_count(samples);
    const auto T = static_cast<std::size_t>(t_max) + 1;
    std::vector<double> counts(chunks * T, 0.0);
    const double r2 = radius * radius;

    parallel_for(chunks, options.workers, [&](std::size_t c) {
        Rng rng(derive_seed(seed, echo_stream, c));
        const std::size_t begin = c * chunk_size;
        const std::size_t end = std::min(samples, begin + chunk_size);
        double* row = &counts[c * T];
        for (std::size_t k = begin; k < end; ++k) {
            // Uniform in the disk by area.
            const double rho = radius * std::sqrt(rng.uniform());
            const double phi = rng.uniform(0.0, two_pi);
            const ClassicalState start{wrap_angle(center.r + rho * std::cos(phi)),
                                       wrap_angle(center.p + rho * std::sin(phi))};
            row[0] += 1.0;
            ClassicalState forward = start;
            for (std::size_t t = 1; t < T; ++t) {
                forward = step_classical(forward, spec, forward_perturbed);
                ClassicalState back = forward;
                for (std::size_t n = 0; n < t; ++n)
                    back = step_inverse(back, spec, !forward_perturbed);
                const double dr = torus_delta(back.r, center.r);
                const double dp = torus_delta(back.p, center.p);
                if (dr * dr + dp * dp <= r2)
                    row[t] += 1.0;
            }
        }
    });

    std::vector<double> out(T);
    std::vector<double> column(chunks);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t c = 0; c < chunks; ++c)
            column[c] = counts[c * T + t];
        out[t] = pairwise_sum(column) / static_cast<double>(samples);
    }
    return out;
}

}  // namespace loschmidt
