#pragma once

// Semiclassical fidelity estimators built on the action difference dS and
// its momentum slope k_p.
//
// All amplitudes use the Gaussian-normalized form
//
//   m_sc(t) = (sqrt(pi) w_p)^-1  int dp0 exp[i dS(p0, r0; t)/hbar - (p0 - p0c)^2 / w_p^2]
//
// so that m_sc = 1 when dS vanishes. I_s and I_Lambda are returned up to an
// overall constant.

#include "loschmidt/action.hpp"
#include "loschmidt/quantum.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace loschmidt {

struct SemiclassicalConfig {
    double sigma = 100.0;
    std::size_t quad_points = 2048;
    std::size_t max_quad_points = std::size_t{1} << 22;
    std::size_t mc_samples = 100000;
    double drop_fraction = 0.02;  // q: share of smallest |k_p| samples discarded
    /// Oscillation prefactor c0; NaN means "estimate from the map".
    double tau_c0 = std::numeric_limits<double>::quiet_NaN();
    unsigned workers = 0;

    /// Throws std::invalid_argument unless 0 < q < 0.2; warns on stderr if sigma < 10.
    void validate() const;
};

/// Quadrature points needed to resolve exp(i dS/hbar) over the packet window
/// (20 max|sigma k_p| w_p, at least 256).
std::size_t required_quad_points(const MapSpec& spec, const HilbertSpec& hs, const PacketSpec& packet, int t);

/// Composite Simpson evaluation of m_sc over [p0c - 5 w_p, p0c + 5 w_p] with
/// p0c snapped to the momentum grid. Starting from cfg.quad_points, the count
/// is doubled until a further doubling changes |m_sc|^2 by at most 1%;
/// throws OscillationUnderresolved once cfg.max_quad_points is exceeded.
cplx msc_quadrature(const MapSpec& spec, const HilbertSpec& hs, const PacketSpec& packet, int t,
                    const SemiclassicalConfig& cfg);

/// 1 / (sigma k_p)^2 at the packet centre. Throws RegimeViolation when
/// |sigma k_p| < pi / w_p.
double single_state_law(const MapSpec& spec, const HilbertSpec& hs, const PacketSpec& packet, int t,
                        const SemiclassicalConfig& cfg);

/// Mean of 1/(sigma k_p)^2 over uniform packet centres for t = 0..t_max,
/// taken over the samples where the law applies (|sigma k_p| >= pi / w_p).
/// NaN where no sample qualifies (always for t <= 1).
std::vector<double> slope_law_series(const MapSpec& spec, double w_p, int t_max, const SemiclassicalConfig& cfg,
                                     std::uint64_t seed);

/// Sum of stationary-point amplitudes
///   sqrt(2 i hbar) / w_p  exp[i dS_a/hbar - (p_a - p0c)^2/w_p^2] / sqrt|dS''_a|
/// over the non-flat points given.
cplx stationary_phase_amplitude(const std::vector<StationaryPoint>& points, const HilbertSpec& hs,
                                const PacketSpec& packet);

/// Stationary-phase m_sc for one packet. Throws NoStationaryPoints when
/// k_p has no non-degenerate root at r0.
cplx stationary_phase_sum(const MapSpec& spec, const HilbertSpec& hs, const PacketSpec& packet, int t);

enum class SemiclassicalBranch { SlopeLaw, StationaryPhase };

struct SinglePacketPrediction {
    double fidelity = 0.0;
    SemiclassicalBranch branch = SemiclassicalBranch::SlopeLaw;
};

/// Slope law when |sigma k_p| >= pi / w_p, stationary phase otherwise.
SinglePacketPrediction predict_single_packet(const MapSpec& spec, const HilbertSpec& hs,
                                             const PacketSpec& packet, int t, const SemiclassicalConfig& cfg);

/// Monte Carlo I_s(t) for t = 0..t_max: mean of 1/|k_p| over uniform
/// (r0, p0) after discarding the q-quantile of smallest |k_p|. Entries with
/// t <= 1 are NaN (k_p vanishes identically).
std::vector<double> I_s_series(const MapSpec& spec, int t_max, const SemiclassicalConfig& cfg, std::uint64_t seed);

double I_s(const MapSpec& spec, int t, const SemiclassicalConfig& cfg, std::uint64_t seed);

/// I_Lambda(t) = exp(-Lambda_1(t) t) for t = 0..t_max using cfg.mc_samples
/// trajectories.
std::vector<double> I_Lambda(const MapSpec& spec, int t_max, const SemiclassicalConfig& cfg, std::uint64_t seed);

/// Fits count(t) = c0 exp(lambda t) to the extremum counts of dS over
/// p0 in [0, 2pi), averaged over `n_r0` random r0, for t in [t_lo, t_hi].
/// The default window starts where the counts have reached their
/// exponential growth (the t = 2 count is about half the asymptotic law).
double estimate_c0(const MapSpec& spec, double lambda, std::uint64_t seed, int t_lo = 4, int t_hi = 8,
                   std::size_t n_r0 = 8);

/// tau = ln(pi / (c0 w_p)) / lambda.
double crossover_tau(double lambda, double c0, double w_p);

/// Crossover time for packets of width `packet_xi`, with lambda from the
/// closed form (eta = 0 sawtooth) or a Lyapunov estimate, and c0 from cfg
/// or estimate_c0.
double crossover_tau(const MapSpec& spec, double packet_xi, const HilbertSpec& hs, const SemiclassicalConfig& cfg);

}  // namespace loschmidt
