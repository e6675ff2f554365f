#include "loschmidt/semiclassics.hpp"

#include "loschmidt/classical.hpp"
#include "loschmidt/ensemble.hpp"
#include "loschmidt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <utility>

namespace loschmidt {

using std::numbers::pi;

namespace {

constexpr double window_half_width = 5.0;  // in units of w_p
constexpr std::size_t mc_chunk = 4096;

enum Stream : std::uint64_t { is_stream = 11, slope_stream = 12, c0_stream = 13, tau_stream = 14 };

double snapped_center(const HilbertSpec& hs, const PacketSpec& packet)
{
    return hs.hbar * static_cast<double>(snap_momentum_index(hs, packet.p_center));
}

// Uniform torus samples with per-chunk streams, k_p(t) histories stored
// row-major as [sample][t].
std::vector<double> kp_histories(const MapSpec& spec, int t_max, std::size_t samples, std::uint64_t seed,
                                 std::uint64_t stream, unsigned workers)
{
    const auto T = static_cast<std::size_t>(t_max) + 1;
    std::vector<double> out(samples * T);
    const std::size_t chunks = (samples + mc_chunk - 1) / mc_chunk;
    parallel_for(chunks, workers, [&](std::size_t c) {
        Rng rng(derive_seed(seed, stream, c));
        const std::size_t end = std::min(samples, (c + 1) * mc_chunk);
        for (std::size_t k = c * mc_chunk; k < end; ++k) {
            const double r0 = rng.uniform(0.0, two_pi);
            const double p0 = rng.uniform(0.0, two_pi);
            const std::vector<double> h = kp_history(spec, r0, p0, t_max);
            std::copy(h.begin(), h.end(), out.begin() + static_cast<std::ptrdiff_t>(k * T));
        }
    });
    return out;
}

}  // namespace

void SemiclassicalConfig::validate() const
{
    if (!(drop_fraction > 0.0 && drop_fraction < 0.2))
        throw std::invalid_argument("drop fraction q must lie in (0, 0.2)");
    if (sigma < 10.0)
        std::cerr << "warning: sigma = " << sigma << " is outside the strong-perturbation regime\n";
}

std::size_t required_quad_points(const MapSpec& spec, const HilbertSpec& hs, const PacketSpec& packet, int t)
{
    const double w = packet.momentum_width(hs);
    const double center = snapped_center(hs, packet);
    const double sigma = spec.epsilon / hs.hbar;
    constexpr int probes = 2001;
    double max_slope = 0.0;
    for (int j = 0; j < probes; ++j) {
        const double p = center + w * window_half_width * (2.0 * j / (probes - 1) - 1.0);
        max_slope = std::max(max_slope, std::abs(sigma * kp(spec, packet.r_center, p, t)));
    }
    const auto n = static_cast<std::size_t>(std::ceil(20.0 * max_slope * w));
    return std::max<std::size_t>(256, n + (n % 2));
}

cplx msc_quadrature(const MapSpec& spec, const HilbertSpec& hs, const PacketSpec& packet, int t,
                    const SemiclassicalConfig& cfg)
{
    const double w = packet.momentum_width(hs);
    const double center = snapped_center(hs, packet);
    const double lo = center - window_half_width * w;
    const double hi = center + window_half_width * w;

    // Simpson sums on 2n intervals and on every other node; both normalized
    // by the same rule applied to the bare Gaussian.
    const auto evaluate = [&](std::size_t n) {
        const std::size_t fine_n = 2 * n;
        const double h = (hi - lo) / static_cast<double>(fine_n);
        cplx fine_sum = 0.0, coarse_sum = 0.0;
        double fine_norm = 0.0, coarse_norm = 0.0;
        for (std::size_t j = 0; j <= fine_n; ++j) {
            const double p = lo + h * static_cast<double>(j);
            const double d = (p - center) / w;
            const double weight = std::exp(-d * d);
            const cplx f = std::polar(weight, action_difference(spec, packet.r_center, p, t) / hs.hbar);

            const double wf = (j == 0 || j == fine_n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            fine_sum += wf * f;
            fine_norm += wf * weight;
            if (j % 2 == 0) {
                const std::size_t jc = j / 2;
                const double wc = (jc == 0 || jc == n) ? 1.0 : (jc % 2 ? 4.0 : 2.0);
                coarse_sum += wc * f;
                coarse_norm += wc * weight;
            }
        }
        return std::pair{fine_sum / fine_norm, coarse_sum / coarse_norm};
    };

    std::size_t n = std::max<std::size_t>(cfg.quad_points + (cfg.quad_points % 2), 2);
    for (;;) {
        const auto [fine, coarse] = evaluate(n);
        const double mf = std::norm(fine), mc = std::norm(coarse);
        if (std::abs(mf - mc) <= 0.01 * std::max(mf, mc) + 1e-14)
            return fine;
        if (2 * n > cfg.max_quad_points)
            throw OscillationUnderresolved("|m_sc|^2 changed from " + std::to_string(mc) + " to " +
                                           std::to_string(mf) + " under point doubling at t = " +
                                           std::to_string(t) + " with " + std::to_string(2 * n) + " points");
        n *= 2;
    }
}

double single_state_law(const MapSpec& spec, const HilbertSpec& hs, const PacketSpec& packet, int t,
                        const SemiclassicalConfig& cfg)
{
    const double slope = cfg.sigma * kp(spec, packet.r_center, snapped_center(hs, packet), t);
    const double w = packet.momentum_width(hs);
    if (std::abs(slope) < pi / w)
        throw RegimeViolation("|sigma k_p| = " + std::to_string(std::abs(slope)) + " is below pi / w_p = " +
                              std::to_string(pi / w));
    return 1.0 / (slope * slope);
}

std::vector<double> slope_law_series(const MapSpec& spec, double w_p, int t_max, const SemiclassicalConfig& cfg,
                                     std::uint64_t seed)
{
    const auto T = static_cast<std::size_t>(t_max) + 1;
    const std::size_t n = cfg.mc_samples;
    const std::vector<double> hist = kp_histories(spec, t_max, n, seed, slope_stream, cfg.workers);
    const double threshold = pi / w_p;
    std::vector<double> out(T, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> column;
    column.reserve(n);
    for (std::size_t t = 2; t < T; ++t) {
        column.clear();
        for (std::size_t k = 0; k < n; ++k) {
            const double s = std::abs(cfg.sigma * hist[k * T + t]);
            if (s >= threshold)
                column.push_back(1.0 / (s * s));
        }
        if (!column.empty())
            out[t] = pairwise_sum(column) / static_cast<double>(column.size());
    }
    return out;
}

cplx stationary_phase_amplitude(const std::vector<StationaryPoint>& points, const HilbertSpec& hs,
                                const PacketSpec& packet)
{
    const double w = packet.momentum_width(hs);
    const double center = snapped_center(hs, packet);
    // sqrt(2 i hbar) / w_p
    const cplx prefactor = std::polar(std::sqrt(2.0 * hs.hbar) / w, pi / 4.0);
    cplx sum = 0.0;
    for (const StationaryPoint& sp : points) {
        if (sp.flat)
            continue;
        const double d = torus_delta(sp.p0_alpha, center) / w;
        sum += std::polar(std::exp(-d * d) / std::sqrt(std::abs(sp.d2S)), sp.dS_at / hs.hbar);
    }
    return prefactor * sum;
}

cplx stationary_phase_sum(const MapSpec& spec, const HilbertSpec& hs, const PacketSpec& packet, int t)
{
    const std::size_t grid = resolving_grid_size(spec, packet.r_center, t);
    const std::vector<StationaryPoint> points = find_stationary_points(spec, packet.r_center, t, grid);
    const bool any = std::any_of(points.begin(), points.end(), [](const StationaryPoint& p) { return !p.flat; });
    if (!any)
        throw NoStationaryPoints("dS has no non-degenerate stationary point in p0 at t = " + std::to_string(t));
    return stationary_phase_amplitude(points, hs, packet);
}

SinglePacketPrediction predict_single_packet(const MapSpec& spec, const HilbertSpec& hs,
                                             const PacketSpec& packet, int t, const SemiclassicalConfig& cfg)
{
    try {
        return {single_state_law(spec, hs, packet, t, cfg), SemiclassicalBranch::SlopeLaw};
    } catch (const RegimeViolation&) {
        return {std::norm(stationary_phase_sum(spec, hs, packet, t)), SemiclassicalBranch::StationaryPhase};
    }
}

std::vector<double> I_s_series(const MapSpec& spec, int t_max, const SemiclassicalConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    const auto T = static_cast<std::size_t>(t_max) + 1;
    const std::size_t n = cfg.mc_samples;
    const std::vector<double> hist = kp_histories(spec, t_max, n, seed, is_stream, cfg.workers);

    std::vector<double> out(T, std::numeric_limits<double>::quiet_NaN());
    const auto drop = static_cast<std::size_t>(std::floor(cfg.drop_fraction * static_cast<double>(n)));
    std::vector<double> column(n);
    for (std::size_t t = 2; t < T; ++t) {
        for (std::size_t k = 0; k < n; ++k)
            column[k] = std::abs(hist[k * T + t]);
        std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(drop), column.end());
        std::vector<double> kept(column.begin() + static_cast<std::ptrdiff_t>(drop), column.end());
        for (double& v : kept)
            v = 1.0 / v;
        out[t] = pairwise_sum(kept) / static_cast<double>(kept.size());
    }
    return out;
}

double I_s(const MapSpec& spec, int t, const SemiclassicalConfig& cfg, std::uint64_t seed)
{
    return I_s_series(spec, t, cfg, seed).back();
}

std::vector<double> I_Lambda(const MapSpec& spec, int t_max, const SemiclassicalConfig& cfg, std::uint64_t seed)
{
    std::vector<double> out{1.0};
    if (t_max <= 0)
        return out;
    for (const Lambda1Point& p : lambda1_of_t(spec, cfg.mc_samples, t_max, seed, cfg.workers))
        out.push_back(p.inverse_mean);
    return out;
}

double estimate_c0(const MapSpec& spec, double lambda, std::uint64_t seed, int t_lo, int t_hi, std::size_t n_r0)
{
    if (!(lambda > 0.0) || t_lo < 1 || t_hi < t_lo || n_r0 == 0)
        throw std::invalid_argument("estimate_c0 needs lambda > 0, 1 <= t_lo <= t_hi and n_r0 >= 1");
    Rng rng(derive_seed(seed, c0_stream, 0));
    std::vector<double> r0s(n_r0);
    for (double& r : r0s)
        r = rng.uniform(0.0, two_pi);

    double log_sum = 0.0;
    int used = 0;
    for (int t = t_lo; t <= t_hi; ++t) {
        // ~64 grid points per expected oscillation.
        const double expected = std::exp(lambda * t);
        const auto grid = static_cast<std::size_t>(std::max(4096.0, 64.0 * expected));
        double count = 0.0;
        for (double r0 : r0s)
            count += static_cast<double>(extremum_count(spec, r0, t, grid));
        count /= static_cast<double>(n_r0);
        if (count <= 0.0)
            continue;
        log_sum += std::log(count) - lambda * t;
        ++used;
    }
    if (used == 0)
        throw std::runtime_error("dS shows no oscillations in the fitting window");
    return std::exp(log_sum / used);
}

double crossover_tau(double lambda, double c0, double w_p)
{
    if (!(lambda > 0.0) || !(c0 > 0.0) || !(w_p > 0.0))
        throw std::invalid_argument("crossover_tau needs positive lambda, c0 and w_p");
    return std::log(pi / (c0 * w_p)) / lambda;
}

double crossover_tau(const MapSpec& spec, double packet_xi, const HilbertSpec& hs, const SemiclassicalConfig& cfg)
{
    const bool pure_sawtooth = spec.family == MapFamily::SawtoothPoly || spec.eta == 0.0;
    const double lambda = pure_sawtooth ? sawtooth_lambda(spec.K)
                                        : lyapunov_lambda(spec, 4096, 60, tau_stream, cfg.workers).value;
    const double c0 = std::isnan(cfg.tau_c0) ? estimate_c0(spec, lambda, tau_stream) : cfg.tau_c0;
    return crossover_tau(lambda, c0, hs.hbar / packet_xi);
}

}  // namespace loschmidt
