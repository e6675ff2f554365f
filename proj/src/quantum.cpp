#include "loschmidt/quantum.hpp"

#include "loschmidt/ensemble.hpp"
#include "loschmidt/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace loschmidt {

using std::numbers::pi;

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

HilbertSpec::HilbertSpec(std::size_t dim) : N(dim), hbar(two_pi / static_cast<double>(dim))
{
    if (dim < 2 || dim % 2 != 0)
        throw std::invalid_argument("Hilbert space dimension must be even and >= 2");
}

double HilbertSpec::momentum(std::size_t k) const
{
    const auto n = static_cast<long long>(N);
    auto m = static_cast<long long>(k % N);
    if (m > n / 2)
        m -= n;
    return hbar * static_cast<double>(m);
}

PacketSpec PacketSpec::minimal(const HilbertSpec& hs, double r, double p)
{
    return {r, p, std::sqrt(hs.hbar)};
}

double QuantumState::norm_squared() const
{
    double s = 0.0;
    for (const cplx& a : amplitudes)
        s += std::norm(a);
    return s;
}

cplx overlap(const QuantumState& a, const QuantumState& b)
{
    if (a.amplitudes.size() != b.amplitudes.size())
        throw std::invalid_argument("overlap of states with different dimension");
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < a.amplitudes.size(); ++j) {
        const cplx& x = a.amplitudes[j];
        const cplx& y = b.amplitudes[j];
        re += x.real() * y.real() + x.imag() * y.imag();
        im += x.real() * y.imag() - x.imag() * y.real();
    }
    return {re, im};
}

std::size_t snap_momentum_index(const HilbertSpec& hs, double p)
{
    const auto n = static_cast<long long>(hs.N);
    long long k = std::llround(wrap_angle(p) / hs.hbar) % n;
    if (k < 0)
        k += n;
    return static_cast<std::size_t>(k);
}

QuantumState build_gaussian(const HilbertSpec& hs, const PacketSpec& packet)
{
    const double grid = two_pi / static_cast<double>(hs.N);
    if (!(packet.xi >= 4.0 * grid))
        throw PacketUnresolvable("packet width xi = " + std::to_string(packet.xi) +
                                 " is below four grid spacings");

    const std::size_t k = snap_momentum_index(hs, packet.p_center);
    const double r0 = wrap_angle(packet.r_center);
    const double inv_two_xi2 = 1.0 / (2.0 * packet.xi * packet.xi);

    QuantumState psi;
    psi.amplitudes.resize(hs.N);
    for (std::size_t j = 0; j < hs.N; ++j) {
        const double r = hs.position(j);
        double envelope = 0.0;
        for (int m = -1; m <= 1; ++m) {
            const double d = r + two_pi * m - r0;
            envelope += std::exp(-d * d * inv_two_xi2);
        }
        // exp(i k r_j) with the product reduced mod N for an exact phase.
        const double phase = two_pi * static_cast<double>((k * j) % hs.N) / static_cast<double>(hs.N);
        psi.amplitudes[j] = std::polar(envelope, phase);
    }
    const double scale = 1.0 / std::sqrt(psi.norm_squared());
    for (cplx& a : psi.amplitudes)
        a *= scale;
    return psi;
}

namespace {

PositionMoments circular_moments(const std::vector<double>& weight, const HilbertSpec& hs)
{
    cplx first = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < weight.size(); ++j) {
        first += weight[j] * std::polar(1.0, hs.position(j));
        total += weight[j];
    }
    const double mean = wrap_angle(std::arg(first));
    double var = 0.0;
    for (std::size_t j = 0; j < weight.size(); ++j) {
        const double d = torus_delta(hs.position(j), mean);
        var += weight[j] * d * d;
    }
    return {mean, var / total};
}

}  // namespace

PositionMoments position_moments(const QuantumState& psi, const HilbertSpec& hs)
{
    std::vector<double> w(hs.N);
    for (std::size_t j = 0; j < hs.N; ++j)
        w[j] = std::norm(psi.amplitudes[j]);
    return circular_moments(w, hs);
}

PositionMoments momentum_moments(const QuantumState& psi, const HilbertSpec& hs)
{
    // Grid momenta p_k = hbar k share the position grid values 2pi k / N.
    const FloquetOperator op(hs, MapSpec::cat_sawtooth(0.0, 0.0));
    AmplitudeVector v = psi.amplitudes;
    op.to_momentum(v);
    std::vector<double> w(hs.N);
    for (std::size_t k = 0; k < hs.N; ++k)
        w[k] = std::norm(v[k]);
    return circular_moments(w, hs);
}

struct FloquetOperator::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit Plans(std::size_t n)
    {
        AmplitudeVector scratch(n);
        std::lock_guard lock(planner_mutex());
        const int size = static_cast<int>(n);
        forward = fftw_plan_dft_1d(size, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_FORWARD,
                                   FFTW_ESTIMATE);
        backward = fftw_plan_dft_1d(size, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
        if (!forward || !backward)
            throw std::runtime_error("FFTW planning failed");
    }

    ~Plans()
    {
        std::lock_guard lock(planner_mutex());
        if (forward)
            fftw_destroy_plan(forward);
        if (backward)
            fftw_destroy_plan(backward);
    }
};

FloquetOperator::FloquetOperator(const HilbertSpec& hs, const MapSpec& spec)
    : hs_(hs), spec_(spec), plans_(std::make_unique<Plans>(hs.N))
{
    const std::size_t n = hs.N;
    kick_unperturbed_.resize(n);
    kick_perturbed_.resize(n);
    free_phase_.resize(n);

    auto kick_phase = [&](double r, bool perturbed) {
        const double phase = std::fmod(spec.kick_potential(r, perturbed) / hs.hbar, two_pi);
        return std::polar(1.0, -phase);
    };
    for (std::size_t j = 0; j < n; ++j) {
        const double r = hs.position(j);
        kick_unperturbed_[j] = kick_phase(r, false);
        kick_perturbed_[j] = kick_phase(r, true);
    }

    // p^2 / (2 hbar) = pi m^2 / N for p = hbar m, m folded to (-N/2, N/2].
    const auto nn = static_cast<long long>(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto m = static_cast<long long>(k);
        if (m > nn / 2)
            m -= nn;
        const long long m2 = (m * m) % (2 * nn);
        free_phase_[k] = std::polar(inv_n, -pi * static_cast<double>(m2) * inv_n);
    }
}

FloquetOperator::~FloquetOperator() = default;

void FloquetOperator::to_momentum(AmplitudeVector& v) const
{
    if (v.size() != hs_.N)
        throw std::invalid_argument("state dimension does not match the Floquet operator");
    fftw_execute_dft(plans_->forward, as_fftw(v.data()), as_fftw(v.data()));
}

void FloquetOperator::to_position(AmplitudeVector& v) const
{
    if (v.size() != hs_.N)
        throw std::invalid_argument("state dimension does not match the Floquet operator");
    fftw_execute_dft(plans_->backward, as_fftw(v.data()), as_fftw(v.data()));
}

void FloquetOperator::apply(QuantumState& state, bool perturbed) const
{
    AmplitudeVector& v = state.amplitudes;
    const AmplitudeVector& kick = perturbed ? kick_perturbed_ : kick_unperturbed_;
    const std::size_t n = hs_.N;
    if (v.size() != n)
        throw std::invalid_argument("state dimension does not match the Floquet operator");
    for (std::size_t j = 0; j < n; ++j)
        v[j] *= kick[j];
    to_momentum(v);
    for (std::size_t k = 0; k < n; ++k)
        v[k] *= free_phase_[k];
    to_position(v);
}

void floquet_step(QuantumState& state, const FloquetOperator& op, bool perturbed)
{
    op.apply(state, perturbed);
}

std::vector<double> fidelity_series(const FloquetOperator& op, const PacketSpec& packet, int t_max)
{
    if (t_max < 0)
        throw std::invalid_argument("fidelity_series needs t_max >= 0");
    QuantumState unperturbed = build_gaussian(op.hilbert(), packet);
    QuantumState perturbed = unperturbed;
    std::vector<double> m(static_cast<std::size_t>(t_max) + 1);
    m[0] = 1.0;
    for (int t = 1; t <= t_max; ++t) {
        op.apply(unperturbed, false);
        op.apply(perturbed, true);
        m[static_cast<std::size_t>(t)] = std::norm(overlap(perturbed, unperturbed));
    }
    return m;
}

PacketSpec random_packet(std::uint64_t seed, std::size_t index, double xi)
{
    Rng rng(derive_seed(seed, 0x9ac4e7ULL, index));
    const double r = rng.uniform(0.0, two_pi);
    const double p = rng.uniform(0.0, two_pi);
    return {r, p, xi};
}

FidelityAverage average_fidelity(const FloquetOperator& op, double xi, std::size_t n_packets, int t_max,
                                 std::uint64_t seed, unsigned workers)
{
    if (n_packets == 0)
        throw std::invalid_argument("average_fidelity needs n_packets >= 1");
    const auto T = static_cast<std::size_t>(t_max) + 1;

    FidelityAverage out;
    out.packets.resize(n_packets);
    for (std::size_t k = 0; k < n_packets; ++k)
        out.packets[k] = random_packet(seed, k, xi);

    std::vector<std::vector<double>> series(n_packets);
    parallel_for(n_packets, workers, [&](std::size_t k) { series[k] = fidelity_series(op, out.packets[k], t_max); });

    const double n = static_cast<double>(n_packets);
    out.mean.resize(T);
    out.stderr_.resize(T);
    std::vector<double> column(n_packets);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t k = 0; k < n_packets; ++k)
            column[k] = series[k][t];
        const double mean = pairwise_sum(column) / n;
        for (std::size_t k = 0; k < n_packets; ++k)
            column[k] = (series[k][t] - mean) * (series[k][t] - mean);
        const double var = n_packets > 1 ? pairwise_sum(column) / (n - 1.0) : 0.0;
        out.mean[t] = mean;
        out.stderr_[t] = std::sqrt(var / n);
    }
    return out;
}

}  // namespace loschmidt
