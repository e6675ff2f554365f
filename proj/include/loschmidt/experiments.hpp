#pragma once

// Experiment configuration, the decay-series container, CSV persistence and
// rate fitting on stored series.

#include "loschmidt/fit.hpp"
#include "loschmidt/quantum.hpp"
#include "loschmidt/torus_map.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace loschmidt {

enum class XiRule { SqrtHbar, Absolute };

struct ExperimentConfig {
    MapFamily family = MapFamily::CatSawtooth;
    double K = 1.0;
    double eta = 0.987;
    int poly_i = 2;
    std::size_t N = 131072;
    double sigma = 100.0;
    XiRule xi_rule = XiRule::SqrtHbar;
    double xi_value = 0.0;  // used when xi_rule == Absolute
    std::size_t packets = 2000;
    int t_max = 20;
    std::size_t mc_samples = 100000;
    double drop_q = 0.02;
    std::uint64_t seed = 1;
    std::string out;  // empty: no file written
    unsigned workers = 0;

    bool with_I_s = true;
    bool with_I_Lambda = true;
    bool with_classical = true;
    std::size_t classical_circles = 100;
    std::size_t classical_samples = 1000;  // per circle
    int t_ref = 3;                         // anchoring time of I_s and I_Lambda

    /// Extra curve: exact M(t) of this one packet.
    std::optional<PacketSpec> single_packet;

    double hbar() const;
    double epsilon() const { return sigma * hbar(); }
    double xi() const;
    double momentum_width() const { return hbar() / xi(); }
    MapSpec map() const;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

struct DecayRecord {
    int t = 0;
    double M_mean = 0.0;
    double M_stderr = 0.0;
    double I_s = 0.0;
    double I_Lambda = 0.0;
    double M_cl = 0.0;
    std::optional<double> M_single;
};

struct DecaySeries {
    std::size_t N = 0;  // Hilbert dimension, for the saturation guard
    std::vector<DecayRecord> records;
    /// "ok", or the error that interrupted the run.
    std::string status = "ok";

    bool has_single() const;
    /// Column by CSV name (M_mean, M_stderr, I_s, I_Lambda, M_cl, M_single).
    std::vector<double> column(std::string_view name) const;
};

/// Computes every requested curve from cfg.seed and writes cfg.out when it is
/// set. If a stage throws, the partial series is written with a status
/// column and the error is rethrown.
DecaySeries run_experiment(const ExperimentConfig& cfg);

/// `# key = value` lines with the resolved configuration.
std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& cfg);

void write_csv(std::ostream& os, const DecaySeries& series,
               const std::vector<std::pair<std::string, std::string>>& preamble);
void write_csv(const std::string& path, const DecaySeries& series,
               const std::vector<std::pair<std::string, std::string>>& preamble);

/// Reads a file produced by write_csv. N is taken from the preamble.
DecaySeries read_csv(const std::string& path);

/// Two-column "t value" file for plotting; non-finite values are skipped.
void write_curve(const std::string& path, const DecaySeries& series, std::string_view column);

/// First t with M_mean < 3/N, or t_max + 1 if the series never gets there.
int saturation_time(const DecaySeries& series);

/// Default window [2, t_sat - 2].
std::pair<int, int> auto_window(const DecaySeries& series);

/// Least-squares rate of `column` over `window` (auto_window if absent). The
/// upper end is pulled back below saturation (M_mean >= 3/N), so the
/// returned fit may cover fewer points than requested.
RateFit fit_rate(const DecaySeries& series, std::string_view column,
                 std::optional<std::pair<int, int>> window = std::nullopt);

/// Two straight lines fitted to ln(column) over [t_lo, t_hi] with the split
/// that minimizes the total squared residual; each segment has at least
/// three points. `crossover` is where the lines intersect.
struct TwoRegimeFit {
    RateFit early;
    RateFit late;
    double crossover = 0.0;
};

TwoRegimeFit fit_two_regimes(const std::vector<double>& values, int t_lo, int t_hi);

}  // namespace loschmidt
