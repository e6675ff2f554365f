#pragma once

// Canonical runs for the four decay figures, with rate fits and a summary of
// measured versus reference values.

#include "loschmidt/experiments.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace loschmidt {

enum class Scale { Full, Desk };

Scale parse_scale(const std::string& s);
const char* scale_name(Scale s);

struct SummaryLine {
    std::string name;
    double measured = std::numeric_limits<double>::quiet_NaN();
    double reference = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

struct FigureResult {
    int figure = 0;
    Scale scale = Scale::Desk;
    ExperimentConfig config;
    DecaySeries series;
    std::map<std::string, RateFit> fits;
    std::vector<SummaryLine> summary;
    /// Extra curves keyed by name (e.g. the slope law of figure 3), t = 0..t_max.
    std::map<std::string, std::vector<double>> extra_curves;
    std::vector<std::string> files;
};

/// Parameters of figure `id` (1-4) at the given scale. Full scale uses
/// N = 2^17 and 2000 packets, desk scale N = 2^12, 200 packets and 10^4
/// Monte Carlo samples.
ExperimentConfig figure_config(int id, Scale scale, std::uint64_t seed);

/// Runs figure `id` and, when out_dir is non-empty, writes
/// fig<id>_<scale>.csv, one fig<id>_<scale>_<curve>.dat per curve and
/// fig<id>_<scale>_summary.txt there.
FigureResult figure_pipeline(int id, Scale scale, std::uint64_t seed, const std::string& out_dir = "",
                             unsigned workers = 0);

/// Largest |local log-slope(column) - local log-slope(M_mean)| over the
/// times where lo <= M_mean <= hi.
double tracking_deviation(const DecaySeries& series, std::string_view column, double lo = 1e-3,
                          double hi = 0.5);

/// Among `candidates` random packets, the one whose |k_p| at the centre
/// grows most cleanly as exp(lambda t) over [t_lo, t_hi] while
/// |sigma k_p| >= pi / w_p there.
PacketSpec select_clean_packet(const MapSpec& spec, const HilbertSpec& hs, double xi, double lambda, int t_lo,
                               int t_hi, std::size_t candidates, std::uint64_t seed);

}  // namespace loschmidt
