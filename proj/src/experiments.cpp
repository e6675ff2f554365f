#include "loschmidt/experiments.hpp"

#include "loschmidt/classical.hpp"
#include "loschmidt/ensemble.hpp"
#include "loschmidt/errors.hpp"
#include "loschmidt/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace loschmidt {

namespace {

constexpr std::uint64_t quantum_stream = 11;
constexpr std::uint64_t I_s_stream = 12;
constexpr std::uint64_t I_Lambda_stream = 13;
constexpr std::uint64_t classical_stream = 14;

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

double parse_number(const std::string& s)
{
    if (s == "nan")
        return nan_value;
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
        throw std::runtime_error("malformed number '" + s + "'");
    return v;
}

std::vector<std::string> split_commas(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    return out;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Mean echo over `circles` random disks of radius sqrt(hbar).
std::vector<double> mean_classical_echo(const ExperimentConfig& cfg, const MapSpec& spec)
{
    const double radius = std::sqrt(cfg.hbar());
    std::vector<std::vector<double>> curves(cfg.classical_circles);
    for (std::size_t c = 0; c < cfg.classical_circles; ++c) {
        Rng rng(derive_seed(cfg.seed, classical_stream, c));
        const ClassicalState center{rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi)};
        EchoOptions options;
        options.workers = cfg.workers;
        curves[c] = classical_fidelity(spec, center, radius, cfg.classical_samples, cfg.t_max,
                                       derive_seed(cfg.seed, classical_stream + 100, c), options);
    }
    std::vector<double> mean(static_cast<std::size_t>(cfg.t_max) + 1);
    std::vector<double> column(cfg.classical_circles);
    for (std::size_t t = 0; t < mean.size(); ++t) {
        for (std::size_t c = 0; c < curves.size(); ++c)
            column[c] = curves[c][t];
        mean[t] = pairwise_sum(column) / static_cast<double>(column.size());
    }
    return mean;
}

// Scales `curve` so that it equals `reference` at t_ref.
void anchor(std::vector<double>& curve, const std::vector<double>& reference, int t_ref)
{
    const auto k = static_cast<std::size_t>(t_ref);
    const double scale = reference[k] / curve[k];
    for (double& v : curve)
        v *= scale;
}

}  // namespace

double ExperimentConfig::hbar() const
{
    return two_pi / static_cast<double>(N);
}

double ExperimentConfig::xi() const
{
    return xi_rule == XiRule::SqrtHbar ? std::sqrt(hbar()) : xi_value;
}

MapSpec ExperimentConfig::map() const
{
    return family == MapFamily::CatSawtooth ? MapSpec::cat_sawtooth(K, eta, epsilon())
                                            : MapSpec::sawtooth_poly(K, poly_i, epsilon());
}

void ExperimentConfig::validate() const
{
    if (N < 2 || N % 2 != 0)
        throw std::invalid_argument("N must be even and at least 2");
    if (!(K > 0.0))
        throw std::invalid_argument("K must be positive");
    if (family == MapFamily::SawtoothPoly && poly_i != 2 && poly_i != 3)
        throw std::invalid_argument("poly_i must be 2 or 3");
    if (!(sigma >= 0.0))
        throw std::invalid_argument("sigma must be non-negative");
    if (xi_rule == XiRule::Absolute && !(xi_value > 0.0))
        throw std::invalid_argument("xi must be positive");
    if (packets == 0)
        throw std::invalid_argument("at least one packet is needed");
    if (t_max < 0)
        throw std::invalid_argument("t_max must be non-negative");
    if ((with_I_s || with_I_Lambda) && (t_ref < 2 || t_ref > t_max))
        throw std::invalid_argument("t_ref must lie in [2, t_max] when predictors are requested");
    if (with_I_s && !(drop_q > 0.0 && drop_q < 0.2))
        throw std::invalid_argument("drop_q must lie in (0, 0.2)");
    if ((with_I_s || with_I_Lambda) && mc_samples == 0)
        throw std::invalid_argument("mc_samples must be positive");
    if (with_classical && (classical_circles == 0 || classical_samples == 0))
        throw std::invalid_argument("classical echo needs circles and samples");
    map();
}

bool DecaySeries::has_single() const
{
    return !records.empty() && records.front().M_single.has_value();
}

std::vector<double> DecaySeries::column(std::string_view name) const
{
    std::vector<double> out;
    out.reserve(records.size());
    for (const DecayRecord& r : records) {
        if (name == "M_mean")
            out.push_back(r.M_mean);
        else if (name == "M_stderr")
            out.push_back(r.M_stderr);
        else if (name == "I_s")
            out.push_back(r.I_s);
        else if (name == "I_Lambda")
            out.push_back(r.I_Lambda);
        else if (name == "M_cl")
            out.push_back(r.M_cl);
        else if (name == "M_single")
            out.push_back(r.M_single.value_or(nan_value));
        else
            throw std::invalid_argument("unknown column '" + std::string(name) + "'");
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& cfg)
{
    const MapSpec spec = cfg.map();
    std::vector<std::pair<std::string, std::string>> out{
        {"family", cfg.family == MapFamily::CatSawtooth ? "cat-sawtooth" : "sawtooth-poly"},
        {"K", format_number(cfg.K)},
    };
    if (cfg.family == MapFamily::CatSawtooth)
        out.emplace_back("eta", format_number(cfg.eta));
    else
        out.emplace_back("poly_i", std::to_string(cfg.poly_i));
    out.insert(out.end(), {
        {"N", std::to_string(cfg.N)},
        {"hbar", format_number(cfg.hbar())},
        {"sigma", format_number(cfg.sigma)},
        {"epsilon", format_number(spec.epsilon)},
        {"xi_rule", cfg.xi_rule == XiRule::SqrtHbar ? "sqrt-hbar" : "absolute"},
        {"xi", format_number(cfg.xi())},
        {"w_p", format_number(cfg.momentum_width())},
        {"packets", std::to_string(cfg.packets)},
        {"t_max", std::to_string(cfg.t_max)},
        {"seed", std::to_string(cfg.seed)},
    });
    if (cfg.with_I_s) {
        out.emplace_back("mc_samples", std::to_string(cfg.mc_samples));
        out.emplace_back("drop_q", format_number(cfg.drop_q));
    }
    if (cfg.with_I_Lambda && !cfg.with_I_s)
        out.emplace_back("mc_samples", std::to_string(cfg.mc_samples));
    if (cfg.with_I_s || cfg.with_I_Lambda)
        out.emplace_back("t_ref", std::to_string(cfg.t_ref));
    if (cfg.with_classical) {
        out.emplace_back("classical_circles", std::to_string(cfg.classical_circles));
        out.emplace_back("classical_samples", std::to_string(cfg.classical_samples));
        out.emplace_back("classical_radius", format_number(std::sqrt(cfg.hbar())));
    }
    if (cfg.single_packet) {
        out.emplace_back("single_r", format_number(cfg.single_packet->r_center));
        out.emplace_back("single_p", format_number(cfg.single_packet->p_center));
    }
    return out;
}

DecaySeries run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    const MapSpec spec = cfg.map();
    const HilbertSpec hs(cfg.N);
    const auto n_t = static_cast<std::size_t>(cfg.t_max) + 1;

    DecaySeries series;
    series.N = cfg.N;
    series.records.resize(n_t);
    for (std::size_t t = 0; t < n_t; ++t) {
        DecayRecord& r = series.records[t];
        r.t = static_cast<int>(t);
        r.M_mean = r.M_stderr = r.I_s = r.I_Lambda = r.M_cl = nan_value;
        if (cfg.single_packet)
            r.M_single = nan_value;
    }

    const auto finish = [&] {
        if (!cfg.out.empty())
            write_csv(cfg.out, series, describe(cfg));
    };

    std::string stage = "quantum";
    try {
        const FloquetOperator op(hs, spec);
        const FidelityAverage avg =
            average_fidelity(op, cfg.xi(), cfg.packets, cfg.t_max, derive_seed(cfg.seed, quantum_stream, 0),
                             cfg.workers);
        for (std::size_t t = 0; t < n_t; ++t) {
            series.records[t].M_mean = avg.mean[t];
            series.records[t].M_stderr = avg.stderr_[t];
        }

        if (cfg.single_packet) {
            stage = "single packet";
            const std::vector<double> single = fidelity_series(op, *cfg.single_packet, cfg.t_max);
            for (std::size_t t = 0; t < n_t; ++t)
                series.records[t].M_single = single[t];
        }

        SemiclassicalConfig sc;
        sc.sigma = cfg.sigma;
        sc.mc_samples = cfg.mc_samples;
        sc.drop_fraction = cfg.drop_q;
        sc.workers = cfg.workers;
        const std::vector<double> m_mean = series.column("M_mean");

        if (cfg.with_I_s) {
            stage = "I_s";
            std::vector<double> is = I_s_series(spec, cfg.t_max, sc, derive_seed(cfg.seed, I_s_stream, 0));
            anchor(is, m_mean, cfg.t_ref);
            for (std::size_t t = 0; t < n_t; ++t)
                series.records[t].I_s = is[t];
        }
        if (cfg.with_I_Lambda) {
            stage = "I_Lambda";
            std::vector<double> il = I_Lambda(spec, cfg.t_max, sc, derive_seed(cfg.seed, I_Lambda_stream, 0));
            anchor(il, m_mean, cfg.t_ref);
            for (std::size_t t = 0; t < n_t; ++t)
                series.records[t].I_Lambda = il[t];
        }
        if (cfg.with_classical) {
            stage = "classical echo";
            const std::vector<double> cl = mean_classical_echo(cfg, spec);
            for (std::size_t t = 0; t < n_t; ++t)
                series.records[t].M_cl = cl[t];
        }
    } catch (const std::exception& e) {
        series.status = stage + ": " + e.what();
        finish();
        throw;
    }
    finish();
    return series;
}

void write_csv(std::ostream& os, const DecaySeries& series,
               const std::vector<std::pair<std::string, std::string>>& preamble)
{
    for (const auto& [key, value] : preamble)
        os << "# " << key << " = " << value << '\n';
    const bool single = series.has_single();
    const bool with_status = series.status != "ok";
    os << "t,M_mean,M_stderr,I_s,I_Lambda,M_cl";
    if (single)
        os << ",M_single";
    if (with_status)
        os << ",status";
    os << '\n';
    std::string status = series.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    for (const DecayRecord& r : series.records) {
        os << r.t << ',' << format_number(r.M_mean) << ',' << format_number(r.M_stderr) << ','
           << format_number(r.I_s) << ',' << format_number(r.I_Lambda) << ',' << format_number(r.M_cl);
        if (single)
            os << ',' << format_number(r.M_single.value_or(nan_value));
        if (with_status)
            os << ',' << status;
        os << '\n';
    }
}

void write_csv(const std::string& path, const DecaySeries& series,
               const std::vector<std::pair<std::string, std::string>>& preamble)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(os, series, preamble);
    if (!os)
        throw std::runtime_error("write to '" + path + "' failed");
}

DecaySeries read_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open '" + path + "'");
    DecaySeries series;
    std::vector<std::string> header;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos && trim(line.substr(1, eq - 1)) == "N")
                series.N = std::stoul(trim(line.substr(eq + 1)));
            continue;
        }
        std::vector<std::string> cells = split_commas(line);
        if (header.empty()) {
            header = cells;
            if (header.size() < 6 || header[0] != "t")
                throw std::runtime_error("'" + path + "' has no decay-series header");
            continue;
        }
        if (cells.size() != header.size())
            throw std::runtime_error("ragged row in '" + path + "'");
        DecayRecord r;
        for (std::size_t c = 0; c < header.size(); ++c) {
            const std::string& name = header[c];
            if (name == "t")
                r.t = std::stoi(cells[c]);
            else if (name == "M_mean")
                r.M_mean = parse_number(cells[c]);
            else if (name == "M_stderr")
                r.M_stderr = parse_number(cells[c]);
            else if (name == "I_s")
                r.I_s = parse_number(cells[c]);
            else if (name == "I_Lambda")
                r.I_Lambda = parse_number(cells[c]);
            else if (name == "M_cl")
                r.M_cl = parse_number(cells[c]);
            else if (name == "M_single")
                r.M_single = parse_number(cells[c]);
            else if (name == "status")
                series.status = cells[c];
        }
        if (r.t != static_cast<int>(series.records.size()))
            throw std::runtime_error("'" + path + "' rows must run t = 0, 1, 2, ...");
        series.records.push_back(r);
    }
    if (series.N == 0)
        throw std::runtime_error("'" + path + "' does not record N");
    return series;
}

void write_curve(const std::string& path, const DecaySeries& series, std::string_view column)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    const std::vector<double> values = series.column(column);
    os << "# t " << column << '\n';
    for (std::size_t t = 0; t < values.size(); ++t)
        if (std::isfinite(values[t]))
            os << t << ' ' << format_number(values[t]) << '\n';
}

int saturation_time(const DecaySeries& series)
{
    const double floor = 3.0 / static_cast<double>(series.N);
    for (const DecayRecord& r : series.records)
        if (r.M_mean < floor)
            return r.t;
    return static_cast<int>(series.records.size());
}

std::pair<int, int> auto_window(const DecaySeries& series)
{
    return {2, saturation_time(series) - 2};
}

RateFit fit_rate(const DecaySeries& series, std::string_view column, std::optional<std::pair<int, int>> window)
{
    auto [lo, hi] = window.value_or(auto_window(series));
    lo = std::max(lo, 1);
    hi = std::min(hi, saturation_time(series) - 1);
    return fit_exponential_rate(series.column(column), lo, hi);
}

TwoRegimeFit fit_two_regimes(const std::vector<double>& values, int t_lo, int t_hi)
{
    if (t_hi - t_lo + 1 < 6)
        throw InsufficientWindow("two-regime fit needs at least 6 points, got [" + std::to_string(t_lo) + ", " +
                                 std::to_string(t_hi) + "]");
    const auto sse = [&](const RateFit& f) {
        double s = 0.0;
        for (int t = f.t_lo; t <= f.t_hi; ++t) {
            const double r = std::log(values[static_cast<std::size_t>(t)]) - (f.intercept - f.rate * t);
            s += r * r;
        }
        return s;
    };
    TwoRegimeFit best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int split = t_lo + 2; split + 3 <= t_hi; ++split) {
        const RateFit early = fit_exponential_rate(values, t_lo, split);
        const RateFit late = fit_exponential_rate(values, split + 1, t_hi);
        const double total = sse(early) + sse(late);
        if (total < best_sse) {
            best_sse = total;
            best.early = early;
            best.late = late;
        }
    }
    const double dr = best.late.rate - best.early.rate;
    best.crossover = dr == 0.0 ? nan_value : (best.late.intercept - best.early.intercept) / dr;
    return best;
}

}  // namespace loschmidt
