#include "loschmidt/figures.hpp"

#include "loschmidt/action.hpp"
#include "loschmidt/classical.hpp"
#include "loschmidt/ensemble.hpp"
#include "loschmidt/errors.hpp"
#include "loschmidt/semiclassics.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace loschmidt {

namespace {

constexpr std::uint64_t selection_stream = 21;
constexpr std::uint64_t diagnostics_stream = 22;
constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// Reference values for the four figures.
constexpr double fig1_lambda = 0.9;
constexpr double fig1_lambda1 = 0.35;
constexpr double fig2_lambda = 0.92;
constexpr double fig2_lambda1 = 0.81;
constexpr double fig3_tau = 6.5;

std::string prefix(int id, Scale scale)
{
    return "fig" + std::to_string(id) + "_" + scale_name(scale);
}

void add_fit(FigureResult& res, const std::string& name, const RateFit& fit, double reference, std::string note)
{
    res.fits[name] = fit;
    note += " [" + std::to_string(fit.t_lo) + ", " + std::to_string(fit.t_hi) + "]";
    res.summary.push_back({name, fit.rate, reference, note});
}

void add_failure(FigureResult& res, const std::string& name, double reference, const std::exception& e)
{
    res.summary.push_back({name, nan_value, reference, std::string("not measurable: ") + e.what()});
}

void lyapunov_lines(FigureResult& res, double lambda_ref, double lambda1_ref)
{
    const ExperimentConfig& cfg = res.config;
    const MapSpec spec = cfg.map().with_epsilon(0.0);
    const std::uint64_t seed = derive_seed(cfg.seed, diagnostics_stream, 0);
    const Estimate lambda = lyapunov_lambda(spec, cfg.mc_samples, 100, seed, cfg.workers);
    res.summary.push_back({"lambda", lambda.value, lambda_ref, "tangent-map average"});
    const auto l1 = lambda1_of_t(spec, cfg.mc_samples, 50, seed + 1, cfg.workers);
    res.summary.push_back({"Lambda1(50)", l1.back().lambda1, lambda1_ref, "finite-time rate at t = 50"});
}

void analyse_tracking(FigureResult& res)
{
    const DecaySeries& s = res.series;
    try {
        add_fit(res, "rate M_mean", fit_rate(s, "M_mean"), nan_value, "auto window");
        const auto w = std::make_pair(res.fits["rate M_mean"].t_lo, res.fits["rate M_mean"].t_hi);
        add_fit(res, "rate I_s", fit_rate(s, "I_s", w), nan_value, "same window");
        add_fit(res, "rate I_Lambda", fit_rate(s, "I_Lambda", w), nan_value, "same window");
    } catch (const Error& e) {
        add_failure(res, "rate M_mean", nan_value, e);
    }
    for (const char* column : {"I_s", "I_Lambda"}) {
        try {
            res.summary.push_back({std::string("slope deviation ") + column, tracking_deviation(s, column), 0.0,
                                   "max |local slope - M_mean local slope| for M_mean in [1e-3, 0.5]"});
        } catch (const std::exception& e) {
            add_failure(res, std::string("slope deviation ") + column, 0.0, e);
        }
    }
}

void analyse_fig3(FigureResult& res)
{
    const ExperimentConfig& cfg = res.config;
    const MapSpec spec = cfg.map();
    const HilbertSpec hs(cfg.N);
    const double lambda = sawtooth_lambda(cfg.K);

    SemiclassicalConfig sc;
    sc.sigma = cfg.sigma;
    sc.mc_samples = cfg.mc_samples;
    sc.workers = cfg.workers;
    const double tau = crossover_tau(spec, cfg.xi(), hs, sc);
    res.summary.push_back({"tau_bar", tau, fig3_tau, "ln(pi / (c0 w_p)) / lambda"});

    std::vector<double> law =
        slope_law_series(spec, cfg.momentum_width(), cfg.t_max, sc, derive_seed(cfg.seed, diagnostics_stream, 1));
    try {
        add_fit(res, "rate slope law", fit_exponential_rate(law, 3, std::min(cfg.t_max, 8)), 2.0 * lambda,
                "mean of 1/(sigma k_p)^2 where the law applies");
    } catch (const Error& e) {
        add_failure(res, "rate slope law", 2.0 * lambda, e);
    }
    const double m_ref = res.series.records[static_cast<std::size_t>(cfg.t_ref)].M_mean;
    const double scale = m_ref / law[static_cast<std::size_t>(cfg.t_ref)];
    for (double& v : law)
        v = std::isfinite(v) ? v * scale : nan_value;
    res.extra_curves["slope_law"] = law;

    try {
        const TwoRegimeFit two =
            fit_two_regimes(res.series.column("M_mean"), 2, saturation_time(res.series) - 1);
        add_fit(res, "rate early", two.early, 2.0 * lambda, "pre-crossover segment");
        add_fit(res, "rate late", two.late, lambda, "post-crossover segment");
        res.summary.push_back({"crossover", two.crossover, tau, "intersection of the two fitted lines"});
    } catch (const Error& e) {
        add_failure(res, "rate early", 2.0 * lambda, e);
        add_failure(res, "rate late", lambda, e);
        add_failure(res, "crossover", tau, e);
    }
}

void analyse_fig4(FigureResult& res)
{
    const double lambda = sawtooth_lambda(res.config.K);
    const DecaySeries& s = res.series;
    try {
        add_fit(res, "rate M_mean", fit_rate(s, "M_mean", std::make_pair(3, 9)), lambda, "ensemble average");
    } catch (const Error& e) {
        add_failure(res, "rate M_mean", lambda, e);
    }
    try {
        const auto single = s.column("M_single");
        int hi = std::min(7, static_cast<int>(single.size()) - 1);
        while (hi >= 4 && !(single[static_cast<std::size_t>(hi)] >= 3.0 / static_cast<double>(s.N)))
            --hi;
        add_fit(res, "rate M_single", fit_exponential_rate(single, 4, hi), 2.0 * lambda, "selected packet");
    } catch (const Error& e) {
        add_failure(res, "rate M_single", 2.0 * lambda, e);
    }
}

void write_outputs(FigureResult& res, const std::string& out_dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string base = (fs::path(out_dir) / prefix(res.figure, res.scale)).string();

    write_csv(base + ".csv", res.series, describe(res.config));
    res.files.push_back(base + ".csv");

    std::vector<std::string> curves{"M_mean"};
    if (res.config.with_I_s)
        curves.push_back("I_s");
    if (res.config.with_I_Lambda)
        curves.push_back("I_Lambda");
    if (res.config.with_classical)
        curves.push_back("M_cl");
    if (res.series.has_single())
        curves.push_back("M_single");
    for (const std::string& c : curves) {
        write_curve(base + "_" + c + ".dat", res.series, c);
        res.files.push_back(base + "_" + c + ".dat");
    }
    for (const auto& [name, values] : res.extra_curves) {
        std::ofstream os(base + "_" + name + ".dat");
        os << "# t " << name << '\n';
        char buf[40];
        for (std::size_t t = 0; t < values.size(); ++t) {
            if (!std::isfinite(values[t]))
                continue;
            std::snprintf(buf, sizeof buf, "%.17e", values[t]);
            os << t << ' ' << buf << '\n';
        }
        res.files.push_back(base + "_" + name + ".dat");
    }

    std::ofstream os(base + "_summary.txt");
    os << "# quantity measured reference note\n";
    char buf[64];
    for (const SummaryLine& line : res.summary) {
        std::snprintf(buf, sizeof buf, "%.6g %.6g", line.measured, line.reference);
        os << line.name << ": " << buf << "  " << line.note << '\n';
    }
    res.files.push_back(base + "_summary.txt");
}

}  // namespace

Scale parse_scale(const std::string& s)
{
    if (s == "full")
        return Scale::Full;
    if (s == "desk")
        return Scale::Desk;
    throw std::invalid_argument("scale must be 'full' or 'desk', got '" + s + "'");
}

const char* scale_name(Scale s)
{
    return s == Scale::Full ? "full" : "desk";
}

ExperimentConfig figure_config(int id, Scale scale, std::uint64_t seed)
{
    const bool full = scale == Scale::Full;
    ExperimentConfig cfg;
    cfg.K = 1.0;
    cfg.sigma = 100.0;
    cfg.xi_rule = XiRule::SqrtHbar;
    cfg.N = full ? 131072 : 4096;
    cfg.packets = full ? 2000 : 200;
    cfg.mc_samples = full ? 1000000 : 10000;
    cfg.classical_circles = full ? 200 : 50;
    cfg.classical_samples = full ? 2000 : 400;
    cfg.seed = seed;
    switch (id) {
    case 1:
        cfg.family = MapFamily::CatSawtooth;
        cfg.eta = 0.987;
        cfg.t_max = full ? 30 : 20;
        break;
    case 2:
        cfg.family = MapFamily::CatSawtooth;
        cfg.eta = 0.85;
        cfg.t_max = full ? 20 : 14;
        break;
    case 3:
    case 4:
        cfg.family = MapFamily::SawtoothPoly;
        cfg.eta = 0.0;
        cfg.poly_i = id == 3 ? 3 : 2;
        cfg.t_max = full ? 16 : 10;
        cfg.with_I_s = false;
        cfg.with_I_Lambda = false;
        cfg.with_classical = false;
        break;
    default:
        throw std::invalid_argument("figure id must be 1, 2, 3 or 4");
    }
    return cfg;
}

FigureResult figure_pipeline(int id, Scale scale, std::uint64_t seed, const std::string& out_dir, unsigned workers)
{
    FigureResult res;
    res.figure = id;
    res.scale = scale;
    res.config = figure_config(id, scale, seed);
    res.config.workers = workers;

    if (id == 4) {
        const HilbertSpec hs(res.config.N);
        res.config.single_packet = select_clean_packet(res.config.map(), hs, res.config.xi(),
                                                       sawtooth_lambda(res.config.K), 4, 7, 50, seed);
    }
    res.series = run_experiment(res.config);

    switch (id) {
    case 1:
        analyse_tracking(res);
        lyapunov_lines(res, fig1_lambda, fig1_lambda1);
        break;
    case 2:
        analyse_tracking(res);
        lyapunov_lines(res, fig2_lambda, fig2_lambda1);
        res.summary.push_back({"rate M_mean vs lambda1", res.summary.front().measured, fig2_lambda1,
                               "reference band [0.81, 0.92]"});
        break;
    case 3:
        analyse_fig3(res);
        break;
    default:
        analyse_fig4(res);
        break;
    }

    if (!out_dir.empty())
        write_outputs(res, out_dir);
    return res;
}

double tracking_deviation(const DecaySeries& series, std::string_view column, double lo, double hi)
{
    const std::vector<double> m = series.column("M_mean");
    const std::vector<double> c = series.column(column);
    double worst = 0.0;
    int used = 0;
    for (int t = 1; t + 1 < static_cast<int>(m.size()); ++t) {
        const double v = m[static_cast<std::size_t>(t)];
        if (v < lo || v > hi)
            continue;
        // Predictors are undefined at the first steps (k_p vanishes).
        if (!std::isfinite(c[static_cast<std::size_t>(t - 1)]) || !std::isfinite(c[static_cast<std::size_t>(t + 1)]))
            continue;
        worst = std::max(worst, std::abs(local_log_slope(c, t) - local_log_slope(m, t)));
        ++used;
    }
    if (used == 0)
        throw InsufficientWindow("no time with M_mean inside the tracking band");
    return worst;
}

PacketSpec select_clean_packet(const MapSpec& spec, const HilbertSpec& hs, double xi, double lambda, int t_lo,
                               int t_hi, std::size_t candidates, std::uint64_t seed)
{
    const double w_p = hs.hbar / xi;
    const double sigma = spec.epsilon / hs.hbar;
    PacketSpec best;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < candidates; ++k) {
        const PacketSpec packet = random_packet(derive_seed(seed, selection_stream, 0), k, xi);
        const double p = hs.momentum(snap_momentum_index(hs, packet.p_center));
        const std::vector<double> history = kp_history(spec, packet.r_center, p, t_hi);
        if (std::abs(sigma * history[static_cast<std::size_t>(t_lo)]) < std::numbers::pi / w_p)
            continue;
        std::vector<double> magnitude(history.size());
        for (std::size_t t = 0; t < history.size(); ++t)
            magnitude[t] = 1.0 / std::abs(history[t]);
        double score;
        try {
            const RateFit f = fit_exponential_rate(magnitude, t_lo, t_hi);
            score = std::abs(f.rate - lambda) + (1.0 - f.r_squared);
        } catch (const Error&) {
            continue;
        }
        if (score < best_score) {
            best_score = score;
            best = packet;
        }
    }
    if (!std::isfinite(best_score))
        throw RegimeViolation("no candidate packet has |sigma k_p| >= pi / w_p over the selection window");
    return best;
}

}  // namespace loschmidt
