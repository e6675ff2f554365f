// Command-line driver for the fidelity laboratory.

#include "loschmidt/action.hpp"
#include "loschmidt/classical.hpp"
#include "loschmidt/ensemble.hpp"
#include "loschmidt/errors.hpp"
#include "loschmidt/experiments.hpp"
#include "loschmidt/figures.hpp"
#include "loschmidt/semiclassics.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

using namespace loschmidt;

namespace {

struct MapOptions {
    std::string family = "cat";
    double K = 1.0;
    double eta = 0.987;
    int poly_i = 2;
};

struct CommonOptions {
    MapOptions map;
    std::size_t N = 4096;
    double sigma = 100.0;
    std::string xi = "sqrt-hbar";
    std::size_t packets = 200;
    int t_max = 20;
    std::size_t mc_samples = 100000;
    double drop_q = 0.02;
    std::uint64_t seed = 1;
    std::string out;
    unsigned workers = 0;
};

void add_map_flags(CLI::App* app, MapOptions& m)
{
    app->add_option("--family", m.family, "cat (K, eta) or poly (sawtooth + (r-pi)^i perturbation)")
        ->check(CLI::IsMember({"cat", "poly"}));
    app->add_option("--K", m.K, "kick strength");
    app->add_option("--eta", m.eta, "sine admixture of the cat family");
    app->add_option("--poly-i", m.poly_i, "perturbation power of the poly family")->check(CLI::IsMember({2, 3}));
}

void add_common_flags(CLI::App* app, CommonOptions& o)
{
    add_map_flags(app, o.map);
    app->add_option("--N", o.N, "Hilbert space dimension (even)");
    app->add_option("--sigma", o.sigma, "perturbation strength eps / hbar");
    app->add_option("--xi", o.xi, "packet width: sqrt-hbar or a number");
    app->add_option("--packets", o.packets, "number of random packets");
    app->add_option("--tmax", o.t_max, "last time step");
    app->add_option("--mc-samples", o.mc_samples, "Monte Carlo samples");
    app->add_option("--drop-q", o.drop_q, "fraction of smallest |k_p| discarded in I_s");
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--out", o.out, "output file (stdout if omitted)");
    app->add_option("--workers", o.workers, "worker threads (0: hardware concurrency)");
}

MapFamily family_of(const MapOptions& m)
{
    return m.family == "cat" ? MapFamily::CatSawtooth : MapFamily::SawtoothPoly;
}

MapSpec map_of(const MapOptions& m, double epsilon)
{
    return family_of(m) == MapFamily::CatSawtooth ? MapSpec::cat_sawtooth(m.K, m.eta, epsilon)
                                                  : MapSpec::sawtooth_poly(m.K, m.poly_i, epsilon);
}

ExperimentConfig config_of(const CommonOptions& o)
{
    ExperimentConfig cfg;
    cfg.family = family_of(o.map);
    cfg.K = o.map.K;
    cfg.eta = o.map.eta;
    cfg.poly_i = o.map.poly_i;
    cfg.N = o.N;
    cfg.sigma = o.sigma;
    if (o.xi == "sqrt-hbar") {
        cfg.xi_rule = XiRule::SqrtHbar;
    } else {
        cfg.xi_rule = XiRule::Absolute;
        cfg.xi_value = std::stod(o.xi);
    }
    cfg.packets = o.packets;
    cfg.t_max = o.t_max;
    cfg.mc_samples = o.mc_samples;
    cfg.drop_q = o.drop_q;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    return cfg;
}

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

// Writes to --out if given, otherwise stdout.
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw std::runtime_error("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void print_preamble(std::ostream& os, const ExperimentConfig& cfg)
{
    for (const auto& [k, v] : describe(cfg))
        os << "# " << k << " = " << v << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Loschmidt echo laboratory for quantized cat and sawtooth maps"};
    app.require_subcommand(1);

    // lyapunov
    MapOptions lyap_map;
    std::size_t lyap_samples = 10000;
    int lyap_steps = 100;
    std::uint64_t lyap_seed = 1;
    unsigned lyap_workers = 0;
    auto* lyap = app.add_subcommand("lyapunov", "Lyapunov exponent of the unperturbed map");
    add_map_flags(lyap, lyap_map);
    lyap->add_option("--mc-samples", lyap_samples, "ensemble size");
    lyap->add_option("--steps", lyap_steps, "steps per trajectory");
    lyap->add_option("--seed", lyap_seed, "master seed");
    lyap->add_option("--workers", lyap_workers, "worker threads");

    // lambda1
    CommonOptions l1;
    l1.t_max = 50;
    auto* lambda1 = app.add_subcommand("lambda1", "finite-time rate Lambda_1(t) and I_Lambda(t)");
    add_common_flags(lambda1, l1);

    // fidelity
    CommonOptions fid;
    bool skip_is = false, skip_il = false, skip_cl = false;
    auto* fidelity = app.add_subcommand("fidelity", "exact averaged fidelity with predictor and classical curves");
    add_common_flags(fidelity, fid);
    fidelity->add_flag("--skip-I_s", skip_is, "do not compute I_s");
    fidelity->add_flag("--skip-I_Lambda", skip_il, "do not compute I_Lambda");
    fidelity->add_flag("--skip-classical", skip_cl, "do not compute the classical echo");

    // semiclassical
    CommonOptions sc;
    auto* semi = app.add_subcommand("semiclassical", "I_s, I_Lambda, slope law and crossover time (unanchored)");
    add_common_flags(semi, sc);

    // classical-echo
    CommonOptions ce;
    std::size_t circles = 100, per_circle = 1000;
    auto* echo = app.add_subcommand("classical-echo", "classical fidelity from disks of radius sqrt(hbar)");
    add_common_flags(echo, ce);
    echo->add_option("--circles", circles, "number of disks");
    echo->add_option("--circle-samples", per_circle, "points per disk");

    // figure
    int figure_id = 1;
    std::string scale = "desk";
    std::uint64_t fig_seed = 1;
    std::string fig_out = ".";
    unsigned fig_workers = 0;
    auto* figure = app.add_subcommand("figure", "reproduce one of the four decay figures");
    figure->add_option("id", figure_id, "figure number")->required()->check(CLI::Range(1, 4));
    figure->add_option("--scale", scale, "full or desk")->check(CLI::IsMember({"full", "desk"}));
    figure->add_option("--seed", fig_seed, "master seed");
    figure->add_option("--out", fig_out, "output directory");
    figure->add_option("--workers", fig_workers, "worker threads");

    // fit
    std::string fit_path, column = "M_mean";
    std::vector<int> window;
    auto* fit = app.add_subcommand("fit", "exponential rate of a stored decay series");
    fit->add_option("csv", fit_path, "CSV written by fidelity or figure")->required()->check(CLI::ExistingFile);
    fit->add_option("--column", column, "column to fit");
    fit->add_option("--window", window, "t_lo t_hi (default: [2, t_sat - 2])")->expected(2);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*lyap) {
            const MapSpec spec = map_of(lyap_map, 0.0);
            const Estimate e = lyapunov_lambda(spec, lyap_samples, lyap_steps, lyap_seed, lyap_workers);
            std::cout << "lambda = " << num(e.value) << " +- " << num(e.stderr_) << '\n';
            if (spec.family == MapFamily::SawtoothPoly || spec.eta == 0.0)
                std::cout << "closed form = " << num(sawtooth_lambda(spec.K)) << '\n';
        } else if (*lambda1) {
            const ExperimentConfig cfg = config_of(l1);
            const auto points = lambda1_of_t(cfg.map().with_epsilon(0.0), cfg.mc_samples, cfg.t_max, cfg.seed,
                                             cfg.workers);
            Output out(l1.out);
            out.os() << "t,Lambda1,Lambda1_stderr,I_Lambda\n";
            for (const Lambda1Point& p : points)
                out.os() << p.t << ',' << num(p.lambda1) << ',' << num(p.stderr_) << ',' << num(p.inverse_mean)
                         << '\n';
        } else if (*fidelity) {
            ExperimentConfig cfg = config_of(fid);
            cfg.with_I_s = !skip_is;
            cfg.with_I_Lambda = !skip_il;
            cfg.with_classical = !skip_cl;
            cfg.out = fid.out;
            const DecaySeries series = run_experiment(cfg);
            if (fid.out.empty())
                write_csv(std::cout, series, describe(cfg));
        } else if (*semi) {
            ExperimentConfig cfg = config_of(sc);
            cfg.validate();
            const MapSpec spec = cfg.map();
            SemiclassicalConfig scfg;
            scfg.sigma = cfg.sigma;
            scfg.mc_samples = cfg.mc_samples;
            scfg.drop_fraction = cfg.drop_q;
            scfg.workers = cfg.workers;
            const auto is = I_s_series(spec, cfg.t_max, scfg, derive_seed(cfg.seed, 1, 0));
            const auto il = I_Lambda(spec, cfg.t_max, scfg, derive_seed(cfg.seed, 2, 0));
            const auto law = slope_law_series(spec, cfg.momentum_width(), cfg.t_max, scfg, derive_seed(cfg.seed, 3, 0));
            const double tau = crossover_tau(spec, cfg.xi(), HilbertSpec(cfg.N), scfg);
            Output out(sc.out);
            print_preamble(out.os(), cfg);
            out.os() << "# tau_bar = " << num(tau) << '\n';
            out.os() << "t,I_s,I_Lambda,slope_law\n";
            for (std::size_t t = 0; t < is.size(); ++t)
                out.os() << t << ',' << num(is[t]) << ',' << num(il[t]) << ',' << num(law[t]) << '\n';
        } else if (*echo) {
            ExperimentConfig cfg = config_of(ce);
            cfg.validate();
            const MapSpec spec = cfg.map();
            const double radius = std::sqrt(cfg.hbar());
            std::vector<double> mean(static_cast<std::size_t>(cfg.t_max) + 1, 0.0);
            for (std::size_t c = 0; c < circles; ++c) {
                Rng rng(derive_seed(cfg.seed, 1, c));
                const ClassicalState center{rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi)};
                EchoOptions opt;
                opt.workers = cfg.workers;
                const auto curve =
                    classical_fidelity(spec, center, radius, per_circle, cfg.t_max, derive_seed(cfg.seed, 2, c), opt);
                for (std::size_t t = 0; t < mean.size(); ++t)
                    mean[t] += curve[t] / static_cast<double>(circles);
            }
            Output out(ce.out);
            print_preamble(out.os(), cfg);
            out.os() << "t,M_cl\n";
            for (std::size_t t = 0; t < mean.size(); ++t)
                out.os() << t << ',' << num(mean[t]) << '\n';
        } else if (*figure) {
            const FigureResult res = figure_pipeline(figure_id, parse_scale(scale), fig_seed, fig_out, fig_workers);
            for (const SummaryLine& line : res.summary)
                std::printf("%-24s %12.6g  ref %10.6g  %s\n", line.name.c_str(), line.measured, line.reference,
                            line.note.c_str());
            for (const std::string& f : res.files)
                std::cout << "wrote " << f << '\n';
        } else if (*fit) {
            const DecaySeries series = read_csv(fit_path);
            std::optional<std::pair<int, int>> w;
            if (window.size() == 2)
                w = std::make_pair(window[0], window[1]);
            const RateFit f = fit_rate(series, column, w);
            std::printf("window [%d, %d]  rate %.6g +- %.2g  R^2 %.6f\n", f.t_lo, f.t_hi, f.rate, f.stderr_,
                        f.r_squared);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
