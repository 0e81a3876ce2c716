// cklab: command-line front end.
#include "cklab/errors.hpp"
#include "cklab/run.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>

namespace {

using cklab::RunConfig;
using Copy = std::function<void(RunConfig&, const RunConfig&)>;

struct Flags {
    RunConfig cli;
    std::string config_path;
    std::string section = "zonal";
    std::vector<std::pair<CLI::Option*, Copy>> bound;
};

template <class T>
CLI::Option* bind_opt(CLI::App* app, Flags& f, const std::string& name, T RunConfig::*field, const std::string& help) {
    auto* opt = app->add_option(name, f.cli.*field, help);
    f.bound.emplace_back(opt, [field](RunConfig& dst, const RunConfig& src) { dst.*field = src.*field; });
    return opt;
}

template <class T>
void bind_chart(CLI::App* app, Flags& f, const std::string& name, T cklab::ChartParams::*field, const std::string& help) {
    auto* opt = app->add_option(name, f.cli.chart.*field, help);
    f.bound.emplace_back(opt, [field](RunConfig& dst, const RunConfig& src) { dst.chart.*field = src.chart.*field; });
}

void bind_flag(CLI::App* app, Flags& f, const std::string& name, bool RunConfig::*field, const std::string& help) {
    auto* opt = app->add_flag(name, f.cli.*field, help);
    f.bound.emplace_back(opt, [field](RunConfig& dst, const RunConfig& src) { dst.*field = src.*field; });
}

void common_options(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config_path, "JSON config with the same keys as the flags ('_' for '-'); flags given on the command line win");
    bind_opt(app, f, "--output,-o", &RunConfig::output, "CSV output path; the JSON summary is written next to it with extension .json");
    bind_opt(app, f, "--out-dir", &RunConfig::out_dir, "directory for <subcommand>.csv when --output is absent (default: $CKLAB_OUT_DIR, else .)");
}

void chart_options(CLI::App* app, Flags& f) {
    bind_chart(app, f, "--chart", &cklab::ChartParams::name, "chart: desitter, product, torus-perturbed, custom (default desitter)");
    bind_chart(app, f, "--n", &cklab::ChartParams::n, "spatial dimension n (default 3)");
    auto* sec = app->add_option("--section", f.section, "cross-section for product/custom charts: zonal or torus (default zonal)");
    f.bound.emplace_back(sec, [&f](RunConfig& dst, const RunConfig&) { dst.chart.section = cklab::parse_section(f.section); });
    bind_chart(app, f, "--grid", &cklab::ChartParams::grid, "cells per cross-section dimension (default 64)");
    bind_chart(app, f, "--amplitude", &cklab::ChartParams::amplitude, "x² perturbation amplitude of torus-perturbed (default 0.5)");
    bind_chart(app, f, "--linear-amplitude", &cklab::ChartParams::linear_amplitude, "adds amplitude·x·h0 to every component (default 0)");
    bind_opt(app, f, "--t0", &RunConfig::t0, "initial time t0 >= 0, x0 = e^{-t0} (default 0)");
    auto* tmax = app->add_option("--t-max", f.cli.t_max, "final time, x_min = e^{-t_max} (default 5 for verify-*, 6 otherwise)");
    f.bound.emplace_back(tmax, [](RunConfig& dst, const RunConfig& src) { dst.t_max = src.t_max; });
}

void solver_options(CLI::App* app, Flags& f) {
    bind_opt(app, f, "--steps", &RunConfig::steps, "RK4 steps, uniform in τ = -log x (default 1024)");
    bind_opt(app, f, "--record-every", &RunConfig::record_every, "store every k-th step as a quadrature node (default 4)");
    bind_opt(app, f, "--modes", &RunConfig::modes, "band of random data (default: a third of the grid)");
    bind_opt(app, f, "--seed", &RunConfig::seed, "master seed (default 7)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for the conformal Klein-Gordon equation on asymptotically de Sitter charts"};
    app.require_subcommand(1);
    std::map<std::string, Flags> flags;
    for (const auto& name : cklab::subcommands()) flags[name];

    auto* ce = app.add_subcommand("check-exponents", "validate (p, q, s) for dimension n and print its weights and dual pairs");
    {
        Flags& f = flags["check-exponents"];
        auto positional = [&](const char* name, std::string RunConfig::*field, const char* help) {
            auto* opt = ce->add_option(name, f.cli.*field, help);
            f.bound.emplace_back(opt, [field](RunConfig& dst, const RunConfig& src) { dst.*field = src.*field; });
        };
        positional("p", &RunConfig::p, "time exponent (integer, a/b, decimal or inf)");
        positional("q", &RunConfig::q, "space exponent");
        positional("s", &RunConfig::s, "regularity");
        auto* n = ce->add_option("n", f.cli.chart.n, "dimension");
        f.bound.emplace_back(n, [](RunConfig& dst, const RunConfig& src) { dst.chart.n = src.chart.n; });
        common_options(ce, f);
    }

    auto* ct = app.add_subcommand("conjugation-test", "residual of r^{-1} P r = x² P̄ on smooth fields over a grid sweep");
    {
        Flags& f = flags["conjugation-test"];
        chart_options(ct, f);
        bind_opt(ct, f, "--grids", &RunConfig::grids, "grid sizes, e.g. 16,32,64 (default)")->delimiter(',');
        bind_opt(ct, f, "--x", &RunConfig::x, "x at which the identity is evaluated (default 0.5)");
        bind_opt(ct, f, "--seed", &RunConfig::seed, "seed of the test field (default 7)");
        common_options(ct, f);
    }

    auto* so = app.add_subcommand("solve", "single reduced solve from random data; energy and norms per node");
    {
        Flags& f = flags["solve"];
        chart_options(so, f);
        solver_options(so, f);
        bind_flag(so, f, "--forcing", &RunConfig::forcing, "add a random band-limited forcing");
        bind_flag(so, f, "--zero-data", &RunConfig::zero_data, "start from zero data");
        common_options(so, f);
    }

    auto* ve = app.add_subcommand("verify-energy", "energy inequality ratio over an ensemble of reduced solves");
    {
        Flags& f = flags["verify-energy"];
        chart_options(ve, f);
        solver_options(ve, f);
        bind_opt(ve, f, "--ensemble", &RunConfig::ensemble, "number of runs (default 50)");
        bind_flag(ve, f, "--forcing", &RunConfig::forcing, "add a random band-limited forcing to every run");
        bind_flag(ve, f, "--zero-data", &RunConfig::zero_data, "zero initial data");
        bind_flag(ve, f, "--refine", &RunConfig::refine, "rerun at doubled grid and steps with t_max + 1; fail above 10% change");
        common_options(ve, f);
    }

    auto* vs = app.add_subcommand("verify-strichartz", "Strichartz ratio over an ensemble (homogeneous, or forced with --dual)");
    {
        Flags& f = flags["verify-strichartz"];
        chart_options(vs, f);
        solver_options(vs, f);
        bind_opt(vs, f, "--triple", &RunConfig::triple, "admissible p,q,s (default 5,10,1 for n=3, 3,6,1 for n=4)");
        bind_opt(vs, f, "--dual", &RunConfig::dual, "dual pair p',q' (e.g. 1,2); selects the inhomogeneous run");
        bind_opt(vs, f, "--ensemble", &RunConfig::ensemble, "number of runs (default 50)");
        bind_flag(vs, f, "--refine", &RunConfig::refine, "rerun at doubled grid and steps with t_max + 1; fail above 20% change");
        common_options(vs, f);
    }

    auto* sl = app.add_subcommand("semilinear", "Picard iteration for the power nonlinearity");
    {
        Flags& f = flags["semilinear"];
        chart_options(sl, f);
        solver_options(sl, f);
        auto* k = sl->add_option("--k", f.cli.k, "power (default 5 for n=3, 3 for n=4)");
        f.bound.emplace_back(k, [](RunConfig& dst, const RunConfig& src) { dst.k = src.k; });
        auto* e = sl->add_option("--epsilon", f.cli.epsilon, "data size ‖(u0,u1)‖_{H¹×L²}");
        f.bound.emplace_back(e, [](RunConfig& dst, const RunConfig& src) { dst.epsilon = src.epsilon; });
        bind_flag(sl, f, "--auto-epsilon", &RunConfig::auto_epsilon, "bisect for the convergence threshold and use a quarter of it");
        bind_opt(sl, f, "--max-iter", &RunConfig::max_iter, "iteration cap (default 25)");
        bind_opt(sl, f, "--tol", &RunConfig::tol, "stop when d_m < tol·‖u^(0)‖_Z (default 1e-8)");
        common_options(sl, f);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cklab::kConfigError;
    }

    try {
        for (auto& [name, f] : flags) {
            CLI::App* sub = app.get_subcommand(name);
            if (!sub->parsed()) continue;
            RunConfig cfg;
            cfg.subcommand = name;
            if (!f.config_path.empty()) cfg = cklab::load_config_file(f.config_path, cfg);
            for (auto& [opt, copy] : f.bound) {
                if (opt->count() > 0) copy(cfg, f.cli);
            }
            if (cfg.out_dir.empty()) {
                if (const char* env = std::getenv("CKLAB_OUT_DIR")) cfg.out_dir = env;
            }
            return cklab::run(cfg, std::cout).exit_code;
        }
    } catch (const cklab::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return cklab::kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cklab::kAssertionFailure;
    }
    return cklab::kConfigError;
}
