// Acceptance checks 1-10. One PASS/FAIL line per criterion; exit status is
// the number of failures (capped at 1).
#include "cklab/config.hpp"
#include "cklab/errors.hpp"
#include "cklab/exponents.hpp"
#include "cklab/operator.hpp"
#include "cklab/report.hpp"
#include "cklab/run.hpp"
#include "cklab/sampling.hpp"
#include "cklab/semilinear.hpp"
#include "cklab/solver.hpp"
#include "cklab/strichartz.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace cklab;

namespace {

// --- pinned tolerances -------------------------------------------------------------
constexpr double kC1MaxSeconds = 1.0;
constexpr double kC2ProductResidual = 1e-10;
constexpr double kC2RatioLo = 3.5, kC2RatioHi = 4.5;
constexpr double kC3GateTol = 1e-8;
constexpr double kC4ManufacturedError = 1e-6;
constexpr double kC4OrderTau = 4.0, kC4OrderTheta = 2.0, kC4OrderTol = 0.3;
constexpr double kC5ProductDrift = 1e-3;
constexpr double kC5RefineChange = 0.10;
constexpr double kC6RefineChange = 0.20;
constexpr double kC6ScaleInvariance = 1e-10;
constexpr double kC6T0Growth = 0.30;
constexpr double kC6Truncation = 0.05;
constexpr double kC7RefineChange = 0.20;
constexpr int kC8MaxIter = 25;
constexpr double kC8SlopeQuintic = 4.0, kC8SlopeCubic = 2.0, kC8SlopeTol = 0.5;
constexpr double kC8ResidualFactor = 2.0;
constexpr double kC8ConstantDrift = 0.10;
constexpr double kC9ConstantDrift = 0.10;

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [fail]");
    }
};

std::string num(double v) { return format_double(v); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel_change(double a, double b) { return std::abs(b - a) / std::abs(a); }

std::shared_ptr<const MetricSpec> make(MetricDefinition def) { return std::make_shared<const MetricSpec>(std::move(def)); }

// --- 1 ------------------------------------------------------------------------------

Outcome exponent_algebra() {
    Outcome o;
    const auto t0 = Clock::now();
    auto admissible = [](Exponent p, Exponent q, Exponent s, int n) { return validate(p, q, s, n).admissible; };
    o.require(admissible(5, 10, 1, 3), "(5,10,1,3)");
    o.require(admissible(3, 6, 1, 4), "(3,6,1,4)");
    bool inf_ok = true;
    for (int n = 2; n <= 6; ++n) inf_ok = inf_ok && admissible(Exponent::infinite(), 2, 0, n);
    o.require(inf_ok, "(inf,2,0,n) for n=2..6");
    for (int n : {3, 4}) {
        bool found = false;
        for (const DualPair& d : dual_for(Rational(1), n)) {
            found = found || (d.p_prime.value() == 1.0 && d.q_prime.value() == 2.0);
        }
        o.require(found, "(1,2) in dual_for(1," + std::to_string(n) + ")");
    }
    // lattice: p in [2, 12] and q in [2, 24] with denominators <= 4, s = n/2 - 1/p - n/q
    std::size_t checked = 0;
    bool identity = true;
    for (int n = 2; n <= 5; ++n) {
        for (int pd = 1; pd <= 4; ++pd) {
            for (int pn = 2 * pd; pn <= 12 * pd; ++pn) {
                for (int qd = 1; qd <= 4; ++qd) {
                    for (int qn = 2 * qd; qn <= 24 * qd; ++qn) {
                        const Rational p(pn, pd), q(qn, qd);
                        const Rational s = Rational(n, 2) - Rational(1) / p - Rational(n) / q;
                        if (!admissible(Exponent::exact(p), Exponent::exact(q), Exponent::exact(s), n)) continue;
                        const WeightExponents w = weight_exponents(
                            AdmissibleTriple::make(Exponent::exact(p), Exponent::exact(q), Exponent::exact(s), n));
                        identity = identity && *w.x_weight->rational() + Rational(1) == -*w.t_weight->rational();
                        ++checked;
                    }
                }
            }
        }
    }
    o.require(identity && checked > 0, "weight identity on " + std::to_string(checked) + " lattice triples");
    const double secs = seconds_since(t0);
    o.require(secs < kC1MaxSeconds, "runtime " + num(secs) + " s");
    return o;
}

// --- 2 ------------------------------------------------------------------------------

double conjugation_residual(const std::string& chart, int grid) {
    ChartParams p;
    p.name = chart;
    p.n = 3;
    p.grid = grid;
    p.x_min = std::exp(-6.0);
    auto m = make(make_chart(p));
    const BoundaryChartOperator op(m);
    return conjugation_identity_residual(op, conjugate(op), smooth_jet(*m, 7, 0.5), 0.5);
}

Outcome conjugation() {
    Outcome o;
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int grid : {16, 32, 64}) worst = std::max(worst, conjugation_residual("product", grid));
    o.require(worst <= kC2ProductResidual, "product residual " + num(worst));
    double prev = 0.0;
    for (int grid : {16, 32, 64, 128}) {
        const double r = conjugation_residual("desitter", grid);
        if (prev > 0.0) {
            const double ratio = prev / r;
            o.require(ratio >= kC2RatioLo && ratio <= kC2RatioHi, "desitter ratio " + num(ratio) + " at " + std::to_string(grid));
        }
        prev = r;
    }
    const double secs = seconds_since(t0);
    o.require(secs < 10.0, "runtime " + num(secs) + " s");
    return o;
}

// --- 3 ------------------------------------------------------------------------------

Outcome short_range_gate() {
    Outcome o;
    for (int n : {2, 3, 4}) {
        auto m = make(desitter_chart(n, 32, 1.0, std::exp(-6.0)));
        const ShortRangeVerdict v = check_short_range(*m, kC3GateTol);
        const ReducedOperator r = conjugate(BoundaryChartOperator(m));
        o.require(v.pass && r.warnings().empty(), "desitter n=" + std::to_string(n) + " passes, |h1| " + num(v.max_linear_coefficient));
    }
    auto m = make(with_linear_term(desitter_chart(3, 32, 1.0, std::exp(-6.0)), 0.5));
    const ShortRangeVerdict v = check_short_range(*m, kC3GateTol);
    const ReducedOperator r = conjugate(BoundaryChartOperator(m));
    const bool warned = r.warnings().size() == 1 && r.warnings()[0].rfind("singular-potential:", 0) == 0;
    o.require(!v.pass && warned, "linear-term chart fails and warns, |h1| " + num(v.max_linear_coefficient));
    return o;
}

// --- 4 ------------------------------------------------------------------------------

// Product cylinder over the circle: v = cos θ cos(ω (x - 1)) with ω² the
// eigenvalue of cos θ, 1 in the continuum and (4/Δ²) sin²(Δ/2) on the grid.
struct Manufactured {
    ReducedOperator reduced;
    Field mode;
    double omega_grid;
};

Manufactured manufactured(int grid) {
    auto m = make(product_chart(1, grid, CrossSection::Torus, 1.0, std::exp(-6.0)));
    const double d = 2 * std::numbers::pi / grid;
    Field mode = m->sample([](const Point& y) { return std::cos(y[0]); });
    return Manufactured{conjugate(BoundaryChartOperator(m)), mode, 2.0 / d * std::sin(d / 2)};
}

Field final_field(const Manufactured& p, int steps) {
    const StateVector init{1.0, p.mode, Field::Zero(p.mode.size())};
    return solve_reduced(p.reduced, init, {}, steps, steps).v.back();
}

double final_error(const Manufactured& p, int steps, double omega) {
    return (final_field(p, steps) - p.mode * std::cos(omega * (std::exp(-6.0) - 1.0))).cwiseAbs().maxCoeff();
}

Outcome solver_convergence() {
    Outcome o;
    const auto t0 = Clock::now();
    const Manufactured ref = manufactured(128);
    const double e = final_error(ref, 4096, ref.omega_grid);
    o.require(e <= kC4ManufacturedError, "N=128/4096 error vs semi-discrete solution " + num(e));
    o.detail += " (vs continuum " + num(final_error(ref, 4096, 1.0)) + ", spatial truncation)";
    // self-convergence in τ: successive differences
    const Manufactured p = manufactured(32);
    const Field a = final_field(p, 64), b = final_field(p, 128), c = final_field(p, 256);
    const double tau = std::log2((a - b).cwiseAbs().maxCoeff() / (b - c).cwiseAbs().maxCoeff());
    o.require(std::abs(tau - kC4OrderTau) <= kC4OrderTol, "order in tau " + num(tau));
    double prev = 0.0, theta = 0.0;
    for (int grid : {16, 32, 64}) {
        const double err = final_error(manufactured(grid), 2048, 1.0);
        if (prev > 0.0) {
            theta = std::log2(prev / err);
            o.require(std::abs(theta - kC4OrderTheta) <= kC4OrderTol, "order in theta " + num(theta) + " at " + std::to_string(grid));
        }
        prev = err;
    }
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "runtime " + num(secs) + " s");
    return o;
}

// --- 5-7 ----------------------------------------------------------------------------

ChartParams desitter3() {
    ChartParams c;
    c.name = "desitter";
    c.n = 3;
    return c;
}

const AdmissibleTriple& quintic_triple() {
    static const AdmissibleTriple t = AdmissibleTriple::make(5, 10, 1, 3);
    return t;
}

Outcome energy_estimates() {
    Outcome o;
    HarnessOptions product;
    product.ensemble = 5;
    product.resolution.steps = 4096;
    ChartParams pc = desitter3();
    pc.name = "product";
    const EstimateReport p = verify_energy(pc, product);
    o.require(p.max_drift <= kC5ProductDrift, "product drift " + num(p.max_drift));

    HarnessOptions ds;
    ds.ensemble = 20;
    ds.refine = true;
    const EstimateReport d = verify_energy(desitter3(), ds);
    o.require(d.all_finite(), "desitter ratios finite, sup " + num(d.sup_ratio));
    const double change = d.refinement.empty() ? INFINITY : d.refinement[0].relative_change;
    o.require(change <= kC5RefineChange, "refinement change " + num(change));
    return o;
}

Outcome homogeneous() {
    Outcome o;
    const auto t0 = Clock::now();
    HarnessOptions base;
    base.ensemble = 50;
    base.refine = true;
    const EstimateReport r = verify_homogeneous(desitter3(), quintic_triple(), base);
    o.require(r.all_finite() && r.runs.size() == 50, "50 finite ratios, sup " + num(r.sup_ratio));
    const double change = r.refinement.empty() ? INFINITY : r.refinement[0].relative_change;
    o.require(change <= kC6RefineChange, "refinement change " + num(change));

    HarnessOptions scaled = base;
    scaled.refine = false;
    scaled.data_scale = 1e3;
    const EstimateReport s = verify_homogeneous(desitter3(), quintic_triple(), scaled);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.runs.size(); ++i) worst = std::max(worst, rel_change(r.runs[i].ratio, s.runs[i].ratio));
    o.require(worst <= kC6ScaleInvariance, "scaling invariance " + num(worst));

    HarnessOptions longer = scaled;
    longer.data_scale = 1.0;
    longer.resolution.t_max = base.resolution.t_max + 1.0;
    const double trunc = rel_change(r.sup_ratio, verify_homogeneous(desitter3(), quintic_triple(), longer).sup_ratio);
    o.require(trunc <= kC6Truncation, "t_max 5 -> 6 change " + num(trunc));

    std::vector<double> sups;
    for (double t : {0.0, 1.0, 2.0}) {
        HarnessOptions sweep = base;
        sweep.refine = false;
        sweep.t0 = t;
        sups.push_back(t == 0.0 ? r.sup_ratio : verify_homogeneous(desitter3(), quintic_triple(), sweep).sup_ratio);
    }
    // growth relative to t0 = 0 is gated; decay is reported only
    const auto [lo, hi] = std::minmax_element(sups.begin(), sups.end());
    const double growth = *hi / sups[0] - 1.0;
    o.require(growth <= kC6T0Growth, "t0 sweep " + num(sups[0]) + "/" + num(sups[1]) + "/" + num(sups[2]) +
                                            " growth " + num(growth) + " (two-sided variation " +
                                            num((*hi - *lo) / *lo) + ")");
    o.detail += "; runtime " + num(seconds_since(t0)) + " s";
    return o;
}

Outcome inhomogeneous() {
    Outcome o;
    HarnessOptions opts;
    opts.ensemble = 50;
    opts.refine = true;
    const EstimateReport r = verify_inhomogeneous(desitter3(), quintic_triple(), make_dual(1, 2, 1, 3), opts);
    o.require(r.all_finite() && r.runs.size() == 50, "50 finite ratios, sup " + num(r.sup_ratio));
    const double change = r.refinement.empty() ? INFINITY : r.refinement[0].relative_change;
    o.require(change <= kC7RefineChange, "refinement change " + num(change));
    return o;
}

// --- 8-9 ----------------------------------------------------------------------------

struct SemilinearRun {
    bool converged = false;
    std::size_t iterations = 0;
    double epsilon = 0.0;
    double z_norm = 0.0;
    double residual = 0.0;
    double tol_abs = 0.0;
    double holder_c = 0.0;
    double holder_lhs = 0.0;
    double holder_rhs = 0.0;
};

struct SemilinearSetup {
    std::shared_ptr<const MetricSpec> metric;
    std::unique_ptr<SemilinearProblem> problem;
    PhysicalData direction;
};

// Data direction drawn from a fixed band of `modes` eigenmodes so that the
// refined run sees the same continuum data.
SemilinearSetup setup(int n, double k, const Resolution& res, int modes) {
    ChartParams c;
    c.name = "desitter";
    c.n = n;
    SemilinearSetup s;
    s.metric = make(make_chart(instantiate(c, res, 0.0)));
    s.problem = std::make_unique<SemilinearProblem>(s.metric, Nonlinearity::pure_power(k),
                                                    SemilinearConfig{res.steps, 1e-8, kC8MaxIter, 3});
    auto rng = run_rng(7, 0);
    s.direction = sample_data(*s.metric, BandBasis(*s.metric, modes), rng, 1.0);
    return s;
}

SemilinearRun solve_at(const SemilinearSetup& s, double eps) {
    const PicardResult r = s.problem->picard_solve(eps * s.direction);
    SemilinearRun out;
    out.converged = r.history.converged;
    out.iterations = r.history.differences.size();
    out.epsilon = eps;
    out.z_norm = r.z_norm;
    out.residual = r.residual;
    out.tol_abs = r.tol_abs;
    const HolderBound b = s.problem->holder_bound_check(reconstruct_u(r.solution, s.metric->n()));
    out.holder_lhs = b.lhs;
    out.holder_rhs = b.rhs;
    out.holder_c = b.rhs > 0.0 ? b.lhs / b.rhs : NAN;
    return out;
}

struct SemilinearStudy {
    SemilinearRun base;
    SemilinearRun refined;
    double slope = 0.0;
    double uniqueness = 0.0;
};

SemilinearStudy study(int n, double k) {
    const Resolution res{64, 1024, 6.0, 4, 0};
    const SemilinearSetup s = setup(n, k, res, 21);
    const EpsilonSearch search = auto_epsilon(*s.problem, s.direction);
    SemilinearStudy out;
    out.base = solve_at(s, search.epsilon0);
    out.slope = contraction_slope(*s.problem, s.direction, search.epsilon0).slope;
    out.uniqueness = uniqueness_check(*s.problem, search.epsilon0 * s.direction, 11);
    const SemilinearSetup fine = setup(n, k, refined(res, 21), 21);
    out.refined = solve_at(fine, search.epsilon0);
    return out;
}

Outcome semilinear(const SemilinearStudy& quintic, const SemilinearStudy& cubic) {
    Outcome o;
    const SemilinearRun& q = quintic.base;
    o.require(q.converged && q.iterations <= static_cast<std::size_t>(kC8MaxIter),
              "quintic eps " + num(q.epsilon) + " converged in " + std::to_string(q.iterations));
    o.require(std::abs(quintic.slope - kC8SlopeQuintic) <= kC8SlopeTol, "quintic slope " + num(quintic.slope));
    o.require(q.residual <= kC8ResidualFactor * q.tol_abs, "residual " + num(q.residual) + " vs tol " + num(q.tol_abs));
    o.require(quintic.uniqueness <= q.tol_abs, "uniqueness difference " + num(quintic.uniqueness));
    const double c0 = q.z_norm / q.epsilon, c1 = quintic.refined.z_norm / quintic.refined.epsilon;
    o.require(quintic.refined.converged && rel_change(c0, c1) <= kC8ConstantDrift,
              "C' " + num(c0) + " -> " + num(c1));
    o.require(cubic.base.converged, "cubic eps " + num(cubic.base.epsilon) + " converged in " + std::to_string(cubic.base.iterations));
    o.require(std::abs(cubic.slope - kC8SlopeCubic) <= kC8SlopeTol, "cubic slope " + num(cubic.slope));
    return o;
}

Outcome holder(const SemilinearStudy& quintic, const SemilinearStudy& cubic) {
    Outcome o;
    for (const auto& [name, s] : {std::pair{"quintic", &quintic}, std::pair{"cubic", &cubic}}) {
        const double a = s->base.holder_c, b = s->refined.holder_c;
        const bool bounded = std::isfinite(a) && std::isfinite(b) && s->base.holder_lhs <= a * s->base.holder_rhs * (1 + 1e-12);
        o.require(bounded && rel_change(a, b) <= kC9ConstantDrift,
                  std::string(name) + " C " + num(a) + " -> " + num(b));
    }
    return o;
}

// --- 10 -----------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Outcome determinism() {
    Outcome o;
    const auto root = std::filesystem::temp_directory_path() / "cklab_acceptance_determinism";
    std::filesystem::remove_all(root);
    RunConfig strichartz;
    strichartz.subcommand = "verify-strichartz";
    strichartz.triple = "5,10,1";
    strichartz.chart.grid = 32;
    strichartz.steps = 512;
    RunConfig semi;
    semi.subcommand = "semilinear";
    semi.chart.grid = 32;
    semi.steps = 512;
    semi.t_max = 4.0;
    semi.epsilon = 0.3;
    for (RunConfig cfg : {strichartz, semi}) {
        std::string first;
        for (int rep = 0; rep < 2; ++rep) {
            cfg.out_dir = (root / std::to_string(rep)).string();
            std::ostringstream sink;
            const RunOutcome r = run(cfg, sink);
            const std::string bytes = slurp(r.csv) + slurp(r.summary);
            if (rep == 0) first = bytes;
            else o.require(!bytes.empty() && bytes == first, cfg.subcommand + " outputs byte-identical");
        }
    }
    std::filesystem::remove_all(root);
    return o;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const std::function<Outcome()>& check) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("criterion %d: %s  %s  (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    };
    report(1, exponent_algebra);
    report(2, conjugation);
    report(3, short_range_gate);
    report(4, solver_convergence);
    report(5, energy_estimates);
    report(6, homogeneous);
    report(7, inhomogeneous);
    SemilinearStudy quintic, cubic;
    std::string study_error;
    const auto t8 = Clock::now();
    try {
        quintic = study(3, 5);
        cubic = study(4, 3);
    } catch (const std::exception& e) {
        study_error = e.what();
    }
    const double study_secs = seconds_since(t8);
    auto with_study = [&](auto fn) {
        return [&, fn]() -> Outcome {
            if (!study_error.empty()) throw SolverError(study_error);
            Outcome o = fn(quintic, cubic);
            o.detail += "; semilinear studies " + num(study_secs) + " s";
            return o;
        };
    };
    report(8, with_study(semilinear));
    report(9, with_study(holder));
    report(10, determinism);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
