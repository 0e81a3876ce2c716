#include "cklab/strichartz.hpp"

#include "cklab/errors.hpp"
#include "cklab/sampling.hpp"

#include <cmath>
#include <exception>
#include <limits>

namespace cklab {

Resolution refined(const Resolution& base, int base_modes) {
    Resolution r = base;
    r.grid = 2 * base.grid;
    r.steps = 2 * base.steps;
    r.t_max = base.t_max + 1.0;
    r.modes = base_modes;
    return r;
}

bool EstimateReport::all_finite() const {
    for (const auto& r : runs) {
        if (!r.excluded && !std::isfinite(r.ratio)) return false;
    }
    return std::isfinite(sup_ratio);
}

ChartParams instantiate(ChartParams chart, const Resolution& res, double t0) {
    if (!(res.t_max > t0)) throw ConfigError("harness: t_max must exceed t0");
    chart.grid = res.grid;
    chart.x0 = std::exp(-t0);
    chart.x_min = std::exp(-res.t_max);
    return chart;
}

namespace {

struct Context {
    std::shared_ptr<const MetricSpec> metric;
    ReducedOperator reduced;
    BandBasis basis;
    SpectralCache cache;
    Resolution resolution;
};

Context make_context(const ChartParams& chart, Resolution res, double t0) {
    auto metric = std::make_shared<const MetricSpec>(make_chart(instantiate(chart, res, t0)));
    const BoundaryChartOperator op(metric);
    ReducedOperator reduced = conjugate(op);
    if (res.modes <= 0) res.modes = default_modes(*metric);
    BandBasis basis(*metric, res.modes);
    return Context{metric, std::move(reduced), std::move(basis), SpectralCache(metric), res};
}

// Runs `body(index, ctx)` for every run index, concurrently; the results are
// stored by index, so the reduction order never depends on scheduling.
template <class Body>
std::vector<RunResult> run_ensemble(const Context& ctx, std::size_t ensemble, Body body) {
    std::vector<RunResult> out(ensemble);
    std::vector<std::exception_ptr> errors(ensemble);
    const auto count = static_cast<long>(ensemble);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = body(static_cast<std::size_t>(i), ctx);
            out[static_cast<std::size_t>(i)].index = static_cast<std::size_t>(i);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (std::size_t i = 0; i < ensemble; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw SolverError("run " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

RunResult finish(double lhs, double rhs) {
    RunResult r;
    r.lhs = lhs;
    r.rhs = rhs;
    if (rhs == 0.0) {
        r.excluded = true;
        r.ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
        r.ratio = lhs / rhs;
    }
    return r;
}

double sup_of(const std::vector<RunResult>& runs) {
    double sup = 0.0;
    for (const auto& r : runs) {
        if (!r.excluded) sup = std::max(sup, r.ratio);
    }
    return sup;
}

template <class Body>
EstimateReport harness(const std::string& kind, const ChartParams& chart, const HarnessOptions& opts, Body body) {
    if (opts.ensemble == 0) throw ConfigError("harness: ensemble must be positive");
    const Context ctx = make_context(chart, opts.resolution, opts.t0);

    EstimateReport report;
    report.kind = kind;
    report.chart = ctx.metric->name();
    report.ensemble = opts.ensemble;
    report.seed = opts.seed;
    report.t0 = opts.t0;
    report.resolution = ctx.resolution;
    report.warnings = ctx.reduced.warnings();
    report.runs = run_ensemble(ctx, opts.ensemble, body);
    report.sup_ratio = sup_of(report.runs);
    for (const auto& r : report.runs) report.max_drift = std::max(report.max_drift, r.drift);

    if (opts.refine) {
        const Context fine = make_context(chart, refined(ctx.resolution, ctx.resolution.modes), opts.t0);
        RefinementDelta delta;
        delta.resolution = fine.resolution;
        delta.sup_ratio = sup_of(run_ensemble(fine, opts.ensemble, body));
        delta.relative_change = std::abs(delta.sup_ratio - report.sup_ratio) / report.sup_ratio;
        report.refinement.push_back(delta);
    }
    return report;
}

}  // namespace

EstimateReport verify_homogeneous(const ChartParams& chart, const AdmissibleTriple& triple, const HarnessOptions& opts) {
    if (triple.n != chart.n) throw ConfigError("verify_homogeneous: triple dimension differs from the chart");
    const MixedNormSpec lhs_spec = MixedNormSpec::from_triple(triple);
    auto body = [&](std::size_t i, const Context& ctx) {
        const MetricSpec& metric = *ctx.metric;
        auto rng = run_rng(opts.seed, i);
        const PhysicalData data = sample_data(metric, ctx.basis, rng, opts.data_scale);
        const double rhs = std::exp(std::abs(opts.t0) / 2.0) * data_norm(data, metric, &ctx.cache).sum();
        if (rhs == 0.0) return finish(0.0, 0.0);
        const TrajectoryRecord traj = solve_reduced(ctx.reduced, to_reduced(data, metric.n()), {},
                                                    ctx.resolution.steps, ctx.resolution.record_every);
        return finish(mixed_norm(reconstruct_u(traj, metric.n()), lhs_spec, metric, &ctx.cache), rhs);
    };
    EstimateReport report = harness("homogeneous", chart, opts, body);
    report.triple = triple;
    return report;
}

EstimateReport verify_inhomogeneous(const ChartParams& chart, const AdmissibleTriple& triple, const DualPair& dual,
                                    const HarnessOptions& opts) {
    if (triple.n != chart.n || dual.n != chart.n) throw ConfigError("verify_inhomogeneous: dimension mismatch");
    if (dual.s.value() != triple.s.value()) throw ConfigError("verify_inhomogeneous: dual pair belongs to a different s");
    const MixedNormSpec lhs_spec = MixedNormSpec::from_triple(triple);
    const MixedNormSpec rhs_spec = MixedNormSpec::from_dual(dual);
    auto body = [&](std::size_t i, const Context& ctx) {
        const MetricSpec& metric = *ctx.metric;
        const int n = metric.n();
        auto rng = run_rng(opts.seed, i);
        RandomForcing forcing(metric, ctx.basis, rng);
        forcing *= opts.forcing_scale;
        const StateVector zero{metric.x0(), Field::Zero(static_cast<Eigen::Index>(metric.size())),
                               Field::Zero(static_cast<Eigen::Index>(metric.size()))};
        const TrajectoryRecord traj = solve_reduced(
            ctx.reduced, zero, [&forcing](double x) { return forcing.reduced(x); }, ctx.resolution.steps,
            ctx.resolution.record_every);
        TrajectoryRecord f;
        f.x = traj.x;
        for (double x : traj.x) f.v.push_back(forcing.physical(x));
        const double rhs = mixed_norm(f, rhs_spec, metric, &ctx.cache);
        if (rhs == 0.0) return finish(0.0, 0.0);
        (void)n;
        return finish(mixed_norm(reconstruct_u(traj, n), lhs_spec, metric, &ctx.cache), rhs);
    };
    EstimateReport report = harness("inhomogeneous", chart, opts, body);
    report.triple = triple;
    report.dual = dual;
    return report;
}

EstimateReport verify_energy(const ChartParams& chart, const HarnessOptions& opts) {
    auto body = [&](std::size_t i, const Context& ctx) {
        const MetricSpec& metric = *ctx.metric;
        const auto size = static_cast<Eigen::Index>(metric.size());
        auto rng = run_rng(opts.seed, i);
        PhysicalData data{metric.x0(), Field::Zero(size), Field::Zero(size)};
        if (!opts.zero_data) data = sample_data(metric, ctx.basis, rng, opts.data_scale);
        std::optional<RandomForcing> forcing;
        if (opts.forcing) {
            forcing.emplace(metric, ctx.basis, rng);
            *forcing *= opts.forcing_scale;
        }
        Forcing g;
        if (forcing) g = [&forcing](double x) { return forcing->reduced(x); };

        const TrajectoryRecord traj = solve_reduced(ctx.reduced, to_reduced(data, metric.n()), g,
                                                    ctx.resolution.steps, ctx.resolution.record_every);
        const EnergyReading e0 = energy(ctx.reduced, traj.state(0));
        const double initial = e0.total() + e0.potential_l2;
        double source = 0.0;  // ∫_x^{x0} ∫ |g|² dh dx, trapezoid over nodes
        double prev_density = 0.0;
        if (forcing) {
            const Field gx = forcing->reduced(traj.x[0]);
            prev_density = metric.stencil(traj.x[0]).inner(gx, gx);
        }
        RunResult worst = finish(e0.total(), initial);
        double drift = 0.0;
        for (std::size_t k = 1; k < traj.size(); ++k) {
            if (forcing) {
                const Field gx = forcing->reduced(traj.x[k]);
                const double density = metric.stencil(traj.x[k]).inner(gx, gx);
                source += 0.5 * (density + prev_density) * (traj.x[k - 1] - traj.x[k]);
                prev_density = density;
            }
            const EnergyReading ek = energy(ctx.reduced, traj.state(k));
            const RunResult r = finish(ek.total(), initial + source);
            if (!r.excluded && (worst.excluded || r.ratio > worst.ratio)) worst = r;
            if (e0.total() > 0.0) drift = std::max(drift, std::abs(ek.total() - e0.total()) / e0.total());
        }
        worst.drift = drift;
        return worst;
    };
    return harness("energy", chart, opts, body);
}

}  // namespace cklab
