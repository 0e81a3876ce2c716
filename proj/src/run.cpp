#include "cklab/run.hpp"

#include "cklab/errors.hpp"
#include "cklab/report.hpp"
#include "cklab/sampling.hpp"
#include "cklab/semilinear.hpp"
#include "cklab/strichartz.hpp"

#include <cmath>
#include <ostream>

namespace cklab {

namespace fs = std::filesystem;

namespace {

struct Artifacts {
    CsvTable table;
    Json results;
    bool pass = true;
    std::vector<std::string> verdicts;
    std::vector<std::pair<double, double>> curve;  // optional resolution curve
};

Exponent parse_exponent(const std::string& text, const std::string& what) {
    const auto e = Exponent::parse(text);
    if (!e) throw ConfigError("cannot parse " + what + " '" + text + "'");
    return *e;
}

AdmissibleTriple parse_triple(const std::string& text, int n) {
    const auto parts = split_list(text);
    if (parts.size() != 3) throw ConfigError("triple must be 'p,q,s', got '" + text + "'");
    return AdmissibleTriple::make(parse_exponent(parts[0], "p"), parse_exponent(parts[1], "q"),
                                  parse_exponent(parts[2], "s"), n);
}

std::string default_triple(int n) {
    if (n == 3) return "5,10,1";
    if (n == 4) return "3,6,1";
    throw ConfigError("no default triple for n = " + std::to_string(n) + "; pass --triple");
}

Cell opt_exponent(const std::optional<Exponent>& e) {
    if (!e) return std::monostate{};
    return e->value();
}

Resolution resolution_of(const RunConfig& cfg) {
    return Resolution{cfg.chart.grid, cfg.steps, cfg.t_max.value_or(default_t_max(cfg.subcommand)), cfg.record_every,
                      cfg.modes};
}

Json report_json(const EstimateReport& r) {
    Json j;
    j["kind"] = r.kind;
    j["chart"] = r.chart;
    if (r.triple) j["triple"] = r.triple->key();
    if (r.dual) j["dual"] = r.dual->key();
    j["ensemble"] = r.ensemble;
    j["seed"] = r.seed;
    j["t0"] = r.t0;
    j["grid"] = r.resolution.grid;
    j["steps"] = r.resolution.steps;
    j["t_max"] = r.resolution.t_max;
    j["modes"] = r.resolution.modes;
    j["sup_ratio"] = r.sup_ratio;
    if (r.kind == "energy") j["max_drift"] = r.max_drift;
    Json refine = Json::array();
    for (const auto& d : r.refinement) {
        refine.push_back({{"grid", d.resolution.grid},
                          {"steps", d.resolution.steps},
                          {"t_max", d.resolution.t_max},
                          {"sup_ratio", d.sup_ratio},
                          {"relative_change", d.relative_change}});
    }
    j["refinement"] = refine;
    j["warnings"] = r.warnings;
    return j;
}

// --- check-exponents ------------------------------------------------------------

Artifacts check_exponents(const RunConfig& cfg, std::ostream& out) {
    if (cfg.p.empty() || cfg.q.empty() || cfg.s.empty()) throw ConfigError("check-exponents needs p, q, s and n");
    const Exponent p = parse_exponent(cfg.p, "p");
    const Exponent q = parse_exponent(cfg.q, "q");
    const Exponent s = parse_exponent(cfg.s, "s");
    const int n = cfg.chart.n;
    if (n < 1) throw ConfigError("n must be positive");
    Artifacts a{CsvTable({"kind", "p", "q", "s", "n", "verdict", "relation", "residual", "t_weight", "x_weight",
                          "measure_power"}),
                Json::object(), true, {}, {}};
    const Verdict v = validate(p, q, s, n);
    Json j;
    j["verdict"] = v.admissible ? "admissible" : "violated";
    j["describe"] = v.describe();
    j["exact"] = v.exact;
    j["degenerate_dimension"] = v.degenerate_dimension;
    if (v.admissible) {
        const auto triple = AdmissibleTriple::make(p, q, s, n);
        const WeightExponents w = weight_exponents(triple);
        a.table.add_row({std::string("triple"), p.value(), q.value(), s.value(), std::int64_t{n},
                         std::string("admissible"), std::monostate{}, 0.0, opt_exponent(w.t_weight),
                         opt_exponent(w.x_weight), std::int64_t{w.measure_power}});
        j["t_weight"] = w.t_weight ? Json(w.t_weight->str()) : Json();
        j["x_weight"] = w.x_weight ? Json(w.x_weight->str()) : Json();
        j["measure_power"] = w.measure_power;
        out << "admissible\n";
        out << "weights: t_weight=" << (w.t_weight ? w.t_weight->str() : "none")
            << " x_weight=" << (w.x_weight ? w.x_weight->str() : "none") << " measure_power=" << w.measure_power
            << '\n';
        Json duals = Json::array();
        if (s.rational()) {
            for (const DualPair& d : dual_for(*s.rational(), n)) {
                const WeightExponents dw = weight_exponents(d);
                a.table.add_row({std::string("dual"), d.p_prime.value(), d.q_prime.value(), d.s.value(),
                                 std::int64_t{n}, std::string("dual"), std::monostate{}, 0.0,
                                 opt_exponent(dw.t_weight), opt_exponent(dw.x_weight),
                                 std::int64_t{dw.measure_power}});
                duals.push_back(d.key());
            }
        }
        j["duals"] = duals;
        if (!duals.empty()) out << "dual pairs: " << duals.size() << " (first " << duals.front().get<std::string>() << ")\n";
    } else {
        a.table.add_row({std::string("triple"), p.value(), q.value(), s.value(), std::int64_t{n},
                         std::string("violated"), to_string(v.violated), v.residual, std::monostate{},
                         std::monostate{}, std::monostate{}});
        out << "violated: " << v.describe() << '\n';
        a.pass = false;
        a.verdicts.push_back("not admissible: " + v.describe());
    }
    a.table.add_row({std::string("summary"), p.value(), q.value(), s.value(), std::int64_t{n},
                     std::string(v.admissible ? "admissible" : "violated"),
                     v.admissible ? Cell{} : Cell{to_string(v.violated)}, v.residual, std::monostate{},
                     std::monostate{}, std::monostate{}});
    a.results = j;
    return a;
}

// --- conjugation-test -------------------------------------------------------------

Artifacts conjugation_test(const RunConfig& cfg, std::ostream& out) {
    if (cfg.grids.empty()) throw ConfigError("conjugation-test needs at least one grid");
    Artifacts a{CsvTable({"grid", "drift_step", "x", "residual", "ratio"}), Json::object(), true, {}, {}};
    const double t_max = cfg.t_max.value_or(default_t_max(cfg.subcommand));
    double prev = 0.0;
    double max_residual = 0.0;
    double last_ratio = std::nan("");
    bool x_independent = false;
    std::vector<std::string> warnings;
    Json rows = Json::array();
    for (int grid : cfg.grids) {
        ChartParams params = cfg.chart;
        params.grid = grid;
        params.x0 = std::exp(-cfg.t0);
        params.x_min = std::exp(-t_max);
        if (!(cfg.x > params.x_min && cfg.x < params.x0)) throw ConfigError("conjugation-test: x must lie in (x_min, x0)");
        auto metric = std::make_shared<const MetricSpec>(make_chart(params));
        x_independent = metric->x_independent();
        const BoundaryChartOperator op(metric);
        const ReducedOperator reduced = conjugate(op);
        warnings = reduced.warnings();
        const double r = conjugation_identity_residual(op, reduced, smooth_jet(*metric, cfg.seed, cfg.x), cfg.x);
        const Cell ratio = prev > 0.0 ? Cell{prev / r} : Cell{};
        if (prev > 0.0) last_ratio = prev / r;
        a.table.add_row({std::int64_t{grid}, op.drift_step(), cfg.x, r, ratio});
        rows.push_back({{"grid", grid}, {"residual", r}});
        a.curve.emplace_back(grid, r);
        max_residual = std::max(max_residual, r);
        prev = r;
        out << "grid " << grid << ": residual " << format_double(r) << '\n';
    }
    a.table.add_row({std::string("summary"), std::monostate{}, cfg.x, max_residual,
                     std::isnan(last_ratio) ? Cell{} : Cell{last_ratio}});
    if (!std::isfinite(max_residual)) {
        a.pass = false;
        a.verdicts.push_back("non-finite residual");
    } else if (x_independent) {
        if (max_residual > 1e-10) {
            a.pass = false;
            a.verdicts.push_back("residual above 1e-10 on an x-independent metric");
        }
    } else if (cfg.grids.size() >= 2 && !(last_ratio >= 3.5)) {
        a.pass = false;
        a.verdicts.push_back("refinement ratio below 3.5 (order < 2)");
    }
    a.results = {{"x_independent", x_independent}, {"max_residual", max_residual},
                 {"last_ratio", std::isnan(last_ratio) ? Json() : Json(last_ratio)}, {"grids", rows},
                 {"warnings", warnings}};
    return a;
}

// --- solve ------------------------------------------------------------------------

Artifacts solve(const RunConfig& cfg, std::ostream& out) {
    const Resolution res = resolution_of(cfg);
    auto metric = std::make_shared<const MetricSpec>(make_chart(instantiate(cfg.chart, res, cfg.t0)));
    const ReducedOperator reduced = conjugate(BoundaryChartOperator(metric));
    const BandBasis basis(*metric, cfg.modes > 0 ? cfg.modes : default_modes(*metric));
    auto rng = run_rng(cfg.seed, 0);
    const auto size = static_cast<Eigen::Index>(metric->size());
    PhysicalData data{metric->x0(), Field::Zero(size), Field::Zero(size)};
    if (!cfg.zero_data) data = sample_data(*metric, basis, rng);
    std::optional<RandomForcing> forcing;
    Forcing g;
    if (cfg.forcing) {
        forcing.emplace(*metric, basis, rng);
        g = [&forcing](double x) { return forcing->reduced(x); };
    }
    const TrajectoryRecord traj = solve_reduced(reduced, to_reduced(data, metric->n()), g, res.steps, res.record_every);
    const TrajectoryRecord u = reconstruct_u(traj, metric->n());

    Artifacts a{CsvTable({"node_index", "x", "t", "kinetic", "gradient", "potential_l2", "energy", "u_l2", "u_max"}),
                Json::object(), true, {}, {}};
    EnergyReading peak;
    double peak_l2 = 0.0, peak_max = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const EnergyReading e = energy(reduced, traj.state(i));
        const double l2 = sobolev_norm(u.v[i], u.x[i], 0.0, 2.0, *metric);
        const double umax = u.v[i].cwiseAbs().maxCoeff();
        a.table.add_row({static_cast<std::int64_t>(i), traj.x[i], traj.t(i), e.kinetic, e.gradient, e.potential_l2,
                         e.total(), l2, umax});
        peak.kinetic = std::max(peak.kinetic, e.kinetic);
        peak.gradient = std::max(peak.gradient, e.gradient);
        peak.potential_l2 = std::max(peak.potential_l2, e.potential_l2);
        peak_l2 = std::max(peak_l2, l2);
        peak_max = std::max(peak_max, umax);
    }
    const EnergyReading e0 = energy(reduced, traj.state(0));
    const EnergyReading e1 = energy(reduced, traj.state(traj.size() - 1));
    a.table.add_row({std::string("summary"), traj.x.back(), traj.t(traj.size() - 1), peak.kinetic, peak.gradient,
                     peak.potential_l2, e1.total(), peak_l2, peak_max});
    out << "nodes " << traj.size() << ", energy " << format_double(e0.total()) << " -> " << format_double(e1.total())
        << '\n';
    a.results = {{"nodes", traj.size()},
                 {"initial_energy", e0.total()},
                 {"final_energy", e1.total()},
                 {"warnings", reduced.warnings()}};
    return a;
}

// --- verify-strichartz / verify-energy ------------------------------------------------

HarnessOptions harness_options(const RunConfig& cfg) {
    HarnessOptions o;
    o.resolution = resolution_of(cfg);
    o.t0 = cfg.t0;
    o.ensemble = cfg.ensemble;
    o.seed = cfg.seed;
    o.refine = cfg.refine;
    o.forcing = cfg.forcing;
    o.zero_data = cfg.zero_data;
    return o;
}

void add_refinement_curve(Artifacts& a, const EstimateReport& r) {
    a.curve.emplace_back(r.resolution.grid, r.sup_ratio);
    for (const auto& d : r.refinement) a.curve.emplace_back(d.resolution.grid, d.sup_ratio);
}

Artifacts verify_strichartz(const RunConfig& cfg, std::ostream& out) {
    const AdmissibleTriple triple =
        parse_triple(cfg.triple.empty() ? default_triple(cfg.chart.n) : cfg.triple, cfg.chart.n);
    const HarnessOptions opts = harness_options(cfg);
    EstimateReport r;
    if (cfg.dual.empty()) {
        r = verify_homogeneous(cfg.chart, triple, opts);
    } else {
        const auto parts = split_list(cfg.dual);
        if (parts.size() != 2) throw ConfigError("dual must be \"p',q'\", got '" + cfg.dual + "'");
        const DualPair dual =
            make_dual(parse_exponent(parts[0], "p'"), parse_exponent(parts[1], "q'"), triple.s, cfg.chart.n);
        r = verify_inhomogeneous(cfg.chart, triple, dual, opts);
    }
    Artifacts a{CsvTable({"run", "seed", "t0", "lhs", "rhs", "ratio", "excluded", "refined_change"}), Json::object(),
                true, {}, {}};
    for (const auto& run : r.runs) {
        a.table.add_row({static_cast<std::int64_t>(run.index), static_cast<std::int64_t>(cfg.seed), cfg.t0, run.lhs,
                         run.rhs, run.excluded ? Cell{} : Cell{run.ratio}, std::int64_t{run.excluded ? 1 : 0},
                         std::monostate{}});
    }
    const Cell change = r.refinement.empty() ? Cell{} : Cell{r.refinement.front().relative_change};
    a.table.add_row({std::string("summary"), static_cast<std::int64_t>(cfg.seed), cfg.t0, std::monostate{},
                     std::monostate{}, r.sup_ratio, std::monostate{}, change});
    if (!r.all_finite()) {
        a.pass = false;
        a.verdicts.push_back("non-finite ratio");
    }
    if (!r.refinement.empty() && r.refinement.front().relative_change > 0.2) {
        a.pass = false;
        a.verdicts.push_back("sup_ratio changed by more than 20% under refinement");
    }
    add_refinement_curve(a, r);
    out << r.kind << " " << triple.key() << ": sup_ratio " << format_double(r.sup_ratio) << " over " << r.ensemble
        << " runs\n";
    for (const auto& d : r.refinement) out << "refined sup_ratio " << format_double(d.sup_ratio) << '\n';
    for (const auto& w : r.warnings) out << "warning: " << w << '\n';
    a.results = report_json(r);
    return a;
}

Artifacts verify_energy_cmd(const RunConfig& cfg, std::ostream& out) {
    const EstimateReport r = verify_energy(cfg.chart, harness_options(cfg));
    Artifacts a{CsvTable({"run", "seed", "lhs", "rhs", "ratio", "drift", "refined_change"}), Json::object(), true, {},
                {}};
    for (const auto& run : r.runs) {
        a.table.add_row({static_cast<std::int64_t>(run.index), static_cast<std::int64_t>(cfg.seed), run.lhs, run.rhs,
                         run.excluded ? Cell{} : Cell{run.ratio}, run.drift, std::monostate{}});
    }
    const Cell change = r.refinement.empty() ? Cell{} : Cell{r.refinement.front().relative_change};
    a.table.add_row({std::string("summary"), static_cast<std::int64_t>(cfg.seed), std::monostate{}, std::monostate{},
                     r.sup_ratio, r.max_drift, change});
    if (!r.all_finite()) {
        a.pass = false;
        a.verdicts.push_back("non-finite ratio");
    }
    if (!r.refinement.empty() && r.refinement.front().relative_change > 0.1) {
        a.pass = false;
        a.verdicts.push_back("energy ratio changed by more than 10% under refinement");
    }
    add_refinement_curve(a, r);
    out << "energy: sup_ratio " << format_double(r.sup_ratio) << ", max drift " << format_double(r.max_drift) << '\n';
    for (const auto& w : r.warnings) out << "warning: " << w << '\n';
    a.results = report_json(r);
    return a;
}

// --- semilinear ---------------------------------------------------------------------

Artifacts semilinear(const RunConfig& cfg, std::ostream& out) {
    const int n = cfg.chart.n;
    const double k = cfg.k.value_or(n == 3 ? 5.0 : n == 4 ? 3.0 : 0.0);
    if (k == 0.0) throw ConfigError("semilinear: pass --k for n = " + std::to_string(n));
    if (!cfg.epsilon && !cfg.auto_epsilon) throw ConfigError("semilinear: pass --epsilon or --auto-epsilon");
    const Resolution res = resolution_of(cfg);
    auto metric = std::make_shared<const MetricSpec>(make_chart(instantiate(cfg.chart, res, cfg.t0)));
    const Nonlinearity nl =
        cfg.table_u.empty() ? Nonlinearity::pure_power(k) : Nonlinearity::sampled(k, cfg.table_u, cfg.table_f);
    Json nl_json = {{"k", k}, {"form", nl.form()}};
    if (!nl.is_pure_power()) {
        const NonlinearityCheck c = check_nonlinearity(nl, cfg.table_u.back());
        nl_json["growth_constant"] = c.growth_constant;
        nl_json["log_slope"] = {c.min_log_slope, c.max_log_slope};
        if (!c.pass) throw ConfigError("semilinear: sampled nonlinearity fails the growth conditions");
    }
    const SemilinearProblem problem(metric, nl, SemilinearConfig{res.steps, cfg.tol, cfg.max_iter, 3});
    const PhysicalData direction = unit_direction(*metric, cfg.seed);
    Json search = Json();
    double eps = cfg.epsilon.value_or(0.0);
    if (cfg.auto_epsilon) {
        const EpsilonSearch s = auto_epsilon(problem, direction);
        eps = s.epsilon0;
        search = {{"threshold", s.threshold}, {"epsilon0", s.epsilon0}, {"probes", s.probes.size()}};
        out << "convergence threshold " << format_double(s.threshold) << ", epsilon " << format_double(eps) << '\n';
    }
    const PicardResult r = problem.picard_solve(eps * direction);
    const IterationHistory& h = r.history;
    Artifacts a{CsvTable({"row", "m", "z_norm", "d_m", "converged", "contraction_factor", "residual", "epsilon"}),
                Json::object(), true, {}, {}};
    for (std::size_t m = 0; m < h.z_norms.size(); ++m) {
        a.table.add_row({std::string("iter"), static_cast<std::int64_t>(m), h.z_norms[m],
                         m < h.differences.size() ? Cell{h.differences[m]} : Cell{}, std::monostate{},
                         std::monostate{}, std::monostate{}, eps});
    }
    a.table.add_row({std::string("summary"), static_cast<std::int64_t>(h.differences.size()), r.z_norm,
                     h.differences.empty() ? Cell{} : Cell{h.differences.back()}, std::int64_t{h.converged ? 1 : 0},
                     h.contraction_factor, r.residual, eps});
    if (!h.converged) {
        a.pass = false;
        a.verdicts.push_back("no convergence: " + h.failure);
    } else if (r.residual > 2.0 * r.tol_abs) {
        a.pass = false;
        a.verdicts.push_back("fixed-point residual above 2 tol");
    }
    Json holder = Json();
    if (h.converged) {
        const HolderBound b = problem.holder_bound_check(reconstruct_u(r.solution, n));
        holder = {{"lhs", b.lhs}, {"rhs", b.rhs}, {"C", b.rhs > 0.0 ? Json(b.lhs / b.rhs) : Json()}};
    }
    out << (h.converged ? "converged" : "no convergence") << " after " << h.differences.size()
        << " iterations, contraction factor " << format_double(h.contraction_factor) << '\n';
    a.results = {{"nonlinearity", nl_json},
                 {"z_triple", problem.z_triple().key()},
                 {"dual", problem.dual().key()},
                 {"epsilon", eps},
                 {"epsilon_search", search},
                 {"converged", h.converged},
                 {"failure", h.failure},
                 {"iterations", h.differences.size()},
                 {"contraction_factor", std::isfinite(h.contraction_factor) ? Json(h.contraction_factor) : Json()},
                 {"z_norm", r.z_norm},
                 {"residual", r.residual},
                 {"tol_abs", r.tol_abs},
                 {"holder", holder},
                 {"warnings", problem.warnings()}};
    return a;
}

}  // namespace

RunOutcome run(const RunConfig& cfg, std::ostream& out) {
    Artifacts a{CsvTable({"unused"}), Json::object(), true, {}, {}};
    if (cfg.subcommand == "check-exponents") {
        a = check_exponents(cfg, out);
    } else if (cfg.subcommand == "conjugation-test") {
        a = conjugation_test(cfg, out);
    } else if (cfg.subcommand == "solve") {
        a = solve(cfg, out);
    } else if (cfg.subcommand == "verify-strichartz") {
        a = verify_strichartz(cfg, out);
    } else if (cfg.subcommand == "verify-energy") {
        a = verify_energy_cmd(cfg, out);
    } else if (cfg.subcommand == "semilinear") {
        a = semilinear(cfg, out);
    } else {
        throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
    }

    RunOutcome outcome;
    outcome.csv = cfg.output.empty() ? fs::path(cfg.out_dir.empty() ? "." : cfg.out_dir) / (cfg.subcommand + ".csv")
                                     : fs::path(cfg.output);
    outcome.summary = fs::path(outcome.csv).replace_extension(".json");
    outcome.exit_code = a.pass ? kPass : kAssertionFailure;

    Json summary;
    summary["tool"] = "cklab";
    summary["version"] = library_version();
    summary["config"] = to_json(cfg);
    summary["seed"] = cfg.seed;
    summary["results"] = a.results;
    summary["pass"] = a.pass;
    summary["verdicts"] = a.verdicts;
    a.table.write(outcome.csv);
    write_json(outcome.summary, summary);
    if (a.curve.size() >= 2) {
        write_columns(fs::path(outcome.csv).replace_extension(".dat"), a.curve, "grid value");
    }
    for (const auto& v : a.verdicts) out << "FAIL: " << v << '\n';
    out << (a.pass ? "pass" : "fail") << ": " << outcome.csv.string() << '\n';
    return outcome;
}

}  // namespace cklab
