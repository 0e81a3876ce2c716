#include "cklab/semilinear.hpp"

#include "cklab/errors.hpp"
#include "cklab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cklab {

// --- nonlinearity -------------------------------------------------------------

Nonlinearity Nonlinearity::pure_power(double k) {
    if (!(k > 1.0)) throw ConfigError("nonlinearity: k must exceed 1");
    Nonlinearity nl;
    nl.k_ = k;
    return nl;
}

Nonlinearity Nonlinearity::sampled(double k, std::vector<double> u, std::vector<double> f) {
    if (!(k > 1.0)) throw ConfigError("nonlinearity: k must exceed 1");
    if (u.size() < 2 || u.size() != f.size()) throw ConfigError("nonlinearity: table needs matching u and F columns");
    if (u.front() != 0.0 || f.front() != 0.0) throw ConfigError("nonlinearity: table must start at (0, 0)");
    for (std::size_t i = 1; i < u.size(); ++i) {
        if (!(u[i] > u[i - 1])) throw ConfigError("nonlinearity: u column must increase");
    }
    Nonlinearity nl;
    nl.k_ = k;
    nl.u_ = std::move(u);
    nl.f_ = std::move(f);
    return nl;
}

double Nonlinearity::operator()(double u) const {
    if (is_pure_power()) return u * std::pow(std::abs(u), k_ - 1.0);
    const double a = std::abs(u);
    if (a > u_.back()) throw DomainError("nonlinearity: |u| beyond the sampled table");
    const auto it = std::upper_bound(u_.begin(), u_.end(), a);
    const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - u_.begin())) - 1;
    const std::size_t j = std::min(i + 1, u_.size() - 1);
    const double w = j == i ? 0.0 : (a - u_[i]) / (u_[j] - u_[i]);
    const double val = (1.0 - w) * f_[i] + w * f_[j];
    return u < 0.0 ? -val : val;
}

double Nonlinearity::derivative(double u) const {
    if (is_pure_power()) return k_ * std::pow(std::abs(u), k_ - 1.0);
    const double a = std::abs(u);
    if (a > u_.back()) throw DomainError("nonlinearity: |u| beyond the sampled table");
    auto it = std::upper_bound(u_.begin(), u_.end(), a);
    if (it == u_.end()) --it;
    const auto j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - u_.begin()));
    return (f_[j] - f_[j - 1]) / (u_[j] - u_[j - 1]);
}

Field Nonlinearity::apply(const Field& u) const {
    if (is_pure_power()) return u.array() * u.array().abs().pow(k_ - 1.0);
    Field out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = (*this)(u[i]);
    return out;
}

NonlinearityCheck check_nonlinearity(const Nonlinearity& nl, double u_max, int samples) {
    if (!(u_max > 0.0) || samples < 2) throw ConfigError("check_nonlinearity: need u_max > 0 and samples >= 2");
    NonlinearityCheck c;
    c.min_log_slope = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= samples; ++i) {
        const double u = u_max * i / samples;
        const double f = nl(u);
        c.growth_constant = std::max(c.growth_constant, std::abs(f) / std::pow(u, nl.k()));
        if (f == 0.0) {
            c.min_log_slope = 0.0;
            continue;
        }
        const double slope = std::abs(u * nl.derivative(u)) / std::abs(f);
        c.min_log_slope = std::min(c.min_log_slope, slope);
        c.max_log_slope = std::max(c.max_log_slope, slope);
    }
    c.pass = std::isfinite(c.growth_constant) && c.min_log_slope > 0.0 && std::isfinite(c.max_log_slope);
    return c;
}

// --- problem --------------------------------------------------------------------

namespace {

AdmissibleTriple z_triple_for(double k, int n) {
    const auto exact_k = std::round(k) == k ? Exponent(static_cast<std::int64_t>(k)) : Exponent::approx(k);
    const auto exact_2k = std::round(2 * k) == 2 * k ? Exponent(static_cast<std::int64_t>(2 * k)) : Exponent::approx(2 * k);
    return AdmissibleTriple::make(exact_k, exact_2k, Exponent(1), n);
}

ReducedOperator reduced_for(const std::shared_ptr<const MetricSpec>& metric) {
    ReducedOperator r = conjugate(BoundaryChartOperator(metric));
    if (r.singular_potential()) {
        throw ConfigError("semilinear: chart '" + metric->name() + "' has a linear term in x; the reduced potential is singular");
    }
    return r;
}

}  // namespace

SemilinearProblem::SemilinearProblem(std::shared_ptr<const MetricSpec> metric, Nonlinearity nl, SemilinearConfig cfg)
    : metric_(std::move(metric)),
      nl_(std::move(nl)),
      cfg_(cfg),
      z_(z_triple_for(nl_.k(), metric_->n())),
      dual_(make_dual(Exponent(1), Exponent(2), Exponent(1), metric_->n())),
      reduced_(reduced_for(metric_)),
      cache_(metric_) {
    if (cfg_.steps < 16 || cfg_.max_iter < 1 || !(cfg_.tol > 0.0)) throw ConfigError("semilinear: invalid iteration settings");
    const bool headline = (nl_.k() == 5.0 && metric_->n() == 3) || (nl_.k() == 3.0 && metric_->n() == 4);
    if (!headline) warnings_.push_back("non-headline (k, n) = (" + std::to_string(nl_.k()) + ", " + std::to_string(metric_->n()) + ")");
}

TrajectoryRecord SemilinearProblem::homogeneous(const PhysicalData& data) const {
    return solve_reduced(reduced_, to_reduced(data, metric_->n()), {}, cfg_.steps, 1);
}

TrajectoryRecord SemilinearProblem::duhamel(const TrajectoryRecord& v) const {
    const int n = metric_->n();
    const double m = conformal_power(n);
    Forcing g = [&](double x) {
        const double r = std::pow(x, m);
        // g = x^{-2-m} F(x^m v)
        return Field(nl_.apply(r * v.interpolate(x)) / (x * x * r));
    };
    const auto size = static_cast<Eigen::Index>(metric_->size());
    const StateVector zero{metric_->x0(), Field::Zero(size), Field::Zero(size)};
    return solve_reduced(reduced_, zero, g, cfg_.steps, 1);
}

double SemilinearProblem::z_norm(const TrajectoryRecord& v) const {
    return mixed_norm(reconstruct_u(v, metric_->n()), MixedNormSpec::from_triple(z_), *metric_, &cache_);
}

PicardResult SemilinearProblem::picard_solve(const PhysicalData& data, const TrajectoryRecord* perturbation) const {
    PicardResult out;
    out.data_norm = cklab::data_norm(data, *metric_, &cache_).sum();
    const TrajectoryRecord s = homogeneous(data);
    TrajectoryRecord cur = perturbation != nullptr ? s + *perturbation : s;
    const double z0 = z_norm(s);
    out.tol_abs = cfg_.tol * z0;
    IterationHistory& h = out.history;
    if (z0 == 0.0 && perturbation == nullptr) {
        out.solution = s;
        h.z_norms.push_back(0.0);
        h.converged = true;
        h.contraction_factor = std::numeric_limits<double>::quiet_NaN();
        return out;
    }

    // iterate u^{(m)} = S + w_m; differences are taken between the w_m so
    // that S cancels exactly and small d_m stay above roundoff
    TrajectoryRecord w = perturbation != nullptr ? *perturbation : 0.0 * s;
    int rising = 0;
    for (int m = 0; m < cfg_.max_iter; ++m) {
        h.z_norms.push_back(z_norm(cur));
        TrajectoryRecord w_next;
        try {
            w_next = duhamel(cur);
        } catch (const SolverError& e) {
            h.failure = std::string("solver: ") + e.what();
            break;
        }
        const double d = z_norm(w_next - w);
        h.differences.push_back(d);
        w = std::move(w_next);
        cur = s + w;
        if (!std::isfinite(d)) {
            h.failure = "non-finite iterate difference";
            break;
        }
        if (h.differences.size() >= 2 && d > h.differences[h.differences.size() - 2]) {
            if (++rising >= 3) {
                h.failure = "diverged: d_m increased for 3 consecutive iterations";
                break;
            }
        } else {
            rising = 0;
        }
        if (d < out.tol_abs && m + 1 >= cfg_.min_iter) {
            h.converged = true;
            break;
        }
    }
    if (!h.converged && h.failure.empty()) h.failure = "no convergence within max_iter";

    // contraction factor: median of the first min_iter - 1 ratios d_{m+1}/d_m
    // above the roundoff floor; the same window at every ε
    const double floor = h.differences.empty() ? 0.0 : 1e-13 * h.differences.front();
    std::vector<double> ratios;
    const auto window = static_cast<std::size_t>(std::max(1, cfg_.min_iter - 1));
    for (std::size_t i = 0; i + 1 < h.differences.size() && ratios.size() < window; ++i) {
        if (h.differences[i + 1] > floor && h.differences[i] > 0.0) ratios.push_back(h.differences[i + 1] / h.differences[i]);
    }
    if (ratios.empty()) {
        h.contraction_factor = std::numeric_limits<double>::quiet_NaN();
    } else {
        std::sort(ratios.begin(), ratios.end());
        const std::size_t mid = ratios.size() / 2;
        h.contraction_factor = ratios.size() % 2 == 1 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
    }

    out.solution = std::move(cur);
    if (h.converged) {
        out.z_norm = z_norm(out.solution);
        out.residual = z_norm(out.solution - (s + duhamel(out.solution)));
    }
    return out;
}

HolderBound SemilinearProblem::holder_bound_check(const TrajectoryRecord& u) const {
    TrajectoryRecord fu;
    fu.x = u.x;
    for (const auto& f : u.v) fu.v.push_back(nl_.apply(f));
    HolderBound b;
    b.lhs = mixed_norm(fu, MixedNormSpec::from_dual(dual_), *metric_, &cache_);
    const double z = mixed_norm(u, MixedNormSpec::from_triple(z_), *metric_, &cache_);
    const double e = weight_exponents(dual_).x_weight->value() - weight_exponents(z_).x_weight->value();
    double sup = 0.0;
    for (double x : {metric_->x_min(), metric_->x0()}) sup = std::max(sup, std::pow(x, e));
    b.rhs = sup * std::pow(z, nl_.k());
    return b;
}

// --- diagnostics ------------------------------------------------------------------

PhysicalData operator-(const PhysicalData& a, const PhysicalData& b) { return {a.x0, a.u0 - b.u0, a.u1 - b.u1}; }
PhysicalData operator*(double c, const PhysicalData& a) { return {a.x0, c * a.u0, c * a.u1}; }

PhysicalData unit_direction(const MetricSpec& metric, std::uint64_t seed) {
    auto rng = run_rng(seed, 0);
    return sample_data(metric, BandBasis(metric, default_modes(metric)), rng, 1.0);
}

double uniqueness_check(const SemilinearProblem& problem, const PhysicalData& data, std::uint64_t perturbation_seed,
                        double scale) {
    const PicardResult base = problem.picard_solve(data);
    if (!base.history.converged) throw SolverError("uniqueness_check: no convergence (" + base.history.failure + ")");
    TrajectoryRecord delta = problem.homogeneous(unit_direction(problem.metric(), perturbation_seed));
    const double zd = problem.z_norm(delta);
    delta *= zd > 0.0 ? scale * base.data_norm / zd : 0.0;
    const PicardResult pert = problem.picard_solve(data, &delta);
    if (!pert.history.converged) {
        throw SolverError("uniqueness_check: perturbed run did not converge (" + pert.history.failure + ")");
    }
    return problem.z_norm(base.solution - pert.solution);
}

std::optional<double> lipschitz_data_dependence(const SemilinearProblem& problem, const PhysicalData& a,
                                                const PhysicalData& b) {
    const double denom = data_norm(a - b, problem.metric()).sum();
    if (denom == 0.0) return std::nullopt;
    const PicardResult ra = problem.picard_solve(a);
    const PicardResult rb = problem.picard_solve(b);
    if (!ra.history.converged || !rb.history.converged) throw SolverError("lipschitz_data_dependence: no convergence");
    return problem.z_norm(ra.solution - rb.solution) / denom;
}

EpsilonSearch auto_epsilon(const SemilinearProblem& problem, const PhysicalData& direction, int bisections) {
    EpsilonSearch out;
    auto converges = [&](double eps) {
        const bool ok = problem.picard_solve(eps * direction).history.converged;
        out.probes.emplace_back(eps, ok);
        return ok;
    };
    double lo = 0.0;
    double hi = 0.0;
    double eps = 1.0;
    if (converges(eps)) {
        lo = eps;
        for (int i = 0; i < 24 && hi == 0.0; ++i) {
            eps *= 2.0;
            if (converges(eps)) lo = eps; else hi = eps;
        }
        if (hi == 0.0) throw SolverError("auto_epsilon: no divergence found up to 2^24");
    } else {
        hi = eps;
        for (int i = 0; i < 40 && lo == 0.0; ++i) {
            eps *= 0.5;
            if (converges(eps)) lo = eps; else hi = eps;
        }
        if (lo == 0.0) throw SolverError("auto_epsilon: no convergence down to 2^-40");
    }
    for (int i = 0; i < bisections; ++i) {
        const double mid = std::sqrt(lo * hi);
        if (converges(mid)) lo = mid; else hi = mid;
    }
    out.threshold = lo;
    out.epsilon0 = lo / 4.0;
    return out;
}

SlopeResult contraction_slope(const SemilinearProblem& problem, const PhysicalData& direction, double epsilon0) {
    SlopeResult out;
    for (double eps : {epsilon0, epsilon0 / 2.0, epsilon0 / 4.0}) {
        const PicardResult r = problem.picard_solve(eps * direction);
        if (!r.history.converged) throw SolverError("contraction_slope: no convergence at eps = " + std::to_string(eps));
        out.epsilons.push_back(eps);
        out.factors.push_back(r.history.contraction_factor);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        mx += std::log(out.epsilons[i]) / 3.0;
        my += std::log(out.factors[i]) / 3.0;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double dx = std::log(out.epsilons[i]) - mx;
        sxy += dx * (std::log(out.factors[i]) - my);
        sxx += dx * dx;
    }
    out.slope = sxy / sxx;
    return out;
}

}  // namespace cklab
