#include "cklab/norms.hpp"

#include "cklab/errors.hpp"
#include "cklab/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace cklab {

MixedNormSpec MixedNormSpec::from_triple(const AdmissibleTriple& triple) {
    const auto w = weight_exponents(triple);
    MixedNormSpec s;
    s.p = triple.p;
    s.q = triple.q.value();
    s.sigma = 1.0 - triple.s.value();
    s.t_weight = w.t_weight ? w.t_weight->value() : 0.0;
    s.measure_power = triple.n;
    return s;
}

MixedNormSpec MixedNormSpec::from_dual(const DualPair& dual) {
    const auto w = weight_exponents(dual);
    MixedNormSpec s;
    s.p = dual.p_prime;
    s.q = dual.q_prime.value();
    s.sigma = 1.0 - dual.s.value();
    s.t_weight = w.t_weight ? w.t_weight->value() : 0.0;
    s.measure_power = dual.n;
    return s;
}

std::string MixedNormSpec::key() const {
    std::ostringstream os;
    os.precision(17);
    os << "L" << p.str() << "_W" << sigma << "," << q;
    return os.str();
}

Field Eigenbasis::coefficients(const Field& u) const { return modes.transpose() * weight.cwiseProduct(u); }

Field Eigenbasis::multiplier(const Field& u, double sigma) const {
    if (sigma == 0.0) return u;
    const Field factors = (1.0 + x * x * eigenvalues.array()).pow(0.5 * sigma).matrix();
    return modes * factors.cwiseProduct(coefficients(u));
}

Eigenbasis eigenbasis(const MetricSpec& metric, double x) {
    const Stencil lap = metric.stencil(x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap.symmetric_dense());
    if (solver.info() != Eigen::Success) throw DomainError("eigenbasis: eigendecomposition failed");
    Eigenbasis b;
    b.x = x;
    b.weight = lap.weight;
    b.eigenvalues = solver.eigenvalues().cwiseMax(0.0);
    b.modes = lap.weight.cwiseSqrt().cwiseInverse().asDiagonal() * solver.eigenvectors();
    return b;
}

std::shared_ptr<const Eigenbasis> SpectralCache::at(double x) const {
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(x); it != cache_.end()) return it->second;
    }
    auto basis = std::make_shared<const Eigenbasis>(eigenbasis(*metric_, x));
    std::lock_guard lock(mutex_);
    return cache_.emplace(x, std::move(basis)).first->second;
}

namespace {

double spatial_norm(const Field& field, double x, double sigma, double q, int measure_power, const MetricSpec& metric,
                    const SpectralCache* cache) {
    if (!(q > 1.0) || !std::isfinite(q)) {
        std::ostringstream os;
        os << "sobolev_norm: q = " << q << " outside (1, inf)";
        throw DomainError(os.str());
    }
    Field weight;
    Field applied;
    if (sigma == 0.0) {
        weight = metric.stencil(x).weight;
        applied = field;
    } else if (cache) {
        const auto basis = cache->at(x);
        weight = basis->weight;
        applied = basis->multiplier(field, sigma);
    } else {
        const Eigenbasis basis = eigenbasis(metric, x);
        weight = basis.weight;
        applied = basis.multiplier(field, sigma);
    }
    const double sum = kernels::weighted_power_sum({weight.data(), (std::size_t)weight.size()},
                                                   {applied.data(), (std::size_t)applied.size()}, q);
    return std::pow(sum * std::pow(x, -measure_power), 1.0 / q);
}

// ∫_0^1 (1-s) e^{a s} ds and ∫_0^1 s e^{a s} ds.
std::pair<double, double> panel_moments(double a) {
    if (std::abs(a) < 0.5) {
        double phi0 = 0.0;
        double phi1 = 0.0;
        double term = 1.0;  // a^k / k!
        for (int k = 0; k < 30; ++k) {
            phi0 += term / ((k + 1.0) * (k + 2.0));
            phi1 += term / (k + 2.0);
            term *= a / (k + 1.0);
        }
        return {phi0, phi1};
    }
    const double ea = std::exp(a);
    const double phi1 = (ea * (a - 1.0) + 1.0) / (a * a);
    const double phi0 = (ea - 1.0) / a - phi1;
    return {phi0, phi1};
}

}  // namespace

double sobolev_norm(const Field& field, double x, double sigma, double q, const MetricSpec& metric,
                    const SpectralCache* cache) {
    return spatial_norm(field, x, sigma, q, metric.n(), metric, cache);
}

std::vector<double> spatial_norms(const TrajectoryRecord& traj, double sigma, double q, int measure_power,
                                  const MetricSpec& metric, const SpectralCache* cache) {
    std::vector<double> out(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out[i] = spatial_norm(traj.v[i], traj.x[i], sigma, q, measure_power, metric, cache);
        if (!std::isfinite(out[i])) {
            std::ostringstream os;
            os << "mixed_norm: non-finite spatial norm at node " << i << " (x = " << traj.x[i] << ")";
            throw DomainError(os.str());
        }
    }
    return out;
}

double weighted_integral(const std::vector<double>& t, const std::vector<double>& values, double weight) {
    if (t.size() != values.size()) throw DomainError("weighted_integral: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double lo = std::min(t[i], t[i + 1]);
        const double hi = std::max(t[i], t[i + 1]);
        const double f_lo = t[i] <= t[i + 1] ? values[i] : values[i + 1];
        const double f_hi = t[i] <= t[i + 1] ? values[i + 1] : values[i];
        const double h = hi - lo;
        const auto [phi0, phi1] = panel_moments(weight * h);
        total += h * std::exp(weight * lo) * (f_lo * phi0 + f_hi * phi1);
    }
    return total;
}

double mixed_norm(const TrajectoryRecord& traj, const MixedNormSpec& spec, const MetricSpec& metric,
                  const SpectralCache* cache) {
    if (traj.size() < 2) throw DomainError("mixed_norm: trajectory needs at least two nodes");
    const auto norms = spatial_norms(traj, spec.sigma, spec.q, spec.measure_power, metric, cache);
    if (spec.p.is_infinite()) return *std::max_element(norms.begin(), norms.end());
    const double p = spec.p.value();
    std::vector<double> t(traj.size());
    std::vector<double> powered(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        t[i] = traj.t(i);
        powered[i] = std::pow(norms[i], p);
    }
    return std::pow(weighted_integral(t, powered, spec.t_weight), 1.0 / p);
}

DataNorm data_norm(const PhysicalData& data, const MetricSpec& metric, const SpectralCache* cache) {
    return DataNorm{sobolev_norm(data.u0, data.x0, 1.0, 2.0, metric, cache),
                    sobolev_norm(data.u1, data.x0, 0.0, 2.0, metric, cache)};
}

}  // namespace cklab
