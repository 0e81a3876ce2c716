#pragma once

#include "cklab/exponents.hpp"
#include "cklab/solver.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace cklab {

/// L^p in t of W^{σ,q}(dh / x^n) with weight e^{t_weight t} dt.
struct MixedNormSpec {
    Exponent p = Exponent::infinite();
    double q = 2.0;
    double sigma = 0.0;
    double t_weight = 0.0;
    int measure_power = 0;

    /// Left-hand side of the Strichartz estimates: (p, q, 1 - s, p(s - 1/2), n).
    static MixedNormSpec from_triple(const AdmissibleTriple& triple);
    /// Forcing norm: (p', q', 1 - s, p'(s - 1/2), n).
    static MixedNormSpec from_dual(const DualPair& dual);
    [[nodiscard]] std::string key() const;
};

/// W-orthonormal eigenpairs of the discrete Δ_{h(x)}.
struct Eigenbasis {
    double x = 0.0;
    Field eigenvalues;       // ascending, clamped at 0
    Eigen::MatrixXd modes;   // columns φ_j with sum_i W_i φ_j(i) φ_k(i) = δ_jk
    Field weight;            // W at x

    /// (1 + x² Δ)^{σ/2} u
    [[nodiscard]] Field multiplier(const Field& u, double sigma) const;
    /// Coefficients <u, φ_j>_W.
    [[nodiscard]] Field coefficients(const Field& u) const;
};

[[nodiscard]] Eigenbasis eigenbasis(const MetricSpec& metric, double x);

/// Per-node eigendecompositions, built on first use and shared read-only.
class SpectralCache {
public:
    explicit SpectralCache(std::shared_ptr<const MetricSpec> metric) : metric_(std::move(metric)) {}
    [[nodiscard]] std::shared_ptr<const Eigenbasis> at(double x) const;

private:
    std::shared_ptr<const MetricSpec> metric_;
    mutable std::mutex mutex_;
    mutable std::map<double, std::shared_ptr<const Eigenbasis>> cache_;
};

/// (∫ |(1 + x²Δ)^{σ/2} u|^q dh / x^n)^{1/q}; DomainError unless 1 < q < inf.
[[nodiscard]] double sobolev_norm(const Field& field, double x, double sigma, double q, const MetricSpec& metric,
                                  const SpectralCache* cache = nullptr);

/// Spatial norm at every node of the trajectory.
[[nodiscard]] std::vector<double> spatial_norms(const TrajectoryRecord& traj, double sigma, double q, int measure_power,
                                                const MetricSpec& metric, const SpectralCache* cache = nullptr);

/// Trapezoidal rule in t with the exponential weight integrated exactly on
/// each panel. `values` are F(t_i) >= 0 at nodes t_i.
[[nodiscard]] double weighted_integral(const std::vector<double>& t, const std::vector<double>& values, double weight);

/// Mixed norm of a trajectory of u-values (p = inf: max over nodes).
[[nodiscard]] double mixed_norm(const TrajectoryRecord& traj, const MixedNormSpec& spec, const MetricSpec& metric,
                                const SpectralCache* cache = nullptr);

struct DataNorm {
    double h1 = 0.0;
    double l2 = 0.0;
    [[nodiscard]] double sum() const { return h1 + l2; }
};

/// ‖u0‖_{H¹(dh/x0^n)} and ‖u1‖_{L²(dh/x0^n)}.
[[nodiscard]] DataNorm data_norm(const PhysicalData& data, const MetricSpec& metric,
                                 const SpectralCache* cache = nullptr);

}  // namespace cklab
