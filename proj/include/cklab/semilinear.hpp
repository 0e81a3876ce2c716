#pragma once

#include "cklab/norms.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cklab {

/// F_k. pure_power: F(u) = u |u|^{k-1}. sampled: piecewise linear through a
/// table on [0, u_max], extended as an odd function.
class Nonlinearity {
public:
    static Nonlinearity pure_power(double k);
    static Nonlinearity sampled(double k, std::vector<double> u, std::vector<double> f);

    [[nodiscard]] double k() const { return k_; }
    [[nodiscard]] bool is_pure_power() const { return u_.empty(); }
    [[nodiscard]] std::string form() const { return is_pure_power() ? "pure_power" : "sampled"; }
    [[nodiscard]] double operator()(double u) const;
    [[nodiscard]] double derivative(double u) const;
    [[nodiscard]] Field apply(const Field& u) const;

private:
    double k_ = 5.0;
    std::vector<double> u_;
    std::vector<double> f_;
};

struct NonlinearityCheck {
    double growth_constant = 0.0;  // max |F(u)| / |u|^k
    double min_log_slope = 0.0;    // min |u F'(u)| / |F(u)|
    double max_log_slope = 0.0;
    bool pass = false;
};

/// Samples (0, u_max] for |F(u)| <= C|u|^k and |u||F'(u)| ~ |F(u)|.
[[nodiscard]] NonlinearityCheck check_nonlinearity(const Nonlinearity& nl, double u_max, int samples = 1000);

struct SemilinearConfig {
    int steps = 1024;
    double tol = 1e-8;  // relative to ‖u^{(0)}‖_Z
    int max_iter = 25;
    int min_iter = 3;   // also the window of ratios behind the contraction factor
};

struct IterationHistory {
    std::vector<double> z_norms;      // ‖u^{(m)}‖_Z
    std::vector<double> differences;  // d_m = ‖u^{(m+1)} - u^{(m)}‖_Z
    double contraction_factor = 0.0;  // NaN when no ratio is above the noise floor
    bool converged = false;
    std::string failure;
};

struct PicardResult {
    TrajectoryRecord solution;  // reduced v with v_x at every step
    IterationHistory history;
    double z_norm = 0.0;
    double residual = 0.0;  // ‖u - S(u0,u1) - G F(u)‖_Z
    double tol_abs = 0.0;
    double data_norm = 0.0;
};

struct HolderBound {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Picard scheme u^{(m+1)} = S(u0, u1) + G F(u^{(m)}) in the space
/// Z = L^k_t L^{2k}_y with the weights of the triple (k, 2k, 1); G solves the
/// forced equation from zero data and F(u) is measured in the dual pair (1, 2).
class SemilinearProblem {
public:
    SemilinearProblem(std::shared_ptr<const MetricSpec> metric, Nonlinearity nl, SemilinearConfig cfg = {});

    [[nodiscard]] const MetricSpec& metric() const { return *metric_; }
    [[nodiscard]] const Nonlinearity& nonlinearity() const { return nl_; }
    [[nodiscard]] const SemilinearConfig& config() const { return cfg_; }
    [[nodiscard]] const AdmissibleTriple& z_triple() const { return z_; }
    [[nodiscard]] const DualPair& dual() const { return dual_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }

    [[nodiscard]] TrajectoryRecord homogeneous(const PhysicalData& data) const;
    /// G F(u) for the iterate u = x^{(n-1)/2} v.
    [[nodiscard]] TrajectoryRecord duhamel(const TrajectoryRecord& v) const;
    [[nodiscard]] double z_norm(const TrajectoryRecord& v) const;

    /// `perturbation` (reduced, same nodes) is added to the initial iterate.
    [[nodiscard]] PicardResult picard_solve(const PhysicalData& data,
                                            const TrajectoryRecord* perturbation = nullptr) const;

    /// lhs = ‖F(u)‖ in the dual norm, rhs = sup x^{e} ‖u‖_Z^k with e the
    /// difference of the two x-weights, on [x_min, x0].
    [[nodiscard]] HolderBound holder_bound_check(const TrajectoryRecord& u) const;

private:
    std::shared_ptr<const MetricSpec> metric_;
    Nonlinearity nl_;
    SemilinearConfig cfg_;
    AdmissibleTriple z_;
    DualPair dual_;
    ReducedOperator reduced_;
    SpectralCache cache_;
    std::vector<std::string> warnings_;
};

/// ‖u_final - u_final_perturbed‖_Z with the perturbed run started from
/// u^{(0)} + δ, δ a random homogeneous solution scaled to ‖δ‖_Z = scale·ε.
/// Throws SolverError when either run fails to converge.
[[nodiscard]] double uniqueness_check(const SemilinearProblem& problem, const PhysicalData& data,
                                      std::uint64_t perturbation_seed, double scale = 0.1);

/// ‖u_a - u_b‖_Z / ‖data_a - data_b‖; empty for identical data.
[[nodiscard]] std::optional<double> lipschitz_data_dependence(const SemilinearProblem& problem, const PhysicalData& a,
                                                              const PhysicalData& b);

PhysicalData operator-(const PhysicalData& a, const PhysicalData& b);
PhysicalData operator*(double c, const PhysicalData& a);

struct EpsilonSearch {
    double threshold = 0.0;  // largest ε found to converge
    double epsilon0 = 0.0;   // threshold / 4
    std::vector<std::pair<double, bool>> probes;
};

/// Bisection in log ε for the convergence threshold along the unit data
/// direction `direction` (data_norm = 1).
[[nodiscard]] EpsilonSearch auto_epsilon(const SemilinearProblem& problem, const PhysicalData& direction,
                                         int bisections = 12);

struct SlopeResult {
    std::vector<double> epsilons;
    std::vector<double> factors;
    double slope = 0.0;  // least-squares slope of log factor vs log ε
};

/// Contraction factor at ε0, ε0/2, ε0/4 along `direction`.
[[nodiscard]] SlopeResult contraction_slope(const SemilinearProblem& problem, const PhysicalData& direction,
                                            double epsilon0);

/// Unit data direction used by the semilinear experiments.
[[nodiscard]] PhysicalData unit_direction(const MetricSpec& metric, std::uint64_t seed);

}  // namespace cklab
