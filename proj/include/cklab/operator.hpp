#pragma once

#include "cklab/geometry.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cklab {

// Sign convention, fixed here for the whole library. Δ_h is the positive
// Laplacian and
//
//   □ u  = x² ∂ₓ²u + (1 - n) x ∂ₓu + (x ∂ₓ√h / √h) x ∂ₓu + x² Δ_h u,
//   P    = □ + (n² - 1)/4,
//   P̄ v  = ∂ₓ²v + (∂ₓ√h / √h) ∂ₓv + Δ_h v + V v,
//   V    = ((n - 1)/2) (∂ₓ√h / √h) / x,
//
// so that x^{-(n-1)/2} P (x^{(n-1)/2} v) = x² P̄ v. On an exact product
// cylinder the reduced equation reads ∂ₓ²v + Δ_h v = g.

/// Value and first two x-derivatives of a field at one x.
struct FieldJet {
    Field value;
    Field dx;
    Field dxx;
};

[[nodiscard]] constexpr double klein_gordon_shift(int n) { return (n * n - 1) / 4.0; }
/// Exponent of r(x) = x^{(n-1)/2}.
[[nodiscard]] constexpr double conformal_power(int n) { return (n - 1) / 2.0; }

/// The d'Alembertian of g = (-dx² + h)/x² in the boundary chart. Its density
/// drift is differentiated numerically from the volume density (centred
/// difference of step drift_step), independently of the closed form used by
/// the reduced operator.
class BoundaryChartOperator {
public:
    explicit BoundaryChartOperator(std::shared_ptr<const MetricSpec> metric, double drift_step = 0.0);

    [[nodiscard]] const MetricSpec& metric() const { return *metric_; }
    [[nodiscard]] std::shared_ptr<const MetricSpec> metric_ptr() const { return metric_; }
    [[nodiscard]] int n() const { return metric_->n(); }
    [[nodiscard]] double drift_step() const { return drift_step_; }

    [[nodiscard]] Stencil laplacian(double x) const { return metric_->stencil(x); }
    /// x ∂ₓ√h / √h at every cell.
    [[nodiscard]] Field density_drift(double x) const;
    [[nodiscard]] Field box(double x, const FieldJet& u) const;
    /// (□ + (n²-1)/4) u
    [[nodiscard]] Field apply(double x, const FieldJet& u) const;

private:
    std::shared_ptr<const MetricSpec> metric_;
    double drift_step_;
};

/// P̄ = □_ḡ + V on the compact cylinder ḡ = -dx² + h(x).
class ReducedOperator {
public:
    ReducedOperator(std::shared_ptr<const MetricSpec> metric, bool singular, std::vector<std::string> warnings);

    [[nodiscard]] const MetricSpec& metric() const { return *metric_; }
    [[nodiscard]] std::shared_ptr<const MetricSpec> metric_ptr() const { return metric_; }
    [[nodiscard]] int n() const { return metric_->n(); }
    [[nodiscard]] bool singular_potential() const { return singular_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }

    [[nodiscard]] Stencil laplacian(double x) const { return metric_->stencil(x); }
    /// ∂ₓ√h / √h (the first-order coefficient of □_ḡ).
    [[nodiscard]] Field drift(double x) const { return metric_->log_density_derivative(x); }
    /// x ∂ₓ√h / √h, the drift as it appears in τ = -log x.
    [[nodiscard]] Field log_drift(double x) const { return x * metric_->log_density_derivative(x); }
    /// V(x). Defined on [0, x0]; when the potential is singular the argument is
    /// clamped to x_min.
    [[nodiscard]] Field potential(double x) const;
    [[nodiscard]] Field apply(double x, const FieldJet& v) const;

private:
    std::shared_ptr<const MetricSpec> metric_;
    bool singular_;
    std::vector<std::string> warnings_;
};

/// Builds P̄ from P. Emits a singular-potential warning when the metric fails
/// the short-range gate (tol 1e-8).
[[nodiscard]] ReducedOperator conjugate(const BoundaryChartOperator& op);

/// ‖r⁻¹ P (r v) - x² P̄ v‖ / ‖v‖ in L²(dh) at x. Requires ‖v‖ > 0.
[[nodiscard]] double conjugation_identity_residual(const BoundaryChartOperator& op, const ReducedOperator& reduced,
                                                   const FieldJet& v, double x);

}  // namespace cklab
