#include "cklab/operator.hpp"

#include "cklab/errors.hpp"

#include <cmath>
#include <sstream>

namespace cklab {

BoundaryChartOperator::BoundaryChartOperator(std::shared_ptr<const MetricSpec> metric, double drift_step)
    : metric_(std::move(metric)), drift_step_(drift_step) {
    if (!metric_) throw ConfigError("operator: null metric");
    if (drift_step_ <= 0.0) drift_step_ = metric_->x0() / metric_->grid();
}

Field BoundaryChartOperator::density_drift(double x) const {
    const double d = drift_step_;
    if (x - d <= 0.0) {
        // one-sided, second order
        const Field l0 = metric_->density(x).array().log();
        const Field l1 = metric_->density(x + d).array().log();
        const Field l2 = metric_->density(x + 2 * d).array().log();
        return x * (-3.0 * l0 + 4.0 * l1 - l2) / (2.0 * d);
    }
    const Field lp = metric_->density(x + d).array().log();
    const Field lm = metric_->density(x - d).array().log();
    return x * (lp - lm) / (2.0 * d);
}

Field BoundaryChartOperator::box(double x, const FieldJet& u) const {
    const int n = metric_->n();
    const Field xu_x = x * u.dx;
    return x * x * u.dxx + (1.0 - n) * xu_x + density_drift(x).cwiseProduct(xu_x) + x * x * laplacian(x).apply(u.value);
}

Field BoundaryChartOperator::apply(double x, const FieldJet& u) const {
    return box(x, u) + klein_gordon_shift(metric_->n()) * u.value;
}

ReducedOperator::ReducedOperator(std::shared_ptr<const MetricSpec> metric, bool singular, std::vector<std::string> warnings)
    : metric_(std::move(metric)), singular_(singular), warnings_(std::move(warnings)) {}

Field ReducedOperator::potential(double x) const {
    if (singular_ && x < metric_->x_min()) x = metric_->x_min();
    return conformal_power(metric_->n()) * metric_->log_density_derivative_over_x(x);
}

Field ReducedOperator::apply(double x, const FieldJet& v) const {
    return v.dxx + drift(x).cwiseProduct(v.dx) + laplacian(x).apply(v.value) + potential(x).cwiseProduct(v.value);
}

ReducedOperator conjugate(const BoundaryChartOperator& op) {
    const auto gate = check_short_range(op.metric(), 1e-8);
    std::vector<std::string> warnings;
    if (!gate.pass) {
        std::ostringstream os;
        os << "singular-potential: metric '" << op.metric().name() << "' has a linear term in x (|∂ₓh(0)| = "
           << gate.max_linear_coefficient << "); the reduced potential grows like 1/x and is capped at x_min = "
           << op.metric().x_min();
        warnings.push_back(os.str());
    }
    return ReducedOperator(op.metric_ptr(), !gate.pass, std::move(warnings));
}

double conjugation_identity_residual(const BoundaryChartOperator& op, const ReducedOperator& reduced, const FieldJet& v,
                                     double x) {
    const Stencil lap = op.laplacian(x);
    const double v_norm = std::sqrt(lap.inner(v.value, v.value));
    if (!(v_norm > 0.0)) throw DomainError("conjugation_identity_residual: requires a nonzero field");

    const double m = conformal_power(op.n());
    const double r = std::pow(x, m);
    const double r1 = m * std::pow(x, m - 1.0);
    const double r2 = m * (m - 1.0) * std::pow(x, m - 2.0);
    FieldJet rv{r * v.value, r1 * v.value + r * v.dx, r2 * v.value + 2.0 * r1 * v.dx + r * v.dxx};

    const Field lhs = op.apply(x, rv) / r;
    const Field rhs = x * x * reduced.apply(x, v);
    const Field diff = lhs - rhs;
    return std::sqrt(lap.inner(diff, diff)) / v_norm;
}

}  // namespace cklab
