#include "cklab/solver.hpp"

#include "cklab/errors.hpp"

#include <cmath>
#include <sstream>

namespace cklab {

StateVector to_reduced(const PhysicalData& data, int n) {
    const double m = conformal_power(n);
    const double x = data.x0;
    StateVector s;
    s.x = x;
    s.v = std::pow(x, -m) * data.u0;
    // x ∂ₓ u = -u1 and v_x = x^{-m-1} (x ∂ₓ u - m u)
    s.v_x = std::pow(x, -m - 1.0) * (-data.u1 - m * data.u0);
    return s;
}

PhysicalData to_physical(const StateVector& state, int n) {
    const double m = conformal_power(n);
    const double x = state.x;
    PhysicalData d;
    d.x0 = x;
    d.u0 = std::pow(x, m) * state.v;
    d.u1 = -(std::pow(x, m + 1.0) * state.v_x + m * d.u0);
    return d;
}

double TrajectoryRecord::t(std::size_t i) const { return 0.0 - std::log(x.at(i)); }

StateVector TrajectoryRecord::state(std::size_t i) const {
    return StateVector{x.at(i), v.at(i), v_x.empty() ? Field::Zero(v.at(i).size()) : v_x.at(i)};
}

Field TrajectoryRecord::interpolate(double x_query) const {
    if (v_x.size() != x.size()) throw DomainError("interpolate: trajectory has no stored derivatives");
    if (x.size() < 2) throw DomainError("interpolate: need at least two nodes");
    const double tq = -std::log(x_query);
    const double t_first = t(0);
    const double t_last = t(x.size() - 1);
    const double h = (t_last - t_first) / static_cast<double>(x.size() - 1);
    // nodes are uniform in τ
    double s = (tq - t_first) / h;
    const double slack = 1e-9;
    if (s < -slack || s > static_cast<double>(x.size() - 1) + slack) {
        std::ostringstream os;
        os << "interpolate: x = " << x_query << " outside the trajectory";
        throw DomainError(os.str());
    }
    auto k = static_cast<std::size_t>(std::floor(s));
    if (k >= x.size() - 1) k = x.size() - 2;
    const double theta = s - static_cast<double>(k);
    // dv/dτ = -x v_x
    const Field d0 = -x[k] * v_x[k];
    const Field d1 = -x[k + 1] * v_x[k + 1];
    const double h00 = (1 + 2 * theta) * (1 - theta) * (1 - theta);
    const double h10 = theta * (1 - theta) * (1 - theta);
    const double h01 = theta * theta * (3 - 2 * theta);
    const double h11 = theta * theta * (theta - 1);
    return h00 * v[k] + h10 * h * d0 + h01 * v[k + 1] + h11 * h * d1;
}

TrajectoryRecord& TrajectoryRecord::operator*=(double c) {
    for (auto& f : v) f *= c;
    for (auto& f : v_x) f *= c;
    return *this;
}

TrajectoryRecord& TrajectoryRecord::operator+=(const TrajectoryRecord& other) {
    if (other.size() != size()) throw DomainError("trajectory sum: node mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.v[i];
    if (v_x.size() == other.v_x.size()) {
        for (std::size_t i = 0; i < v_x.size(); ++i) v_x[i] += other.v_x[i];
    } else {
        v_x.clear();
    }
    return *this;
}

TrajectoryRecord& TrajectoryRecord::operator-=(const TrajectoryRecord& other) {
    if (other.size() != size()) throw DomainError("trajectory difference: node mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= other.v[i];
    if (v_x.size() == other.v_x.size()) {
        for (std::size_t i = 0; i < v_x.size(); ++i) v_x[i] -= other.v_x[i];
    } else {
        v_x.clear();
    }
    return *this;
}

TrajectoryRecord operator+(TrajectoryRecord a, const TrajectoryRecord& b) { return a += b; }
TrajectoryRecord operator-(TrajectoryRecord a, const TrajectoryRecord& b) { return a -= b; }
TrajectoryRecord operator*(double c, TrajectoryRecord a) { return a *= c; }

Forcing reduce_forcing(std::function<Field(double x)> physical, int n) {
    const double power = -2.0 - conformal_power(n);
    return [physical = std::move(physical), power](double x) -> Field { return std::pow(x, power) * physical(x); };
}

namespace {

// Coefficients of the τ-form system at one x:
//   v' = w,  w' = -(1 - a) w - x² (Δ v + V v) + x² g
struct Coefficients {
    Stencil lap;
    Field damping;  // 1 - a
    Field potential;
};

class Rhs {
public:
    Rhs(const ReducedOperator& reduced, const Forcing& forcing)
        : reduced_(reduced), forcing_(forcing), frozen_(reduced.metric().x_independent()) {
        if (frozen_) cached_ = build(reduced.metric().x0());
    }

    void operator()(double tau, const Field& v, const Field& w, Field& dv, Field& dw) const {
        const double x = std::exp(-tau);
        const Coefficients local = frozen_ ? Coefficients{} : build(x);
        const Coefficients& c = frozen_ ? cached_ : local;
        dv = w;
        Field acc = c.lap.apply(v);
        if (!frozen_) acc += c.potential.cwiseProduct(v);
        if (forcing_) acc -= forcing_(x);
        dw = -(c.damping.cwiseProduct(w)) - (x * x) * acc;
    }

    [[nodiscard]] Stencil stencil(double x) const { return frozen_ ? cached_.lap : reduced_.laplacian(x); }

private:
    [[nodiscard]] Coefficients build(double x) const {
        Coefficients c;
        c.lap = reduced_.laplacian(x);
        c.damping = Field::Ones(static_cast<Eigen::Index>(c.lap.size())) - reduced_.log_drift(x);
        c.potential = reduced_.potential(x);
        return c;
    }

    const ReducedOperator& reduced_;
    const Forcing& forcing_;
    bool frozen_;
    Coefficients cached_;
};

double energy_of(const Stencil& lap, const Field& v, const Field& v_x) {
    return lap.inner(v_x, v_x) + lap.dirichlet(v) + lap.inner(v, v);
}

}  // namespace

TrajectoryRecord integrate(const ReducedOperator& reduced, const StateVector& init, double x_end, const Forcing& forcing,
                           const IntegrateOptions& opts) {
    const auto size = static_cast<Eigen::Index>(reduced.metric().size());
    if (init.v.size() != size || init.v_x.size() != size) throw DomainError("integrate: state does not match the grid");
    if (opts.steps < 1 || opts.record_every < 1) throw ConfigError("integrate: steps and record_every must be positive");
    if (!(init.x > 0.0) || !(x_end > 0.0)) throw DomainError("integrate: x must stay positive");

    const Rhs rhs(reduced, forcing);
    const double tau0 = -std::log(init.x);
    const double tau1 = -std::log(x_end);
    const double h = (tau1 - tau0) / opts.steps;

    Field v = init.v;
    Field w = -init.x * init.v_x;  // v_τ = -x v_x

    TrajectoryRecord out;
    auto record = [&](double tau) {
        const double x = std::exp(-tau);
        out.x.push_back(x);
        out.v.push_back(v);
        if (opts.store_derivative) out.v_x.push_back(-w / x);
    };
    record(tau0);

    double e_prev = energy_of(rhs.stencil(init.x), init.v, init.v_x);
    Field k1v, k1w, k2v, k2w, k3v, k3w, k4v, k4w;
    for (int step = 1; step <= opts.steps; ++step) {
        const double tau = tau0 + (step - 1) * h;
        rhs(tau, v, w, k1v, k1w);
        rhs(tau + 0.5 * h, v + 0.5 * h * k1v, w + 0.5 * h * k1w, k2v, k2w);
        rhs(tau + 0.5 * h, v + 0.5 * h * k2v, w + 0.5 * h * k2w, k3v, k3w);
        rhs(tau + h, v + h * k3v, w + h * k3w, k4v, k4w);
        v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        w += (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);

        const double tau_new = tau0 + step * h;
        const double x_new = std::exp(-tau_new);
        if (!v.allFinite() || !w.allFinite()) {
            std::ostringstream os;
            os << "integrate: non-finite state at step " << step << " (x = " << x_new << ")";
            throw SolverError(os.str());
        }
        const double e_new = energy_of(rhs.stencil(x_new), v, -w / x_new);
        if (e_prev > 1e-300 && e_new > 10.0 * e_prev) {
            std::ostringstream os;
            os << "integrate: energy grew " << e_new / e_prev << "x in one step at step " << step << " (x = " << x_new
               << "); step size violates the stability limit";
            throw SolverError(os.str());
        }
        e_prev = e_new;
        if (step % opts.record_every == 0 || step == opts.steps) record(tau_new);
    }
    return out;
}

TrajectoryRecord solve_reduced(const ReducedOperator& reduced, const StateVector& init, const Forcing& forcing, int steps,
                               int record_every) {
    const double x0 = reduced.metric().x0();
    if (std::abs(init.x - x0) > 1e-12 * x0) throw ConfigError("solve_reduced: initial state must sit at x0");
    if (steps < 16) throw ConfigError("solve_reduced: need at least 16 steps");
    return integrate(reduced, init, reduced.metric().x_min(), forcing,
                     IntegrateOptions{steps, record_every, true});
}

EnergyReading energy(const ReducedOperator& reduced, const StateVector& state) {
    const Stencil lap = reduced.laplacian(state.x);
    return EnergyReading{state.x, lap.inner(state.v_x, state.v_x), lap.dirichlet(state.v), lap.inner(state.v, state.v)};
}

TrajectoryRecord reconstruct_u(const TrajectoryRecord& trajectory, int n) {
    const double m = conformal_power(n);
    TrajectoryRecord out = trajectory;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = out.x[i];
        const double r = std::pow(x, m);
        if (!out.v_x.empty()) out.v_x[i] = m * std::pow(x, m - 1.0) * trajectory.v[i] + r * trajectory.v_x[i];
        out.v[i] = r * trajectory.v[i];
    }
    return out;
}

}  // namespace cklab
