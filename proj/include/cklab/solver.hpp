#pragma once

#include "cklab/operator.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace cklab {

/// Reduced Cauchy data at x: v = x^{-(n-1)/2} u and its x-derivative.
struct StateVector {
    double x = 1.0;
    Field v;
    Field v_x;
};

/// Data for the original equation at x0 = e^{-t0}: u and ∂_t u = -x ∂ₓ u.
struct PhysicalData {
    double x0 = 1.0;
    Field u0;
    Field u1;
};

[[nodiscard]] StateVector to_reduced(const PhysicalData& data, int n);
[[nodiscard]] PhysicalData to_physical(const StateVector& state, int n);

/// Sampled solution. Nodes are ordered in the direction of integration
/// (x decreasing for the usual x0 -> x_min solve).
struct TrajectoryRecord {
    std::vector<double> x;
    std::vector<Field> v;
    std::vector<Field> v_x;  // empty when derivatives were not stored

    [[nodiscard]] std::size_t size() const { return x.size(); }
    [[nodiscard]] double t(std::size_t i) const;
    /// Cubic Hermite interpolation in τ = -log x; needs stored derivatives.
    [[nodiscard]] Field interpolate(double x_query) const;
    [[nodiscard]] StateVector state(std::size_t i) const;

    TrajectoryRecord& operator*=(double c);
    TrajectoryRecord& operator+=(const TrajectoryRecord& other);
    TrajectoryRecord& operator-=(const TrajectoryRecord& other);
};

[[nodiscard]] TrajectoryRecord operator+(TrajectoryRecord a, const TrajectoryRecord& b);
[[nodiscard]] TrajectoryRecord operator-(TrajectoryRecord a, const TrajectoryRecord& b);
[[nodiscard]] TrajectoryRecord operator*(double c, TrajectoryRecord a);

struct EnergyReading {
    double x = 0.0;
    double kinetic = 0.0;       // ∫ |∂ₓ v|² dh
    double gradient = 0.0;      // ∫ |∇v|²_h dh
    double potential_l2 = 0.0;  // ∫ |v|² dh

    [[nodiscard]] double total() const { return kinetic + gradient; }
};

/// Reduced right-hand side g(x) of P̄ v = g.
using Forcing = std::function<Field(double x)>;

/// g = x^{-2-(n-1)/2} f for a forcing f of the original equation P u = f.
[[nodiscard]] Forcing reduce_forcing(std::function<Field(double x)> physical, int n);

struct IntegrateOptions {
    int steps = 1024;
    int record_every = 4;  // quadrature node stride
    bool store_derivative = true;
};

/// Classical RK4 method of lines for (v, v_τ) in τ = -log x with uniform
/// steps from init.x to x_end (either direction). Throws SolverError on a
/// non-finite state or when the energy grows more than tenfold in one step.
[[nodiscard]] TrajectoryRecord integrate(const ReducedOperator& reduced, const StateVector& init, double x_end,
                                         const Forcing& forcing, const IntegrateOptions& opts);

/// integrate() from x0 to x_min; requires init.x == x0 and steps >= 16.
[[nodiscard]] TrajectoryRecord solve_reduced(const ReducedOperator& reduced, const StateVector& init,
                                             const Forcing& forcing, int steps, int record_every = 4);

[[nodiscard]] EnergyReading energy(const ReducedOperator& reduced, const StateVector& state);

/// u = x^{(n-1)/2} v at every node (v_x by the product rule).
[[nodiscard]] TrajectoryRecord reconstruct_u(const TrajectoryRecord& trajectory, int n);

}  // namespace cklab
