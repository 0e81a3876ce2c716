#include "cklab/errors.hpp"
#include "cklab/sampling.hpp"
#include "cklab/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace cklab;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const MetricSpec> make(MetricDefinition def) { return std::make_shared<const MetricSpec>(std::move(def)); }

// Torus(1) with h = dθ²: v = cos θ cos(ω (x - x0)) solves ∂ₓ²v + Δv = 0 for
// ω² the eigenvalue of cos θ (1 in the continuum, (4/Δ²) sin²(Δ/2) on the grid).
struct Manufactured {
    std::shared_ptr<const MetricSpec> metric;
    ReducedOperator reduced;
    Field mode;
    double omega_grid;
};

Manufactured manufactured(int grid, double x_min) {
    auto m = make(product_chart(1, grid, CrossSection::Torus, 1.0, x_min));
    const double d = 2 * kPi / grid;
    Field mode = m->sample([](const Point& y) { return std::cos(y[0]); });
    return Manufactured{m, conjugate(BoundaryChartOperator(m)), mode, 2.0 / d * std::sin(d / 2)};
}

double final_error(const Manufactured& p, int steps, double omega) {
    const StateVector init{1.0, p.mode, Field::Zero(p.mode.size())};
    const TrajectoryRecord tr = solve_reduced(p.reduced, init, {}, steps, steps);
    const double x = tr.x.back();
    return (tr.v.back() - p.mode * std::cos(omega * (x - 1.0))).cwiseAbs().maxCoeff();
}

StateVector random_state(const MetricSpec& m, std::uint64_t seed) {
    auto rng = run_rng(seed, 0);
    return to_reduced(sample_data(m, BandBasis(m, default_modes(m)), rng), m.n());
}

}  // namespace

TEST(Solver, ManufacturedAgainstSemiDiscreteSolution) {
    const Manufactured p = manufactured(128, std::exp(-6.0));
    EXPECT_LE(final_error(p, 4096, p.omega_grid), 1e-6);
}

TEST(Solver, FourthOrderInTau) {
    const Manufactured p = manufactured(32, std::exp(-6.0));
    const double e1 = final_error(p, 64, p.omega_grid);
    const double e2 = final_error(p, 128, p.omega_grid);
    const double e3 = final_error(p, 256, p.omega_grid);
    EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3);
    EXPECT_NEAR(std::log2(e2 / e3), 4.0, 0.3);
}

TEST(Solver, SecondOrderInTheta) {
    double prev = 0.0;
    for (int grid : {16, 32, 64}) {
        const double e = final_error(manufactured(grid, std::exp(-6.0)), 2048, 1.0);
        if (prev > 0.0) EXPECT_NEAR(std::log2(prev / e), 2.0, 0.3) << grid;
        prev = e;
    }
}

TEST(Solver, ZeroStaysZero) {
    const auto m = make(desitter_chart(3, 16, 1.0, 0.01));
    const ReducedOperator r = conjugate(BoundaryChartOperator(m));
    const Field z = Field::Zero(static_cast<Eigen::Index>(m->size()));
    const TrajectoryRecord tr = solve_reduced(r, StateVector{1.0, z, z}, {}, 64);
    for (const auto& v : tr.v) EXPECT_EQ(v.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Solver, Linearity) {
    const auto m = make(desitter_chart(3, 24, 1.0, 0.01));
    const ReducedOperator r = conjugate(BoundaryChartOperator(m));
    const StateVector a = random_state(*m, 1), b = random_state(*m, 2);
    const StateVector c{1.0, 2.0 * a.v - 3.0 * b.v, 2.0 * a.v_x - 3.0 * b.v_x};
    const TrajectoryRecord ta = solve_reduced(r, a, {}, 256), tb = solve_reduced(r, b, {}, 256);
    const TrajectoryRecord tc = solve_reduced(r, c, {}, 256);
    const TrajectoryRecord diff = tc - (2.0 * ta - 3.0 * tb);
    for (std::size_t i = 0; i < diff.size(); ++i) EXPECT_LE(diff.v[i].cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Solver, TimeReversible) {
    const auto m = make(product_chart(3, 32, CrossSection::ZonalSphere, 1.0, 0.01));
    const ReducedOperator r = conjugate(BoundaryChartOperator(m));
    const StateVector init = random_state(*m, 4);
    const TrajectoryRecord fwd = integrate(r, init, 0.1, {}, IntegrateOptions{1024, 1024, true});
    const TrajectoryRecord back = integrate(r, fwd.state(fwd.size() - 1), 1.0, {}, IntegrateOptions{1024, 1024, true});
    EXPECT_LE((back.v.back() - init.v).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_NEAR(back.x.back(), 1.0, 1e-14);
}

TEST(Solver, RichardsonInStepsOnDeSitter) {
    const auto m = make(desitter_chart(3, 32, 1.0, std::exp(-6.0)));
    const ReducedOperator r = conjugate(BoundaryChartOperator(m));
    const StateVector init = random_state(*m, 9);
    auto end = [&](int steps) { return solve_reduced(r, init, {}, steps, steps).v.back(); };
    const Field a = end(256), b = end(512), c = end(1024);
    const double ratio = (a - b).cwiseAbs().maxCoeff() / (b - c).cwiseAbs().maxCoeff();
    EXPECT_NEAR(ratio, 16.0, 2.0);
}

TEST(Solver, EnergyOfConstantField) {
    const auto m = make(desitter_chart(3, 16, 1.0, 0.01));
    const ReducedOperator r = conjugate(BoundaryChartOperator(m));
    const double c = 1.7, x = 0.5;
    const auto n = static_cast<Eigen::Index>(m->size());
    const EnergyReading e = energy(r, StateVector{x, Field::Constant(n, c), Field::Zero(n)});
    EXPECT_EQ(e.kinetic, 0.0);
    EXPECT_NEAR(e.gradient, 0.0, 1e-20);
    EXPECT_NEAR(e.potential_l2, c * c * m->stencil(x).weight.sum(), 1e-12);
}

TEST(Solver, ConservationOnProductCylinder) {
    const auto m = make(product_chart(3, 64, CrossSection::ZonalSphere, 1.0, std::exp(-6.0)));
    const ReducedOperator r = conjugate(BoundaryChartOperator(m));
    const TrajectoryRecord tr = solve_reduced(r, random_state(*m, 3), {}, 4096, 16);
    const double e0 = energy(r, tr.state(0)).total();
    double drift = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) drift = std::max(drift, std::abs(energy(r, tr.state(i)).total() / e0 - 1));
    EXPECT_LE(drift, 1e-3);
}

TEST(Solver, ReconstructU) {
    TrajectoryRecord t;
    t.x = {1.0, 0.25};
    t.v = {Field::Ones(3), Field::Ones(3)};
    t.v_x = {Field::Zero(3), Field::Zero(3)};
    const TrajectoryRecord u = reconstruct_u(t, 3);
    EXPECT_DOUBLE_EQ(u.v[1][0], 0.25);
    EXPECT_DOUBLE_EQ(u.v_x[1][0], 1.0);  // ∂ₓ(x · 1)
    const TrajectoryRecord same = reconstruct_u(t, 1);
    EXPECT_EQ(same.v[1], t.v[1]);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(u.v[i] / u.x[i], t.v[i]);
}

TEST(Solver, PhysicalReducedRoundTrip) {
    const auto m = make(desitter_chart(3, 16, 0.5, 0.01));
    auto rng = run_rng(1, 0);
    const PhysicalData d = sample_data(*m, BandBasis(*m, 5), rng);
    const PhysicalData back = to_physical(to_reduced(d, 3), 3);
    EXPECT_LE((back.u0 - d.u0).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((back.u1 - d.u1).cwiseAbs().maxCoeff(), 1e-14);
    // u1 = -x ∂ₓ u with u = x v: v_x = (x u_x - u)/x² = (-u1 - u0)/x²
    const StateVector s = to_reduced(d, 3);
    EXPECT_LE((s.v_x - (-d.u1 - d.u0) / 0.25).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Solver, InterpolationMatchesNodesAndFinerRun) {
    const auto m = make(desitter_chart(3, 16, 1.0, 0.05));
    const ReducedOperator r = conjugate(BoundaryChartOperator(m));
    const StateVector init = random_state(*m, 5);
    const TrajectoryRecord coarse = solve_reduced(r, init, {}, 256, 1);
    const TrajectoryRecord fine = solve_reduced(r, init, {}, 512, 1);
    EXPECT_LE((coarse.interpolate(coarse.x[17]) - coarse.v[17]).cwiseAbs().maxCoeff(), 1e-15);
    // fine node 35 sits between coarse nodes 17 and 18
    EXPECT_LE((coarse.interpolate(fine.x[35]) - fine.v[35]).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_THROW((void)coarse.interpolate(2.0), DomainError);
}

TEST(Solver, StabilityViolationAborts) {
    const auto m = make(product_chart(3, 256, CrossSection::ZonalSphere, 1.0, std::exp(-6.0)));
    const ReducedOperator r = conjugate(BoundaryChartOperator(m));
    EXPECT_THROW((void)solve_reduced(r, random_state(*m, 1), {}, 16), SolverError);
}

TEST(Solver, Preconditions) {
    const auto m = make(desitter_chart(3, 16, 1.0, 0.01));
    const ReducedOperator r = conjugate(BoundaryChartOperator(m));
    StateVector s = random_state(*m, 1);
    EXPECT_THROW((void)solve_reduced(r, s, {}, 8), ConfigError);
    s.x = 0.5;
    EXPECT_THROW((void)solve_reduced(r, s, {}, 64), ConfigError);
}

TEST(Solver, ForcingEntersReducedEquation) {
    // constant g = c, zero data: ∂ₓ²v = c, v = c(x - x0)²/2
    const auto m = make(product_chart(1, 8, CrossSection::Torus, 1.0, 0.1));
    const ReducedOperator r = conjugate(BoundaryChartOperator(m));
    const auto n = static_cast<Eigen::Index>(m->size());
    const double c = 0.7;
    const TrajectoryRecord tr = solve_reduced(r, StateVector{1.0, Field::Zero(n), Field::Zero(n)},
                                              [&](double) { return Field::Constant(n, c); }, 512, 512);
    const double x = tr.x.back();
    EXPECT_NEAR(tr.v.back()[0], 0.5 * c * (x - 1.0) * (x - 1.0), 1e-10);
    // reduce_forcing: g = x^{-2-(n-1)/2} f
    const Forcing g = reduce_forcing([&](double) { return Field::Constant(n, 1.0); }, 3);
    EXPECT_NEAR(g(0.5)[0], std::pow(0.5, -3.0), 1e-12);
}
