#include "cklab/errors.hpp"
#include "cklab/norms.hpp"
#include "cklab/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cklab;

namespace {

std::shared_ptr<const MetricSpec> make(MetricDefinition def) { return std::make_shared<const MetricSpec>(std::move(def)); }

// ∫_0^T e^{a t} (1 + 2t) dt
double exact_linear(double a, double T) {
    if (a == 0.0) return T + T * T;
    const double e = std::exp(a * T);
    return (e - 1) / a + 2 * (T * e / a - (e - 1) / (a * a));
}

}  // namespace

TEST(Norms, WeightedIntegralExactForPiecewiseLinear) {
    const std::vector<double> t{0.0, 0.3, 0.35, 1.1, 2.0};
    std::vector<double> f;
    for (double s : t) f.push_back(1 + 2 * s);
    for (double a : {0.0, 1e-3, 0.7, 2.5, -1.5}) {
        EXPECT_NEAR(weighted_integral(t, f, a), exact_linear(a, 2.0), 1e-10 * exact_linear(a, 2.0)) << a;
    }
    // node order does not matter
    const std::vector<double> tr(t.rbegin(), t.rend()), fr(f.rbegin(), f.rend());
    EXPECT_NEAR(weighted_integral(tr, fr, 0.7), exact_linear(0.7, 2.0), 1e-12);
}

TEST(Norms, LebesgueNormOfConstant) {
    const auto m = make(desitter_chart(3, 32, 1.0, 0.01));
    const auto n = static_cast<Eigen::Index>(m->size());
    const double x = 0.4, c = 2.0;
    const double vol = m->stencil(x).weight.sum();
    EXPECT_NEAR(sobolev_norm(Field::Constant(n, c), x, 0.0, 2.0, *m), c * std::sqrt(vol / std::pow(x, 3)), 1e-12);
    EXPECT_NEAR(sobolev_norm(Field::Constant(n, c), x, 0.0, 10.0, *m), c * std::pow(vol / std::pow(x, 3), 0.1), 1e-12);
    // Δ const = 0, so every Sobolev order agrees on constants
    EXPECT_NEAR(sobolev_norm(Field::Constant(n, c), x, 1.0, 2.0, *m), c * std::sqrt(vol / std::pow(x, 3)), 1e-9);
}

TEST(Norms, SpectralMultiplierMatchesStencil) {
    const auto m = make(desitter_chart(3, 40, 1.0, 0.01));
    auto rng = run_rng(2, 0);
    const double x = 0.7;
    const Field u = sample_data(*m, BandBasis(*m, 10), rng).u0;
    const Stencil s = m->stencil(x);
    const double w = 1.0 / std::pow(x, 3);
    // σ = 2: (1 + x²Δ) u
    const Field direct = u + x * x * s.apply(u);
    EXPECT_NEAR(sobolev_norm(u, x, 2.0, 2.0, *m), std::sqrt(w * s.inner(direct, direct)), 1e-9);
    // σ = 1, q = 2: ‖u‖² + x² ∫|∇u|²
    EXPECT_NEAR(sobolev_norm(u, x, 1.0, 2.0, *m), std::sqrt(w * (s.inner(u, u) + x * x * s.dirichlet(u))), 1e-10);
    const Eigenbasis b = eigenbasis(*m, x);
    EXPECT_LE((b.multiplier(u, 0.0) - u).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GE(b.eigenvalues.minCoeff(), 0.0);
}

TEST(Norms, DomainOfQ) {
    const auto m = make(desitter_chart(3, 16, 1.0, 0.01));
    const Field u = Field::Ones(static_cast<Eigen::Index>(m->size()));
    EXPECT_THROW((void)sobolev_norm(u, 0.5, 0.0, 1.0, *m), DomainError);
    EXPECT_THROW((void)sobolev_norm(u, 0.5, 0.0, INFINITY, *m), DomainError);
}

TEST(Norms, SpecsFromExponents) {
    const MixedNormSpec z = MixedNormSpec::from_triple(AdmissibleTriple::make(5, 10, 1, 3));
    EXPECT_EQ(z.p.value(), 5.0);
    EXPECT_EQ(z.q, 10.0);
    EXPECT_EQ(z.sigma, 0.0);
    EXPECT_EQ(z.t_weight, 2.5);
    EXPECT_EQ(z.measure_power, 3);
    const MixedNormSpec d = MixedNormSpec::from_dual(make_dual(1, 2, 1, 3));
    EXPECT_EQ(d.p.value(), 1.0);
    EXPECT_EQ(d.q, 2.0);
    EXPECT_EQ(d.sigma, 0.0);
    EXPECT_EQ(d.t_weight, 0.5);
    const MixedNormSpec e = MixedNormSpec::from_triple(AdmissibleTriple::make(Exponent::infinite(), 2, 0, 3));
    EXPECT_TRUE(e.p.is_infinite());
    EXPECT_EQ(e.sigma, 1.0);
}

TEST(Norms, MixedNormInfinityIsMax) {
    const auto m = make(product_chart(3, 16, CrossSection::ZonalSphere, 1.0, 0.01));
    const auto n = static_cast<Eigen::Index>(m->size());
    TrajectoryRecord t;
    t.x = {1.0, 0.5, 0.25};
    t.v = {Field::Constant(n, 1.0), Field::Constant(n, 3.0), Field::Constant(n, 2.0)};
    MixedNormSpec spec;
    spec.q = 2.0;
    spec.measure_power = 0;
    const double vol = m->stencil(1.0).weight.sum();
    EXPECT_NEAR(mixed_norm(t, spec, *m), 3.0 * std::sqrt(vol), 1e-12);
    // p = 2 against the quadrature directly
    spec.p = 2;
    const std::vector<double> times{0.0, std::log(2.0), std::log(4.0)};
    const double expect = std::sqrt(weighted_integral(times, {vol, 9 * vol, 4 * vol}, 0.0));
    EXPECT_NEAR(mixed_norm(t, spec, *m), expect, 1e-12);
}

TEST(Norms, CacheSharesDecompositions) {
    const auto m = make(desitter_chart(3, 16, 1.0, 0.01));
    const SpectralCache cache(m);
    EXPECT_EQ(cache.at(0.5).get(), cache.at(0.5).get());
    EXPECT_NE(cache.at(0.5).get(), cache.at(0.25).get());
    auto rng = run_rng(1, 0);
    const Field u = sample_data(*m, BandBasis(*m, 4), rng).u0;
    EXPECT_EQ(sobolev_norm(u, 0.5, 1.0, 2.0, *m, &cache), sobolev_norm(u, 0.5, 1.0, 2.0, *m));
}

TEST(Norms, DataNormIsSumOfParts) {
    const auto m = make(desitter_chart(3, 24, 1.0, 0.01));
    auto rng = run_rng(3, 0);
    const PhysicalData d = sample_data(*m, BandBasis(*m, 8), rng, 2.5);
    const DataNorm dn = data_norm(d, *m);
    EXPECT_NEAR(dn.sum(), 2.5, 1e-12);
    EXPECT_NEAR(dn.l2, sobolev_norm(d.u1, 1.0, 0.0, 2.0, *m), 1e-15);
}
