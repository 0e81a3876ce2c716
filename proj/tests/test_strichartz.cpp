#include "cklab/errors.hpp"
#include "cklab/strichartz.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cklab;

namespace {

ChartParams small_chart(const std::string& name = "desitter") {
    ChartParams c;
    c.name = name;
    c.n = 3;
    c.grid = 24;
    return c;
}

HarnessOptions small_opts(std::size_t ensemble = 4) {
    HarnessOptions o;
    o.resolution.grid = 24;
    o.resolution.steps = 256;
    o.resolution.t_max = 3.0;
    o.ensemble = ensemble;
    o.seed = 5;
    return o;
}

const AdmissibleTriple kTriple = AdmissibleTriple::make(5, 10, 1, 3);

}  // namespace

TEST(Strichartz, RefinedResolution) {
    const Resolution r = refined(Resolution{32, 512, 4.0, 4, 0}, 10);
    EXPECT_EQ(r.grid, 64);
    EXPECT_EQ(r.steps, 1024);
    EXPECT_EQ(r.t_max, 5.0);
    EXPECT_EQ(r.modes, 10);
}

TEST(Strichartz, InstantiateWindow) {
    const ChartParams c = instantiate(small_chart(), Resolution{16, 64, 4.0, 4, 0}, 1.0);
    EXPECT_NEAR(c.x0, std::exp(-1.0), 1e-15);
    EXPECT_NEAR(c.x_min, std::exp(-4.0), 1e-15);
    EXPECT_EQ(c.grid, 16);
}

TEST(Strichartz, HomogeneousRatioScaleInvariant) {
    HarnessOptions o = small_opts();
    const EstimateReport a = verify_homogeneous(small_chart(), kTriple, o);
    o.data_scale = 10.0;
    const EstimateReport b = verify_homogeneous(small_chart(), kTriple, o);
    ASSERT_EQ(a.runs.size(), 4u);
    EXPECT_TRUE(a.all_finite());
    EXPECT_GT(a.sup_ratio, 0.0);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        EXPECT_NEAR(b.runs[i].ratio, a.runs[i].ratio, 1e-10 * a.runs[i].ratio);
        EXPECT_NEAR(b.runs[i].lhs, 10.0 * a.runs[i].lhs, 1e-9 * b.runs[i].lhs);
    }
}

TEST(Strichartz, ZeroDataExcluded) {
    HarnessOptions o = small_opts(2);
    o.data_scale = 0.0;
    const EstimateReport r = verify_homogeneous(small_chart(), kTriple, o);
    for (const RunResult& run : r.runs) EXPECT_TRUE(run.excluded);
}

TEST(Strichartz, InhomogeneousLinearInForcing) {
    HarnessOptions o = small_opts(3);
    const DualPair dual = make_dual(1, 2, 1, 3);
    const EstimateReport a = verify_inhomogeneous(small_chart(), kTriple, dual, o);
    o.forcing_scale = 2.0;
    const EstimateReport b = verify_inhomogeneous(small_chart(), kTriple, dual, o);
    EXPECT_EQ(a.kind, "inhomogeneous");
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        EXPECT_NEAR(b.runs[i].lhs, 2.0 * a.runs[i].lhs, 1e-9 * b.runs[i].lhs);
        EXPECT_NEAR(b.runs[i].rhs, 2.0 * a.runs[i].rhs, 1e-12 * b.runs[i].rhs);
    }
}

TEST(Strichartz, ProductEnergyConserved) {
    HarnessOptions o = small_opts(3);
    o.resolution.steps = 1024;
    const EstimateReport r = verify_energy(small_chart("product"), o);
    EXPECT_LE(r.max_drift, 1e-3);
    EXPECT_LE(r.sup_ratio, 1.0 + 1e-3);
}

TEST(Strichartz, EnergyRefinementRecorded) {
    HarnessOptions o = small_opts(2);
    o.refine = true;
    const EstimateReport r = verify_energy(small_chart(), o);
    ASSERT_EQ(r.refinement.size(), 1u);
    EXPECT_EQ(r.refinement[0].resolution.grid, 48);
    EXPECT_TRUE(std::isfinite(r.refinement[0].relative_change));
}

TEST(Strichartz, SingularChartWarns) {
    ChartParams c = small_chart("product");
    c.linear_amplitude = 0.3;
    const EstimateReport r = verify_energy(c, small_opts(1));
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_EQ(r.warnings[0].rfind("singular-potential:", 0), 0u);
}

TEST(Strichartz, Deterministic) {
    const HarnessOptions o = small_opts(6);
    const EstimateReport a = verify_homogeneous(small_chart(), kTriple, o);
    const EstimateReport b = verify_homogeneous(small_chart(), kTriple, o);
    for (std::size_t i = 0; i < a.runs.size(); ++i) EXPECT_EQ(a.runs[i].ratio, b.runs[i].ratio);
}
