#include <cmath>

#include <gtest/gtest.h>

#include "ddm/harness.hpp"
#include "test_util.hpp"

using namespace ddm;

namespace {
const std::vector<double> kSweep{0.1, 0.05, 0.025, 0.0125};
}

TEST(Harness, FitRateOnExactPowerLaws) {
    std::vector<std::pair<double, double>> lin, quad;
    for (double e : kSweep) {
        lin.emplace_back(e, 3 * e);
        quad.emplace_back(e, 3 * e * e);
    }
    EXPECT_NEAR(fit_rate(lin).rate, 1.0, 1e-12);
    EXPECT_NEAR(fit_rate(quad).rate, 2.0, 1e-12);
    EXPECT_LT(fit_rate(quad).residual, 1e-12);
    EXPECT_THROW(fit_rate(std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.05, 0.5}}), DegenerateData);
    EXPECT_THROW(fit_rate(std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.05, 0.0}, {0.02, 0.1}}), DegenerateData);
    EXPECT_THROW(fit_rate(std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.05, -1.0}, {0.02, 0.1}}), DegenerateData);
}

TEST(Harness, CoupledGrid) {
    bool capped = true;
    const Grid g = coupled_grid(Cuboid(-1.0, 1.0), 0.05, 4, 1u << 20, &capped);
    EXPECT_FALSE(capped);
    EXPECT_EQ(g.cells(0), 160);
    const Grid c = coupled_grid(Cuboid(-1.0, 1.0, -1.0, 1.0), 0.01, 4, 512 * 512, &capped);
    EXPECT_TRUE(capped);
    EXPECT_LE(c.node_count(), 512u * 512u);
    EXPECT_GE(c.node_count(), 500u * 500u);
    EXPECT_THROW(coupled_grid(Cuboid(-1.0, 1.0), 0.05, 1.5, 1000), ValidationError);
}

TEST(Harness, ColumnChecks) {
    const std::vector<double> good{1.0, 0.5, 0.25, 0.1};
    EXPECT_TRUE(check_column("c", good).passed);
    const std::vector<double> slow{1.0, 0.9, 0.8, 0.7};
    EXPECT_FALSE(check_column("c", slow).passed);
    const std::vector<double> one_bump{1.0, 0.5, 0.6, 0.1};
    const auto bump = check_column("c", one_bump);
    EXPECT_TRUE(bump.passed);
    EXPECT_EQ(bump.non_monotone_steps, 1);
    EXPECT_FALSE(bump.strictly_decreasing);
    const std::vector<double> two_bumps{1.0, 1.1, 0.2, 0.25};
    EXPECT_FALSE(check_column("c", two_bumps).passed);
    const std::vector<double> exact{1e-13, 3e-13, 2e-14, 1e-15};
    EXPECT_TRUE(check_column("c", exact).passed);
    EXPECT_TRUE(check_column("c", exact).exact);
}

TEST(Harness, ConstantExactnessSweep) {
    SweepOptions opt;
    const auto report = eps_sweep(fixtures::constant_1d(), std::vector<double>{0.1, 0.05, 0.025}, opt);
    ASSERT_TRUE(report.passed());
    for (const auto& r : report.rows) {
        EXPECT_LE(r.err_l2, 1e-10);
        EXPECT_LE(r.err_h1, 1e-10);
    }
    EXPECT_FALSE(report.rate_l2.has_value());
    EXPECT_FALSE(report.rate_h1.has_value());
}

TEST(Harness, GenericSweepIsMonotoneAndDeterministic) {
    SweepOptions opt;
    opt.rho = 8;
    const auto a = eps_sweep(fixtures::generic_1d(), kSweep, opt);
    for (std::size_t k = 1; k < a.rows.size(); ++k) {
        EXPECT_LT(a.rows[k].err_l2, a.rows[k - 1].err_l2);
        EXPECT_LT(a.rows[k].err_h1, a.rows[k - 1].err_h1);
        EXPECT_LT(a.rows[k].energy_gap, a.rows[k - 1].energy_gap);
        EXPECT_LT(a.rows[k].eps, a.rows[k - 1].eps);
    }
    ASSERT_TRUE(a.rate_l2.has_value());
    EXPECT_EQ(a.reference, "closed-1d");
    EXPECT_FALSE(a.notes.empty());

    opt.parallel = false;
    const auto b = eps_sweep(fixtures::generic_1d(), kSweep, opt);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        EXPECT_EQ(a.rows[k].err_l2, b.rows[k].err_l2);
        EXPECT_EQ(a.rows[k].err_h1, b.rows[k].err_h1);
        EXPECT_EQ(a.rows[k].energy_diffuse, b.rows[k].energy_diffuse);
        EXPECT_EQ(a.rows[k].trace_ratio, b.rows[k].trace_ratio);
        EXPECT_EQ(a.rows[k].iterations, b.rows[k].iterations);
    }
    EXPECT_EQ(a.rate_l2->rate, b.rate_l2->rate);
}

TEST(Harness, MinimizerNormStaysBounded) {
    SweepOptions opt;
    opt.rho = 8;
    const auto r = eps_sweep(fixtures::generic_1d(1.0), kSweep, opt);
    double lo = 1e300, hi = 0.0;
    for (const auto& row : r.rows) {
        lo = std::min(lo, row.u_h1);
        hi = std::max(hi, row.u_h1);
    }
    EXPECT_LE(hi / lo, 2.0);
}

TEST(Harness, SweepInputValidation) {
    SweepOptions opt;
    EXPECT_THROW(eps_sweep(fixtures::generic_1d(), std::vector<double>{0.05, 0.1}, opt), ValidationError);
    EXPECT_THROW(eps_sweep(fixtures::generic_1d(), std::vector<double>{0.2, 0.1}, opt), ValidationError);
    opt.rho = 1.0;
    EXPECT_THROW(eps_sweep(fixtures::generic_1d(), std::vector<double>{0.1, 0.05}, opt), ValidationError);
}

TEST(Harness, RowFailuresAreRecorded) {
    SweepOptions opt;
    opt.max_iter = 2;  // CG cannot converge in 2D
    opt.max_nodes = 41 * 41;
    opt.reference_cells = 32;
    EXPECT_THROW(eps_sweep(fixtures::generic_2d(), std::vector<double>{0.05, 0.025}, opt), std::runtime_error);
}

TEST(Harness, GammaRecovery) {
    SweepOptions opt;
    opt.rho = 8;
    const auto zero = gamma_recovery_check(fixtures::generic_1d(), Expression::constant(0.0), kSweep, opt);
    for (const auto& r : zero.rows) EXPECT_EQ(r.gap, 0.0);
    EXPECT_TRUE(zero.check.passed);

    ProblemSpec spec = fixtures::generic_1d();
    spec.gamma = 3.0;
    spec.g = Expression::constant(0.0);
    spec.shape = Interval{-0.4, 0.6};
    const auto one = gamma_recovery_check(spec, Expression::constant(1.0), std::vector<double>{0.08, 0.04, 0.02}, opt);
    EXPECT_TRUE(one.check.passed) << one.check.message;
    EXPECT_TRUE(one.check.strictly_decreasing);

    const auto cosine = gamma_recovery_check(fixtures::generic_1d(), Expression::parse("cos(3.14159265*x)"), kSweep, opt);
    EXPECT_TRUE(cosine.check.strictly_decreasing);
}

TEST(Harness, LemmaPanelAndPerimeter) {
    SweepOptions opt;
    const auto panel = lemma_panel(Cuboid(-1.0, 1.0));
    ASSERT_EQ(panel.size(), 4u);
    EXPECT_EQ(panel[0].name, "one");
    EXPECT_EQ(panel[3].name, "bump");
    const auto report = lemma_checks(fixtures::generic_1d(), kSweep, opt, panel);
    EXPECT_TRUE(report.passed());
    for (const auto& p : report.perimeter) EXPECT_EQ(p.limit, 2.0);
    EXPECT_NEAR(report.perimeter.back().measured, 2.0, 1e-6);

    opt.max_nodes = 1u << 22;
    const auto disk = lemma_checks(fixtures::generic_2d(), std::vector<double>{0.04, 0.02}, opt,
                                   {TestFunction{"one", Expression::constant(1.0)}});
    EXPECT_NEAR(disk.perimeter.back().measured, 2 * M_PI * 0.3, 1e-4);
}
