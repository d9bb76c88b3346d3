#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ddm/diffuse.hpp"
#include "ddm/energy.hpp"
#include "test_util.hpp"

using namespace ddm;

TEST(Diffuse, ConstantDataHasConstantDiscreteSolution) {
    for (double kappa : {0.0, 1.0}) {
        const auto spec = fixtures::constant_1d(kappa);
        const Grid g(spec.cuboid, 160);
        const auto sys = assemble(spec, g, 0.05);
        const std::vector<double> one(g.node_count(), 1.0);
        const auto a1 = sys.A * one;
        for (std::size_t i = 0; i < one.size(); ++i) EXPECT_NEAR(a1[i], sys.b[i], 1e-12 * (1.0 + std::abs(sys.b[i])) * 160) << i;
        const auto sol = solve_diffuse(spec, g, 0.05);
        for (double v : sol.u.values()) EXPECT_NEAR(v, 1.0, 1e-10);
    }
    const auto spec2 = fixtures::constant_2d();
    const Grid g2(spec2.cuboid, 80);
    const auto sol2 = solve_diffuse(spec2, g2, 0.1);
    EXPECT_TRUE(sol2.report.converged);
    for (double v : sol2.u.values()) EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(Diffuse, ConstantCoefficientReduction) {
    ProblemSpec spec = fixtures::generic_1d();
    spec.alpha = 1.0;
    spec.beta = spec.gamma = 1.0;
    const int n = 80;
    const Grid g(Cuboid(-1.0, 1.0), n);
    const double h = 2.0 / n;
    const auto A = assemble(spec, g, 0.1).A;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 * h : h;
        const double edges = (i == 0 || i == n) ? 1.0 : 2.0;
        EXPECT_NEAR(A.at(i, i), edges / h + w, 1e-12);
        if (i < n) {
            EXPECT_NEAR(A.at(i, i + 1), -1.0 / h, 1e-12);
        }
    }
    EXPECT_EQ(A.symmetry_defect(), 0.0);
}

TEST(Diffuse, AssembledOperatorStructure) {
    for (const auto& spec : {fixtures::generic_1d(), fixtures::generic_1d(1.0), fixtures::generic_2d()}) {
        const Grid g(spec.cuboid, 64);
        const auto A = assemble(spec, g, 0.1).A;
        EXPECT_LE(A.symmetry_defect(), 1e-12 * A.max_abs());
        EXPECT_TRUE(A.strictly_diagonally_dominant());
        for (double d : A.diagonal()) EXPECT_GT(d, 0.0);
    }
}

TEST(Diffuse, RejectsUnresolvedLayer) {
    const auto spec = fixtures::generic_1d();
    EXPECT_THROW(assemble(spec, Grid(spec.cuboid, 16), 0.1), UnresolvedLayer);
    EXPECT_NO_THROW(assemble(spec, Grid(spec.cuboid, 40), 0.1));
}

TEST(Diffuse, MinimizerIdentityAndResidual) {
    for (const auto& spec : {fixtures::generic_1d(), fixtures::generic_1d(1.0), fixtures::generic_2d()}) {
        const Grid g(spec.cuboid, spec.dimension() == 1 ? 400 : 80);
        const auto sys = assemble(spec, g, 0.1);
        const auto sol = solve_diffuse(spec, g, 0.1);
        ASSERT_TRUE(sol.report.converged);
        EXPECT_LE(sol.report.relative_residual, 10 * 1e-10);
        double bu = 0.0;
        for (std::size_t i = 0; i < sys.b.size(); ++i) bu += sys.b[i] * sol.u[i];
        EXPECT_NEAR(sol.energy, -0.5 * bu, 1e-9 * std::abs(sol.energy));
        EXPECT_LE(sol.energy, 0.0);
    }
}

TEST(Diffuse, SolutionBeatsRandomFields) {
    const auto spec = fixtures::generic_1d();
    const Grid g(spec.cuboid, 200);
    const auto sol = solve_diffuse(spec, g, 0.05);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 0.05);
    for (int k = 0; k < 20; ++k) {
        GridField v = sol.u;
        for (auto& x : v.values()) x += n(rng);
        EXPECT_LT(sol.energy, energy_diffuse(spec, g, 0.05, v).total);
    }
    EXPECT_LT(sol.energy, energy_diffuse(spec, g, 0.05, GridField(g, 0.0)).total);
}

TEST(Diffuse, CgAndThomasAgreeIn1d) {
    const auto spec = fixtures::generic_1d(1.0);
    const Grid g(spec.cuboid, 256);
    DiffuseOptions cg;
    cg.direct_1d = false;
    cg.tol = 1e-13;
    const auto a = solve_diffuse(spec, g, 0.05);
    const auto b = solve_diffuse(spec, g, 0.05, cg);
    for (std::size_t i = 0; i < a.u.size(); ++i) EXPECT_NEAR(a.u[i], b.u[i], 1e-9);
}
