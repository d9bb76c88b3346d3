#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ddm/diffuse.hpp"
#include "ddm/energy.hpp"
#include "ddm/sharp_ref.hpp"
#include "test_util.hpp"

using namespace ddm;

namespace {

double max_diff_1d(const SharpSolution& a, const SharpSolution& b, int samples = 4001) {
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Point p{-1.0 + 2.0 * k / (samples - 1)};
        worst = std::max(worst, std::abs(a.value(p) - b.value(p)));
    }
    return worst;
}

}  // namespace

TEST(SharpRef, ClosedFormConstantCases) {
    for (double kappa : {0.0, 1.0}) {
        const auto s = solve_sharp_1d_closed(fixtures::constant_1d(kappa));
        for (double x = -1.0; x <= 1.0; x += 0.01) {
            EXPECT_NEAR(s.value({x}), 1.0, 1e-12);
            EXPECT_NEAR(s.gradient({x}).x, 0.0, 1e-11);
        }
        EXPECT_EQ(s.kind_name(), "closed-1d");
    }
}

TEST(SharpRef, ClosedFormSatisfiesTransmissionConditions) {
    for (double kappa : {0.0, 1.0}) {
        const auto spec = fixtures::generic_1d(kappa);
        const auto s = solve_sharp_1d_closed(spec);
        const auto& pieces = std::get<Closed1D>(s.representation()).pieces;
        const double a1 = -0.5, b1 = 0.5;
        EXPECT_NEAR(pieces[0].derivative(-1.0), 0.0, 1e-13);
        EXPECT_NEAR(pieces[2].derivative(1.0), 0.0, 1e-13);
        EXPECT_NEAR(pieces[0].value(a1), pieces[1].value(a1), 1e-13);
        EXPECT_NEAR(pieces[1].value(b1), pieces[2].value(b1), 1e-13);
        // inner flux − α outer flux − κu = g with the normal pointing out of Ω₁
        const double g = 0.1;
        EXPECT_NEAR(pieces[1].derivative(a1) - 2.0 * pieces[0].derivative(a1) - kappa * pieces[1].value(a1), g, 1e-12);
        EXPECT_NEAR(-pieces[1].derivative(b1) + 2.0 * pieces[2].derivative(b1) - kappa * pieces[1].value(b1), g, 1e-12);
        // the ODEs: −(D u')' + c u = f
        for (double x : {-0.9, -0.2, 0.3, 0.8}) {
            const auto& p = pieces[x < a1 ? 0 : (x < b1 ? 1 : 2)];
            const double d = 1e-4;
            const double upp = (p.value(x + d) - 2 * p.value(x) + p.value(x - d)) / (d * d);
            const bool in = x > a1 && x < b1;
            const double D = in ? 1.0 : 2.0, c = 1.0, f = in ? 1.0 : 0.0;
            EXPECT_NEAR(-D * upp + c * p.value(x), f, 1e-6);
        }
    }
}

TEST(SharpRef, ClosedFormMatchesFittedFem) {
    for (double kappa : {0.0, 1.0}) {
        const auto spec = fixtures::generic_1d(kappa);
        const auto closed = solve_sharp_1d_closed(spec);
        EXPECT_LE(max_diff_1d(closed, solve_sharp_1d_fem(spec, 16384)), 1e-6);
        EXPECT_LE(max_diff_1d(closed, solve_sharp_1d_fem(spec, 4096)), 1e-6);
        EXPECT_NEAR(closed.energy(), solve_sharp_1d_fem(spec, 16384).energy(), 1e-7);
    }
}

TEST(SharpRef, FittedFemBasics) {
    const auto c = solve_sharp_1d_fem(fixtures::constant_1d(), 512);
    for (double v : std::get<FittedFem1D>(c.representation()).values) EXPECT_NEAR(v, 1.0, 1e-12);
    const auto r = solve_sharp_1d_fem(fixtures::constant_1d(1.0), 512);
    for (double v : std::get<FittedFem1D>(r.representation()).values) EXPECT_NEAR(v, 1.0, 1e-12);

    ProblemSpec spec = fixtures::generic_1d();
    spec.q = Expression::parse("1 + cos(3*x)");
    spec.h = Expression::parse("x^2");
    const auto s = solve_sharp_1d_fem(spec, 2048);
    for (double x = 0.0; x <= 1.0; x += 0.01) EXPECT_NEAR(s.value({x}), s.value({-x}), 1e-10);

    const auto nodes = fitted_mesh_1d(fixtures::generic_1d(), 100);
    EXPECT_NE(std::find(nodes.begin(), nodes.end(), -0.5), nodes.end());
    EXPECT_NE(std::find(nodes.begin(), nodes.end(), 0.5), nodes.end());
    EXPECT_EQ(nodes.front(), -1.0);
    EXPECT_EQ(nodes.back(), 1.0);
}

TEST(SharpRef, FemIsDiscreteMinimizer) {
    const auto spec = fixtures::generic_1d(1.0);
    const auto nodes = fitted_mesh_1d(spec, 256);
    const auto sys = assemble_fitted_1d(spec, nodes);
    EXPECT_LE(sys.A.symmetry_defect(), 1e-12 * sys.A.max_abs());
    const auto u = thomas_solve(Tridiagonal::from_sparse(sys.A), sys.b);
    EXPECT_LE(relative_residual(sys.A, u, sys.b), 1e-10);
    const double e0 = sys.A.quadratic_form(u, sys.b);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 0.02);
    for (int k = 0; k < 10; ++k) {
        auto v = u;
        for (auto& x : v) x += n(rng);
        EXPECT_LT(e0, sys.A.quadratic_form(v, sys.b));
    }
}

TEST(SharpRef, CutFemConstantCaseIsExact) {
    const auto spec = fixtures::constant_2d();
    const auto s = solve_sharp_2d_cutfem(spec, Grid(spec.cuboid, 64));
    for (double v : std::get<CutFem2D>(s.representation()).values) EXPECT_NEAR(v, 1.0, 1e-9);
    EXPECT_GT(std::get<CutFem2D>(s.representation()).cut_elements, 0);
    EXPECT_EQ(s.kind_name(), "cut-fem-2d");
    // −½(γ|Ω₁| + β|Ω₂|) up to the chord approximation of the disk
    const double area = M_PI * 0.09;
    const double exact = -0.5 * (3.0 * area + 1.5 * (4.0 - area));
    const double coarse = std::abs(s.energy() - exact);
    const double fine = std::abs(solve_sharp_2d_cutfem(spec, Grid(spec.cuboid, 128)).energy() - exact);
    EXPECT_LT(coarse, 1e-3);
    EXPECT_LT(fine, 0.5 * coarse);
}

TEST(SharpRef, CutFemRefusesRobin) {
    ProblemSpec spec = fixtures::generic_2d();
    spec.kappa = 1.0;
    EXPECT_THROW(assemble_cut_2d(spec, Grid(spec.cuboid, 32), 0.3), ValidationError);
}

TEST(SharpRef, CutFemPerturbsDegenerateCuts) {
    // R = 0.5 passes through mesh vertices such as (0.5, 0) on a 16-cell grid.
    ProblemSpec spec = fixtures::generic_2d();
    spec.shape = Disk{{0.0, 0.0}, 0.5};
    const Grid mesh(spec.cuboid, 16);
    EXPECT_THROW(assemble_cut_2d(spec, mesh, 0.5), DegenerateCut);
    const auto s = solve_sharp_2d_cutfem(spec, mesh);
    const auto& rep = std::get<CutFem2D>(s.representation());
    EXPECT_GT(rep.radius, 0.5);
    EXPECT_LT(rep.radius, 0.5 + 1e-8);
    EXPECT_FALSE(rep.notes.empty());
}

TEST(SharpRef, CutFemSelfConvergence) {
    const auto spec = fixtures::generic_2d();
    const auto s32 = solve_sharp_2d_cutfem(spec, Grid(spec.cuboid, 32));
    const auto s64 = solve_sharp_2d_cutfem(spec, Grid(spec.cuboid, 64));
    const auto s128 = solve_sharp_2d_cutfem(spec, Grid(spec.cuboid, 128));
    const Grid probe(spec.cuboid, 200);
    auto l2 = [&](const SharpSolution& a, const SharpSolution& b) {
        return norm(sample(probe, [&](const Point& p) { return a.value(p) - b.value(p); }), L2Norm{});
    };
    const double d1 = l2(s32, s64);
    const double d2 = l2(s64, s128);
    EXPECT_LE(d2, d1 / 2.0) << d1 << " " << d2;
}

TEST(SharpRef, CutFemAgreesWithDiffuseAtSmallEps) {
    ProblemSpec spec = fixtures::generic_2d();
    spec.g = Expression::constant(0.0);
    spec.alpha = 1.0;
    spec.beta = spec.gamma = 1.0;
    const auto ref = solve_sharp_2d_cutfem(spec, Grid(spec.cuboid, 256));
    const double eps = 0.02;
    const auto sol = solve_diffuse(spec, Grid(spec.cuboid, 400), eps);
    ASSERT_TRUE(sol.report.converged);
    EXPECT_LE(error_norms(sol.u, ref).l2, 2e-2);
}

TEST(SharpRef, CutFemIsDiscreteMinimizer) {
    const auto spec = fixtures::generic_2d();
    const Grid mesh(spec.cuboid, 32);
    const auto sys = assemble_cut_2d(spec, mesh, 0.3);
    EXPECT_LE(sys.A.symmetry_defect(), 1e-12 * sys.A.max_abs());
    CgOptions opt;
    opt.tol = 1e-12;
    const auto u = cg_solve(sys.A, sys.b, opt);
    ASSERT_TRUE(u.report.converged);
    const double e0 = sys.A.quadratic_form(u.x, sys.b);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 0.02);
    for (int k = 0; k < 10; ++k) {
        auto v = u.x;
        for (auto& x : v) x += n(rng);
        EXPECT_LT(e0, sys.A.quadratic_form(v, sys.b));
    }
}
