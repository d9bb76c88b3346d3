#include "ddm/diffuse.hpp"

#include <fmt/format.h>

#include "ddm/energy.hpp"

namespace ddm {

void check_layer_resolution(const Grid& grid, double eps) {
    for (int d = 0; d < grid.dimension(); ++d) {
        const double ratio = eps / grid.spacing(d);
        if (ratio < kMinLayerResolution) {
            throw UnresolvedLayer(fmt::format("layer unresolved: eps/h = {} on axis {} (need >= {})", ratio, d,
                                              kMinLayerResolution));
        }
    }
}

SparseSystem assemble(const ProblemSpec& spec, const Grid& grid, double eps) {
    check_layer_resolution(grid, eps);
    return assemble(spec, grid, sample_diffuse(spec, grid, eps));
}

SparseSystem assemble(const ProblemSpec& spec, const Grid& grid, const DiffuseSamples& samples) {
    const int nx = grid.nodes(0);
    const int ny = grid.nodes(1);
    const std::size_t n = grid.node_count();
    SparseMatrix::Builder builder(n);

    auto add_edge = [&](std::size_t a, std::size_t b, double k) {
        builder.add(a, a, k);
        builder.add(b, b, k);
        builder.add(a, b, -k);
        builder.add(b, a, -k);
    };
    auto transverse = [&](int axis, int k) {
        if (grid.dimension() == 1) return 1.0;
        const int other = 1 - axis;
        return grid.spacing(other) * ((k == 0 || k == grid.cells(other)) ? 0.5 : 1.0);
    };

    for (int j = 0; j < ny; ++j) {
        const double wt = transverse(0, j) / grid.spacing(0);
        for (int i = 0; i + 1 < nx; ++i) {
            const double d = samples.face_D[0][static_cast<std::size_t>(j) * (nx - 1) + i];
            add_edge(grid.index(i, j), grid.index(i + 1, j), d * wt);
        }
    }
    if (grid.dimension() == 2) {
        for (int j = 0; j + 1 < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double wt = transverse(1, i) / grid.spacing(1);
                const double d = samples.face_D[1][static_cast<std::size_t>(j) * nx + i];
                add_edge(grid.index(i, j), grid.index(i, j + 1), d * wt);
            }
        }
    }

    SparseSystem sys;
    sys.b.resize(n);
    sys.row_sums.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = grid.weight(k);
        sys.row_sums[k] = w * (samples.c[k] + spec.kappa * samples.slope[k]);
        builder.add(k, k, sys.row_sums[k]);
        sys.b[k] = w * (samples.f[k] - samples.g[k] * samples.slope[k]);
    }
    sys.A = std::move(builder).build();
    return sys;
}

DiffuseSolution solve_diffuse(const ProblemSpec& spec, const Grid& grid, double eps, const DiffuseOptions& options) {
    check_layer_resolution(grid, eps);
    const auto samples = sample_diffuse(spec, grid, eps);
    const auto sys = assemble(spec, grid, samples);

    std::vector<double> x;
    SolveReport report;
    if (grid.dimension() == 1 && options.direct_1d) {
        const auto tri = Tridiagonal::from_sparse(sys.A);
        x = thomas_solve_row_sums(tri.lower, tri.upper, sys.row_sums, sys.b);
        report.relative_residual = relative_residual(sys.A, x, sys.b, sys.row_sums);
        report.converged = report.relative_residual <= options.tol ||
                           backward_error(sys.A, x, sys.b, sys.row_sums) <= kDirectBackwardError;
    } else {
        CgOptions cg;
        cg.tol = options.tol;
        cg.max_iter = options.max_iter;
        auto result = cg_solve(sys.A, sys.b, cg);
        x = std::move(result.x);
        report = result.report;
    }

    GridField u(grid, std::move(x));
    const double energy = energy_diffuse(spec, samples, u).total;
    return DiffuseSolution{grid, eps, std::move(u), report, energy};
}

}  // namespace ddm
