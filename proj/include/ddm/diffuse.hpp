#pragma once

#include <vector>

#include "ddm/fields.hpp"
#include "ddm/grid.hpp"
#include "ddm/linalg.hpp"

namespace ddm {

/// Layer under-resolved: ε/h below the minimum ratio.
class UnresolvedLayer : public ValidationError {
public:
    using ValidationError::ValidationError;
};

inline constexpr double kMinLayerResolution = 2.0;

struct SparseSystem {
    SparseMatrix A;
    std::vector<double> b;
    /// W (c_ε + κ|∇φ_ε|): the row sums of A in exact arithmetic.
    std::vector<double> row_sums;
};

/// Discrete diffuse-domain operator on a node-centred grid:
///
///   A = Σ_edges D_ε(mid) w⊥/h (e_i − e_j)(e_i − e_j)ᵀ + diag(W (c_ε + κ|∇φ_ε|))
///   b = W (f_ε − g|∇φ_ε|)
///
/// with W the trapezoid weights and w⊥ the transverse trapezoid weight of the
/// edge. Homogeneous Neumann conditions on ∂Ω are natural: no edge leaves Ω.
SparseSystem assemble(const ProblemSpec& spec, const Grid& grid, double eps);
SparseSystem assemble(const ProblemSpec& spec, const Grid& grid, const DiffuseSamples& samples);

/// Throws UnresolvedLayer if ε/h < kMinLayerResolution on any axis.
void check_layer_resolution(const Grid& grid, double eps);

struct DiffuseOptions {
    double tol = 1e-10;
    int max_iter = 50000;
    /// Solve 1D systems with the Thomas algorithm instead of CG.
    bool direct_1d = true;
};

struct DiffuseSolution {
    Grid grid;
    double eps;
    GridField u;
    SolveReport report;
    /// F_ε[u_ε].
    double energy;
};

/// A NotConverged solve is returned with `report.converged == false`.
DiffuseSolution solve_diffuse(const ProblemSpec& spec, const Grid& grid, double eps, const DiffuseOptions& options = {});

}  // namespace ddm
