#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "ddm/fields.hpp"
#include "ddm/grid.hpp"
#include "ddm/linalg.hpp"

namespace ddm {

/// The matching system of the closed-form solution could not be solved.
class SingularMatching : public LinalgError {
public:
    using LinalgError::LinalgError;
};

/// The circle passes through a mesh vertex or grazes an edge.
class DegenerateCut : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// u = base + A cosh(μ(x − mid)) + B sinh(μ(x − mid)) on [lo, hi].
struct ExpPiece {
    double lo;
    double hi;
    double mid;
    double mu;
    double base;
    double A;
    double B;

    double value(double x) const;
    double derivative(double x) const;
};

/// Exact solution for constant data in 1D: pieces (a, a₁), (a₁, b₁), (b₁, b).
struct Closed1D {
    std::array<ExpPiece, 3> pieces;
};

/// P1 finite elements on a mesh with a₁ and b₁ as nodes.
struct FittedFem1D {
    std::vector<double> nodes;
    std::vector<double> values;
};

/// P1 finite elements on the right-triangle split of a uniform grid; each
/// cell (i, j) holds triangles (i,j)-(i+1,j)-(i+1,j+1) and (i,j)-(i+1,j+1)-(i,j+1).
struct CutFem2D {
    Grid mesh;
    std::vector<double> values;
    int cut_elements = 0;
    /// Radius actually used; differs from the problem's by 1e-10 steps after a degenerate cut.
    double radius = 0.0;
    std::vector<std::string> notes;
};

/// Reference solution u₀ of the two-sided problem.
class SharpSolution {
public:
    using Representation = std::variant<Closed1D, FittedFem1D, CutFem2D>;

    SharpSolution(Representation rep, double energy, SolveReport report);

    double value(const Point& p) const;
    /// Gradient; inside a P1 element the constant element gradient.
    Point gradient(const Point& p) const;

    /// E₀[u₀].
    double energy() const { return energy_; }
    const SolveReport& report() const { return report_; }
    const Representation& representation() const { return rep_; }
    std::string kind_name() const;

private:
    Representation rep_;
    double energy_;
    SolveReport report_;
};

/// Closed form for 1D problems with constant q, h, g and any κ ≥ 0.
SharpSolution solve_sharp_1d_closed(const ProblemSpec& spec);

struct FemSystem {
    SparseMatrix A;
    std::vector<double> b;
};

/// Mesh of about `cells` elements split over (a, a₁), (a₁, b₁), (b₁, b)
/// in proportion to their lengths, at least one element each.
std::vector<double> fitted_mesh_1d(const ProblemSpec& spec, int cells);

/// Minimizer system of the discrete E₀ on `nodes`: exact element stiffness and
/// mass, 3-point Gauss load, κ and g added at the interface nodes.
FemSystem assemble_fitted_1d(const ProblemSpec& spec, const std::vector<double>& nodes);

SharpSolution solve_sharp_1d_fem(const ProblemSpec& spec, int cells);

/// Cut-element system for a disk of the given radius (κ = 0 only).
/// Throws DegenerateCut when the circle hits a vertex or grazes an edge.
FemSystem assemble_cut_2d(const ProblemSpec& spec, const Grid& mesh, double radius, int* cut_elements = nullptr);

SharpSolution solve_sharp_2d_cutfem(const ProblemSpec& spec, const Grid& mesh, const CgOptions& options = {});

}  // namespace ddm
