#pragma once

#include <array>
#include <vector>

#include "ddm/expr.hpp"
#include "ddm/geometry.hpp"
#include "ddm/grid.hpp"

namespace ddm {

/// Layer clearance: ∂Ω₁ must stay this many ε away from ∂Ω.
inline constexpr double kDefaultClearanceFactor = 4.0;

/// Data of the two-sided problem: (1, γ, q) inside Ω₁, (α, β, h) in Ω₂,
/// interface data κ ≥ 0 and g.
struct ProblemSpec {
    Cuboid cuboid;
    InterfaceShape shape;
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double kappa = 0.0;
    Expression q;
    Expression h;
    Expression g;

    int dimension() const { return cuboid.dimension(); }

    /// Checks every ε-independent invariant; throws ValidationError.
    void validate() const;

    /// Checks that the diffuse layer of width ε clears ∂Ω.
    void validate_layer(double eps, double clearance_factor = kDefaultClearanceFactor) const;

    /// True when q, h and g are all constants.
    bool has_constant_data() const;
};

struct DiffuseCoefficients {
    double D;      // α + (1 − α) φ_ε
    double c;      // β + (γ − β) φ_ε
    double f;      // h + (q − h) φ_ε
    double slope;  // |∇φ_ε|
};

struct SharpCoefficients {
    double D;
    double c;
    double f;
};

DiffuseCoefficients coeff_diffuse(const ProblemSpec& spec, const Point& x, double eps);

/// Indicator blend; interface points count as Ω₁.
SharpCoefficients coeff_sharp(const ProblemSpec& spec, const Point& x);

/// Diffuse coefficients sampled where the discrete operator needs them:
/// D_ε at edge midpoints, everything else at nodes. Edge arrays are indexed
/// like the lower node of the edge, with `face_D[0]` holding x-edges
/// ((nx−1)·ny entries, index j·(nx−1)+i) and `face_D[1]` y-edges
/// (nx·(ny−1) entries, index j·nx+i).
struct DiffuseSamples {
    std::array<std::vector<double>, 2> face_D;
    std::vector<double> c;
    std::vector<double> f;
    std::vector<double> slope;
    std::vector<double> g;
};

DiffuseSamples sample_diffuse(const ProblemSpec& spec, const Grid& grid, double eps);

/// Midpoint of the edge from node (i, j) along `axis`.
Point edge_midpoint(const Grid& grid, int axis, int i, int j);

}  // namespace ddm
