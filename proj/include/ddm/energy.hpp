#pragma once

#include <functional>

#include "ddm/fields.hpp"
#include "ddm/grid.hpp"
#include "ddm/sharp_ref.hpp"

namespace ddm {

/// Energy split by term; signs follow the functional:
/// ½∫D|∇u|² + ½∫cu² − ∫fu + surface.
struct EnergyBreakdown {
    double gradient = 0.0;
    double zeroth = 0.0;
    double load = 0.0;
    /// ∫(½κu² + gu)|∇φ_ε| dx for the diffuse energy, ∫_{∂Ω₁}(½κu² + gu) dS for the sharp one.
    double surface = 0.0;
    double total = 0.0;
};

/// Discrete F_ε[u] using the same edge differences and trapezoid weights as
/// `assemble`, so that F_ε[u] = ½uᵀAu − bᵀu exactly.
EnergyBreakdown energy_diffuse(const ProblemSpec& spec, const Grid& grid, double eps, const GridField& u);
EnergyBreakdown energy_diffuse(const ProblemSpec& spec, const DiffuseSamples& samples, const GridField& u);

/// F₀[u] of a nodal field: regions decided by classifying nodes (edges by
/// their midpoint). Surface term: the two interface points in 1D (u linearly
/// interpolated), a 4096-segment trapezoid rule around the circle in 2D
/// (u bilinearly interpolated).
EnergyBreakdown energy_sharp(const ProblemSpec& spec, const GridField& u);

/// A function with its gradient.
struct Evaluable {
    std::function<double(const Point&)> value;
    std::function<Point(const Point&)> gradient;
};

/// Gradient by fourth-order central differences.
Evaluable evaluable(const Expression& e);
Evaluable evaluable(const SharpSolution& s);

/// F₀[u] for an evaluable u, by quadrature that respects the interface:
/// composite Gauss on each subinterval in 1D; in 2D the box integral of the
/// outer integrand plus a polar integral of (inner − outer) over the disk.
EnergyBreakdown energy_sharp(const ProblemSpec& spec, const Evaluable& u);

/// ∫_{Ω₁} inside + ∫_{Ω₂} outside with the interface-respecting quadrature above.
double sharp_volume_integral(const ProblemSpec& spec, const std::function<double(const Point&)>& inside,
                             const std::function<double(const Point&)>& outside);

/// ∫_{∂Ω₁} w dS: sum over the two endpoints in 1D, 4096-segment trapezoid in 2D.
double surface_integral(const InterfaceShape& shape, const std::function<double(const Point&)>& w);

inline constexpr int kCircleSegments = 4096;

struct ErrorNorms {
    double l2;
    double h1;
};

/// Norms of u − ref sampled at the nodes of u's grid.
ErrorNorms error_norms(const GridField& u, const SharpSolution& ref);

}  // namespace ddm
