#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "ddm/geometry.hpp"

namespace ddm {

/// Uniform node-centred Cartesian grid over a cuboid. Nodes are stored
/// row-major with x fastest: index = j * nodes(0) + i.
class Grid {
public:
    static constexpr int kMinCells = 8;

    Grid(const Cuboid& box, std::array<int, 2> cells);
    /// Same cell count on every axis.
    Grid(const Cuboid& box, int cells);

    /// Smallest cell counts whose spacing does not exceed `h` on any axis.
    static Grid with_spacing(const Cuboid& box, double h);

    const Cuboid& box() const { return box_; }
    int dimension() const { return box_.dimension(); }
    int cells(int axis) const { return cells_[axis]; }
    int nodes(int axis) const { return axis < dimension() ? cells_[axis] + 1 : 1; }
    std::size_t node_count() const;
    double spacing(int axis) const { return spacing_[axis]; }
    /// Largest spacing over the axes.
    double max_spacing() const;

    std::size_t index(int i, int j = 0) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nodes(0)) + static_cast<std::size_t>(i);
    }
    Point node(int i, int j = 0) const;
    Point node(std::size_t idx) const;

    /// Tensor-product trapezoid weight of a node.
    double weight(std::size_t idx) const;

    bool operator==(const Grid& other) const;

private:
    Cuboid box_;
    std::array<int, 2> cells_{};
    std::array<double, 2> spacing_{};
};

/// One value per grid node.
class GridField {
public:
    explicit GridField(const Grid& grid, double fill = 0.0);
    GridField(const Grid& grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

private:
    Grid grid_;
    std::vector<double> values_;
};

using ScalarFunction = std::function<double(const Point&)>;

GridField sample(const Grid& grid, const ScalarFunction& f);

/// Trapezoidal rule (weights ½ on faces, ¼ on 2D corners).
double integrate(const GridField& field);

/// |∇w|² per node: central differences inside, second-order one-sided
/// differences on ∂Ω.
std::vector<double> gradient_squared(const GridField& field);

/// Piecewise-linear (1D) or bilinear (2D) interpolation; points are clamped
/// to the grid box.
double interpolate(const GridField& field, const Point& p);

struct L2Norm {};
struct H1Norm {};
/// ‖w‖_{φ_ε} = (∫ φ_ε (|∇w|² + w²))^{1/2}
struct PhiEpsNorm {
    InterfaceShape shape;
    double eps;
};
/// ‖w‖_{δ_ε} = (∫ w² |∇φ_ε|)^{1/2}
struct DeltaEpsNorm {
    InterfaceShape shape;
    double eps;
};
using NormKind = std::variant<L2Norm, H1Norm, PhiEpsNorm, DeltaEpsNorm>;

double norm(const GridField& field, const NormKind& kind);

}  // namespace ddm
