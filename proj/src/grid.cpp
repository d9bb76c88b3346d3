#include "ddm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "ddm/summation.hpp"

namespace ddm {

Grid::Grid(const Cuboid& box, std::array<int, 2> cells) : box_(box), cells_(cells) {
    for (int d = 0; d < box_.dimension(); ++d) {
        if (cells_[d] < kMinCells) {
            throw ValidationError(fmt::format("grid needs at least {} cells per axis, got {}", kMinCells, cells_[d]));
        }
        spacing_[d] = box_.length(d) / cells_[d];
    }
    if (box_.dimension() == 1) cells_[1] = 0;
}

Grid::Grid(const Cuboid& box, int cells) : Grid(box, std::array<int, 2>{cells, cells}) {}

Grid Grid::with_spacing(const Cuboid& box, double h) {
    if (!(h > 0.0)) throw ValidationError("grid spacing must be positive");
    std::array<int, 2> cells{0, 0};
    for (int d = 0; d < box.dimension(); ++d) {
        // Tolerate roundoff so that e.g. 2 / (0.1 / 8) gives 160 cells, not 161.
        const double n = box.length(d) / h;
        cells[d] = std::max(kMinCells, static_cast<int>(std::ceil(n * (1.0 - 1e-12))));
    }
    return Grid(box, cells);
}

std::size_t Grid::node_count() const {
    std::size_t n = static_cast<std::size_t>(nodes(0));
    if (dimension() == 2) n *= static_cast<std::size_t>(nodes(1));
    return n;
}

double Grid::max_spacing() const {
    return dimension() == 1 ? spacing_[0] : std::max(spacing_[0], spacing_[1]);
}

Point Grid::node(int i, int j) const {
    // Pin the last node to the upper bound exactly.
    auto coord = [&](int axis, int k) {
        return k == cells_[axis] ? box_.upper(axis) : box_.lower(axis) + k * spacing_[axis];
    };
    Point p{coord(0, i), 0.0};
    if (dimension() == 2) p.y = coord(1, j);
    return p;
}

Point Grid::node(std::size_t idx) const {
    const auto nx = static_cast<std::size_t>(nodes(0));
    return node(static_cast<int>(idx % nx), static_cast<int>(idx / nx));
}

double Grid::weight(std::size_t idx) const {
    const auto nx = static_cast<std::size_t>(nodes(0));
    const int i = static_cast<int>(idx % nx);
    double w = spacing_[0] * ((i == 0 || i == cells_[0]) ? 0.5 : 1.0);
    if (dimension() == 2) {
        const int j = static_cast<int>(idx / nx);
        w *= spacing_[1] * ((j == 0 || j == cells_[1]) ? 0.5 : 1.0);
    }
    return w;
}

bool Grid::operator==(const Grid& other) const {
    if (dimension() != other.dimension() || cells_ != other.cells_) return false;
    for (int d = 0; d < dimension(); ++d) {
        if (box_.lower(d) != other.box_.lower(d) || box_.upper(d) != other.box_.upper(d)) return false;
    }
    return true;
}

GridField::GridField(const Grid& grid, double fill) : grid_(grid), values_(grid.node_count(), fill) {}

GridField::GridField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count()) {
        throw std::invalid_argument(
            fmt::format("field has {} values but grid has {} nodes", values_.size(), grid_.node_count()));
    }
}

GridField sample(const Grid& grid, const ScalarFunction& f) {
    GridField out(grid);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(grid.node(k));
    return out;
}

double integrate(const GridField& field) {
    const Grid& g = field.grid();
    CompensatedSum sum;
    for (std::size_t k = 0; k < field.size(); ++k) sum += g.weight(k) * field[k];
    return sum.value();
}

namespace {

// Derivative along one axis at index k of a line of n values with spacing h.
double line_derivative(const auto& at, int k, int n, double h) {
    if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

}  // namespace

std::vector<double> gradient_squared(const GridField& field) {
    const Grid& g = field.grid();
    const int nx = g.nodes(0);
    const int ny = g.nodes(1);
    std::vector<double> out(field.size(), 0.0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double dx = line_derivative([&](int k) { return field[g.index(k, j)]; }, i, nx, g.spacing(0));
            double sq = dx * dx;
            if (g.dimension() == 2) {
                const double dy =
                    line_derivative([&](int k) { return field[g.index(i, k)]; }, j, ny, g.spacing(1));
                sq += dy * dy;
            }
            out[g.index(i, j)] = sq;
        }
    }
    return out;
}

double interpolate(const GridField& field, const Point& p) {
    const Grid& g = field.grid();
    auto locate = [&](int axis, double coord, int& cell, double& t) {
        const double s = (coord - g.box().lower(axis)) / g.spacing(axis);
        cell = std::clamp(static_cast<int>(std::floor(s)), 0, g.cells(axis) - 1);
        t = std::clamp(s - cell, 0.0, 1.0);
    };
    int i = 0;
    double tx = 0.0;
    locate(0, p.x, i, tx);
    if (g.dimension() == 1) return (1.0 - tx) * field[g.index(i)] + tx * field[g.index(i + 1)];
    int j = 0;
    double ty = 0.0;
    locate(1, p.y, j, ty);
    return (1.0 - tx) * (1.0 - ty) * field[g.index(i, j)] + tx * (1.0 - ty) * field[g.index(i + 1, j)] +
           (1.0 - tx) * ty * field[g.index(i, j + 1)] + tx * ty * field[g.index(i + 1, j + 1)];
}

double norm(const GridField& field, const NormKind& kind) {
    const Grid& g = field.grid();
    CompensatedSum sum;
    if (std::holds_alternative<L2Norm>(kind)) {
        for (std::size_t k = 0; k < field.size(); ++k) sum += g.weight(k) * field[k] * field[k];
    } else if (std::holds_alternative<H1Norm>(kind)) {
        const auto grad2 = gradient_squared(field);
        for (std::size_t k = 0; k < field.size(); ++k) sum += g.weight(k) * (grad2[k] + field[k] * field[k]);
    } else if (const auto* phi = std::get_if<PhiEpsNorm>(&kind)) {
        const auto grad2 = gradient_squared(field);
        for (std::size_t k = 0; k < field.size(); ++k) {
            const double w = phase_field(signed_distance(phi->shape, g.node(k)), phi->eps);
            sum += g.weight(k) * w * (grad2[k] + field[k] * field[k]);
        }
    } else {
        const auto& delta = std::get<DeltaEpsNorm>(kind);
        for (std::size_t k = 0; k < field.size(); ++k) {
            const double s = phase_field_slope(signed_distance(delta.shape, g.node(k)), delta.eps);
            sum += g.weight(k) * field[k] * field[k] * s;
        }
    }
    return std::sqrt(std::max(0.0, sum.value()));
}

}  // namespace ddm
