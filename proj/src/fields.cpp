#include "ddm/fields.hpp"

#include <cmath>

#include <fmt/format.h>

namespace ddm {

void ProblemSpec::validate() const {
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    if (!(beta > 0.0)) throw ValidationError("beta must be positive");
    if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
    if (!(kappa >= 0.0)) throw ValidationError("kappa must be nonnegative");
    if (kappa > 0.0 && dimension() != 1) throw ValidationError("Robin case supported in 1D only");
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma) || !std::isfinite(kappa)) {
        throw ValidationError("problem constants must be finite");
    }
    clearance(cuboid, shape);
    if (dimension() == 1 && (q.uses_y() || h.uses_y() || g.uses_y())) {
        throw ValidationError("1D data expressions may not reference y");
    }
}

void ProblemSpec::validate_layer(double eps, double clearance_factor) const {
    if (!(eps > 0.0) || !(eps < 1.0)) {
        throw ValidationError(fmt::format("eps must lie in (0, 1), got {}", eps));
    }
    const double margin = clearance(cuboid, shape);
    if (!(margin > clearance_factor * eps)) {
        throw ValidationError(fmt::format(
            "clearance rule violated: interface is {} from the domain boundary, needs more than {} x eps = {}",
            margin, clearance_factor, clearance_factor * eps));
    }
}

bool ProblemSpec::has_constant_data() const {
    return q.is_constant() && h.is_constant() && g.is_constant();
}

DiffuseCoefficients coeff_diffuse(const ProblemSpec& spec, const Point& x, double eps) {
    const double r = signed_distance(spec.shape, x);
    const double phi = phase_field(r, eps);
    const double qv = spec.q(x);
    const double hv = spec.h(x);
    return {
        spec.alpha + (1.0 - spec.alpha) * phi,
        spec.beta + (spec.gamma - spec.beta) * phi,
        hv + (qv - hv) * phi,
        phase_field_slope(r, eps),
    };
}

SharpCoefficients coeff_sharp(const ProblemSpec& spec, const Point& x) {
    if (counts_as_inside(signed_distance(spec.shape, x))) return {1.0, spec.gamma, spec.q(x)};
    return {spec.alpha, spec.beta, spec.h(x)};
}

Point edge_midpoint(const Grid& grid, int axis, int i, int j) {
    Point p = grid.node(i, j);
    if (axis == 0) {
        p.x += 0.5 * grid.spacing(0);
    } else {
        p.y += 0.5 * grid.spacing(1);
    }
    return p;
}

DiffuseSamples sample_diffuse(const ProblemSpec& spec, const Grid& grid, double eps) {
    const int nx = grid.nodes(0);
    const int ny = grid.nodes(1);
    const std::size_t n = grid.node_count();
    auto d_at = [&](const Point& p) {
        return spec.alpha + (1.0 - spec.alpha) * phase_field(signed_distance(spec.shape, p), eps);
    };

    DiffuseSamples s;
    s.face_D[0].reserve(static_cast<std::size_t>(nx - 1) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) s.face_D[0].push_back(d_at(edge_midpoint(grid, 0, i, j)));
    }
    if (grid.dimension() == 2) {
        s.face_D[1].reserve(static_cast<std::size_t>(nx) * (ny - 1));
        for (int j = 0; j + 1 < ny; ++j) {
            for (int i = 0; i < nx; ++i) s.face_D[1].push_back(d_at(edge_midpoint(grid, 1, i, j)));
        }
    }
    s.c.resize(n);
    s.f.resize(n);
    s.slope.resize(n);
    s.g.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Point p = grid.node(k);
        const auto co = coeff_diffuse(spec, p, eps);
        s.c[k] = co.c;
        s.f[k] = co.f;
        s.slope[k] = co.slope;
        s.g[k] = spec.g(p);
    }
    return s;
}

}  // namespace ddm
