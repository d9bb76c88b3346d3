#include "ddm/energy.hpp"

#include <cmath>
#include <numbers>

#include "ddm/quadrature.hpp"
#include "ddm/summation.hpp"

namespace ddm {

namespace {

// Calls visit(a, b, weight) for every grid edge, where weight·(u_b − u_a)² is
// the edge's contribution to ∫D|∇u|² before multiplying by D, and `axis`/`k`
// locate the edge in DiffuseSamples::face_D.
template <class Visit>
void for_each_edge(const Grid& grid, Visit&& visit) {
    const int nx = grid.nodes(0);
    const int ny = grid.nodes(1);
    auto transverse = [&](int axis, int k) {
        if (grid.dimension() == 1) return 1.0;
        const int other = 1 - axis;
        return grid.spacing(other) * ((k == 0 || k == grid.cells(other)) ? 0.5 : 1.0);
    };
    for (int j = 0; j < ny; ++j) {
        const double wt = transverse(0, j) / grid.spacing(0);
        for (int i = 0; i + 1 < nx; ++i) {
            visit(0, i, j, static_cast<std::size_t>(j) * (nx - 1) + i, grid.index(i, j), grid.index(i + 1, j), wt);
        }
    }
    if (grid.dimension() == 2) {
        for (int j = 0; j + 1 < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double wt = transverse(1, i) / grid.spacing(1);
                visit(1, i, j, static_cast<std::size_t>(j) * nx + i, grid.index(i, j), grid.index(i, j + 1), wt);
            }
        }
    }
}

EnergyBreakdown finish(CompensatedSum grad, CompensatedSum zeroth, CompensatedSum load, CompensatedSum surface) {
    EnergyBreakdown e;
    e.gradient = grad.value();
    e.zeroth = zeroth.value();
    e.load = load.value();
    e.surface = surface.value();
    e.total = e.gradient + e.zeroth + e.load + e.surface;
    return e;
}

const GaussRule& gauss8() {
    static const GaussRule rule = gauss_legendre(8);
    return rule;
}

}  // namespace

EnergyBreakdown energy_diffuse(const ProblemSpec& spec, const Grid& grid, double eps, const GridField& u) {
    return energy_diffuse(spec, sample_diffuse(spec, grid, eps), u);
}

EnergyBreakdown energy_diffuse(const ProblemSpec& spec, const DiffuseSamples& samples, const GridField& u) {
    const Grid& grid = u.grid();
    CompensatedSum grad, zeroth, load, surface;
    for_each_edge(grid, [&](int axis, int, int, std::size_t face, std::size_t a, std::size_t b, double wt) {
        const double du = u[b] - u[a];
        grad += 0.5 * samples.face_D[axis][face] * wt * du * du;
    });
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double w = grid.weight(k);
        const double v = u[k];
        zeroth += 0.5 * w * samples.c[k] * v * v;
        load += -w * samples.f[k] * v;
        surface += w * (0.5 * spec.kappa * v * v + samples.g[k] * v) * samples.slope[k];
    }
    return finish(grad, zeroth, load, surface);
}

EnergyBreakdown energy_sharp(const ProblemSpec& spec, const GridField& u) {
    const Grid& grid = u.grid();
    CompensatedSum grad, zeroth, load, surface;
    for_each_edge(grid, [&](int axis, int i, int j, std::size_t, std::size_t a, std::size_t b, double wt) {
        Point mid = grid.node(i, j);
        if (axis == 0) {
            mid.x += 0.5 * grid.spacing(0);
        } else {
            mid.y += 0.5 * grid.spacing(1);
        }
        const double d = counts_as_inside(signed_distance(spec.shape, mid)) ? 1.0 : spec.alpha;
        const double du = u[b] - u[a];
        grad += 0.5 * d * wt * du * du;
    });
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Point p = grid.node(k);
        const auto co = coeff_sharp(spec, p);
        const double w = grid.weight(k);
        zeroth += 0.5 * w * co.c * u[k] * u[k];
        load += -w * co.f * u[k];
    }
    surface += surface_integral(spec.shape, [&](const Point& p) {
        const double v = interpolate(u, p);
        return 0.5 * spec.kappa * v * v + spec.g(p) * v;
    });
    return finish(grad, zeroth, load, surface);
}

Evaluable evaluable(const Expression& e) {
    Evaluable out;
    out.value = [e](const Point& p) { return e(p); };
    out.gradient = [e](const Point& p) {
        constexpr double step = 1e-3;
        auto d = [&](Point dir) {
            auto at = [&](double s) { return e(Point{p.x + s * dir.x, p.y + s * dir.y}); };
            return (-at(2 * step) + 8.0 * at(step) - 8.0 * at(-step) + at(-2 * step)) / (12.0 * step);
        };
        return Point{d({1.0, 0.0}), e.uses_y() ? d({0.0, 1.0}) : 0.0};
    };
    return out;
}

Evaluable evaluable(const SharpSolution& s) {
    Evaluable out;
    out.value = [&s](const Point& p) { return s.value(p); };
    out.gradient = [&s](const Point& p) { return s.gradient(p); };
    return out;
}

double sharp_volume_integral(const ProblemSpec& spec, const std::function<double(const Point&)>& inside,
                             const std::function<double(const Point&)>& outside) {
    const auto& rule = gauss8();
    if (const auto* iv = std::get_if<Interval>(&spec.shape)) {
        auto piece = [&](const std::function<double(const Point&)>& f, double lo, double hi) {
            return composite_gauss([&](double x) { return f(Point{x, 0.0}); }, lo, hi, 64, rule);
        };
        const double a = spec.cuboid.lower(0);
        const double b = spec.cuboid.upper(0);
        return piece(outside, a, iv->a1) + piece(inside, iv->a1, iv->b1) + piece(outside, iv->b1, b);
    }
    const auto& disk = std::get<Disk>(spec.shape);
    const Cuboid& box = spec.cuboid;
    // Outer integrand over the whole box.
    const double box_part = composite_gauss(
        [&](double y) {
            return composite_gauss([&](double x) { return outside(Point{x, y}); }, box.lower(0), box.upper(0), 32,
                                   rule);
        },
        box.lower(1), box.upper(1), 32, rule);
    // (inside − outside) over the disk in polar coordinates; the angular
    // trapezoid rule is spectrally accurate for periodic integrands.
    constexpr int kAngles = 512;
    const double disk_part = composite_gauss(
        [&](double rho) {
            CompensatedSum s;
            for (int k = 0; k < kAngles; ++k) {
                const double th = 2.0 * std::numbers::pi * k / kAngles;
                const Point p{disk.center.x + rho * std::cos(th), disk.center.y + rho * std::sin(th)};
                s += inside(p) - outside(p);
            }
            return rho * s.value() * 2.0 * std::numbers::pi / kAngles;
        },
        0.0, disk.radius, 16, rule);
    return box_part + disk_part;
}

double surface_integral(const InterfaceShape& shape, const std::function<double(const Point&)>& w) {
    if (const auto* iv = std::get_if<Interval>(&shape)) return w(Point{iv->a1, 0.0}) + w(Point{iv->b1, 0.0});
    const auto& disk = std::get<Disk>(shape);
    CompensatedSum s;
    for (int k = 0; k < kCircleSegments; ++k) {
        const double th = 2.0 * std::numbers::pi * k / kCircleSegments;
        s += w(Point{disk.center.x + disk.radius * std::cos(th), disk.center.y + disk.radius * std::sin(th)});
    }
    return s.value() * 2.0 * std::numbers::pi * disk.radius / kCircleSegments;
}

EnergyBreakdown energy_sharp(const ProblemSpec& spec, const Evaluable& u) {
    auto grad_sq = [&](const Point& p) {
        const Point g = u.gradient(p);
        return g.x * g.x + g.y * g.y;
    };
    EnergyBreakdown e;
    e.gradient = sharp_volume_integral(
        spec, [&](const Point& p) { return 0.5 * grad_sq(p); },
        [&](const Point& p) { return 0.5 * spec.alpha * grad_sq(p); });
    e.zeroth = sharp_volume_integral(
        spec,
        [&](const Point& p) {
            const double v = u.value(p);
            return 0.5 * spec.gamma * v * v;
        },
        [&](const Point& p) {
            const double v = u.value(p);
            return 0.5 * spec.beta * v * v;
        });
    e.load = sharp_volume_integral(
        spec, [&](const Point& p) { return -spec.q(p) * u.value(p); },
        [&](const Point& p) { return -spec.h(p) * u.value(p); });
    e.surface = surface_integral(spec.shape, [&](const Point& p) {
        const double v = u.value(p);
        return 0.5 * spec.kappa * v * v + spec.g(p) * v;
    });
    e.total = e.gradient + e.zeroth + e.load + e.surface;
    return e;
}

ErrorNorms error_norms(const GridField& u, const SharpSolution& ref) {
    GridField diff(u.grid());
    for (std::size_t k = 0; k < u.size(); ++k) diff[k] = u[k] - ref.value(u.grid().node(k));
    return {norm(diff, L2Norm{}), norm(diff, H1Norm{})};
}

}  // namespace ddm
