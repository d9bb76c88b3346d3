#include "ddm/sharp_ref.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ddm/energy.hpp"
#include "ddm/quadrature.hpp"

namespace ddm {

double ExpPiece::value(double x) const {
    const double t = mu * (x - mid);
    return base + A * std::cosh(t) + B * std::sinh(t);
}

double ExpPiece::derivative(double x) const {
    const double t = mu * (x - mid);
    return mu * (A * std::sinh(t) + B * std::cosh(t));
}

SharpSolution::SharpSolution(Representation rep, double energy, SolveReport report)
    : rep_(std::move(rep)), energy_(energy), report_(report) {}

namespace {

const ExpPiece& piece_at(const Closed1D& c, double x) {
    if (x < c.pieces[0].hi) return c.pieces[0];
    if (x <= c.pieces[1].hi) return c.pieces[1];
    return c.pieces[2];
}

std::size_t fem_segment(const FittedFem1D& f, double x) {
    const auto it = std::upper_bound(f.nodes.begin(), f.nodes.end(), x);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - f.nodes.begin()));
    return std::min(k, f.nodes.size() - 1) - 1;
}

struct TriangleHit {
    std::array<std::size_t, 3> idx;
    std::array<double, 3> bary;
    std::array<Point, 3> grad;  // gradients of the three basis functions
};

TriangleHit locate(const CutFem2D& c, const Point& p) {
    const Grid& g = c.mesh;
    const double sx = (p.x - g.box().lower(0)) / g.spacing(0);
    const double sy = (p.y - g.box().lower(1)) / g.spacing(1);
    const int i = std::clamp(static_cast<int>(std::floor(sx)), 0, g.cells(0) - 1);
    const int j = std::clamp(static_cast<int>(std::floor(sy)), 0, g.cells(1) - 1);
    const double xi = std::clamp(sx - i, 0.0, 1.0);
    const double eta = std::clamp(sy - j, 0.0, 1.0);
    const double hx = g.spacing(0);
    const double hy = g.spacing(1);
    TriangleHit t;
    if (xi >= eta) {
        t.idx = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1)};
        t.bary = {1.0 - xi, xi - eta, eta};
        t.grad = {Point{-1.0 / hx, 0.0}, Point{1.0 / hx, -1.0 / hy}, Point{0.0, 1.0 / hy}};
    } else {
        t.idx = {g.index(i, j), g.index(i + 1, j + 1), g.index(i, j + 1)};
        t.bary = {1.0 - eta, xi, eta - xi};
        t.grad = {Point{0.0, -1.0 / hy}, Point{1.0 / hx, 0.0}, Point{-1.0 / hx, 1.0 / hy}};
    }
    return t;
}

}  // namespace

double SharpSolution::value(const Point& p) const {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Closed1D>) {
                return piece_at(r, p.x).value(p.x);
            } else if constexpr (std::is_same_v<T, FittedFem1D>) {
                const std::size_t k = fem_segment(r, p.x);
                const double x0 = r.nodes[k];
                const double x1 = r.nodes[k + 1];
                const double t = std::clamp((p.x - x0) / (x1 - x0), 0.0, 1.0);
                return (1.0 - t) * r.values[k] + t * r.values[k + 1];
            } else {
                const auto hit = locate(r, p);
                double v = 0.0;
                for (int k = 0; k < 3; ++k) v += hit.bary[k] * r.values[hit.idx[k]];
                return v;
            }
        },
        rep_);
}

Point SharpSolution::gradient(const Point& p) const {
    return std::visit(
        [&](const auto& r) -> Point {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Closed1D>) {
                return {piece_at(r, p.x).derivative(p.x), 0.0};
            } else if constexpr (std::is_same_v<T, FittedFem1D>) {
                const std::size_t k = fem_segment(r, p.x);
                return {(r.values[k + 1] - r.values[k]) / (r.nodes[k + 1] - r.nodes[k]), 0.0};
            } else {
                const auto hit = locate(r, p);
                Point g{0.0, 0.0};
                for (int k = 0; k < 3; ++k) {
                    g.x += hit.grad[k].x * r.values[hit.idx[k]];
                    g.y += hit.grad[k].y * r.values[hit.idx[k]];
                }
                return g;
            }
        },
        rep_);
}

std::string SharpSolution::kind_name() const {
    switch (rep_.index()) {
        case 0: return "closed-1d";
        case 1: return "fitted-fem-1d";
        default: return "cut-fem-2d";
    }
}

// ---------------------------------------------------------------------------
// Closed form

SharpSolution solve_sharp_1d_closed(const ProblemSpec& spec) {
    const auto* iv = std::get_if<Interval>(&spec.shape);
    if (iv == nullptr || spec.dimension() != 1) throw ValidationError("closed-form reference needs a 1D problem");
    if (!spec.has_constant_data()) throw ValidationError("closed-form reference needs constant q, h, g");

    const Point origin{};
    const double q = spec.q(origin);
    const double hv = spec.h(origin);
    const double g = spec.g(origin);
    const double a = spec.cuboid.lower(0);
    const double b = spec.cuboid.upper(0);
    const double mu_in = std::sqrt(spec.gamma);
    const double mu_out = std::sqrt(spec.beta / spec.alpha);

    Closed1D sol;
    auto make = [](double lo, double hi, double mu, double base) {
        return ExpPiece{lo, hi, 0.5 * (lo + hi), mu, base, 0.0, 0.0};
    };
    sol.pieces = {make(a, iv->a1, mu_out, hv / spec.beta), make(iv->a1, iv->b1, mu_in, q / spec.gamma),
                  make(iv->b1, b, mu_out, hv / spec.beta)};

    // Unknowns (A_L, B_L, A_M, B_M, A_R, B_R).
    constexpr int n = 6;
    std::vector<double> m(n * n, 0.0);
    std::vector<double> rhs(n, 0.0);
    auto value_row = [&](int row, int piece, double x, double scale) {
        const auto& pc = sol.pieces[piece];
        const double t = pc.mu * (x - pc.mid);
        m[row * n + 2 * piece] += scale * std::cosh(t);
        m[row * n + 2 * piece + 1] += scale * std::sinh(t);
    };
    auto slope_row = [&](int row, int piece, double x, double scale) {
        const auto& pc = sol.pieces[piece];
        const double t = pc.mu * (x - pc.mid);
        m[row * n + 2 * piece] += scale * pc.mu * std::sinh(t);
        m[row * n + 2 * piece + 1] += scale * pc.mu * std::cosh(t);
    };
    const double base_in = sol.pieces[1].base;
    const double base_out = sol.pieces[0].base;

    slope_row(0, 0, a, 1.0);  // α u' = 0 at a
    slope_row(1, 2, b, 1.0);  // α u' = 0 at b
    value_row(2, 0, iv->a1, 1.0);  // continuity at a₁
    value_row(2, 1, iv->a1, -1.0);
    rhs[2] = base_in - base_out;
    value_row(3, 1, iv->b1, 1.0);  // continuity at b₁
    value_row(3, 2, iv->b1, -1.0);
    rhs[3] = base_out - base_in;
    // At a₁ (n₁ = −1): u₁' − α u₂' − κ u₁ = g
    slope_row(4, 1, iv->a1, 1.0);
    slope_row(4, 0, iv->a1, -spec.alpha);
    value_row(4, 1, iv->a1, -spec.kappa);
    rhs[4] = g + spec.kappa * base_in;
    // At b₁ (n₁ = +1): −u₁' + α u₂' − κ u₁ = g
    slope_row(5, 1, iv->b1, -1.0);
    slope_row(5, 2, iv->b1, spec.alpha);
    value_row(5, 1, iv->b1, -spec.kappa);
    rhs[5] = g + spec.kappa * base_in;

    std::vector<double> coef;
    try {
        coef = dense_solve(m, rhs);
    } catch (const SingularMatrix& e) {
        throw SingularMatching(e.what());
    }
    for (int p = 0; p < 3; ++p) {
        sol.pieces[p].A = coef[2 * p];
        sol.pieces[p].B = coef[2 * p + 1];
    }
    SharpSolution out(sol, 0.0, SolveReport{0, 0.0, true});
    const double energy = energy_sharp(spec, evaluable(out)).total;
    return SharpSolution(sol, energy, SolveReport{0, 0.0, true});
}

// ---------------------------------------------------------------------------
// Interface-fitted FEM in 1D

std::vector<double> fitted_mesh_1d(const ProblemSpec& spec, int cells) {
    const auto* iv = std::get_if<Interval>(&spec.shape);
    if (iv == nullptr) throw ValidationError("fitted FEM reference needs a 1D interval shape");
    const double a = spec.cuboid.lower(0);
    const double b = spec.cuboid.upper(0);
    const double len = b - a;
    const int n_left = std::max(1, static_cast<int>(std::lround(cells * (iv->a1 - a) / len)));
    const int n_right = std::max(1, static_cast<int>(std::lround(cells * (b - iv->b1) / len)));
    const int n_mid = std::max(1, cells - n_left - n_right);

    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(n_left + n_mid + n_right + 1));
    auto fill = [&](double lo, double hi, int n) {
        for (int k = 0; k < n; ++k) nodes.push_back(lo + (hi - lo) * k / n);
    };
    fill(a, iv->a1, n_left);
    fill(iv->a1, iv->b1, n_mid);
    fill(iv->b1, b, n_right);
    nodes.push_back(b);
    return nodes;
}

FemSystem assemble_fitted_1d(const ProblemSpec& spec, const std::vector<double>& nodes) {
    const auto& iv = std::get<Interval>(spec.shape);
    static const GaussRule rule = gauss_legendre(3);
    const std::size_t n = nodes.size();
    SparseMatrix::Builder builder(n);
    FemSystem sys;
    sys.b.assign(n, 0.0);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double x0 = nodes[e];
        const double x1 = nodes[e + 1];
        const double len = x1 - x0;
        const bool inside = counts_as_inside(signed_distance(spec.shape, Point{0.5 * (x0 + x1), 0.0}));
        const double d = inside ? 1.0 : spec.alpha;
        const double c = inside ? spec.gamma : spec.beta;
        const Expression& f = inside ? spec.q : spec.h;

        const double k = d / len;
        const double m = c * len / 6.0;
        builder.add(e, e, k + 2.0 * m);
        builder.add(e + 1, e + 1, k + 2.0 * m);
        builder.add(e, e + 1, -k + m);
        builder.add(e + 1, e, -k + m);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double t = 0.5 * (1.0 + rule.nodes[q]);
            const double fx = f(Point{x0 + t * len, 0.0});
            const double w = 0.5 * len * rule.weights[q];
            sys.b[e] += w * fx * (1.0 - t);
            sys.b[e + 1] += w * fx * t;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (nodes[k] == iv.a1 || nodes[k] == iv.b1) {
            builder.add(k, k, spec.kappa);
            sys.b[k] -= spec.g(Point{nodes[k], 0.0});
        }
    }
    sys.A = std::move(builder).build();
    return sys;
}

SharpSolution solve_sharp_1d_fem(const ProblemSpec& spec, int cells) {
    auto nodes = fitted_mesh_1d(spec, cells);
    const auto sys = assemble_fitted_1d(spec, nodes);
    auto values = thomas_solve(Tridiagonal::from_sparse(sys.A), sys.b);
    SolveReport report{0, relative_residual(sys.A, values, sys.b), true};
    const double energy = sys.A.quadratic_form(values, sys.b);
    return SharpSolution(FittedFem1D{std::move(nodes), std::move(values)}, energy, report);
}

// ---------------------------------------------------------------------------
// Cut-element FEM in 2D

namespace {

constexpr double kCutTolerance = 1e-12;

struct Triangle {
    std::array<std::size_t, 3> idx;
    std::array<Point, 3> p;
};

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

// Barycentric coordinates of q in triangle t.
std::array<double, 3> barycentric(const Triangle& t, const Point& q) {
    const double area = signed_area(t.p[0], t.p[1], t.p[2]);
    return {signed_area(q, t.p[1], t.p[2]) / area, signed_area(t.p[0], q, t.p[2]) / area,
            signed_area(t.p[0], t.p[1], q) / area};
}

struct Material {
    double D;
    double c;
    const Expression* f;
};

class CutAssembler {
public:
    CutAssembler(const ProblemSpec& spec, std::size_t n) : spec_(spec), builder_(n), b_(n, 0.0) {}

    // Integrates the region's terms over a convex polygon inside triangle t.
    void add_polygon(const Triangle& t, const std::vector<Point>& poly, const Material& reg) {
        std::array<Point, 3> grads = basis_gradients(t);
        Point centroid{0.0, 0.0};
        for (const auto& v : poly) {
            centroid.x += v.x / poly.size();
            centroid.y += v.y / poly.size();
        }
        double area = 0.0;
        std::array<double, 9> mass{};
        std::array<double, 3> load{};
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const Point& v0 = poly[k];
            const Point& v1 = poly[(k + 1) % poly.size()];
            const double sub = std::abs(signed_area(centroid, v0, v1));
            if (sub == 0.0) continue;
            area += sub;
            // Edge-midpoint rule, exact for quadratics.
            const std::array<Point, 3> qp = {mid(centroid, v0), mid(v0, v1), mid(v1, centroid)};
            for (const auto& q : qp) {
                const auto phi = barycentric(t, q);
                const double w = sub / 3.0;
                const double fq = (*reg.f)(q);
                for (int i = 0; i < 3; ++i) {
                    load[i] += w * fq * phi[i];
                    for (int j = 0; j < 3; ++j) mass[3 * i + j] += w * reg.c * phi[i] * phi[j];
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            b_[t.idx[i]] += load[i];
            for (int j = 0; j < 3; ++j) {
                const double stiff = reg.D * area * (grads[i].x * grads[j].x + grads[i].y * grads[j].y);
                builder_.add(t.idx[i], t.idx[j], stiff + mass[3 * i + j]);
            }
        }
    }

    // ∫ g u dS along the chord from p to q, u linear along the chord.
    void add_chord(const Triangle& t, const Point& p, const Point& q) {
        const Point m = mid(p, q);
        const double len = std::hypot(q.x - p.x, q.y - p.y);
        const auto phi = barycentric(t, m);
        const double gm = spec_.g(m);
        for (int i = 0; i < 3; ++i) b_[t.idx[i]] -= gm * len * phi[i];
    }

    FemSystem finish() && { return FemSystem{std::move(builder_).build(), std::move(b_)}; }

private:
    static Point mid(const Point& a, const Point& b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

    static std::array<Point, 3> basis_gradients(const Triangle& t) {
        const double two_area = 2.0 * signed_area(t.p[0], t.p[1], t.p[2]);
        std::array<Point, 3> g;
        for (int i = 0; i < 3; ++i) {
            const Point& a = t.p[(i + 1) % 3];
            const Point& b = t.p[(i + 2) % 3];
            g[i] = {(a.y - b.y) / two_area, (b.x - a.x) / two_area};
        }
        return g;
    }

    const ProblemSpec& spec_;
    SparseMatrix::Builder builder_;
    std::vector<double> b_;
};

// Parameter t in (0, 1) where the segment p0→p1 crosses the circle.
double crossing(const Point& p0, const Point& p1, const Point& center, double radius) {
    const double dx = p1.x - p0.x;
    const double dy = p1.y - p0.y;
    const double wx = p0.x - center.x;
    const double wy = p0.y - center.y;
    const double a = dx * dx + dy * dy;
    const double b = wx * dx + wy * dy;
    const double c = wx * wx + wy * wy - radius * radius;
    const double disc = b * b - a * c;
    if (disc <= 0.0) throw DegenerateCut("circle grazes a mesh edge");
    const double sq = std::sqrt(disc);
    // One endpoint is inside and one outside, so exactly one root lies in [0, 1].
    const double t1 = (-b - sq) / a;
    const double t2 = (-b + sq) / a;
    const double t = (t1 >= 0.0 && t1 <= 1.0) ? t1 : t2;
    if (!(t > kCutTolerance && t < 1.0 - kCutTolerance)) throw DegenerateCut("circle passes through a mesh vertex");
    return t;
}

}  // namespace

FemSystem assemble_cut_2d(const ProblemSpec& spec, const Grid& mesh, double radius, int* cut_elements) {
    const auto* disk = std::get_if<Disk>(&spec.shape);
    if (disk == nullptr || mesh.dimension() != 2) throw ValidationError("cut-FEM reference needs a 2D disk");
    if (spec.kappa != 0.0) throw ValidationError("Robin case supported in 1D only");

    const Material inside{1.0, spec.gamma, &spec.q};
    const Material outside{spec.alpha, spec.beta, &spec.h};
    CutAssembler assembler(spec, mesh.node_count());
    int cuts = 0;
    auto rdist = [&](const Point& p) { return radius - std::hypot(p.x - disk->center.x, p.y - disk->center.y); };

    auto handle = [&](const Triangle& t) {
        std::array<double, 3> r{};
        for (int k = 0; k < 3; ++k) {
            r[k] = rdist(t.p[k]);
            if (std::abs(r[k]) < kCutTolerance) throw DegenerateCut("circle passes through a mesh vertex");
        }
        const int n_in = (r[0] > 0) + (r[1] > 0) + (r[2] > 0);
        if (n_in == 3 || n_in == 0) {
            assembler.add_polygon(t, {t.p[0], t.p[1], t.p[2]}, n_in == 3 ? inside : outside);
            return;
        }
        ++cuts;
        // The lone vertex is on the minority side.
        int lone = 0;
        for (int k = 0; k < 3; ++k) {
            const bool in = r[k] > 0;
            if ((n_in == 1 && in) || (n_in == 2 && !in)) lone = k;
        }
        const int o1 = (lone + 1) % 3;
        const int o2 = (lone + 2) % 3;
        auto along = [&](int other) {
            const double s = crossing(t.p[lone], t.p[other], disk->center, radius);
            return Point{t.p[lone].x + s * (t.p[other].x - t.p[lone].x),
                         t.p[lone].y + s * (t.p[other].y - t.p[lone].y)};
        };
        const Point P = along(o1);
        const Point Q = along(o2);
        const bool lone_inside = r[lone] > 0;
        assembler.add_polygon(t, {t.p[lone], P, Q}, lone_inside ? inside : outside);
        assembler.add_polygon(t, {P, t.p[o1], t.p[o2], Q}, lone_inside ? outside : inside);
        assembler.add_chord(t, P, Q);
    };

    for (int j = 0; j < mesh.cells(1); ++j) {
        for (int i = 0; i < mesh.cells(0); ++i) {
            const Triangle lower{{mesh.index(i, j), mesh.index(i + 1, j), mesh.index(i + 1, j + 1)},
                                 {mesh.node(i, j), mesh.node(i + 1, j), mesh.node(i + 1, j + 1)}};
            const Triangle upper{{mesh.index(i, j), mesh.index(i + 1, j + 1), mesh.index(i, j + 1)},
                                 {mesh.node(i, j), mesh.node(i + 1, j + 1), mesh.node(i, j + 1)}};
            handle(lower);
            handle(upper);
        }
    }
    if (cut_elements != nullptr) *cut_elements = cuts;
    return std::move(assembler).finish();
}

SharpSolution solve_sharp_2d_cutfem(const ProblemSpec& spec, const Grid& mesh, const CgOptions& options) {
    const auto* disk = std::get_if<Disk>(&spec.shape);
    if (disk == nullptr) throw ValidationError("cut-FEM reference needs a 2D disk");
    CutFem2D rep{mesh, {}, 0, disk->radius, {}};
    FemSystem sys;
    for (int attempt = 0;; ++attempt) {
        try {
            sys = assemble_cut_2d(spec, mesh, rep.radius, &rep.cut_elements);
            break;
        } catch (const DegenerateCut& e) {
            if (attempt >= 8) throw;
            rep.radius += 1e-10;
            rep.notes.push_back(fmt::format("{}; radius perturbed to {:.17g}", e.what(), rep.radius));
        }
    }
    auto result = cg_solve(sys.A, sys.b, options);
    rep.values = std::move(result.x);
    const double energy = sys.A.quadratic_form(rep.values, sys.b);
    return SharpSolution(std::move(rep), energy, result.report);
}

}  // namespace ddm
