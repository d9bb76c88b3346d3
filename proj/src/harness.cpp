#include "ddm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <tuple>
#include <stdexcept>

#include <fmt/format.h>

#include "ddm/energy.hpp"
#include "ddm/summation.hpp"

namespace ddm {

std::string to_string(ReferenceKind kind) {
    switch (kind) {
        case ReferenceKind::Auto: return "auto";
        case ReferenceKind::Closed1D: return "closed";
        case ReferenceKind::FittedFem1D: return "fem";
        case ReferenceKind::CutFem2D: return "cutfem";
    }
    return "auto";
}

ReferenceKind reference_kind_from_string(const std::string& text) {
    if (text == "auto") return ReferenceKind::Auto;
    if (text == "closed") return ReferenceKind::Closed1D;
    if (text == "fem") return ReferenceKind::FittedFem1D;
    if (text == "cutfem") return ReferenceKind::CutFem2D;
    throw ValidationError(fmt::format("unknown reference kind '{}' (expected auto, closed, fem or cutfem)", text));
}

Grid coupled_grid(const Cuboid& box, double eps, double rho, std::size_t max_nodes, bool* capped) {
    if (!(rho >= kMinLayerResolution)) {
        throw ValidationError(fmt::format("rho must be at least {}, got {}", kMinLayerResolution, rho));
    }
    Grid grid = Grid::with_spacing(box, eps / rho);
    if (capped != nullptr) *capped = false;
    if (grid.node_count() <= max_nodes) return grid;

    const int dim = box.dimension();
    const double shrink = std::pow(static_cast<double>(max_nodes) / grid.node_count(), 1.0 / dim);
    std::array<int, 2> cells{0, 0};
    for (int d = 0; d < dim; ++d) {
        cells[d] = std::max(Grid::kMinCells, static_cast<int>(std::floor((grid.cells(d) + 1) * shrink)) - 1);
    }
    auto count = [&] {
        std::size_t n = static_cast<std::size_t>(cells[0] + 1);
        if (dim == 2) n *= static_cast<std::size_t>(cells[1] + 1);
        return n;
    };
    while (count() > max_nodes && cells[0] > Grid::kMinCells) {
        for (int d = 0; d < dim; ++d) cells[d] = std::max(Grid::kMinCells, cells[d] - 1);
    }
    if (capped != nullptr) *capped = true;
    return Grid(box, cells);
}

SharpSolution solve_reference(const ProblemSpec& spec, const SweepOptions& options) {
    ReferenceKind kind = options.reference;
    if (kind == ReferenceKind::Auto) {
        if (spec.dimension() == 2) {
            kind = ReferenceKind::CutFem2D;
        } else {
            kind = spec.has_constant_data() ? ReferenceKind::Closed1D : ReferenceKind::FittedFem1D;
        }
    }
    switch (kind) {
        case ReferenceKind::Closed1D: return solve_sharp_1d_closed(spec);
        case ReferenceKind::FittedFem1D:
            if (spec.dimension() != 1) throw ValidationError("fem reference is 1D only");
            return solve_sharp_1d_fem(spec, options.reference_cells > 0 ? options.reference_cells : 16384);
        case ReferenceKind::CutFem2D: {
            if (spec.dimension() != 2) throw ValidationError("cutfem reference is 2D only");
            const int cells = options.reference_cells > 0 ? options.reference_cells : 256;
            CgOptions cg;
            cg.tol = std::min(options.tol, 1e-10);
            cg.max_iter = std::max(options.max_iter, 50000);
            return solve_sharp_2d_cutfem(spec, Grid(spec.cuboid, cells), cg);
        }
        case ReferenceKind::Auto: break;
    }
    throw ValidationError("unreachable reference kind");
}

ColumnCheck check_column(const std::string& name, std::span<const double> values, const MonotoneCriteria& criteria) {
    ColumnCheck c;
    c.column = name;
    if (values.empty()) {
        c.message = "no data";
        return c;
    }
    c.exact = std::all_of(values.begin(), values.end(),
                          [&](double v) { return std::abs(v) <= criteria.exact_floor; });
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        const bool both_exact = values[k] <= criteria.exact_floor && values[k + 1] <= criteria.exact_floor;
        if (!(values[k + 1] < values[k]) && !both_exact) ++c.non_monotone_steps;
    }
    c.strictly_decreasing = c.non_monotone_steps == 0;
    c.last_over_first = values.front() != 0.0 ? values.back() / values.front() : 0.0;
    const bool ratio_ok = c.exact || values.size() < criteria.ratio_min_points || c.last_over_first <= criteria.max_ratio;
    if (c.exact) {
        c.passed = true;
        c.message = fmt::format("all values <= {:g}", criteria.exact_floor);
        return c;
    }
    c.passed = c.non_monotone_steps <= criteria.tolerated_steps && ratio_ok;
    if (!ratio_ok) {
        c.message = fmt::format("last/first = {:.4g} exceeds {:g}", c.last_over_first, criteria.max_ratio);
    } else if (c.non_monotone_steps > criteria.tolerated_steps) {
        c.message = fmt::format("{} non-monotone steps", c.non_monotone_steps);
    } else if (c.non_monotone_steps > 0) {
        c.message = "warning: one non-monotone step; convergence is only guaranteed along a subsequence";
    } else {
        c.message = "strictly decreasing";
    }
    return c;
}

bool SweepReport::passed() const {
    const bool rows_ok = !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.ok; });
    return rows_ok && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

bool LemmaReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

RateFit fit_rate(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 3) throw DegenerateData("rate fit needs at least three (eps, error) pairs");
    double sx = 0.0, sy = 0.0;
    for (const auto& [eps, err] : pairs) {
        if (!(eps > 0.0) || !(err > 0.0) || !std::isfinite(eps) || !std::isfinite(err)) {
            throw DegenerateData(fmt::format("rate fit needs positive finite data, got ({}, {})", eps, err));
        }
        sx += std::log(eps);
        sy += std::log(err);
    }
    const double n = static_cast<double>(pairs.size());
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [eps, err] : pairs) {
        const double dx = std::log(eps) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(err) - my);
    }
    if (sxx == 0.0) throw DegenerateData("rate fit needs distinct eps values");
    RateFit fit;
    fit.rate = sxy / sxx;
    fit.points = pairs.size();
    double ss = 0.0;
    for (const auto& [eps, err] : pairs) {
        const double r = std::log(err) - (my + fit.rate * (std::log(eps) - mx));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

namespace {

void require_decreasing(std::span<const double> eps_list) {
    if (eps_list.empty()) throw ValidationError("eps list is empty");
    for (std::size_t k = 0; k + 1 < eps_list.size(); ++k) {
        if (!(eps_list[k + 1] < eps_list[k])) throw ValidationError("eps list must be strictly decreasing");
    }
}

// Evaluates fn(k) for every row, optionally on separate threads, joined in order.
template <class Row, class Fn>
std::vector<Row> map_rows(std::size_t count, bool parallel, Fn&& fn) {
    std::vector<Row> out(count);
    if (!parallel || count < 2) {
        for (std::size_t k = 0; k < count; ++k) out[k] = fn(k);
        return out;
    }
    std::vector<std::future<Row>> futures;
    futures.reserve(count);
    for (std::size_t k = 0; k < count; ++k) futures.push_back(std::async(std::launch::async, fn, k));
    for (std::size_t k = 0; k < count; ++k) out[k] = futures[k].get();
    return out;
}

}  // namespace

SweepRow sweep_row(const ProblemSpec& spec, double eps, const SweepOptions& options, const SharpSolution& ref,
                   GridField* solution) {
    const auto start = std::chrono::steady_clock::now();
    SweepRow row;
    row.eps = eps;
    try {
        const Grid grid = coupled_grid(spec.cuboid, eps, options.rho, options.max_nodes, &row.capped);
        row.h = grid.max_spacing();
        row.nodes = grid.node_count();
        DiffuseOptions dopt;
        dopt.tol = options.tol;
        dopt.max_iter = options.max_iter;
        auto sol = solve_diffuse(spec, grid, eps, dopt);
        const auto errs = error_norms(sol.u, ref);
        row.err_l2 = errs.l2;
        row.err_h1 = errs.h1;
        row.energy_diffuse = sol.energy;
        row.energy_sharp = ref.energy();
        row.energy_gap = std::abs(sol.energy - ref.energy());
        row.perimeter = integrate(
            sample(grid, [&](const Point& p) { return phase_field_slope(signed_distance(spec.shape, p), eps); }));
        row.u_h1 = norm(sol.u, H1Norm{});
        const double delta = norm(sol.u, DeltaEpsNorm{spec.shape, eps});
        row.trace_ratio = row.u_h1 > 0.0 ? delta / row.u_h1 : 0.0;
        row.iterations = sol.report.iterations;
        row.residual = sol.report.relative_residual;
        row.converged = sol.report.converged;
        row.ok = sol.report.converged;
        if (!row.ok) {
            row.error = fmt::format("linear solve did not converge (residual {:.3g} after {} iterations)",
                                    row.residual, row.iterations);
        }
        if (solution != nullptr) *solution = std::move(sol.u);
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

namespace {

std::vector<double> column(const std::vector<SweepRow>& rows, double SweepRow::*field) {
    std::vector<double> out;
    for (const auto& r : rows) {
        if (r.ok) out.push_back(r.*field);
    }
    return out;
}

std::optional<RateFit> rate_for(const std::vector<SweepRow>& rows, double SweepRow::*field) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& r : rows) {
        if (r.ok && !r.capped && r.*field > 1e-12) pairs.emplace_back(r.eps, r.*field);
    }
    if (pairs.size() < 3) return std::nullopt;
    return fit_rate(pairs);
}

}  // namespace

SweepReport build_sweep_report(const ProblemSpec& spec, const SweepOptions& options, const SharpSolution& ref,
                               std::vector<SweepRow> rows) {
    SweepReport report;
    report.shape = describe(spec.shape);
    report.reference = ref.kind_name();
    report.reference_energy = ref.energy();
    report.options = options;
    report.rows = std::move(rows);

    if (std::none_of(report.rows.begin(), report.rows.end(), [](const auto& r) { return r.ok; })) {
        throw std::runtime_error(fmt::format("every sweep row failed; first error: {}", report.rows.front().error));
    }
    report.rate_l2 = rate_for(report.rows, &SweepRow::err_l2);
    report.rate_h1 = rate_for(report.rows, &SweepRow::err_h1);

    report.checks.push_back(check_column("err_l2", column(report.rows, &SweepRow::err_l2)));
    report.checks.push_back(check_column("err_h1", column(report.rows, &SweepRow::err_h1)));
    report.checks.push_back(check_column("energy_gap", column(report.rows, &SweepRow::energy_gap)));

    report.notes.push_back(
        "H1 convergence of u_eps to u_0 is guaranteed along a subsequence only; strict decrease over the full "
        "sequence is an empirical check and a single non-monotone step is reported as a warning.");
    report.notes.push_back("Convergence rates are diagnostic; no rate is asserted.");
    for (const auto& r : report.rows) {
        if (r.capped) {
            report.notes.push_back(fmt::format("eps = {:g}: grid capped at {} nodes (eps/h = {:.3g}); excluded from rate fits",
                                               r.eps, r.nodes, r.eps / r.h));
        }
        if (!r.ok) report.notes.push_back(fmt::format("eps = {:g}: {}", r.eps, r.error));
    }
    if (const auto* cut = std::get_if<CutFem2D>(&ref.representation())) {
        for (const auto& n : cut->notes) report.notes.push_back("reference: " + n);
    }
    return report;
}

void validate_sweep_inputs(const ProblemSpec& spec, std::span<const double> eps_list, const SweepOptions& options) {
    spec.validate();
    require_decreasing(eps_list);
    for (double eps : eps_list) spec.validate_layer(eps, options.clearance_factor);
    if (!(options.rho >= kMinLayerResolution)) {
        throw ValidationError(fmt::format("rho must be at least {}, got {}", kMinLayerResolution, options.rho));
    }
}

SweepReport eps_sweep(const ProblemSpec& spec, std::span<const double> eps_list, const SweepOptions& options) {
    validate_sweep_inputs(spec, eps_list, options);
    const SharpSolution ref = solve_reference(spec, options);
    auto rows = map_rows<SweepRow>(eps_list.size(), options.parallel,
                                   [&](std::size_t k) { return sweep_row(spec, eps_list[k], options, ref); });
    return build_sweep_report(spec, options, ref, std::move(rows));
}

GammaReport gamma_recovery_check(const ProblemSpec& spec, const Expression& u, std::span<const double> eps_list,
                                 const SweepOptions& options) {
    validate_sweep_inputs(spec, eps_list, options);

    GammaReport report;
    report.u = u.to_string();
    const double sharp = energy_sharp(spec, evaluable(u)).total;
    report.rows = map_rows<GammaRow>(eps_list.size(), options.parallel, [&](std::size_t k) {
        const double eps = eps_list[k];
        const Grid grid = coupled_grid(spec.cuboid, eps, options.rho, options.max_nodes);
        const GridField field = sample(grid, [&](const Point& p) { return u(p); });
        GammaRow row;
        row.eps = eps;
        row.h = grid.max_spacing();
        row.energy_diffuse = energy_diffuse(spec, grid, eps, field).total;
        row.energy_sharp = sharp;
        row.gap = std::abs(row.energy_diffuse - sharp);
        return row;
    });
    std::vector<double> gaps;
    for (const auto& r : report.rows) gaps.push_back(r.gap);
    MonotoneCriteria criteria;
    criteria.exact_floor = 1e-13;
    report.check = check_column("gap", gaps, criteria);
    report.notes.push_back("u is held fixed for every eps (constant recovery sequence).");
    return report;
}

std::vector<TestFunction> lemma_panel(const Cuboid& box) {
    const double half = 0.5 * box.length(0);
    const Point c = box.center();
    const std::string pi = "3.141592653589793";
    std::string r2 = fmt::format("(x-({:.17g}))^2", c.x);
    if (box.dimension() == 2) r2 += fmt::format("+(y-({:.17g}))^2", c.y);
    return {
        {"one", Expression::parse("1")},
        {"x", Expression::parse("x")},
        {"cos", Expression::parse(fmt::format("cos({}*x/{:.17g})", pi, half))},
        {"bump", Expression::parse(fmt::format("exp(-4*({})/{:.17g})", r2, half * half))},
    };
}

LemmaRow lemma_row(const ProblemSpec& spec, const TestFunction& tf, const Grid& grid, double eps) {
    const Expression& w = tf.w;
    const GridField wf = sample(grid, [&](const Point& p) { return w(p); });
    LemmaRow row;
    row.w = tf.name;
    row.eps = eps;
    row.h = grid.max_spacing();
    CompensatedSum surf, d, c, f;
    for (std::size_t k = 0; k < wf.size(); ++k) {
        const Point p = grid.node(k);
        const auto co = coeff_diffuse(spec, p, eps);
        const double wt = grid.weight(k);
        const double v = wf[k];
        surf += wt * v * co.slope;
        d += wt * co.D * v * v;
        c += wt * co.c * v * v;
        f += wt * co.f * v;
    }
    row.surface_diffuse = surf.value();
    row.d_diffuse = d.value();
    row.c_diffuse = c.value();
    row.f_diffuse = f.value();
    row.surface_sharp = surface_integral(spec.shape, [&](const Point& p) { return w(p); });
    auto sq = [&](const Point& p) {
        const double v = w(p);
        return v * v;
    };
    row.d_sharp = sharp_volume_integral(spec, sq, [&](const Point& p) { return spec.alpha * sq(p); });
    row.c_sharp = sharp_volume_integral(
        spec, [&](const Point& p) { return spec.gamma * sq(p); }, [&](const Point& p) { return spec.beta * sq(p); });
    row.f_sharp = sharp_volume_integral(
        spec, [&](const Point& p) { return spec.q(p) * w(p); }, [&](const Point& p) { return spec.h(p) * w(p); });
    row.delta_norm = norm(wf, DeltaEpsNorm{spec.shape, eps});
    row.phi_norm = norm(wf, PhiEpsNorm{spec.shape, eps});
    row.h1_norm = norm(wf, H1Norm{});
    row.trace_ratio = row.h1_norm > 0.0 ? row.delta_norm / row.h1_norm : 0.0;
    return row;
}

LemmaReport lemma_checks(const ProblemSpec& spec, std::span<const double> eps_list, const SweepOptions& options,
                         const std::vector<TestFunction>& panel) {
    validate_sweep_inputs(spec, eps_list, options);

    struct PerEps {
        std::vector<LemmaRow> rows;
        PerimeterRow perimeter;
    };
    const auto per_eps = map_rows<PerEps>(eps_list.size(), options.parallel, [&](std::size_t k) {
        const double eps = eps_list[k];
        const Grid grid = coupled_grid(spec.cuboid, eps, options.rho, options.max_nodes);
        PerEps out;
        for (const auto& tf : panel) out.rows.push_back(lemma_row(spec, tf, grid, eps));
        out.perimeter.eps = eps;
        out.perimeter.h = grid.max_spacing();
        out.perimeter.measured = integrate(
            sample(grid, [&](const Point& p) { return phase_field_slope(signed_distance(spec.shape, p), eps); }));
        out.perimeter.limit = boundary_measure(spec.shape);
        return out;
    });

    LemmaReport report;
    for (const auto& pe : per_eps) {
        report.rows.insert(report.rows.end(), pe.rows.begin(), pe.rows.end());
        report.perimeter.push_back(pe.perimeter);
    }

    MonotoneCriteria criteria;
    criteria.ratio_min_points = std::numeric_limits<std::size_t>::max();
    for (const auto& tf : panel) {
        std::vector<LemmaRow> rows;
        for (const auto& r : report.rows) {
            if (r.w == tf.name) rows.push_back(r);
        }
        auto gaps = [&](double LemmaRow::*diffuse, double LemmaRow::*sharp) {
            std::vector<double> g;
            double scale = 1.0;
            for (const auto& r : rows) {
                g.push_back(std::abs(r.*diffuse - r.*sharp));
                scale = std::max(scale, std::abs(r.*sharp));
            }
            MonotoneCriteria local = criteria;
            local.exact_floor = 1e-12 * scale;
            return std::make_pair(g, local);
        };
        for (const auto& [label, diffuse, sharp] :
             {std::tuple{"surface", &LemmaRow::surface_diffuse, &LemmaRow::surface_sharp},
              std::tuple{"D", &LemmaRow::d_diffuse, &LemmaRow::d_sharp},
              std::tuple{"c", &LemmaRow::c_diffuse, &LemmaRow::c_sharp},
              std::tuple{"f", &LemmaRow::f_diffuse, &LemmaRow::f_sharp}}) {
            const auto [g, local] = gaps(diffuse, sharp);
            report.checks.push_back(check_column(fmt::format("{}:{}_gap", tf.name, label), g, local));
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const auto& r : rows) {
            lo = std::min(lo, r.trace_ratio);
            hi = std::max(hi, r.trace_ratio);
        }
        ColumnCheck band;
        band.column = fmt::format("{}:trace_band", tf.name);
        band.last_over_first = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
        // A w vanishing on the interface has ratios tending to 0; the band says nothing there.
        const double trace = std::sqrt(surface_integral(spec.shape, [&](const Point& p) { return tf.w(p) * tf.w(p); }));
        const double h1 = rows.empty() ? 0.0 : rows.back().h1_norm;
        if (trace <= 1e-6 * h1) {
            band.passed = true;
            band.message = fmt::format("not applicable: w vanishes on the interface (max/min = {:.4g})",
                                       band.last_over_first);
        } else {
            band.passed = band.last_over_first <= 2.0;
            band.message = fmt::format("max/min trace ratio = {:.4g} (bound 2)", band.last_over_first);
        }
        report.checks.push_back(band);
    }
    std::vector<double> pgap;
    for (const auto& p : report.perimeter) pgap.push_back(std::abs(p.measured - p.limit));
    MonotoneCriteria pcrit = criteria;
    pcrit.exact_floor = 1e-12 * boundary_measure(spec.shape);
    report.checks.push_back(check_column("perimeter_gap", pgap, pcrit));

    report.notes.push_back(
        "The perimeter integral of |grad phi_eps| is compared against the measure of the interface "
        "(2 for an interval: one per endpoint), not against 1.");
    report.notes.push_back("Gaps below 1e-12 times the integral's magnitude are treated as exact.");
    return report;
}

}  // namespace ddm
