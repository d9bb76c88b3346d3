#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ddm/diffuse.hpp"
#include "ddm/expr.hpp"
#include "ddm/fields.hpp"
#include "ddm/sharp_ref.hpp"

namespace ddm {

class DegenerateData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ReferenceKind { Auto, Closed1D, FittedFem1D, CutFem2D };

std::string to_string(ReferenceKind kind);
ReferenceKind reference_kind_from_string(const std::string& text);

struct SweepOptions {
    /// ρ = ε/h.
    double rho = 4.0;
    double tol = 1e-10;
    int max_iter = 50000;
    /// Node cap for diffuse solves; capped rows are flagged and excluded from rate fits.
    std::size_t max_nodes = 512 * 512;
    ReferenceKind reference = ReferenceKind::Auto;
    /// Reference resolution; 0 picks 16384 cells (1D FEM) or 256² cells (2D cut FEM).
    int reference_cells = 0;
    double clearance_factor = kDefaultClearanceFactor;
    /// Run rows on separate threads. Results do not depend on this.
    bool parallel = true;
};

/// Grid with h = ε/ρ, or the finest grid under `max_nodes` when that is too
/// fine. `capped` is set in the latter case.
Grid coupled_grid(const Cuboid& box, double eps, double rho, std::size_t max_nodes, bool* capped = nullptr);

/// Builds the reference u₀ chosen by `options.reference`.
SharpSolution solve_reference(const ProblemSpec& spec, const SweepOptions& options);

struct SweepRow {
    double eps = 0.0;
    double h = 0.0;
    std::size_t nodes = 0;
    bool capped = false;
    bool ok = false;
    std::string error;

    double err_l2 = 0.0;
    double err_h1 = 0.0;
    double energy_diffuse = 0.0;  // F_ε[u_ε]
    double energy_sharp = 0.0;    // F₀[u₀]
    double energy_gap = 0.0;      // |F_ε[u_ε] − F₀[u₀]|
    double perimeter = 0.0;       // ∫|∇φ_ε| dx
    double trace_ratio = 0.0;     // ‖u_ε‖_{δ_ε} / ‖u_ε‖_{H¹}
    double u_h1 = 0.0;            // ‖u_ε‖_{H¹}
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    double wall_time = 0.0;       // seconds; the only nondeterministic field
};

struct RateFit {
    double rate = 0.0;
    /// RMS residual of the log-log fit.
    double residual = 0.0;
    std::size_t points = 0;
};

/// Monotone-decrease verdict for one column of a sweep.
struct ColumnCheck {
    std::string column;
    /// Every value below the exactness floor.
    bool exact = false;
    bool strictly_decreasing = false;
    int non_monotone_steps = 0;
    double last_over_first = 0.0;
    bool passed = false;
    std::string message;
};

struct MonotoneCriteria {
    /// Values at or below this are treated as exact.
    double exact_floor = 1e-10;
    /// Required last/first ratio; applied when there are at least `ratio_min_points` values.
    double max_ratio = 0.3;
    std::size_t ratio_min_points = 4;
    /// Non-monotone steps tolerated as warnings.
    int tolerated_steps = 1;
};

ColumnCheck check_column(const std::string& name, std::span<const double> values, const MonotoneCriteria& criteria = {});

struct SweepReport {
    std::string shape;
    std::string reference;
    double reference_energy = 0.0;
    SweepOptions options;
    std::vector<SweepRow> rows;
    std::optional<RateFit> rate_l2;
    std::optional<RateFit> rate_h1;
    std::vector<ColumnCheck> checks;
    std::vector<std::string> notes;

    bool passed() const;
};

/// Checks the problem, the ε list (strictly decreasing, clearance rule) and ρ.
void validate_sweep_inputs(const ProblemSpec& spec, std::span<const double> eps_list, const SweepOptions& options);

/// One sweep row: diffuse solve at ε on the coupled grid, compared with `ref`.
/// Failures are recorded in the row. The solution is moved into `solution` when given.
SweepRow sweep_row(const ProblemSpec& spec, double eps, const SweepOptions& options, const SharpSolution& ref,
                   GridField* solution = nullptr);

/// Fits rates, runs the column checks and collects notes.
SweepReport build_sweep_report(const ProblemSpec& spec, const SweepOptions& options, const SharpSolution& ref,
                               std::vector<SweepRow> rows);

/// Least-squares slope of log(error) against log(ε). Needs at least three
/// strictly positive pairs; throws DegenerateData otherwise.
RateFit fit_rate(std::span<const std::pair<double, double>> pairs);

/// ε list must be strictly decreasing. Per-row failures are recorded; throws
/// only when every row fails.
SweepReport eps_sweep(const ProblemSpec& spec, std::span<const double> eps_list, const SweepOptions& options);

struct GammaRow {
    double eps = 0.0;
    double h = 0.0;
    double energy_diffuse = 0.0;  // F_ε[u]
    double energy_sharp = 0.0;    // F₀[u]
    double gap = 0.0;
};

struct GammaReport {
    std::string u;
    std::vector<GammaRow> rows;
    ColumnCheck check;
    std::vector<std::string> notes;
};

/// |F_ε[u] − F₀[u]| for a fixed u (the constant recovery sequence). F_ε uses
/// the ρ-coupled grids; F₀ uses interface-respecting quadrature.
GammaReport gamma_recovery_check(const ProblemSpec& spec, const Expression& u, std::span<const double> eps_list,
                                 const SweepOptions& options);

struct LemmaRow {
    std::string w;
    double eps = 0.0;
    double h = 0.0;
    double surface_diffuse = 0.0;  // ∫ w |∇φ_ε| dx
    double surface_sharp = 0.0;    // ∫_{∂Ω₁} w dS
    double d_diffuse = 0.0;        // ∫ D_ε w²
    double d_sharp = 0.0;          // ∫ D₀ w²
    double c_diffuse = 0.0;
    double c_sharp = 0.0;
    double f_diffuse = 0.0;        // ∫ f_ε w
    double f_sharp = 0.0;
    double delta_norm = 0.0;       // ‖w‖_{δ_ε}
    double phi_norm = 0.0;         // ‖w‖_{φ_ε}
    double h1_norm = 0.0;
    double trace_ratio = 0.0;
};

struct PerimeterRow {
    double eps = 0.0;
    double h = 0.0;
    double measured = 0.0;  // ∫|∇φ_ε| dx
    double limit = 0.0;     // |∂Ω₁|
};

struct LemmaReport {
    std::vector<LemmaRow> rows;
    std::vector<PerimeterRow> perimeter;
    std::vector<ColumnCheck> checks;
    std::vector<std::string> notes;

    bool passed() const;
};

/// Named test function for the lemma panel.
struct TestFunction {
    std::string name;
    Expression w;
};

/// {1, x, cos(πx/L), gaussian bump} with L the half-width of Ω along x and the
/// bump exp(−4|x − centre|²/L²).
std::vector<TestFunction> lemma_panel(const Cuboid& box);

/// Per-w quadrature integrals for the lemma checks at one ε on a given grid.
LemmaRow lemma_row(const ProblemSpec& spec, const TestFunction& w, const Grid& grid, double eps);

/// Lemma checks do not solve anything, so `max_nodes` only bounds quadrature cost.
LemmaReport lemma_checks(const ProblemSpec& spec, std::span<const double> eps_list, const SweepOptions& options,
                         const std::vector<TestFunction>& panel);

}  // namespace ddm
