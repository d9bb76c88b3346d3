// Command-line front end: solve, sweep, gamma-check, lemma-check.
//
// Exit codes: 0 success, 1 a check failed, 2 configuration error (nothing
// written), 3 I/O or runtime error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ddm/config.hpp"
#include "ddm/energy.hpp"
#include "ddm/harness.hpp"
#include "ddm/report_io.hpp"

namespace fs = std::filesystem;
using namespace ddm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Args {
    std::string config;
    std::string out;
    std::optional<std::size_t> max_nodes;
};

struct Artifacts {
    std::string json;
    std::string csv;
    std::string svg;
    std::string solution;  // solve only
};

void write_artifacts(const fs::path& dir, const Artifacts& a) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    write_text_file(dir / "report.json", a.json);
    write_text_file(dir / "report.csv", a.csv);
    write_text_file(dir / "convergence.svg", a.svg);
    if (!a.solution.empty()) write_text_file(dir / "solution.csv", a.solution);
}

void print_checks(const std::vector<ColumnCheck>& checks) {
    for (const auto& c : checks) {
        fmt::print("  {:<28} {:<5} {}\n", c.column, c.passed ? "ok" : "FAIL", c.message);
    }
}

int run(ExperimentKind kind, const Args& args) {
    std::optional<RunConfig> parsed;
    fs::path out_dir;
    try {
        parsed = parse_config(args.config);
        RunConfig& cfg = *parsed;
        if (args.max_nodes) cfg.options.max_nodes = *args.max_nodes;
        validate_for(cfg, kind);
        out_dir = !args.out.empty() ? fs::path(args.out)
                                    : (!cfg.output_dir.empty() ? fs::path(cfg.output_dir) : fs::path("out"));
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error in '{}': {}\n", args.config, e.what());
        return kExitConfig;
    } catch (const ValidationError& e) {
        fmt::print(stderr, "invalid configuration '{}': {}\n", args.config, e.what());
        return kExitConfig;
    }

    const RunConfig& cfg = *parsed;
    try {
        Artifacts a;
        bool passed = false;
        switch (kind) {
            case ExperimentKind::Solve: {
                const SharpSolution ref = solve_reference(cfg.spec, cfg.options);
                GridField u(coupled_grid(cfg.spec.cuboid, cfg.eps.front(), cfg.options.rho, cfg.options.max_nodes), 0.0);
                SweepRow row = sweep_row(cfg.spec, cfg.eps.front(), cfg.options, ref, &u);
                const SweepReport report = build_sweep_report(cfg.spec, cfg.options, ref, {row});
                a = {to_json(report).dump(2) + "\n", sweep_csv(report), convergence_svg(report), solution_csv(u)};
                passed = row.ok;
                fmt::print("eps={:g} h={:.4g} nodes={} iterations={} residual={:.3g}\n", row.eps, row.h, row.nodes,
                           row.iterations, row.residual);
                fmt::print("L2 error={:.6e} H1 error={:.6e} F_eps={:.12g} F_0={:.12g}\n", row.err_l2, row.err_h1,
                           row.energy_diffuse, row.energy_sharp);
                if (!row.ok) fmt::print(stderr, "solve failed: {}\n", row.error);
                break;
            }
            case ExperimentKind::Sweep: {
                const SweepReport report = eps_sweep(cfg.spec, cfg.eps, cfg.options);
                a = {to_json(report).dump(2) + "\n", sweep_csv(report), convergence_svg(report), {}};
                passed = report.passed();
                for (const auto& r : report.rows) {
                    fmt::print("eps={:<8g} nodes={:<7} L2={:.4e} H1={:.4e} gap={:.4e}{}\n", r.eps, r.nodes, r.err_l2,
                               r.err_h1, r.energy_gap, r.ok ? "" : "  FAILED: " + r.error);
                }
                print_checks(report.checks);
                break;
            }
            case ExperimentKind::GammaCheck: {
                const GammaReport report = gamma_recovery_check(cfg.spec, cfg.recovery_u, cfg.eps, cfg.options);
                a = {to_json(report).dump(2) + "\n", gamma_csv(report), convergence_svg(report), {}};
                passed = report.check.passed;
                for (const auto& r : report.rows) fmt::print("eps={:<8g} gap={:.6e}\n", r.eps, r.gap);
                print_checks({report.check});
                break;
            }
            case ExperimentKind::LemmaCheck: {
                const LemmaReport report =
                    lemma_checks(cfg.spec, cfg.eps, cfg.options, lemma_panel(cfg.spec.cuboid));
                a = {to_json(report).dump(2) + "\n", lemma_csv(report), convergence_svg(report), {}};
                passed = report.passed();
                for (const auto& p : report.perimeter) {
                    fmt::print("eps={:<8g} perimeter={:.8f} limit={:.8f}\n", p.eps, p.measured, p.limit);
                }
                print_checks(report.checks);
                break;
            }
        }
        write_artifacts(out_dir, a);
        fmt::print("artifacts written to {}\n", out_dir.string());
        return passed ? kExitOk : kExitCheckFailed;
    } catch (const IoError& e) {
        fmt::print(stderr, "I/O error: {}\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffuse domain approximation of a two-sided elliptic transmission problem"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        ExperimentKind kind;
    };
    const Sub subs[] = {
        {"solve", "Solve at one eps and compare with the sharp reference", ExperimentKind::Solve},
        {"sweep", "eps sweep with error, energy and monotonicity checks", ExperimentKind::Sweep},
        {"gamma-check", "Recovery-sequence energy gaps for a fixed function", ExperimentKind::GammaCheck},
        {"lemma-check", "Perimeter, blend and trace-ratio checks", ExperimentKind::LemmaCheck},
    };
    Args args;
    std::size_t max_nodes = 0;
    std::optional<ExperimentKind> chosen;
    for (const auto& s : subs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        cmd->add_option("--config", args.config, "Config file")->required();
        cmd->add_option("--out", args.out, "Output directory (overrides the config)");
        cmd->add_option("--max-nodes", max_nodes, "Node cap for diffuse grids")->check(CLI::PositiveNumber);
        const ExperimentKind kind = s.kind;
        cmd->callback([&chosen, kind] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    if (max_nodes > 0) args.max_nodes = max_nodes;
    return run(*chosen, args);
}
