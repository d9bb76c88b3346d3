#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ddm/expr.hpp"
#include "ddm/fields.hpp"
#include "ddm/harness.hpp"

namespace ddm {

/// Malformed config file; `line()` is 1-based (0 when not tied to a line).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

enum class ExperimentKind { Solve, Sweep, GammaCheck, LemmaCheck };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& text);

/// A parsed run configuration.
///
/// File format: `key = value` lines under `[problem]` and `[experiment]`
/// headers; `#` starts a comment; expressions are double-quoted strings;
/// lists are comma-separated numbers.
struct RunConfig {
    ProblemSpec spec;
    std::optional<ExperimentKind> kind;
    std::vector<double> eps;
    SweepOptions options;
    /// Fixed function for gamma-check.
    Expression recovery_u;
    std::string output_dir;
};

RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::filesystem::path& path);

/// Kind-specific checks on top of parsing: the subcommand must agree with
/// `kind` if given, `solve` takes exactly one ε, and every ε must satisfy the
/// clearance rule. Throws ValidationError.
void validate_for(const RunConfig& config, ExperimentKind kind);

}  // namespace ddm
