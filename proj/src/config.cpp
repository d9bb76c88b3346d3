#include "ddm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace ddm {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Solve: return "solve";
        case ExperimentKind::Sweep: return "sweep";
        case ExperimentKind::GammaCheck: return "gamma-check";
        case ExperimentKind::LemmaCheck: return "lemma-check";
    }
    return "sweep";
}

ExperimentKind experiment_kind_from_string(const std::string& text) {
    if (text == "solve") return ExperimentKind::Solve;
    if (text == "sweep") return ExperimentKind::Sweep;
    if (text == "gamma-check") return ExperimentKind::GammaCheck;
    if (text == "lemma-check") return ExperimentKind::LemmaCheck;
    throw ValidationError(fmt::format("unknown experiment kind '{}'", text));
}

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"problem",
         {"domain", "shape", "interval", "center", "radius", "alpha", "beta", "gamma", "kappa", "q", "h", "g"}},
        {"experiment",
         {"kind", "eps", "rho", "tol", "max_iter", "max_nodes", "output", "reference", "reference_cells",
          "clearance_factor", "u", "parallel"}},
    };
    return keys;
}

struct Entry {
    std::string value;
    bool quoted = false;
    int line = 0;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class Reader {
public:
    explicit Reader(std::string_view text) { read(text); }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    const Entry& raw(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError(fmt::format("missing required key '{}'", key), 0);
        return it->second;
    }

    double number(const std::string& key) const { return to_number(raw(key), key); }

    double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::vector<double> numbers(const std::string& key) const {
        const Entry& e = raw(key);
        std::vector<double> out;
        std::string_view rest = e.value;
        while (true) {
            const auto comma = rest.find(',');
            const Entry part{std::string(trim(rest.substr(0, comma))), false, e.line};
            out.push_back(to_number(part, key));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return out;
    }

    std::string text(const std::string& key) const { return raw(key).value; }

    Expression expression(const std::string& key) const {
        const Entry& e = raw(key);
        try {
            return Expression::parse(e.value);
        } catch (const ParseError& err) {
            throw ConfigError(fmt::format("line {}: key '{}': {}", e.line, key, err.what()), e.line);
        }
    }

    int line_of(const std::string& key) const { return has(key) ? raw(key).line : 0; }

private:
    static double to_number(const Entry& e, const std::string& key) {
        double v = 0.0;
        const char* first = e.value.data();
        const char* last = first + e.value.size();
        if (!e.value.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (e.quoted || e.value.empty() || ec != std::errc() || ptr != last) {
            throw ConfigError(fmt::format("line {}: key '{}': '{}' is not a number", e.line, key, e.value), e.line);
        }
        return v;
    }

    void read(std::string_view text) {
        std::string section;
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++line_no;
            line = strip_comment(line, line_no);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError(fmt::format("line {}: malformed section header", line_no), line_no);
                section = std::string(trim(line.substr(1, line.size() - 2)));
                if (!allowed_keys().count(section)) {
                    throw ConfigError(fmt::format("line {}: unknown section '[{}]'", line_no, section), line_no);
                }
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no), line_no);
            }
            const std::string key(trim(line.substr(0, eq)));
            std::string_view value = trim(line.substr(eq + 1));
            if (section.empty()) {
                throw ConfigError(fmt::format("line {}: key '{}' appears before any section", line_no, key), line_no);
            }
            if (!allowed_keys().at(section).count(key)) {
                throw ConfigError(fmt::format("line {}: unknown key '{}' in [{}]", line_no, key, section), line_no);
            }
            if (entries_.count(key)) throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, key), line_no);
            Entry e;
            e.line = line_no;
            if (!value.empty() && value.front() == '"') {
                if (value.size() < 2 || value.back() != '"') {
                    throw ConfigError(fmt::format("line {}: unterminated string", line_no), line_no);
                }
                e.value = std::string(value.substr(1, value.size() - 2));
                e.quoted = true;
            } else {
                e.value = std::string(value);
            }
            if (e.value.empty()) throw ConfigError(fmt::format("line {}: key '{}' has no value", line_no, key), line_no);
            entries_[key] = std::move(e);
        }
    }

    static std::string_view strip_comment(std::string_view line, int line_no) {
        bool in_string = false;
        for (std::size_t k = 0; k < line.size(); ++k) {
            if (line[k] == '"') in_string = !in_string;
            if (line[k] == '#' && !in_string) return line.substr(0, k);
        }
        if (in_string) throw ConfigError(fmt::format("line {}: unterminated string", line_no), line_no);
        return line;
    }

    std::map<std::string, Entry> entries_;
};

Cuboid read_domain(const Reader& r) {
    const auto v = r.numbers("domain");
    try {
        if (v.size() == 2) return Cuboid(v[0], v[1]);
        if (v.size() == 4) return Cuboid(v[0], v[1], v[2], v[3]);
    } catch (const ValidationError& e) {
        throw ConfigError(fmt::format("line {}: {}", r.line_of("domain"), e.what()), r.line_of("domain"));
    }
    throw ConfigError(fmt::format("line {}: domain needs 2 (1D) or 4 (2D) numbers", r.line_of("domain")),
                      r.line_of("domain"));
}

InterfaceShape read_shape(const Reader& r) {
    const std::string kind = r.text("shape");
    if (kind == "interval") {
        for (const char* k : {"center", "radius"}) {
            if (r.has(k)) throw ConfigError(fmt::format("line {}: '{}' is not used by an interval", r.line_of(k), k), r.line_of(k));
        }
        const auto v = r.numbers("interval");
        if (v.size() != 2) throw ConfigError(fmt::format("line {}: interval needs two numbers", r.line_of("interval")), r.line_of("interval"));
        return Interval{v[0], v[1]};
    }
    if (kind == "disk") {
        if (r.has("interval")) throw ConfigError(fmt::format("line {}: 'interval' is not used by a disk", r.line_of("interval")), r.line_of("interval"));
        const auto c = r.numbers("center");
        if (c.size() != 2) throw ConfigError(fmt::format("line {}: center needs two numbers", r.line_of("center")), r.line_of("center"));
        return Disk{Point{c[0], c[1]}, r.number("radius")};
    }
    throw ConfigError(fmt::format("line {}: shape must be 'interval' or 'disk'", r.line_of("shape")), r.line_of("shape"));
}

bool read_bool(const Reader& r, const std::string& key, bool fallback) {
    if (!r.has(key)) return fallback;
    const std::string v = r.text(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(fmt::format("line {}: '{}' must be true or false", r.line_of(key), key), r.line_of(key));
}

int read_int(const Reader& r, const std::string& key, int fallback) {
    if (!r.has(key)) return fallback;
    const double v = r.number(key);
    if (v != std::trunc(v) || v < 0 || v > 2e9) {
        throw ConfigError(fmt::format("line {}: '{}' must be a nonnegative integer", r.line_of(key), key), r.line_of(key));
    }
    return static_cast<int>(v);
}

}  // namespace

RunConfig parse_config_text(std::string_view text) {
    const Reader r(text);
    ProblemSpec spec{read_domain(r), read_shape(r), 1.0, 1.0, 1.0, 0.0, {}, {}, {}};
    spec.alpha = r.number("alpha");
    spec.beta = r.number("beta");
    spec.gamma = r.number("gamma");
    spec.kappa = r.number_or("kappa", 0.0);
    spec.q = r.expression("q");
    spec.h = r.expression("h");
    spec.g = r.expression("g");
    spec.validate();

    RunConfig cfg{spec, std::nullopt, r.numbers("eps"), {}, Expression::parse("cos(3.14159265*x)"), ""};
    if (r.has("kind")) cfg.kind = experiment_kind_from_string(r.text("kind"));
    cfg.options.rho = r.number_or("rho", cfg.options.rho);
    cfg.options.tol = r.number_or("tol", cfg.options.tol);
    cfg.options.max_iter = read_int(r, "max_iter", cfg.options.max_iter);
    cfg.options.max_nodes = static_cast<std::size_t>(read_int(r, "max_nodes", static_cast<int>(cfg.options.max_nodes)));
    cfg.options.reference_cells = read_int(r, "reference_cells", 0);
    cfg.options.clearance_factor = r.number_or("clearance_factor", cfg.options.clearance_factor);
    cfg.options.parallel = read_bool(r, "parallel", cfg.options.parallel);
    if (r.has("reference")) cfg.options.reference = reference_kind_from_string(r.text("reference"));
    if (r.has("u")) cfg.recovery_u = r.expression("u");
    if (r.has("output")) cfg.output_dir = r.text("output");

    if (!(cfg.options.rho >= kMinLayerResolution)) {
        throw ValidationError(fmt::format("rho must be at least {}", kMinLayerResolution));
    }
    if (!(cfg.options.tol > 0.0 && cfg.options.tol < 1.0)) throw ValidationError("tol must lie in (0, 1)");
    if (cfg.options.max_iter < 1) throw ValidationError("max_iter must be positive");
    if (cfg.options.max_nodes < 81) throw ValidationError("max_nodes is too small for a minimal grid");
    if (!(cfg.options.clearance_factor >= 0.0)) throw ValidationError("clearance_factor must be nonnegative");
    if (cfg.eps.empty()) throw ValidationError("eps list is empty");
    for (std::size_t k = 0; k + 1 < cfg.eps.size(); ++k) {
        if (!(cfg.eps[k + 1] < cfg.eps[k])) throw ValidationError("eps list must be strictly decreasing");
    }
    for (double eps : cfg.eps) spec.validate_layer(eps, cfg.options.clearance_factor);
    if (spec.dimension() == 1 && cfg.recovery_u.uses_y()) throw ValidationError("1D recovery function may not use y");
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()), 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void validate_for(const RunConfig& config, ExperimentKind kind) {
    if (config.kind && *config.kind != kind) {
        throw ValidationError(fmt::format("config declares kind '{}' but the '{}' subcommand was used",
                                          to_string(*config.kind), to_string(kind)));
    }
    if (kind == ExperimentKind::Solve && config.eps.size() != 1) {
        throw ValidationError("solve takes exactly one eps value");
    }
    validate_sweep_inputs(config.spec, config.eps, config.options);
    if (kind == ExperimentKind::Sweep || kind == ExperimentKind::Solve) {
        // Reference availability is decided by the data.
        if (config.options.reference == ReferenceKind::Closed1D && !config.spec.has_constant_data()) {
            throw ValidationError("closed-form reference needs constant q, h, g");
        }
        if (config.options.reference == ReferenceKind::CutFem2D && config.spec.dimension() != 2) {
            throw ValidationError("cutfem reference is 2D only");
        }
        if ((config.options.reference == ReferenceKind::Closed1D ||
             config.options.reference == ReferenceKind::FittedFem1D) && config.spec.dimension() != 1) {
            throw ValidationError("closed and fem references are 1D only");
        }
    }
}

}  // namespace ddm
