#include <gtest/gtest.h>

#include "ddm/config.hpp"

using namespace ddm;

namespace {

const char* kMinimal1d = R"(
[problem]
domain = -1, 1
shape = interval
interval = -0.5, 0.5
alpha = 2
beta = 1
gamma = 1
q = "1"
h = "0"
g = "0.1"   # interface flux

[experiment]
eps = 0.1, 0.05
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto k = text.find(from);
    if (k == std::string::npos) throw std::logic_error("pattern not found: " + from);
    return text.replace(k, from.size(), to);
}

}  // namespace

TEST(Config, MinimalConfigUsesDefaults) {
    const auto cfg = parse_config_text(kMinimal1d);
    EXPECT_EQ(cfg.spec.dimension(), 1);
    EXPECT_EQ(cfg.spec.alpha, 2.0);
    EXPECT_EQ(cfg.spec.kappa, 0.0);
    EXPECT_EQ(cfg.spec.g({0.0}), 0.1);
    EXPECT_EQ(cfg.options.rho, 4.0);
    EXPECT_EQ(cfg.options.tol, 1e-10);
    EXPECT_EQ(cfg.options.max_iter, 50000);
    EXPECT_EQ(cfg.eps, (std::vector<double>{0.1, 0.05}));
    EXPECT_FALSE(cfg.kind.has_value());
    EXPECT_NO_THROW(validate_for(cfg, ExperimentKind::Sweep));
    EXPECT_THROW(validate_for(cfg, ExperimentKind::Solve), ValidationError);
}

TEST(Config, ValidationMessages) {
    try {
        parse_config_text(replace(kMinimal1d, "alpha = 2", "alpha = -1"));
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("alpha must be positive"), std::string::npos);
    }
    const std::string disk = R"(
[problem]
domain = -1, 1, -1, 1
shape = disk
center = 0, 0
radius = 0.3
alpha = 2
beta = 1
gamma = 1
kappa = 1
q = "1"
h = "0"
g = "0.1"
[experiment]
eps = 0.05
)";
    try {
        parse_config_text(disk);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("Robin case supported in 1D only"), std::string::npos);
    }
    try {
        parse_config_text(replace(kMinimal1d, "eps = 0.1, 0.05", "eps = 0.2"));
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("clearance rule"), std::string::npos);
    }
}

TEST(Config, ParseErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text) {
        try {
            parse_config_text(text);
        } catch (const ConfigError& e) {
            return e.line();
        }
        return -1;
    };
    EXPECT_EQ(line_of(replace(kMinimal1d, "beta = 1", "bta = 1")), 7);
    EXPECT_EQ(line_of(replace(kMinimal1d, "beta = 1", "alpha = 1")), 7);
    EXPECT_EQ(line_of(replace(kMinimal1d, "beta = 1", "beta 1")), 7);
    EXPECT_EQ(line_of(replace(kMinimal1d, "beta = 1", "beta = one")), 7);
    EXPECT_EQ(line_of(replace(kMinimal1d, "q = \"1\"", "q = \"1 +\"")), 9);
    EXPECT_EQ(line_of(replace(kMinimal1d, "q = \"1\"", "q = \"1")), 9);
    EXPECT_EQ(line_of(std::string("alpha = 1\n") + kMinimal1d), 1);
    EXPECT_EQ(line_of(replace(kMinimal1d, "[experiment]", "[experimnt]")), 13);
    EXPECT_EQ(line_of(replace(kMinimal1d, "gamma = 1\n", "")), 0);
}

TEST(Config, ExperimentKeys) {
    const std::string text = std::string(kMinimal1d) +
                             "kind = sweep\nrho = 8\ntol = 1e-12\nmax_iter = 100\nmax_nodes = 4096\n"
                             "output = \"out/x\"\nreference = fem\nreference_cells = 1024\nu = \"x^2\"\nparallel = false\n";
    const auto cfg = parse_config_text(text);
    EXPECT_EQ(*cfg.kind, ExperimentKind::Sweep);
    EXPECT_EQ(cfg.options.rho, 8.0);
    EXPECT_EQ(cfg.options.tol, 1e-12);
    EXPECT_EQ(cfg.options.max_iter, 100);
    EXPECT_EQ(cfg.options.max_nodes, 4096u);
    EXPECT_EQ(cfg.output_dir, "out/x");
    EXPECT_EQ(cfg.options.reference, ReferenceKind::FittedFem1D);
    EXPECT_EQ(cfg.options.reference_cells, 1024);
    EXPECT_EQ(cfg.recovery_u({3.0}), 9.0);
    EXPECT_FALSE(cfg.options.parallel);
    EXPECT_THROW(validate_for(cfg, ExperimentKind::GammaCheck), ValidationError);

    EXPECT_THROW(parse_config_text(std::string(kMinimal1d) + "rho = 1\n"), ValidationError);
    EXPECT_THROW(parse_config_text(std::string(kMinimal1d) + "kind = fit\n"), ValidationError);
    EXPECT_THROW(parse_config_text(std::string(kMinimal1d) + "max_iter = 2.5\n"), ConfigError);
    EXPECT_THROW(parse_config_text(replace(kMinimal1d, "0.1, 0.05", "0.05, 0.1")), ValidationError);
}

TEST(Config, MissingFileIsConfigError) {
    EXPECT_THROW(parse_config("/nonexistent/dir/config.ini"), ConfigError);
}
