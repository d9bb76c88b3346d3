#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ddm/fields.hpp"
#include "ddm/grid.hpp"
#include "ddm/harness.hpp"

namespace ddm {

inline constexpr const char* kSweepSchema = "ddm.sweep/1";
inline constexpr const char* kGammaSchema = "ddm.gamma/1";
inline constexpr const char* kLemmaSchema = "ddm.lemma/1";

/// Artifact could not be written or read; the message names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const ProblemSpec& spec);
nlohmann::json to_json(const SweepReport& report);
nlohmann::json to_json(const GammaReport& report);
nlohmann::json to_json(const LemmaReport& report);

/// Rows of a sweep JSON document.
std::vector<SweepRow> sweep_rows_from_json(const nlohmann::json& doc);

/// Fixed header for sweep CSV files.
inline constexpr const char* kSweepCsvHeader =
    "eps,h,nodes,capped,status,err_l2,err_h1,energy_diffuse,energy_sharp,energy_gap,perimeter,trace_ratio,u_h1,"
    "cg_iterations,residual,wall_time_s";

std::string sweep_csv(const SweepReport& report);
std::vector<SweepRow> parse_sweep_csv(std::string_view text);

std::string gamma_csv(const GammaReport& report);
std::string lemma_csv(const LemmaReport& report);
/// x[,y],u per node.
std::string solution_csv(const GridField& u);

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

/// Log-log plot; nonpositive values are dropped.
std::string loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series);

std::string convergence_svg(const SweepReport& report);
std::string convergence_svg(const GammaReport& report);
std::string convergence_svg(const LemmaReport& report);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ddm
