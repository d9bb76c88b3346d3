#include "ddm/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace ddm {

using nlohmann::json;

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

json options_json(const SweepOptions& o) {
    return json{{"rho", o.rho},
                {"tol", o.tol},
                {"max_iter", o.max_iter},
                {"max_nodes", o.max_nodes},
                {"reference", to_string(o.reference)},
                {"reference_cells", o.reference_cells},
                {"clearance_factor", o.clearance_factor}};
}

json check_json(const ColumnCheck& c) {
    return json{{"column", c.column},
                {"exact", c.exact},
                {"strictly_decreasing", c.strictly_decreasing},
                {"non_monotone_steps", c.non_monotone_steps},
                {"last_over_first", c.last_over_first},
                {"passed", c.passed},
                {"message", c.message}};
}

json rate_json(const std::optional<RateFit>& r) {
    if (!r) return nullptr;
    return json{{"rate", r->rate}, {"residual", r->residual}, {"points", r->points}};
}

json checks_json(const std::vector<ColumnCheck>& checks) {
    json out = json::array();
    for (const auto& c : checks) out.push_back(check_json(c));
    return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto k = line.find(sep);
        out.push_back(line.substr(0, k));
        if (k == std::string_view::npos) break;
        line = line.substr(k + 1);
    }
    return out;
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError(fmt::format("bad number '{}' in CSV", s));
    return v;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

json to_json(const ProblemSpec& spec) {
    json box = json::array();
    for (int d = 0; d < spec.dimension(); ++d) {
        box.push_back({spec.cuboid.lower(d), spec.cuboid.upper(d)});
    }
    json shape;
    if (const auto* iv = std::get_if<Interval>(&spec.shape)) {
        shape = {{"type", "interval"}, {"a1", iv->a1}, {"b1", iv->b1}};
    } else {
        const auto& disk = std::get<Disk>(spec.shape);
        shape = {{"type", "disk"}, {"center", {disk.center.x, disk.center.y}}, {"radius", disk.radius}};
    }
    return json{{"dimension", spec.dimension()}, {"domain", box},           {"shape", shape},
                {"alpha", spec.alpha},          {"beta", spec.beta},       {"gamma", spec.gamma},
                {"kappa", spec.kappa},          {"q", spec.q.to_string()}, {"h", spec.h.to_string()},
                {"g", spec.g.to_string()}};
}

json to_json(const SweepReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back(json{{"eps", r.eps},
                            {"h", r.h},
                            {"nodes", r.nodes},
                            {"capped", r.capped},
                            {"ok", r.ok},
                            {"error", r.error},
                            {"err_l2", r.err_l2},
                            {"err_h1", r.err_h1},
                            {"energy_diffuse", r.energy_diffuse},
                            {"energy_sharp", r.energy_sharp},
                            {"energy_gap", r.energy_gap},
                            {"perimeter", r.perimeter},
                            {"trace_ratio", r.trace_ratio},
                            {"u_h1", r.u_h1},
                            {"cg_iterations", r.iterations},
                            {"residual", r.residual},
                            {"converged", r.converged},
                            {"wall_time_s", r.wall_time}});
    }
    return json{{"schema", kSweepSchema},
                {"shape", report.shape},
                {"reference", report.reference},
                {"reference_energy", report.reference_energy},
                {"options", options_json(report.options)},
                {"rows", rows},
                {"rate_l2", rate_json(report.rate_l2)},
                {"rate_h1", rate_json(report.rate_h1)},
                {"checks", checks_json(report.checks)},
                {"notes", report.notes},
                {"passed", report.passed()}};
}

json to_json(const GammaReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back(json{{"eps", r.eps},
                            {"h", r.h},
                            {"energy_diffuse", r.energy_diffuse},
                            {"energy_sharp", r.energy_sharp},
                            {"gap", r.gap}});
    }
    return json{{"schema", kGammaSchema}, {"u", report.u},         {"rows", rows},
                {"check", check_json(report.check)}, {"notes", report.notes}, {"passed", report.check.passed}};
}

json to_json(const LemmaReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back(json{{"w", r.w},
                            {"eps", r.eps},
                            {"h", r.h},
                            {"surface_diffuse", r.surface_diffuse},
                            {"surface_sharp", r.surface_sharp},
                            {"d_diffuse", r.d_diffuse},
                            {"d_sharp", r.d_sharp},
                            {"c_diffuse", r.c_diffuse},
                            {"c_sharp", r.c_sharp},
                            {"f_diffuse", r.f_diffuse},
                            {"f_sharp", r.f_sharp},
                            {"delta_norm", r.delta_norm},
                            {"phi_norm", r.phi_norm},
                            {"h1_norm", r.h1_norm},
                            {"trace_ratio", r.trace_ratio}});
    }
    json perimeter = json::array();
    for (const auto& p : report.perimeter) {
        perimeter.push_back(json{{"eps", p.eps}, {"h", p.h}, {"measured", p.measured}, {"limit", p.limit}});
    }
    return json{{"schema", kLemmaSchema},          {"rows", rows},           {"perimeter", perimeter},
                {"checks", checks_json(report.checks)}, {"notes", report.notes}, {"passed", report.passed()}};
}

std::vector<SweepRow> sweep_rows_from_json(const json& doc) {
    if (doc.value("schema", "") != kSweepSchema) throw IoError("not a sweep report (schema mismatch)");
    std::vector<SweepRow> rows;
    for (const auto& j : doc.at("rows")) {
        SweepRow r;
        r.eps = j.at("eps").get<double>();
        r.h = j.at("h").get<double>();
        r.nodes = j.at("nodes").get<std::size_t>();
        r.capped = j.at("capped").get<bool>();
        r.ok = j.at("ok").get<bool>();
        r.error = j.at("error").get<std::string>();
        r.err_l2 = j.at("err_l2").get<double>();
        r.err_h1 = j.at("err_h1").get<double>();
        r.energy_diffuse = j.at("energy_diffuse").get<double>();
        r.energy_sharp = j.at("energy_sharp").get<double>();
        r.energy_gap = j.at("energy_gap").get<double>();
        r.perimeter = j.at("perimeter").get<double>();
        r.trace_ratio = j.at("trace_ratio").get<double>();
        r.u_h1 = j.at("u_h1").get<double>();
        r.iterations = j.at("cg_iterations").get<int>();
        r.residual = j.at("residual").get<double>();
        r.converged = j.at("converged").get<bool>();
        r.wall_time = j.at("wall_time_s").get<double>();
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string sweep_csv(const SweepReport& report) {
    std::string out = std::string(kSweepCsvHeader) + "\r\n";
    for (const auto& r : report.rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\r\n", num(r.eps), num(r.h), r.nodes,
                           r.capped ? 1 : 0, r.ok ? "ok" : "failed", num(r.err_l2), num(r.err_h1),
                           num(r.energy_diffuse), num(r.energy_sharp), num(r.energy_gap), num(r.perimeter),
                           num(r.trace_ratio), num(r.u_h1), r.iterations, num(r.residual), num(r.wall_time));
    }
    return out;
}

std::vector<SweepRow> parse_sweep_csv(std::string_view text) {
    std::vector<SweepRow> rows;
    bool header = true;
    for (auto line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (header) {
            if (line != kSweepCsvHeader) throw IoError("unexpected sweep CSV header");
            header = false;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 16) throw IoError(fmt::format("sweep CSV row has {} fields, expected 16", f.size()));
        SweepRow r;
        r.eps = parse_double(f[0]);
        r.h = parse_double(f[1]);
        r.nodes = static_cast<std::size_t>(parse_double(f[2]));
        r.capped = f[3] == "1";
        r.ok = f[4] == "ok";
        r.err_l2 = parse_double(f[5]);
        r.err_h1 = parse_double(f[6]);
        r.energy_diffuse = parse_double(f[7]);
        r.energy_sharp = parse_double(f[8]);
        r.energy_gap = parse_double(f[9]);
        r.perimeter = parse_double(f[10]);
        r.trace_ratio = parse_double(f[11]);
        r.u_h1 = parse_double(f[12]);
        r.iterations = static_cast<int>(parse_double(f[13]));
        r.residual = parse_double(f[14]);
        r.wall_time = parse_double(f[15]);
        rows.push_back(std::move(r));
    }
    if (header) throw IoError("empty sweep CSV");
    return rows;
}

std::string gamma_csv(const GammaReport& report) {
    std::string out = "eps,h,energy_diffuse,energy_sharp,gap\r\n";
    for (const auto& r : report.rows) {
        out += fmt::format("{},{},{},{},{}\r\n", num(r.eps), num(r.h), num(r.energy_diffuse), num(r.energy_sharp),
                           num(r.gap));
    }
    return out;
}

std::string lemma_csv(const LemmaReport& report) {
    std::string out =
        "w,eps,h,surface_diffuse,surface_sharp,d_diffuse,d_sharp,c_diffuse,c_sharp,f_diffuse,f_sharp,delta_norm,"
        "phi_norm,h1_norm,trace_ratio\r\n";
    for (const auto& r : report.rows) {
        out += fmt::format("\"{}\",{},{},{},{},{},{},{},{},{},{},{},{},{},{}\r\n", r.w, num(r.eps), num(r.h),
                           num(r.surface_diffuse), num(r.surface_sharp), num(r.d_diffuse), num(r.d_sharp),
                           num(r.c_diffuse), num(r.c_sharp), num(r.f_diffuse), num(r.f_sharp), num(r.delta_norm),
                           num(r.phi_norm), num(r.h1_norm), num(r.trace_ratio));
    }
    return out;
}

std::string solution_csv(const GridField& u) {
    const Grid& g = u.grid();
    const bool two_d = g.dimension() == 2;
    std::string out = two_d ? "x,y,u\r\n" : "x,u\r\n";
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        const Point p = g.node(k);
        out += two_d ? fmt::format("{},{},{}\r\n", num(p.x), num(p.y), num(u[k]))
                     : fmt::format("{},{}\r\n", num(p.x), num(u[k]));
    }
    return out;
}

std::string loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series) {
    constexpr double W = 640, H = 440, L = 80, R = 170, T = 40, B = 60;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (!(x > 0 && y > 0) || !std::isfinite(x) || !std::isfinite(y)) continue;
            xmin = std::min(xmin, std::log10(x));
            xmax = std::max(xmax, std::log10(x));
            ymin = std::min(ymin, std::log10(y));
            ymax = std::max(ymax, std::log10(y));
        }
    }
    const bool empty = !std::isfinite(xmin);
    if (empty) xmin = ymin = 0, xmax = ymax = 1;
    if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
    if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
    xmin = std::floor(xmin * 10) / 10, xmax = std::ceil(xmax * 10) / 10;
    ymin = std::floor(ymin), ymax = std::ceil(ymax);

    auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        W, H, W, H);
    out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
    out += fmt::format("<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
                       (L + W - R) / 2, xml_escape(title));
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", L, T,
                       W - L - R, H - T - B);
    for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e) {
        out += fmt::format(
            "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{}</text>\n",
            L - 6, py(e) + 4, e);
        out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n", L, py(e),
                           W - R, py(e));
    }
    // x ticks at the data abscissae
    std::vector<double> xs;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (x > 0 && y > 0 && std::isfinite(y)) xs.push_back(x);
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (double x : xs) {
        out += fmt::format(
            "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:g}</text>\n",
            px(std::log10(x)), H - B + 16, x);
    }
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                       (L + W - R) / 2, H - 18, xml_escape(x_label));
    out += fmt::format(
        "<text x=\"18\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 18 {:.1f})\">{}</text>\n",
        (T + H - B) / 2, (T + H - B) / 2, xml_escape(y_label));

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = colors[k % std::size(colors)];
        std::string pts;
        for (const auto& [x, y] : series[k].points) {
            if (!(x > 0 && y > 0) || !std::isfinite(x) || !std::isfinite(y)) continue;
            if (!pts.empty()) pts += ' ';
            pts += fmt::format("{:.2f},{:.2f}", px(std::log10(x)), py(std::log10(y)));
        }
        if (!pts.empty()) {
            out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", color, pts);
        }
        const double ly = T + 16 + 20.0 * static_cast<double>(k);
        out += fmt::format("<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           W - R + 12, ly, W - R + 36, ly, color);
        out += fmt::format("<text x=\"{}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                           W - R + 42, ly + 4, xml_escape(series[k].label));
    }
    out += "</svg>\n";
    return out;
}

std::string convergence_svg(const SweepReport& report) {
    PlotSeries l2{"L2 error", {}}, h1{"H1 error", {}}, gap{"energy gap", {}};
    for (const auto& r : report.rows) {
        if (!r.ok) continue;
        l2.points.emplace_back(r.eps, r.err_l2);
        h1.points.emplace_back(r.eps, r.err_h1);
        gap.points.emplace_back(r.eps, r.energy_gap);
    }
    return loglog_svg("Diffuse vs sharp: " + report.shape, "eps", "error", {l2, h1, gap});
}

std::string convergence_svg(const GammaReport& report) {
    PlotSeries gap{"|F_eps[u] - F_0[u]|", {}};
    for (const auto& r : report.rows) gap.points.emplace_back(r.eps, r.gap);
    return loglog_svg("Recovery sequence u = " + report.u, "eps", "energy gap", {gap});
}

std::string convergence_svg(const LemmaReport& report) {
    std::vector<PlotSeries> series;
    PlotSeries perim{"perimeter gap", {}};
    for (const auto& p : report.perimeter) perim.points.emplace_back(p.eps, std::abs(p.measured - p.limit));
    series.push_back(std::move(perim));
    for (const auto& r : report.rows) {
        auto it = std::find_if(series.begin(), series.end(), [&](const PlotSeries& s) { return s.label == "D gap, w=" + r.w; });
        if (it == series.end()) {
            series.push_back({"D gap, w=" + r.w, {}});
            it = series.end() - 1;
        }
        it->points.emplace_back(r.eps, std::abs(r.d_diffuse - r.d_sharp));
    }
    return loglog_svg("Lemma checks", "eps", "gap", series);
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ddm
