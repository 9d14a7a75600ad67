#include "cdnozzle/output.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cdnozzle {

using nlohmann::json;

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void require_finite(const json& j, const std::string& path)
{
    if (j.is_number_float() && !std::isfinite(j.get<double>()))
        throw ConsistencyError("report entry '" + path + "' is not finite");
    if (j.is_object())
        for (auto it = j.begin(); it != j.end(); ++it)
            require_finite(*it, path + "." + it.key());
    if (j.is_array())
        for (size_t k = 0; k < j.size(); ++k)
            require_finite(j[k], path + "[" + std::to_string(k) + "]");
}

json conservation(const ConservationReport& c)
{
    return {{"stations", c.stations},
            {"mass_defect", c.mass_defect},
            {"max_mass_defect", c.max_mass_defect},
            {"max_slip", c.max_slip}};
}

json transport(const TransportReport& t)
{
    return {{"a_residual", t.a_residual}, {"b_residual", t.b_residual}, {"max_row_offset", t.max_row_offset}};
}

std::string xml_escape(const std::string& s)
{
    std::string o;
    for (char ch : s) {
        switch (ch) {
        case '&': o += "&amp;"; break;
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '"': o += "&quot;"; break;
        default: o += ch;
        }
    }
    return o;
}

double order(double coarse, double fine)
{
    return coarse > 0.0 && fine > 0.0 ? std::log2(coarse / fine) : 0.0;
}

}  // namespace

std::string fields_csv(const PhysicalField& f)
{
    std::string s = std::string(kFieldsHeader) + "\n";
    for (int i = 0; i < f.n1; ++i)
        for (int j = 0; j < f.n2; ++j)
            s += num(f.y1[i]) + "," + num(f.x2(i, j)) + "," + num(f.rho(i, j)) + "," + num(f.u1(i, j)) + "," +
                 num(f.u2(i, j)) + "," + num(f.p(i, j)) + "," + num(f.mach(i, j)) + "\n";
    return s;
}

std::string interface_csv(const RunResult& r)
{
    const InterfaceCurve& c = r.sol.curve;
    std::string s = std::string(kInterfaceHeader) + "\n";
    for (size_t i = 0; i < c.y1.size(); ++i)
        s += num(c.y1[i]) + "," + num(c.g[i]) + "," + num(c.eta[i]) + "," + num(r.sol.residual.q[i]) + "," +
             num(r.rh.pressure_jump[i]) + "," + num(r.rh.tangency_upper[i]) + "," + num(r.rh.tangency_lower[i]) +
             "\n";
    return s;
}

std::string report_json(const RunResult& r)
{
    const ConvergenceReport& c = r.sol.report;
    json terms = json::object();
    for (const auto& [name, v] : r.sigma_terms.terms)
        terms[name] = v;
    json j = {
        {"sigma", r.sigma},
        {"sigma_terms", terms},
        {"grid", {{"n1", r.dom.upper.n1()}, {"n2", r.dom.upper.n2()}, {"alpha", r.dom.alpha}}},
        {"convergence",
         {{"converged", c.converged},
          {"outer_iterations", c.iterations},
          {"tol_q", c.tol_q},
          {"residual_history", c.residual_history},
          {"theta_history", c.theta_history},
          {"picard_iterations", c.picard_iterations},
          {"picard_upper", r.sol.upper.iterations},
          {"picard_lower", r.sol.lower.iterations},
          {"max_factor", c.max_factor},
          {"geometric_factor", c.geometric_factor},
          {"max_layer_contraction", c.max_layer_contraction},
          {"corner_mismatch", c.corner_mismatch}}},
        {"residuals",
         {{"q_max", r.sol.residual.max_norm},
          {"q_weighted", r.sol.residual.weighted_norm},
          {"pressure_jump", r.rh.max_pressure_jump},
          {"tangency_upper", r.rh.max_tangency_upper},
          {"tangency_lower", r.rh.max_tangency_lower},
          {"wall_defect_upper", r.upper.wall_defect},
          {"wall_defect_lower", r.lower.wall_defect},
          {"conservation_upper", conservation(r.conservation_upper)},
          {"conservation_lower", conservation(r.conservation_lower)},
          {"transport_upper", transport(r.transport_upper)},
          {"transport_lower", transport(r.transport_lower)}}},
        {"norms",
         {{"phi_upper_weighted", r.norms.phi_upper},
          {"phi_lower_weighted", r.norms.phi_lower},
          {"g_cd_weighted", r.norms.g_weighted},
          {"g_cd_sup", r.norms.g_sup},
          {"state_deviation_sup", r.norms.state_deviation}}},
        {"max_mach", r.max_mach},
        {"background_max_mach", r.background_max_mach},
    };
    require_finite(j, "report");
    return j.dump(2) + "\n";
}

std::string sweep_csv(const SweepResult& s)
{
    std::string o = std::string(kSweepHeader) + "\n";
    for (const SweepRow& r : s.rows) {
        const double sr = r.sigma > 0.0 ? r.state_deviation / r.sigma : 0.0;
        const double gr = r.sigma > 0.0 ? r.g_sup / r.sigma : 0.0;
        o += num(r.amplitude) + "," + num(r.sigma) + "," + num(r.state_deviation) + "," + num(r.g_sup) + "," +
             num(r.g_weighted) + "," + std::to_string(r.outer_iterations) + "," + num(sr) + "," + num(gr) + "\n";
    }
    return o;
}

std::string sweep_json(const SweepResult& s)
{
    json rows = json::array();
    std::vector<double> sr, gr;
    for (const SweepRow& r : s.rows) {
        rows.push_back({{"amplitude", r.amplitude},
                        {"sigma", r.sigma},
                        {"state_deviation", r.state_deviation},
                        {"g_sup", r.g_sup},
                        {"g_weighted", r.g_weighted},
                        {"outer_iterations", r.outer_iterations}});
        if (r.sigma > 0.0) {
            sr.push_back(r.state_deviation / r.sigma);
            gr.push_back(r.g_sup / r.sigma);
        }
    }
    // (max - min) / min of the ratio columns over rows with sigma > 0
    auto spread = [](const std::vector<double>& v) {
        if (v.size() < 2)
            return 0.0;
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *lo > 0.0 ? (*hi - *lo) / *lo : 0.0;
    };
    json j = {{"rows", rows},
              {"state_ratio_spread", spread(sr)},
              {"g_ratio_spread", spread(gr)},
              {"complete", !s.failed}};
    if (s.failed)
        j["error"] = {{"amplitude", s.failed_amplitude}, {"message", s.error}};
    require_finite(j, "sweep");
    return j.dump(2) + "\n";
}

std::string refine_csv(const std::vector<RefineRow>& rows)
{
    std::string o = std::string(kRefineHeader) + "\n";
    for (const RefineRow& r : rows)
        o += std::to_string(r.n) + "," + std::to_string(r.outer_iterations) + "," + num(r.q_norm) + "," +
             num(r.pressure_jump) + "," + num(r.tangency) + "," + num(r.mass_defect) + "," + num(r.slip) + "," +
             num(r.wall_defect) + "," + num(r.transport) + "\n";
    return o;
}

std::string refine_json(const std::vector<RefineRow>& rows)
{
    json j = {{"rows", json::array()}, {"orders", json::array()}};
    for (const RefineRow& r : rows)
        j["rows"].push_back({{"n", r.n},
                             {"outer_iterations", r.outer_iterations},
                             {"q_norm", r.q_norm},
                             {"pressure_jump", r.pressure_jump},
                             {"tangency", r.tangency},
                             {"mass_defect", r.mass_defect},
                             {"slip", r.slip},
                             {"wall_defect", r.wall_defect},
                             {"transport", r.transport}});
    // log2 ratios between successive grids (meaningful for halved spacings)
    for (size_t k = 1; k < rows.size(); ++k) {
        const RefineRow& a = rows[k - 1];
        const RefineRow& b = rows[k];
        j["orders"].push_back({{"from", a.n},
                               {"to", b.n},
                               {"pressure_jump", order(a.pressure_jump, b.pressure_jump)},
                               {"tangency", order(a.tangency, b.tangency)},
                               {"mass_defect", order(a.mass_defect, b.mass_defect)},
                               {"slip", order(a.slip, b.slip)},
                               {"wall_defect", order(a.wall_defect, b.wall_defect)},
                               {"transport", order(a.transport, b.transport)}});
    }
    require_finite(j, "refine");
    return j.dump(2) + "\n";
}

std::string svg_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<Series>& series)
{
    const double w = 640, h = 400, ml = 80, mr = 20, mt = 40, mb = 50;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 0;
    bool first = true;
    for (const Series& s : series)
        for (size_t k = 0; k < s.x.size(); ++k) {
            if (first) {
                x0 = x1 = s.x[k];
                y0 = y1 = s.y[k];
                first = false;
            }
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    if (!(x1 > x0))
        x1 = x0 + 1.0;
    if (!(y1 > y0)) {
        const double pad = y0 == 0.0 ? 1.0 : 0.1 * std::abs(y0);
        y0 -= pad;
        y1 += pad;
    }
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - y0) / (y1 - y0) * (h - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 "
      << w << " " << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title)
      << "</text>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        o << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
          << short_num(xv) << "</text>\n"
          << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
          << short_num(yv) << "</text>\n";
    }
    o << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << xml_escape(xlabel) << "</text>\n"
      << "<text x=\"16\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << h / 2 << ")\">" << xml_escape(ylabel) << "</text>\n";
    for (size_t s = 0; s < series.size(); ++s) {
        const char* col = colors[s % 4];
        o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (size_t k = 0; k < series[s].x.size(); ++k)
            o << (k ? " " : "") << px(series[s].x[k]) << "," << py(series[s].y[k]);
        o << "\"/>\n"
          << "<text x=\"" << w - mr - 4 << "\" y=\"" << mt + 14 * (s + 1) << "\" text-anchor=\"end\" font-size=\"12\""
          << " fill=\"" << col << "\">" << xml_escape(series[s].label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConsistencyError("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw ConsistencyError("write to '" + path + "' failed");
}

void write_solve_outputs(const std::string& dir, const RunResult& r)
{
    std::filesystem::create_directories(dir);
    const std::filesystem::path d(dir);
    write_file((d / "fields_upper.csv").string(), fields_csv(r.upper));
    write_file((d / "fields_lower.csv").string(), fields_csv(r.lower));
    write_file((d / "interface.csv").string(), interface_csv(r));
    write_file((d / "report.json").string(), report_json(r));
    const InterfaceCurve& c = r.sol.curve;
    write_file((d / "interface.svg").string(),
               svg_line_plot("contact discontinuity", "x1", "x2 = g_cd(x1)", {{"g_cd", c.y1, c.g}}));
    write_file((d / "pressure_jump.svg").string(),
               svg_line_plot("interface pressure jump", "x1", "P+ - P-",
                             {{"Q (solver traces)", c.y1, r.sol.residual.q},
                              {"extrapolated fields", c.y1, r.rh.pressure_jump}}));
}

void write_sweep_outputs(const std::string& dir, const SweepResult& s)
{
    std::filesystem::create_directories(dir);
    const std::filesystem::path d(dir);
    write_file((d / "sweep.csv").string(), sweep_csv(s));
    write_file((d / "sweep.json").string(), sweep_json(s));
}

void write_refine_outputs(const std::string& dir, const std::vector<RefineRow>& rows)
{
    std::filesystem::create_directories(dir);
    const std::filesystem::path d(dir);
    write_file((d / "refine.csv").string(), refine_csv(rows));
    write_file((d / "refine.json").string(), refine_json(rows));
}

}  // namespace cdnozzle
