#pragma once

#include "errors.hpp"
#include "measures.hpp"
#include "sector.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace isosector {

inline constexpr const char* kSchema = "iso-sector/1";

enum class Format { Csv, Json, Svg };

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    if (s == "svg") return Format::Svg;
    fail(ErrorKind::UnsupportedFormat, "unknown format '" + s + "'");
}

// 17 significant digits, round-trip safe.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::string kind;
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

namespace detail {

inline std::string csv_field(const Cell& c) {
    struct V {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
            std::string out = "\"";
            for (char ch : s) {
                if (ch == '"') out += '"';
                out += ch;
            }
            return out + "\"";
        }
    };
    return std::visit(V{}, c);
}

inline nlohmann::json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

inline nlohmann::json json_cell(const Cell& c) {
    struct V {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(double v) const { return json_number(v); }
        nlohmann::json operator()(std::int64_t v) const { return v; }
        nlohmann::json operator()(const std::string& s) const { return s; }
    };
    return std::visit(V{}, c);
}

} // namespace detail

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + detail::csv_field(t.header[i]);
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + detail::csv_field(row[i]);
        out += '\n';
    }
    return out;
}

inline nlohmann::json to_json(const Table& t) {
    nlohmann::json j;
    j["schema"] = kSchema;
    j["kind"] = t.kind;
    j["columns"] = t.header;
    auto rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size() && i < t.header.size(); ++i) r[t.header[i]] = detail::json_cell(row[i]);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// Writes to the named file, or to stdout for an empty path or "-".
inline void write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        require(bool(std::cout), ErrorKind::IoFailure, "could not write to standard output");
        return;
    }
    std::ofstream f(path, std::ios::binary);
    require(bool(f), ErrorKind::IoFailure, "could not open '" + path + "' for writing");
    f << text;
    f.close();
    require(!f.fail(), ErrorKind::IoFailure, "could not write '" + path + "'");
}

// ---- sector classification ----

inline const std::vector<std::string>& phase_header() {
    static const std::vector<std::string> h{"p", "theta0", "winner", "arc_ratio", "semi_ratio", "und_ratio", "margin"};
    return h;
}

inline std::vector<Cell> classification_row(const Classification& c) {
    auto ratio = [&](SectorTag t) -> Cell {
        if (const auto* x = c.find(t)) return x->measure.ratio;
        return std::monostate{};
    };
    return {c.p, c.theta0, std::string(to_string(c.winner)), ratio(SectorTag::Arc), ratio(SectorTag::Semicircle),
            ratio(SectorTag::Undulary), c.margin};
}

inline Table phase_table(const std::vector<PhaseCell>& cells) {
    Table t{"phase", phase_header(), {}};
    for (const auto& cell : cells) {
        if (cell.result) t.rows.push_back(classification_row(*cell.result));
        else
            t.rows.push_back({cell.p, cell.theta0, std::string("error"), std::monostate{}, std::monostate{},
                              std::monostate{}, std::monostate{}});
    }
    return t;
}

inline nlohmann::json classification_json(const Classification& c) {
    nlohmann::json j;
    j["schema"] = kSchema;
    j["kind"] = "classification";
    j["p"] = c.p;
    j["theta0"] = c.theta0;
    j["winner"] = to_string(c.winner);
    j["margin"] = detail::json_number(c.margin);
    j["undulary_t_min"] = detail::json_number(c.undulary_t_min);
    j["undulary_t_max"] = detail::json_number(c.undulary_t_max);
    if (!c.undulary_error.empty()) j["undulary_error"] = c.undulary_error;
    auto cands = nlohmann::json::array();
    for (const auto& x : c.ranked) {
        nlohmann::json e;
        e["tag"] = to_string(x.tag);
        e["ratio"] = x.measure.ratio;
        e["area"] = x.measure.area;
        e["perimeter"] = x.measure.perimeter;
        if (x.undulary) {
            e["r1"] = x.undulary->r1;
            e["lambda"] = x.undulary->lambda;
            e["half_period"] = x.half_period;
        }
        cands.push_back(std::move(e));
    }
    j["candidates"] = std::move(cands);
    return j;
}

namespace detail {

inline double json_double(const nlohmann::json& j) { return j.is_null() ? INFINITY : j.get<double>(); }

inline SectorTag sector_tag_from(const std::string& s) {
    for (auto t : {SectorTag::Arc, SectorTag::Semicircle, SectorTag::Undulary})
        if (s == to_string(t)) return t;
    fail(ErrorKind::UnsupportedFormat, "unknown candidate tag '" + s + "'");
}

inline Winner winner_from(const std::string& s) {
    for (auto w : {Winner::Arc, Winner::Semicircle, Winner::Undulary, Winner::Tie})
        if (s == to_string(w)) return w;
    fail(ErrorKind::UnsupportedFormat, "unknown winner '" + s + "'");
}

} // namespace detail

inline Classification classification_from_json(const nlohmann::json& j) {
    require(j.value("schema", "") == std::string(kSchema), ErrorKind::UnsupportedFormat, "schema mismatch");
    Classification c;
    c.p = j.at("p").get<double>();
    c.theta0 = j.at("theta0").get<double>();
    c.winner = detail::winner_from(j.at("winner").get<std::string>());
    c.margin = detail::json_double(j.at("margin"));
    c.undulary_t_min = detail::json_double(j.at("undulary_t_min"));
    c.undulary_t_max = detail::json_double(j.at("undulary_t_max"));
    c.undulary_error = j.value("undulary_error", "");
    for (const auto& e : j.at("candidates")) {
        SectorCandidate x{detail::sector_tag_from(e.at("tag").get<std::string>()),
                          {e.at("area").get<double>(), e.at("perimeter").get<double>(), e.at("ratio").get<double>()},
                          std::nullopt,
                          0.0};
        if (e.contains("r1")) {
            x.undulary = UndularySpec{e.at("r1").get<double>(), c.p, e.at("lambda").get<double>()};
            x.half_period = e.at("half_period").get<double>();
        }
        c.ranked.push_back(x);
    }
    return c;
}

// ---- svg ----

struct SvgCurve {
    PolarGraph graph;
    std::string label;
};

namespace detail {

inline std::string svg_num(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(4);
    os << (std::abs(v) < 5e-5 ? 0.0 : v);
    return os.str();
}

inline const char* svg_color(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return colors[i % 6];
}

// Resamples r(theta) by linear interpolation on at least `count` uniform angles.
inline std::vector<std::pair<double, double>> resample_polar(const PolarGraph& g, std::size_t count) {
    count = std::max(count, g.theta.size());
    std::vector<std::pair<double, double>> out(count);
    std::size_t j = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const double th = g.theta0 * double(i) / double(count - 1);
        while (j + 2 < g.theta.size() && g.theta[j + 1] < th) ++j;
        const double t = std::clamp((th - g.theta[j]) / (g.theta[j + 1] - g.theta[j]), 0.0, 1.0);
        out[i] = {th, g.radius[j] + t * (g.radius[j + 1] - g.radius[j])};
    }
    return out;
}

} // namespace detail

inline constexpr std::size_t kSvgCurvePoints = 512;

// Curves drawn in the physical sector with the wedge boundary.
inline std::string svg_sector_curves(double theta0, const std::vector<SvgCurve>& curves, const std::string& title) {
    require(!curves.empty(), ErrorKind::DegenerateGrid, "no curves to draw");
    double rmax = 0.0;
    for (const auto& c : curves) rmax = std::max(rmax, *std::max_element(c.graph.radius.begin(), c.graph.radius.end()));
    const double wedge = 1.15 * rmax;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    auto extend = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (int k = 0; k <= 256; ++k) {
        const double th = theta0 * k / 256.0;
        extend(wedge * std::cos(th), wedge * std::sin(th));
    }
    const double pad = 0.08 * std::max(xmax - xmin, ymax - ymin), size = 640.0;
    const double span = std::max(xmax - xmin, ymax - ymin) + 2.0 * pad, scale = size / span;
    auto X = [&](double x) { return detail::svg_num((x - xmin + pad) * scale); };
    auto Y = [&](double y) { return detail::svg_num((ymax + pad - y) * scale); };
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size << "\" height=\"" << size + 40
       << "\" viewBox=\"0 0 " << size << " " << size + 40 << "\">\n"
       << "<title>" << title << "</title>\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // wedge: the two edges and a dotted guide arc
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"" << X(wedge) << "," << Y(0) << " "
       << X(0) << "," << Y(0) << " " << X(wedge * std::cos(theta0)) << "," << Y(wedge * std::sin(theta0)) << "\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"4 4\" points=\"";
    for (int k = 0; k <= 128; ++k) {
        const double th = theta0 * k / 128.0;
        os << (k ? " " : "") << X(wedge * std::cos(th)) << "," << Y(wedge * std::sin(th));
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        os << "<polyline class=\"curve\" fill=\"none\" stroke=\"" << detail::svg_color(i)
           << "\" stroke-width=\"2\" points=\"";
        const auto pts = detail::resample_polar(curves[i].graph, kSvgCurvePoints);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const auto [th, r] = pts[k];
            os << (k ? " " : "") << X(r * std::cos(th)) << "," << Y(r * std::sin(th));
        }
        os << "\"/>\n";
        os << "<text x=\"10\" y=\"" << size + 15 + 12 * double(i) << "\" font-size=\"12\" fill=\"" << detail::svg_color(i)
           << "\">" << curves[i].label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

// Winner map over the (theta0, p) grid, one rectangle per cell.
inline std::string svg_phase(const std::vector<PhaseCell>& cells, const std::vector<double>& p_grid,
                             const std::vector<double>& theta_grid) {
    require(cells.size() == p_grid.size() * theta_grid.size(), ErrorKind::DegenerateGrid, "cell count mismatch");
    const double w = 640.0, h = 480.0, left = 60.0, bottom = 40.0;
    const double cw = (w - left) / double(theta_grid.size()), ch = (h - bottom) / double(p_grid.size());
    auto color = [](const PhaseCell& c) -> const char* {
        if (!c.result) return "#000000";
        switch (c.result->winner) {
        case Winner::Arc: return "#1f77b4";
        case Winner::Semicircle: return "#d62728";
        case Winner::Undulary: return "#2ca02c";
        case Winner::Tie: return "#bbbbbb";
        }
        return "#000000";
    };
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w << "\" height=\"" << h + 30
       << "\" viewBox=\"0 0 " << w << " " << h + 30 << "\">\n"
       << "<title>winner by (theta0, p)</title>\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < p_grid.size(); ++i)
        for (std::size_t k = 0; k < theta_grid.size(); ++k) {
            const auto& c = cells[i * theta_grid.size() + k];
            os << "<rect x=\"" << detail::svg_num(left + cw * double(k)) << "\" y=\""
               << detail::svg_num(h - bottom - ch * double(i + 1)) << "\" width=\"" << detail::svg_num(cw)
               << "\" height=\"" << detail::svg_num(ch) << "\" fill=\"" << color(c) << "\"/>\n";
        }
    os << "<text x=\"" << left << "\" y=\"" << h - 15 << "\" font-size=\"12\">theta0 " << format_number(theta_grid.front())
       << " to " << format_number(theta_grid.back()) << "</text>\n"
       << "<text x=\"5\" y=\"15\" font-size=\"12\">p " << format_number(p_grid.front()) << " to "
       << format_number(p_grid.back()) << "</text>\n"
       << "<text x=\"" << left << "\" y=\"" << h + 15
       << "\" font-size=\"12\"><tspan fill=\"#1f77b4\">arc</tspan> <tspan fill=\"#2ca02c\">undulary</tspan> "
          "<tspan fill=\"#d62728\">semicircle</tspan> <tspan fill=\"#bbbbbb\">tie</tspan></text>\n"
       << "</svg>\n";
    return os.str();
}

} // namespace isosector
