#pragma once

// Run configuration and deterministic serialization: CSV/JSON trajectory
// dumps, JSON config parsing with flag-style overrides, and SVG phase
// portraits. Everything here is byte-reproducible for identical inputs --
// floats print in their shortest round-trip form, JSON keys are sorted, and
// no output carries a timestamp.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "base.hpp"
#include "integrate.hpp"
#include "manifolds.hpp"
#include "portrait.hpp"
#include "stability.hpp"

namespace ricciflow {

// Shortest decimal form that parses back to the same double (at most 17
// significant digits).
inline std::string fmt_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path);
}

// -------------------------------------------------------------- run specs --

// A fully resolved run request: command, space, start metric, optional map,
// integrator settings, and output destinations. Optional fields stay empty
// until a config file or flag supplies them, so overrides can be detected.
struct RunSpec {
    std::string command;  // flow | portrait | classify | trace | verify
    std::optional<Family> family;
    std::optional<int> m;
    std::optional<int> k;
    std::optional<MetricPoint> metric;
    std::vector<Summand> map_p;  // subordination set; empty = no map given
    std::optional<Summand> top;
    bool ghh = false;
    IntegratorConfig config;
    std::optional<int> grid;
    std::string out_path;
    std::string json_path;
    std::string svg_path;
    bool deterministic = false;
    bool allow_out_of_range = false;
};

namespace detail {

inline int json_line_of(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

template <typename T>
inline T field_as(const nlohmann::json& j, const std::string& key);

template <>
inline std::string field_as<std::string>(const nlohmann::json& j, const std::string& key) {
    if (!j.at(key).is_string()) throw ParseError("field '" + key + "': expected a string");
    return j.at(key).get<std::string>();
}

template <>
inline double field_as<double>(const nlohmann::json& j, const std::string& key) {
    if (!j.at(key).is_number()) throw ParseError("field '" + key + "': expected a number");
    return j.at(key).get<double>();
}

template <>
inline int field_as<int>(const nlohmann::json& j, const std::string& key) {
    if (!j.at(key).is_number_integer()) throw ParseError("field '" + key + "': expected an integer");
    return j.at(key).get<int>();
}

template <>
inline bool field_as<bool>(const nlohmann::json& j, const std::string& key) {
    if (!j.at(key).is_boolean()) throw ParseError("field '" + key + "': expected a boolean");
    return j.at(key).get<bool>();
}

inline Orientation orientation_from_string(const std::string& s) {
    if (s == "as-written") return Orientation::AsWritten;
    if (s == "reversed") return Orientation::Reversed;
    throw ParseError("unknown orientation '" + s + "' (use as-written or reversed)");
}

}  // namespace detail

// Parse a JSON config document into a RunSpec. Unknown keys are rejected
// (they are usually typos) and type mismatches name the offending field.
inline RunSpec parse_config(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("config is not valid JSON (line " +
                         std::to_string(detail::json_line_of(text, e.byte)) + "): " + e.what());
    }
    if (!doc.is_object()) throw ParseError("config root must be a JSON object");

    static const std::vector<std::string> known = {
        "command", "family", "m", "k", "metric", "map_p", "top", "ghh", "orientation",
        "t_end", "rtol", "atol", "norm_cap", "ext_eps", "max_steps", "sample_stride",
        "grid", "out", "json", "svg", "deterministic", "allow_out_of_range"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        bool ok = false;
        for (const auto& k : known) ok = ok || k == key;
        if (!ok) throw ParseError("unknown config field '" + key + "'");
    }

    RunSpec rs;
    if (!doc.contains("command")) throw MissingField("command");
    rs.command = detail::field_as<std::string>(doc, "command");

    if (doc.contains("family"))
        rs.family = family_from_string(detail::field_as<std::string>(doc, "family"));
    if (doc.contains("m")) rs.m = detail::field_as<int>(doc, "m");
    if (doc.contains("k")) rs.k = detail::field_as<int>(doc, "k");

    if (doc.contains("metric")) {
        const auto& arr = doc.at("metric");
        if (!arr.is_array() || arr.size() < 2 || arr.size() > 3)
            throw ParseError("field 'metric': expected an array of 2 or 3 numbers");
        Vec g = Vec::zero(static_cast<int>(arr.size()));
        for (int i = 0; i < g.size(); ++i) {
            if (!arr[static_cast<std::size_t>(i)].is_number())
                throw ParseError("field 'metric': expected an array of numbers");
            g[i] = arr[static_cast<std::size_t>(i)].get<double>();
        }
        rs.metric = g;
    }

    if (doc.contains("map_p")) {
        const auto& arr = doc.at("map_p");
        if (!arr.is_array() || arr.empty())
            throw ParseError("field 'map_p': expected a non-empty array of summand labels");
        for (const auto& el : arr) {
            if (!el.is_string()) throw ParseError("field 'map_p': expected summand labels");
            rs.map_p.push_back(summand_from_string(el.get<std::string>()));
        }
    }
    if (doc.contains("top"))
        rs.top = summand_from_string(detail::field_as<std::string>(doc, "top"));
    if (doc.contains("ghh")) rs.ghh = detail::field_as<bool>(doc, "ghh");

    if (doc.contains("orientation"))
        rs.config.orientation =
            detail::orientation_from_string(detail::field_as<std::string>(doc, "orientation"));
    if (doc.contains("t_end")) rs.config.t_end = detail::field_as<double>(doc, "t_end");
    if (doc.contains("rtol")) rs.config.rtol = detail::field_as<double>(doc, "rtol");
    if (doc.contains("atol")) rs.config.atol = detail::field_as<double>(doc, "atol");
    if (doc.contains("norm_cap")) rs.config.norm_cap = detail::field_as<double>(doc, "norm_cap");
    if (doc.contains("ext_eps")) rs.config.ext_eps = detail::field_as<double>(doc, "ext_eps");
    if (doc.contains("max_steps"))
        rs.config.max_steps = detail::field_as<int>(doc, "max_steps");
    if (doc.contains("sample_stride"))
        rs.config.sample_stride = detail::field_as<int>(doc, "sample_stride");

    if (doc.contains("grid")) rs.grid = detail::field_as<int>(doc, "grid");
    if (doc.contains("out")) rs.out_path = detail::field_as<std::string>(doc, "out");
    if (doc.contains("json")) rs.json_path = detail::field_as<std::string>(doc, "json");
    if (doc.contains("svg")) rs.svg_path = detail::field_as<std::string>(doc, "svg");
    if (doc.contains("deterministic"))
        rs.deterministic = detail::field_as<bool>(doc, "deterministic");
    if (doc.contains("allow_out_of_range"))
        rs.allow_out_of_range = detail::field_as<bool>(doc, "allow_out_of_range");
    return rs;
}

// Build the flag space a RunSpec names, enforcing per-family requirements.
inline FlagSpace space_from(const RunSpec& rs) {
    if (!rs.family) throw MissingField("family");
    if (*rs.family == Family::Su3) {
        if (rs.m || rs.k)
            throw ConflictingOptions("m and k do not apply to the three-summand space");
        return make_space(Family::Su3);
    }
    if (!rs.m) throw MissingField("m");
    if (!rs.k) throw MissingField("k");
    return make_space(*rs.family, *rs.m, *rs.k, rs.allow_out_of_range);
}

// Assemble the optional map descriptor; flags about a map without the map
// itself are contradictions worth rejecting loudly.
inline std::optional<MapDescriptor> map_from(const RunSpec& rs, const FlagSpace& sp) {
    if (rs.map_p.empty()) {
        if (rs.top) throw ConflictingOptions("top requires map_p");
        if (rs.ghh) throw ConflictingOptions("ghh requires map_p");
        return std::nullopt;
    }
    MapDescriptor map;
    map.subordination = rs.map_p;
    if (!rs.top) throw MissingField("top");
    map.J = ComplexStructureChoice{*rs.top};
    map.ghh = rs.ghh;
    validate_map(sp, map);
    return map;
}

// Resolved echo of the run, embedded in JSON reports and SVG descriptions;
// parse_config accepts every key this emits.
inline nlohmann::json run_spec_json(const RunSpec& rs) {
    nlohmann::json j;
    j["command"] = rs.command;
    if (rs.family) j["family"] = to_string(*rs.family);
    if (rs.m) j["m"] = *rs.m;
    if (rs.k) j["k"] = *rs.k;
    if (rs.metric) {
        nlohmann::json arr = nlohmann::json::array();
        for (int i = 0; i < rs.metric->size(); ++i) arr.push_back((*rs.metric)[i]);
        j["metric"] = arr;
    }
    if (!rs.map_p.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (Summand s : rs.map_p) arr.push_back(to_string(s));
        j["map_p"] = arr;
        if (rs.top) j["top"] = to_string(*rs.top);
        j["ghh"] = rs.ghh;
    }
    j["orientation"] = to_string(rs.config.orientation);
    j["t_end"] = rs.config.t_end;
    j["rtol"] = rs.config.rtol;
    j["atol"] = rs.config.atol;
    j["norm_cap"] = rs.config.norm_cap;
    j["ext_eps"] = rs.config.ext_eps;
    j["max_steps"] = rs.config.max_steps;
    j["sample_stride"] = rs.config.sample_stride;
    if (rs.grid) j["grid"] = *rs.grid;
    if (!rs.out_path.empty()) j["out"] = rs.out_path;
    if (!rs.json_path.empty()) j["json"] = rs.json_path;
    if (!rs.svg_path.empty()) j["svg"] = rs.svg_path;
    j["deterministic"] = rs.deterministic;
    j["allow_out_of_range"] = rs.allow_out_of_range;
    return j;
}

// ------------------------------------------------------------------- CSV --

namespace detail {

inline std::string csv_quote(const std::string& field) {
    bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

}  // namespace detail

// One row per sample: time, metric coefficients, norm, unit direction, then
// a region label (two-summand spaces) and a stability verdict (when a
// timeline accompanies the trajectory); both stay empty otherwise.
inline std::string write_trajectory_csv(const Trajectory& traj,
                                        const StabilityTimeline* timeline = nullptr) {
    int n = traj.space.count();
    std::string out = "t";
    for (int i = 1; i <= n; ++i) out += ",lambda_" + std::to_string(i);
    out += ",norm";
    for (int i = 1; i <= n; ++i) out += ",dir_" + std::to_string(i);
    out += ",region,verdict\n";

    for (std::size_t row = 0; row < traj.samples.size(); ++row) {
        const Sample& s = traj.samples[row];
        out += fmt_double(s.t);
        for (int i = 0; i < n; ++i) out += "," + fmt_double(s.g[i]);
        double norm = s.g.norm();
        out += "," + fmt_double(norm);
        for (int i = 0; i < n; ++i) out += "," + fmt_double(s.g[i] / norm);
        out += ",";
        if (traj.space.two_summand()) out += to_string(classify_region(traj.space, s.g));
        out += ",";
        if (timeline && row < timeline->entries.size())
            out += detail::csv_quote(to_string(timeline->entries[row].verdict));
        out += "\n";
    }
    return out;
}

// ------------------------------------------------------------------ JSON --

inline std::string event_kind_name(EventKind k) { return to_string(k); }

namespace detail {

inline EventKind event_kind_from_string(const std::string& s) {
    for (EventKind k : {EventKind::Extinction, EventKind::BlowUp, EventKind::DirectionConverged,
                        EventKind::MaxSteps, EventKind::ReachedTEnd})
        if (to_string(k) == s) return k;
    throw ParseError("unknown event kind '" + s + "'");
}

}  // namespace detail

// Full-fidelity JSON mirror of a trajectory, prefixed with the resolved run
// echo when one is supplied. Sample values survive a round trip bitwise.
inline nlohmann::json trajectory_json(const Trajectory& traj,
                                      const nlohmann::json* echo = nullptr) {
    nlohmann::json j;
    if (echo) j["run"] = *echo;
    j["space"]["family"] = to_string(traj.space.family);
    if (traj.space.two_summand()) {
        j["space"]["m"] = traj.space.m;
        j["space"]["k"] = traj.space.k;
    }
    j["config"]["rtol"] = traj.config.rtol;
    j["config"]["atol"] = traj.config.atol;
    j["config"]["t_end"] = traj.config.t_end;
    j["config"]["norm_cap"] = traj.config.norm_cap;
    j["config"]["ext_eps"] = traj.config.ext_eps;
    j["config"]["max_steps"] = traj.config.max_steps;
    j["config"]["orientation"] = to_string(traj.config.orientation);
    j["config"]["sample_stride"] = traj.config.sample_stride;

    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : traj.samples) {
        nlohmann::json row;
        row["t"] = s.t;
        nlohmann::json g = nlohmann::json::array();
        for (int i = 0; i < s.g.size(); ++i) g.push_back(s.g[i]);
        row["g"] = g;
        samples.push_back(row);
    }
    j["samples"] = samples;

    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : traj.events) {
        nlohmann::json ev;
        ev["kind"] = to_string(e.kind);
        ev["t"] = e.t;
        ev["detail"] = e.detail;
        ev["terminal"] = e.terminal;
        events.push_back(ev);
    }
    j["events"] = events;
    return j;
}

inline std::string write_trajectory_json(const Trajectory& traj,
                                         const nlohmann::json* echo = nullptr) {
    return trajectory_json(traj, echo).dump(2) + "\n";
}

// Inverse of write_trajectory_json. Derivatives for dense output are
// recomputed from the field, which is exact given bitwise-identical samples.
inline Trajectory read_trajectory_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("trajectory document is not valid JSON: ") + e.what());
    }
    if (!j.contains("space") || !j.contains("samples")) throw MissingField("space/samples");

    const auto& sj = j.at("space");
    Family fam = family_from_string(sj.at("family").get<std::string>());
    FlagSpace sp = fam == Family::Su3
                       ? make_space(fam)
                       : make_space(fam, sj.at("m").get<int>(), sj.at("k").get<int>(), true);

    Trajectory traj;
    traj.space = sp;
    if (j.contains("config")) {
        const auto& cj = j.at("config");
        traj.config.rtol = cj.at("rtol").get<double>();
        traj.config.atol = cj.at("atol").get<double>();
        traj.config.t_end = cj.at("t_end").get<double>();
        traj.config.norm_cap = cj.at("norm_cap").get<double>();
        traj.config.ext_eps = cj.at("ext_eps").get<double>();
        traj.config.max_steps = cj.at("max_steps").get<long>();
        traj.config.orientation =
            detail::orientation_from_string(cj.at("orientation").get<std::string>());
        traj.config.sample_stride = cj.at("sample_stride").get<int>();
    }
    for (const auto& row : j.at("samples")) {
        Sample s;
        s.t = row.at("t").get<double>();
        const auto& g = row.at("g");
        if (static_cast<int>(g.size()) != sp.count())
            throw DimensionMismatch("sample size does not match the space");
        s.g = Vec::zero(sp.count());
        for (int i = 0; i < s.g.size(); ++i) s.g[i] = g[static_cast<std::size_t>(i)].get<double>();
        traj.samples.push_back(s);
        traj.derivs.push_back(detail::field_eval(sp, s.g, traj.config.orientation));
    }
    if (j.contains("events"))
        for (const auto& ev : j.at("events"))
            traj.events.push_back(Event{detail::event_kind_from_string(ev.at("kind").get<std::string>()),
                                        ev.at("t").get<double>(), ev.at("detail").get<std::string>(),
                                        ev.at("terminal").get<bool>()});
    return traj;
}

// ------------------------------------------------------------------- SVG --

struct PortraitStyle {
    bool deterministic = false;  // honored trivially: output never embeds time or randomness
    std::string title;           // defaults to the space name
    std::string echo;            // JSON run echo, embedded in <desc>
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace detail

// Fixed 800x800 canvas. Two-summand spaces plot the metric quadrant with
// rays as lines from the origin; the three-summand space plots directions in
// the barycentric simplex with rays as labeled points. Element order is
// deterministic: rays sorted by label, trajectories in input order.
inline std::string render_portrait_svg(const FlagSpace& sp, std::vector<Ray> rays,
                                       const std::vector<Trajectory>& trajectories,
                                       const PortraitStyle& style = {}) {
    bool any_samples = false;
    for (const auto& tr : trajectories) any_samples = any_samples || !tr.samples.empty();
    if (rays.empty() && !any_samples) throw EmptyPlot("nothing to draw");

    std::sort(rays.begin(), rays.end(),
              [](const Ray& a, const Ray& b) { return a.label < b.label; });

    const double size = 800.0, margin = 70.0;
    const double span = size - 2.0 * margin;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};

    std::string body;
    std::string title = style.title.empty() ? sp.name() : style.title;

    if (sp.two_summand()) {
        // Data-driven scale: cover the unit square and every sample point.
        double lim = 1.0;
        for (const auto& tr : trajectories)
            for (const auto& s : tr.samples) lim = std::max({lim, s.g[0], s.g[1]});
        lim *= 1.05;
        auto px = [&](double x) { return margin + (x / lim) * span; };
        auto py = [&](double y) { return size - margin - (y / lim) * span; };

        body += "  <line x1=\"" + detail::fmt_coord(px(0)) + "\" y1=\"" + detail::fmt_coord(py(0)) +
                "\" x2=\"" + detail::fmt_coord(px(lim)) + "\" y2=\"" + detail::fmt_coord(py(0)) +
                "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
        body += "  <line x1=\"" + detail::fmt_coord(px(0)) + "\" y1=\"" + detail::fmt_coord(py(0)) +
                "\" x2=\"" + detail::fmt_coord(px(0)) + "\" y2=\"" + detail::fmt_coord(py(lim)) +
                "\" stroke=\"#888\" stroke-width=\"1\"/>\n";

        for (const auto& ray : rays) {
            // Clip the ray to the plotted square.
            double dx = ray.direction[0], dy = ray.direction[1];
            double reach = lim / std::max(dx, dy);
            double ex = dx * reach, ey = dy * reach;
            body += "  <line x1=\"" + detail::fmt_coord(px(0)) + "\" y1=\"" +
                    detail::fmt_coord(py(0)) + "\" x2=\"" + detail::fmt_coord(px(ex)) +
                    "\" y2=\"" + detail::fmt_coord(py(ey)) +
                    "\" stroke=\"#444\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>\n";
            body += "  <text x=\"" + detail::fmt_coord(px(ex * 0.92)) + "\" y=\"" +
                    detail::fmt_coord(py(ey * 0.92) - 6.0) + "\" font-size=\"15\" fill=\"#444\">" +
                    detail::xml_escape(ray.label) + "</text>\n";
        }

        int color = 0;
        for (const auto& tr : trajectories) {
            if (tr.samples.empty()) continue;
            std::string pts;
            for (const auto& s : tr.samples) {
                if (!pts.empty()) pts += " ";
                pts += detail::fmt_coord(px(s.g[0])) + "," + detail::fmt_coord(py(s.g[1]));
            }
            body += "  <polyline fill=\"none\" stroke=\"" + std::string(palette[color % 6]) +
                    "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
            ++color;
        }
    } else {
        // Simplex of directions: corner i carries summand i's full weight.
        double ax = margin, ay = size - margin;
        double bx = size - margin, by = size - margin;
        double cx = size / 2.0, cy = size - margin - span * 0.8660254037844386;
        auto bary = [&](const Vec& g) {
            double s = g[0] + g[1] + g[2];
            double wa = g[0] / s, wb = g[1] / s, wc = g[2] / s;
            return std::pair<double, double>(wa * ax + wb * bx + wc * cx,
                                             wa * ay + wb * by + wc * cy);
        };
        body += "  <polygon points=\"" + detail::fmt_coord(ax) + "," + detail::fmt_coord(ay) +
                " " + detail::fmt_coord(bx) + "," + detail::fmt_coord(by) + " " +
                detail::fmt_coord(cx) + "," + detail::fmt_coord(cy) +
                "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
        const char* corner_names[3] = {"sigma12", "sigma13", "sigma23"};
        double corner_pos[3][2] = {{ax - 8.0, ay + 20.0}, {bx - 40.0, by + 20.0}, {cx - 24.0, cy - 10.0}};
        for (int i = 0; i < 3; ++i)
            body += "  <text x=\"" + detail::fmt_coord(corner_pos[i][0]) + "\" y=\"" +
                    detail::fmt_coord(corner_pos[i][1]) + "\" font-size=\"13\" fill=\"#888\">" +
                    corner_names[i] + "</text>\n";

        for (const auto& ray : rays) {
            auto [x, y] = bary(ray.direction);
            body += "  <circle cx=\"" + detail::fmt_coord(x) + "\" cy=\"" + detail::fmt_coord(y) +
                    "\" r=\"5\" fill=\"#444\"/>\n";
            body += "  <text x=\"" + detail::fmt_coord(x + 8.0) + "\" y=\"" +
                    detail::fmt_coord(y - 8.0) + "\" font-size=\"15\" fill=\"#444\">" +
                    detail::xml_escape(ray.label) + "</text>\n";
        }

        int color = 0;
        for (const auto& tr : trajectories) {
            if (tr.samples.empty()) continue;
            std::string pts;
            for (const auto& s : tr.samples) {
                auto [x, y] = bary(s.g);
                if (!pts.empty()) pts += " ";
                pts += detail::fmt_coord(x) + "," + detail::fmt_coord(y);
            }
            body += "  <polyline fill=\"none\" stroke=\"" + std::string(palette[color % 6]) +
                    "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
            ++color;
        }
    }

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" "
           "height=\"800\" viewBox=\"0 0 800 800\">\n";
    if (!style.echo.empty()) svg += "  <desc>" + detail::xml_escape(style.echo) + "</desc>\n";
    svg += "  <rect width=\"800\" height=\"800\" fill=\"#ffffff\"/>\n";
    svg += "  <text x=\"70\" y=\"40\" font-size=\"20\" fill=\"#222\">" +
           detail::xml_escape(title) + "</text>\n";
    svg += body;
    svg += "</svg>\n";
    return svg;
}

}  // namespace ricciflow
