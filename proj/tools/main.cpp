// Command-line front end: integrate flows, render portraits, classify
// metrics, trace stability along a run, and self-check the build.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical
// failure, 3 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include "ricciflow/ricciflow.hpp"
#include "ricciflow/verify.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rf = ricciflow;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw rf::IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = text.find(',', pos);
        parts.push_back(text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                    : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return parts;
}

rf::MetricPoint parse_metric_flag(const std::string& text) {
    auto parts = split_commas(text);
    if (parts.size() < 2 || parts.size() > 3)
        throw rf::ParseError("flag 'metric': expected 2 or 3 comma-separated numbers, got '" +
                             text + "'");
    rf::Vec g = rf::Vec::zero(static_cast<int>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& p = parts[i];
        double v = 0.0;
        auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
        if (ec != std::errc{} || end != p.data() + p.size())
            throw rf::ParseError("flag 'metric': '" + p + "' is not a number");
        g[static_cast<int>(i)] = v;
    }
    return g;
}

std::vector<rf::Summand> parse_map_flag(const std::string& text) {
    std::vector<rf::Summand> out;
    for (const auto& p : split_commas(text)) out.push_back(rf::summand_from_string(p));
    if (out.empty()) throw rf::ParseError("flag 'map-p': expected summand labels");
    return out;
}

// One flag set per subcommand; option pointers let "user actually passed it"
// drive the override of any config-file value.
struct FlagSet {
    std::string config_path, family, metric, map_p, top, orientation;
    std::string out, json, svg;
    int m = 0, k = 0, grid = 0;
    double t_end = 0.0, rtol = 0.0, atol = 0.0;
    bool ghh = false, deterministic = false, allow_out_of_range = false;

    CLI::Option *o_config = nullptr, *o_family = nullptr, *o_m = nullptr, *o_k = nullptr,
                *o_metric = nullptr, *o_map_p = nullptr, *o_top = nullptr, *o_ghh = nullptr,
                *o_orientation = nullptr, *o_t_end = nullptr, *o_rtol = nullptr,
                *o_atol = nullptr, *o_grid = nullptr, *o_out = nullptr, *o_json = nullptr,
                *o_svg = nullptr, *o_det = nullptr, *o_allow = nullptr;
};

void add_flags(CLI::App* cmd, FlagSet& f) {
    f.o_config = cmd->add_option("--config", f.config_path,
                                 "JSON config file; explicit flags override its fields");
    f.o_family = cmd->add_option("--family", f.family, "family: so, sp or su3");
    f.o_m = cmd->add_option("--m", f.m, "first family parameter");
    f.o_k = cmd->add_option("--k", f.k, "second family parameter");
    f.o_metric = cmd->add_option("--metric", f.metric,
                                 "initial metric coefficients, e.g. 1,2.5 or 2,1.95,1.95");
    f.o_map_p = cmd->add_option("--map-p", f.map_p,
                                "map subordination set, comma-separated summand labels");
    f.o_top = cmd->add_option("--top", f.top, "height-2 summand of the complex structure");
    f.o_ghh = cmd->add_flag("--ghh", f.ghh, "map is generalized holomorphic-horizontal");
    f.o_orientation =
        cmd->add_option("--orientation", f.orientation, "as-written or reversed");
    f.o_t_end = cmd->add_option("--t-end", f.t_end, "integration horizon");
    f.o_rtol = cmd->add_option("--rtol", f.rtol, "relative tolerance");
    f.o_atol = cmd->add_option("--atol", f.atol, "absolute tolerance");
    f.o_grid = cmd->add_option("--grid", f.grid, "sampling grid size");
    f.o_out = cmd->add_option("--out", f.out, "primary output path (CSV, or SVG for portrait)");
    f.o_json = cmd->add_option("--json", f.json, "JSON report path");
    f.o_svg = cmd->add_option("--svg", f.svg, "SVG output path");
    f.o_det = cmd->add_flag("--deterministic", f.deterministic,
                            "pin every output byte; reruns compare equal");
    f.o_allow = cmd->add_flag("--allow-out-of-range", f.allow_out_of_range,
                              "accept family parameters outside the supported range");
}

rf::RunSpec resolve(const std::string& command, const FlagSet& f) {
    rf::RunSpec rs;
    if (f.o_config->count()) rs = rf::parse_config(slurp(f.config_path));
    rs.command = command;

    if (f.o_family->count()) rs.family = rf::family_from_string(f.family);
    if (f.o_m->count()) rs.m = f.m;
    if (f.o_k->count()) rs.k = f.k;
    if (f.o_metric->count()) rs.metric = parse_metric_flag(f.metric);
    if (f.o_map_p->count()) rs.map_p = parse_map_flag(f.map_p);
    if (f.o_top->count()) rs.top = rf::summand_from_string(f.top);
    if (f.o_ghh->count()) rs.ghh = true;
    if (f.o_orientation->count())
        rs.config.orientation = rf::detail::orientation_from_string(f.orientation);
    if (f.o_t_end->count()) rs.config.t_end = f.t_end;
    if (f.o_rtol->count()) rs.config.rtol = f.rtol;
    if (f.o_atol->count()) rs.config.atol = f.atol;
    if (f.o_grid->count()) rs.grid = f.grid;
    if (f.o_out->count()) rs.out_path = f.out;
    if (f.o_json->count()) rs.json_path = f.json;
    if (f.o_svg->count()) rs.svg_path = f.svg;
    if (f.o_det->count()) rs.deterministic = true;
    if (f.o_allow->count()) rs.allow_out_of_range = true;
    return rs;
}

nlohmann::json timeline_json(const rf::StabilityTimeline& tl) {
    nlohmann::json j;
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& e : tl.entries) verdicts.push_back(rf::to_string(e.verdict));
    j["verdicts"] = verdicts;
    if (tl.limit_direction) {
        nlohmann::json d = nlohmann::json::array();
        for (int i = 0; i < tl.limit_direction->size(); ++i)
            d.push_back((*tl.limit_direction)[i]);
        j["limit_direction"] = d;
    }
    if (tl.limit_verdict) j["limit_verdict"] = rf::to_string(*tl.limit_verdict);
    nlohmann::json transitions = nlohmann::json::array();
    for (const auto& tr : tl.transitions) {
        nlohmann::json t;
        t["t"] = tr.t;
        t["from"] = rf::to_string(tr.from);
        t["to"] = rf::to_string(tr.to);
        t["at_limit"] = tr.at_limit;
        transitions.push_back(t);
    }
    j["transitions"] = transitions;
    return j;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else
        rf::write_file(path, content);
}

// flow: integrate and write CSV/JSON/SVG. trace: the same with a required
// map, so every row carries a stability verdict.
int run_flow(const rf::RunSpec& rs, bool map_required) {
    rf::FlagSpace sp = rf::space_from(rs);
    std::optional<rf::MapDescriptor> map = rf::map_from(rs, sp);
    if (map_required && !map) throw rf::MissingField("map_p");
    if (!rs.metric) throw rf::MissingField("metric");

    rf::Trajectory traj = rf::integrate(sp, *rs.metric, rs.config);
    std::optional<rf::StabilityTimeline> tl;
    if (map) tl = rf::trace_stability(sp, *map, traj);

    nlohmann::json echo = rf::run_spec_json(rs);
    emit(rs.out_path, rf::write_trajectory_csv(traj, tl ? &*tl : nullptr));
    if (!rs.json_path.empty()) {
        nlohmann::json doc = rf::trajectory_json(traj, &echo);
        if (tl) doc["timeline"] = timeline_json(*tl);
        rf::write_file(rs.json_path, doc.dump(2) + "\n");
    }
    if (!rs.svg_path.empty()) {
        rf::PortraitStyle style;
        style.deterministic = rs.deterministic;
        style.echo = echo.dump();
        rf::write_file(rs.svg_path,
                       rf::render_portrait_svg(sp, rf::invariant_rays(sp), {traj}, style));
    }
    return 0;
}

int run_portrait(const rf::RunSpec& rs) {
    rf::FlagSpace sp = rf::space_from(rs);
    std::vector<rf::Trajectory> trajectories;
    if (rs.metric) trajectories.push_back(rf::integrate(sp, *rs.metric, rs.config));

    nlohmann::json echo = rf::run_spec_json(rs);
    rf::PortraitStyle style;
    style.deterministic = rs.deterministic;
    style.echo = echo.dump();
    std::string svg = rf::render_portrait_svg(sp, rf::invariant_rays(sp), trajectories, style);
    emit(rs.svg_path.empty() ? rs.out_path : rs.svg_path, svg);
    return 0;
}

int run_classify(const rf::RunSpec& rs) {
    rf::FlagSpace sp = rf::space_from(rs);
    std::optional<rf::MapDescriptor> map = rf::map_from(rs, sp);
    if (!rs.metric) throw rf::MissingField("metric");
    rf::validate_metric(sp, *rs.metric);

    nlohmann::json rep;
    rep["run"] = rf::run_spec_json(rs);
    rep["space"] = sp.name();
    if (sp.two_summand())
        rep["region"] = rf::to_string(rf::classify_region(sp, *rs.metric));
    if (map) {
        rf::StabilityVerdict v = rf::classify_stability(sp, *map, *rs.metric);
        rep["verdict"] = rf::to_string(v);
        nlohmann::json fired = nlohmann::json::array();
        for (rf::StabilityRule rule : v.fired) fired.push_back(rf::to_string(rule));
        rep["fired"] = fired;
        if (v.witness) {
            nlohmann::json w = nlohmann::json::array();
            for (int i = 0; i < v.witness->size(); ++i) w.push_back((*v.witness)[i]);
            rep["witness"] = w;
        }
    }
    emit(rs.json_path.empty() ? rs.out_path : rs.json_path, rep.dump(2) + "\n");
    return 0;
}

int run_verify(const char* argv0) {
    namespace fs = std::filesystem;
    std::string self = argv0;
    if (self.find('/') != std::string::npos) self = fs::absolute(self).string();
    auto results = rf::run_acceptance(self, std::cout);
    if (rf::all_passed(results)) return 0;
    std::cout << "failed:";
    for (const auto& r : results)
        if (!r.pass) std::cout << " " << r.id;
    std::cout << "\n";
    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homogeneous Ricci flow on two- and three-summand flag spaces"};
    app.require_subcommand(1);

    FlagSet flow_flags, portrait_flags, classify_flags, trace_flags;
    CLI::App* flow = app.add_subcommand("flow", "integrate the flow from an initial metric");
    CLI::App* portrait =
        app.add_subcommand("portrait", "render invariant rays and trajectories as SVG");
    CLI::App* classify =
        app.add_subcommand("classify", "region and stability verdict for one metric");
    CLI::App* trace =
        app.add_subcommand("trace", "integrate and classify stability along the way");
    CLI::App* verify =
        app.add_subcommand("verify", "run the acceptance checks against this binary");
    add_flags(flow, flow_flags);
    add_flags(portrait, portrait_flags);
    add_flags(classify, classify_flags);
    add_flags(trace, trace_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (flow->parsed()) return run_flow(resolve("flow", flow_flags), false);
        if (portrait->parsed()) return run_portrait(resolve("portrait", portrait_flags));
        if (classify->parsed()) return run_classify(resolve("classify", classify_flags));
        if (trace->parsed()) return run_flow(resolve("trace", trace_flags), true);
        if (verify->parsed()) return run_verify(argv[0]);
    } catch (const rf::StepSizeUnderflow& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const rf::StepUnderflow& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const rf::TooFewSamples& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const rf::MissingField& e) {
        std::cerr << "error: missing required field '" << e.what() << "'\n";
        return 1;
    } catch (const rf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
