#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <random>
#include <sstream>

#include "ricciflow/io.hpp"

using namespace ricciflow;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}

const FlagSpace kSo22 = make_space(Family::So, 2, 2);
const FlagSpace kSu3 = make_space(Family::Su3);

}  // namespace

TEST_CASE("shortest round-trip float formatting") {
    CHECK(fmt_double(1.0) == "1");
    CHECK(fmt_double(0.0) == "0");
    CHECK(fmt_double(0.6) == "0.6");
    CHECK(fmt_double(std::sqrt(3.0)) == "1.7320508075688772");
    CHECK(fmt_double(1.0 / std::sqrt(3.0)) == "0.5773502691896258");

    std::mt19937_64 rng(701u);
    std::uniform_real_distribution<double> unif(-30.0, 30.0);
    for (int t = 0; t < 1000; ++t) {
        double x = std::exp(unif(rng)) * (t % 2 == 0 ? 1.0 : -1.0);
        double back = std::strtod(fmt_double(x).c_str(), nullptr);
        CHECK(back == x);
    }
}

TEST_CASE("CSV trajectory dumps") {
    SECTION("three-summand ray run pins the header and first row") {
        IntegratorConfig cfg;
        cfg.t_end = 0.3;
        Trajectory traj = integrate(kSu3, Vec(1.0, 1.0, 1.0), cfg);
        auto lines = split_lines(write_trajectory_csv(traj));
        REQUIRE(lines.size() >= 2);
        CHECK(lines[0] == "t,lambda_1,lambda_2,lambda_3,norm,dir_1,dir_2,dir_3,region,verdict");
        CHECK(lines[1] ==
              "0,1,1,1,1.7320508075688772,"
              "0.5773502691896258,0.5773502691896258,0.5773502691896258,,");
    }

    SECTION("two-summand runs carry region labels") {
        IntegratorConfig cfg;
        cfg.t_end = 2.0;
        Trajectory traj = integrate(kSo22, Vec(1.0, 2.0), cfg);
        auto lines = split_lines(write_trajectory_csv(traj));
        CHECK(lines[0] == "t,lambda_1,lambda_2,norm,dir_1,dir_2,region,verdict");
        for (std::size_t i = 1; i < lines.size(); ++i) {
            auto fields = split_csv(lines[i]);
            REQUIRE(fields.size() == 8);
            CHECK(fields[6] == "OnGamma2");  // the run never leaves the Kaehler ray
            CHECK(fields[7].empty());
        }
    }

    SECTION("verdict column follows an attached timeline") {
        IntegratorConfig cfg;
        cfg.t_end = 1.0;
        Trajectory traj = integrate(kSo22, Vec(1.0, 1.5), cfg);
        StabilityTimeline tl = trace_stability(kSo22, canonical_ghh_map(kSo22), traj);
        auto lines = split_lines(write_trajectory_csv(traj, &tl));
        for (std::size_t i = 1; i < lines.size(); ++i) {
            auto fields = split_csv(lines[i]);
            CHECK(fields[6] == "R2");
            CHECK(fields[7] == "Unstable(U)");
        }
    }

    SECTION("float fields parse back bitwise") {
        IntegratorConfig cfg;
        cfg.t_end = 2.0;
        Trajectory traj = integrate(kSo22, Vec(1.0, 1.0), cfg);
        auto lines = split_lines(write_trajectory_csv(traj));
        for (std::size_t i = 1; i < lines.size(); ++i) {
            auto fields = split_csv(lines[i]);
            const Sample& s = traj.samples[i - 1];
            CHECK(std::strtod(fields[0].c_str(), nullptr) == s.t);
            CHECK(std::strtod(fields[1].c_str(), nullptr) == s.g[0]);
            CHECK(std::strtod(fields[2].c_str(), nullptr) == s.g[1]);
            CHECK(std::strtod(fields[3].c_str(), nullptr) == s.g.norm());
        }
    }

    SECTION("fields containing commas are quoted") {
        CHECK(detail::csv_quote("Unstable(N)") == "Unstable(N)");
        CHECK(detail::csv_quote("Conflict(S,U)") == "\"Conflict(S,U)\"");
        CHECK(detail::csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
    }
}

TEST_CASE("JSON trajectory round trip is exact") {
    IntegratorConfig cfg;
    cfg.t_end = 2.0;
    cfg.rtol = 1e-8;
    Trajectory traj = integrate(kSo22, Vec(1.0, 1.0), cfg);

    std::string text = write_trajectory_json(traj);
    Trajectory back = read_trajectory_json(text);

    REQUIRE(back.samples.size() == traj.samples.size());
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        CHECK(back.samples[i].t == traj.samples[i].t);
        CHECK(back.samples[i].g == traj.samples[i].g);
        CHECK(back.derivs[i] == traj.derivs[i]);  // recomputed, bitwise identical
    }
    REQUIRE(back.events.size() == traj.events.size());
    for (std::size_t i = 0; i < traj.events.size(); ++i) {
        CHECK(back.events[i].kind == traj.events[i].kind);
        CHECK(back.events[i].t == traj.events[i].t);
        CHECK(back.events[i].terminal == traj.events[i].terminal);
    }
    CHECK(back.config.rtol == traj.config.rtol);
    CHECK(back.config.orientation == traj.config.orientation);
    CHECK(back.space.family == traj.space.family);
    CHECK(back.space.m == traj.space.m);

    SECTION("dense output survives the round trip") {
        double mid = traj.samples.back().t / 2.0;
        CHECK(back.at(mid) == traj.at(mid));
    }

    SECTION("run echo rides along") {
        RunSpec rs;
        rs.command = "flow";
        rs.family = Family::So;
        rs.m = 2;
        rs.k = 2;
        rs.metric = Vec(1.0, 1.0);
        nlohmann::json echo = run_spec_json(rs);
        std::string with_echo = write_trajectory_json(traj, &echo);
        nlohmann::json doc = nlohmann::json::parse(with_echo);
        REQUIRE(doc.contains("run"));
        CHECK(doc["run"]["family"] == "so");
        CHECK(doc["run"]["command"] == "flow");
        CHECK(doc["run"]["rtol"].get<double>() == 1e-10);
    }

    SECTION("malformed documents are rejected") {
        CHECK_THROWS_AS(read_trajectory_json("{"), ParseError);
        CHECK_THROWS_AS(read_trajectory_json("{\"space\":{\"family\":\"so\",\"m\":2,\"k\":2}}"),
                        MissingField);
    }
}

TEST_CASE("config parsing") {
    SECTION("minimal flow config fills integrator defaults") {
        RunSpec rs = parse_config(R"({"command":"flow","family":"su3","metric":[1,1,1]})");
        CHECK(rs.command == "flow");
        REQUIRE(rs.family.has_value());
        CHECK(*rs.family == Family::Su3);
        REQUIRE(rs.metric.has_value());
        CHECK((*rs.metric)[2] == 1.0);
        CHECK(rs.config.rtol == 1e-10);
        CHECK(rs.config.atol == 1e-12);
        CHECK(rs.config.orientation == Orientation::AsWritten);
        CHECK_FALSE(rs.deterministic);
    }

    SECTION("full two-summand config") {
        RunSpec rs = parse_config(R"({
            "command": "trace", "family": "so", "m": 2, "k": 2,
            "metric": [1.0, 1.5], "map_p": ["sigma1"], "top": "sigma2", "ghh": true,
            "orientation": "reversed", "t_end": 4.5, "rtol": 1e-9, "atol": 1e-11,
            "grid": 16, "out": "traj.csv", "deterministic": true})");
        FlagSpace sp = space_from(rs);
        CHECK(sp.name() == "so(m=2,k=2)");
        auto map = map_from(rs, sp);
        REQUIRE(map.has_value());
        CHECK(map->ghh);
        CHECK(map->J.top == Summand::Sigma2);
        CHECK(rs.config.orientation == Orientation::Reversed);
        CHECK(rs.config.t_end == 4.5);
        REQUIRE(rs.grid.has_value());
        CHECK(*rs.grid == 16);
        CHECK(rs.out_path == "traj.csv");
        CHECK(rs.deterministic);
    }

    SECTION("missing or malformed pieces are named") {
        CHECK_THROWS_AS(parse_config("{"), ParseError);
        CHECK_THROWS_AS(parse_config(R"({"family":"so"})"), MissingField);
        CHECK_THROWS_AS(parse_config(R"({"command":"flow","famly":"so"})"), ParseError);
        CHECK_THROWS_AS(parse_config(R"({"command":"flow","m":"two"})"), ParseError);
        CHECK_THROWS_AS(parse_config(R"({"command":"flow","metric":[1]})"), ParseError);
        CHECK_THROWS_AS(parse_config(R"({"command":"flow","metric":[1,2,3,4]})"), ParseError);
        CHECK_THROWS_AS(parse_config(R"({"command":"flow","orientation":"backwards"})"),
                        ParseError);
        CHECK_THROWS_AS(parse_config(R"({"command":"flow","family":"su4"})"), UnknownFamily);

        RunSpec rs = parse_config(R"({"command":"flow","metric":[1,2]})");
        CHECK_THROWS_AS(space_from(rs), MissingField);
        rs = parse_config(R"({"command":"flow","family":"so","m":2})");
        CHECK_THROWS_AS(space_from(rs), MissingField);
        rs = parse_config(R"({"command":"flow","family":"su3","m":2,"k":2})");
        CHECK_THROWS_AS(space_from(rs), ConflictingOptions);
    }

    SECTION("map assembly and its contradictions") {
        RunSpec rs = parse_config(
            R"({"command":"classify","family":"su3","metric":[2,1.95,1.95],
                "map_p":["sigma12"],"top":"sigma12"})");
        FlagSpace sp = space_from(rs);
        auto map = map_from(rs, sp);
        REQUIRE(map.has_value());
        CHECK_FALSE(map->ghh);

        rs = parse_config(R"({"command":"classify","family":"su3","map_p":["sigma12"]})");
        CHECK_THROWS_AS(map_from(rs, kSu3), MissingField);  // no top

        rs = parse_config(R"({"command":"classify","family":"su3","top":"sigma12"})");
        CHECK_THROWS_AS(map_from(rs, kSu3), ConflictingOptions);

        rs = parse_config(R"({"command":"classify","family":"su3","ghh":true})");
        CHECK_THROWS_AS(map_from(rs, kSu3), ConflictingOptions);

        rs = parse_config(
            R"({"command":"classify","family":"su3","map_p":["sigma12"],"top":"sigma12","ghh":true})");
        CHECK_THROWS_AS(map_from(rs, kSu3), InvalidMapForSpace);  // height-2 subordination
    }

    SECTION("the emitted echo re-parses to the same resolved run") {
        RunSpec rs = parse_config(
            R"({"command":"flow","family":"sp","m":1,"k":1,"metric":[1,2],"t_end":3.5,
                "deterministic":true})");
        std::string echo = run_spec_json(rs).dump();
        RunSpec back = parse_config(echo);
        CHECK(back.command == rs.command);
        CHECK(*back.family == *rs.family);
        CHECK(*back.m == *rs.m);
        CHECK(*back.metric == *rs.metric);
        CHECK(back.config.t_end == rs.config.t_end);
        CHECK(back.config.rtol == rs.config.rtol);
        CHECK(back.deterministic == rs.deterministic);
    }
}

TEST_CASE("SVG portraits") {
    SECTION("two-summand rays only") {
        std::string svg = render_portrait_svg(kSo22, invariant_rays(kSo22), {});
        CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") == 0);
        CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
        CHECK(count_occurrences(svg, "stroke-dasharray") == 2);  // exactly the two rays
        CHECK(svg.find(">gamma1<") != std::string::npos);
        CHECK(svg.find(">gamma2<") != std::string::npos);
        CHECK(svg.find("width=\"800\" height=\"800\"") != std::string::npos);
    }

    SECTION("three-summand simplex carries four labeled ray points") {
        std::string svg = render_portrait_svg(kSu3, invariant_rays(kSu3), {});
        CHECK(count_occurrences(svg, "<circle") == 4);
        for (const char* label : {">gamma1<", ">gamma2<", ">gamma3<", ">gamma4<"})
            CHECK(svg.find(label) != std::string::npos);
        CHECK(svg.find("<polygon") != std::string::npos);
    }

    SECTION("trajectories appear as polylines in input order") {
        IntegratorConfig cfg;
        cfg.t_end = 2.0;
        std::vector<Trajectory> trajs = {integrate(kSo22, Vec(1.0, 1.0), cfg),
                                         integrate(kSo22, Vec(2.0, 1.0), cfg)};
        std::string svg = render_portrait_svg(kSo22, invariant_rays(kSo22), trajs);
        CHECK(count_occurrences(svg, "<polyline") == 2);
        CHECK(svg.find("#1f77b4") < svg.find("#d62728"));
    }

    SECTION("repeat renders are byte-identical") {
        IntegratorConfig cfg;
        cfg.t_end = 1.0;
        std::vector<Trajectory> trajs = {integrate(kSu3, Vec(2.0, 1.0, 1.5), cfg)};
        PortraitStyle style;
        style.deterministic = true;
        style.echo = R"({"command":"portrait","family":"su3"})";
        std::string a = render_portrait_svg(kSu3, invariant_rays(kSu3), trajs, style);
        std::string b = render_portrait_svg(kSu3, invariant_rays(kSu3), trajs, style);
        CHECK(a == b);
        CHECK(a.find("<desc>") != std::string::npos);
    }

    SECTION("nothing to draw is an error") {
        CHECK_THROWS_AS(render_portrait_svg(kSo22, {}, {}), EmptyPlot);
        Trajectory empty{kSo22, IntegratorConfig{}, {}, {}, {}};
        CHECK_THROWS_AS(render_portrait_svg(kSo22, {}, {empty}), EmptyPlot);
    }
}

TEST_CASE("file writing reports failures") {
    std::string path = "/tmp/ricciflow_io_test.csv";
    write_file(path, "a,b\n1,2\n");
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == "a,b\n1,2\n");
    std::remove(path.c_str());

    CHECK_THROWS_AS(write_file("/nonexistent-dir/x.csv", "data"), IoError);
}
