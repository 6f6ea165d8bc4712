#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "occorbit/cli.hpp"
#include "occorbit/guidance.hpp"
#include "occorbit/io.hpp"
#include "occorbit/scenario.hpp"
#include "support.hpp"

using namespace occorbit;
using nlohmann::json;
using testsupport::env_of;
using testsupport::rect;
using testsupport::straight_schedule;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// Scratch directory with a straight-road scenario beside one low building.
struct Workspace {
    fs::path dir;

    explicit Workspace(const std::string& name) {
        dir = fs::temp_directory_path() / ("occorbit_test_" + name);
        fs::remove_all(dir);
        fs::create_directories(dir);
        write("env.json", json{{"h_feasible", 500},
                               {"obstacles", json::array({{{"base", {{300, 150}, {360, 150}, {360, 220}, {300, 220}}},
                                                           {"height", 80}}})}});
        write("road.json", json{{"nodes", {{0, 0}, {200, 0}}}, {"edges", {{0, 1}}}});
        write("scenario.json", scenario());
    }
    ~Workspace() { fs::remove_all(dir); }

    static json scenario() {
        return {{"environment", "env.json"}, {"road_graph", "road.json"}, {"node_sequence", {0, 1}},
                {"v_g", 5},   {"h_uav", 300},  {"d_max", 400},   {"v", 20},      {"r_min", 50},
                {"d_cutoff", 1e12}, {"initial_spacing", 100}, {"cell", 10}, {"beta", 0.025},
                {"k_psi", 20}, {"q0", {-100, -200, 0}}, {"dt", 0.01}};
    }

    void write(const std::string& name, const json& j) const {
        write_text_file(dir / name, j.dump(2));
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("round trips") {
    SUBCASE("schedule") {
        const OrbitSchedule o = straight_schedule(20, 5, 0.3, 99.5, 1.0 / 3, 10, Direction::CW);
        const json j = json::parse(schedule_to_json(o, "abc").dump());
        CHECK(j["header"]["format"] == "occorbit-schedule");
        CHECK(j["header"]["scenario_hash"] == "abc");
        const OrbitSchedule r = schedule_from_json(j);
        CHECK(r.direction == Direction::CW);
        CHECK(r.v == o.v);
        CHECK(r.v_g == o.v_g);
        CHECK(r.h_uav == o.h_uav);
        REQUIRE(r.knots.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(r.knots[i].t == o.knots[i].t);
            CHECK(r.knots[i].g.x == o.knots[i].g.x);
            CHECK(r.knots[i].g.y == o.knots[i].g.y);
            CHECK(r.knots[i].R == o.knots[i].R);
        }
    }

    SUBCASE("schedule with an inconsistent center speed is rejected") {
        json j = json::parse(schedule_to_json(straight_schedule(20, 5, 0, 99.5, 0, 10, Direction::CCW), "x").dump());
        j["v_g"] = 6;
        CHECK_THROWS_AS(schedule_from_json(j), InputError);
    }

    SUBCASE("trace") {
        SimTrace t;
        t.dt = 0.1;
        for (int k = 0; k < 5; ++k) {
            SimRow r{0.1 * k, {std::sqrt(2.0) * k, -1.0 / 3, 0.3 * k - 0.5}, 0.7, 0.4, 1e-17 * k, -0.2, std::nullopt};
            if (k % 2) r.visible = k == 1;
            t.rows.push_back(r);
        }
        std::stringstream ss;
        write_trace_csv(ss, t, "feed");
        CHECK(ss.str().rfind("# occorbit-trace v1 scenario=feed\nt,x,y,psi,u_psi_raw,u_psi,r_err,psi_err,visible\n", 0) == 0);
        const SimTrace r = read_trace_csv(ss);
        REQUIRE(r.rows.size() == t.rows.size());
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            CHECK(r.rows[i].t == t.rows[i].t);
            CHECK(r.rows[i].q.x == t.rows[i].q.x);
            CHECK(r.rows[i].q.y == t.rows[i].q.y);
            CHECK(r.rows[i].q.psi == t.rows[i].q.psi);
            CHECK(r.rows[i].r_err == t.rows[i].r_err);
            CHECK(r.rows[i].visible == t.rows[i].visible);
        }
    }

    SUBCASE("visibility volume grid") {
        const Environment env = env_of({{rect(10, -5, 14, 5), 30.0}}, 120);
        const VisibilityVolumeGrid g = build_vv_grid(env, {0, 0}, 60, 4);
        std::stringstream ss;
        write_vv_grid(ss, g);
        const VisibilityVolumeGrid r = read_vv_grid(ss);
        CHECK(r.cell == g.cell);
        CHECK(r.lattice_x == g.lattice_x);
        CHECK(r.lattice_z == g.lattice_z);
        CHECK(r.nx == g.nx);
        CHECK(r.nz == g.nz);
        CHECK(r.occupancy == g.occupancy);
        CHECK(vv_xor_volume(r, g) == 0.0);
    }

    SUBCASE("format_double is shortest round trip") {
        CHECK(format_double(0.1) == "0.1");
        CHECK(format_double(1e300) == "1e+300");
        for (double x : {1.0 / 3, -2.5e-17, 123456.789}) CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("cli validate") {
    Workspace ws("validate");
    CHECK(run({"validate", ws.path("scenario.json")}).code == kExitOk);

    SUBCASE("vehicle slower than the POI") {
        const Run r = run({"validate", ws.path("scenario.json"), "--v_g", "30"});
        CHECK(r.code == kExitValidation);
        CHECK(r.err.find("v must exceed v_g") != std::string::npos);
    }

    SUBCASE("override with equals sign and flag precedence") {
        CHECK(run({"validate", ws.path("scenario.json"), "--v=3"}).code == kExitValidation);
        CHECK(run({"validate", ws.path("scenario.json"), "--v=3", "--v", "20"}).code == kExitOk);
    }

    SUBCASE("malformed JSON reports the location") {
        write_text_file(ws.dir / "bad.json", "{\n  \"v\": 20,\n  \"v_g\": ,\n}\n");
        const Run r = run({"validate", ws.path("bad.json")});
        CHECK(r.code == kExitValidation);
        CHECK(r.err.find("bad.json:3:") != std::string::npos);
    }

    SUBCASE("rate fraction outside (0, 1]") {
        const Run r = run({"validate", ws.path("scenario.json"), "--rate_fraction", "1.2"});
        CHECK(r.code == kExitValidation);
        CHECK(r.err.find("rate_fraction") != std::string::npos);
    }

    SUBCASE("unknown key and missing file") {
        CHECK(run({"validate", ws.path("scenario.json"), "--speed", "3"}).code == kExitValidation);
        json j = Workspace::scenario();
        j["environment"] = "missing.json";
        ws.write("s2.json", j);
        CHECK(run({"validate", ws.path("s2.json")}).code == kExitValidation);
    }

    SUBCASE("environment violations") {
        ws.write("env.json", json{{"h_feasible", 500},
                                  {"obstacles", json::array({{{"base", {{-10, -10}, {-10, 10}, {10, 10}, {10, -10}}},
                                                              {"height", 80}}})}});
        const Run r = run({"validate", ws.path("scenario.json")});
        CHECK(r.code == kExitValidation);
        CHECK(r.err.find("violation") != std::string::npos);
    }

    SUBCASE("help") { CHECK(run({"--help"}).code == kExitOk); }
}

TEST_CASE("cli plan, simulate, field and tune-beta") {
    Workspace ws("pipeline");
    const Run plan = run({"plan", ws.path("scenario.json")});
    REQUIRE_MESSAGE(plan.code == kExitOk, plan.err);
    const fs::path out = ws.dir / "out";
    REQUIRE(fs::exists(out / "discretization.csv"));
    const std::string sched_text = slurp(out / "schedule.json");
    const OrbitSchedule sched = schedule_from_json(json::parse(sched_text));
    const Scenario scen = load_scenario(ws.dir / "scenario.json");
    CHECK(json::parse(sched_text)["header"]["scenario_hash"] == scen.hash);
    CHECK(slurp(out / "discretization.csv").rfind("# occorbit-discretization v1 scenario=" + scen.hash, 0) == 0);

    SUBCASE("open field radii sit at the range limit") {
        const double limit = std::sqrt(400.0 * 400 - 300.0 * 300);
        for (const auto& k : sched.knots) CHECK(std::abs(k.R - limit) < 1e-6 * limit);
        CHECK(sched.knots.front().t == 0.0);
        CHECK(sched.knots.back().t == doctest::Approx(40.0));
    }

    SUBCASE("simulate is deterministic and self-consistent") {
        REQUIRE(run({"simulate", ws.path("scenario.json")}).code == kExitOk);
        const std::string trace1 = slurp(out / "trace.csv");
        const std::string metrics1 = slurp(out / "metrics.json");
        REQUIRE(run({"simulate", ws.path("scenario.json"), "--schedule", (out / "schedule.json").string()}).code ==
                kExitOk);
        CHECK(slurp(out / "trace.csv") == trace1);
        CHECK(slurp(out / "metrics.json") == metrics1);

        std::istringstream is(trace1);
        const SimTrace tr = read_trace_csv(is);
        CHECK(tr.rows.size() == 4001);
        const VisibilityReport rep = verify_visibility(scen.env, tr, scen.trajectory(), scen.d_max, scen.h_uav);
        const json m = json::parse(metrics1);
        CHECK(m["header"]["format"] == "occorbit-metrics");
        CHECK(std::abs(m["visibility_fraction"].get<double>() - rep.fraction) <= 1.0 / tr.rows.size());
    }

    SUBCASE("on-orbit start converges at t0") {
        const OrbitSample o = orbit_sample(sched, 0);
        const Vec2 xi = o.g + radial_unit(2.0) * o.R;
        const FieldSample f = vector_field(xi, o, sched.v, sched.v_g, 0.025, sched.direction);
        const std::string q0 = "[" + format_double(xi.x) + "," + format_double(xi.y) + "," + format_double(f.psi_d) + "]";
        REQUIRE(run({"simulate", ws.path("scenario.json"), "--q0", q0}).code == kExitOk);
        const json m = json::parse(slurp(out / "metrics.json"));
        CHECK(m["converged"] == true);
        CHECK(m["convergence_time"] == 0.0);
    }

    SUBCASE("field rows have speed v") {
        const Run r = run({"field", ws.path("scenario.json"), "--n", "21", "--t", "10"});
        REQUIRE(r.code == kExitOk);
        std::ifstream f(out / "field.csv");
        std::string line;
        std::getline(f, line);
        CHECK(line == "# occorbit-field v1 scenario=" + scen.hash);
        std::getline(f, line);
        CHECK(line == "x,y,u_x,u_y,psi_d,psi_d_dot");
        int rows = 0;
        while (std::getline(f, line)) {
            double x, y, ux, uy;
            char c;
            std::istringstream ls(line);
            ls >> x >> c >> y >> c >> ux >> c >> uy;
            CHECK(std::abs(std::hypot(ux, uy) - 20) < 1e-9);
            ++rows;
        }
        // The grid is centred on the POI, which is excluded.
        CHECK(rows == 21 * 21 - 1);
    }

    SUBCASE("tune-beta report") {
        const Run r = run({"tune-beta", ws.path("scenario.json"), "--r-steps", "40", "--theta-steps", "36",
                           "--psi-steps", "36"});
        REQUIRE(r.code == kExitOk);
        const json j = json::parse(slurp(out / "tune_beta.json"));
        for (const char* key : {"header", "inputs", "grid", "cases", "max", "result"}) CHECK(j.contains(key));
        CHECK(j["result"] == "PASS");

        const Run big = run({"tune-beta", ws.path("scenario.json"), "--R", "85.9", "--R_dot", "1.3", "--r-steps",
                             "40", "--theta-steps", "36", "--psi-steps", "36", "--beta", "0.3"});
        CHECK(big.code == kExitOk);
        const json jb = json::parse(slurp(out / "tune_beta.json"));
        CHECK(jb["result"] == "FAIL");
        CHECK(jb["cases"][0]["argmax"].contains("r"));
    }
}

TEST_CASE("cli infeasible canyon") {
    Workspace ws("canyon");
    // Tall walls 10 m either side of the road leave a visible disc far below
    // the minimum feasible radius.
    ws.write("env.json", json{{"h_feasible", 500},
                              {"obstacles", json::array({{{"base", {{-500, 10}, {700, 10}, {700, 60}, {-500, 60}}}, {"height", 290}},
                                                         {{"base", {{-500, -60}, {700, -60}, {700, -10}, {-500, -10}}}, {"height", 290}}})}});
    const Run r = run({"plan", ws.path("scenario.json")});
    CHECK(r.code == kExitInfeasible);
    CHECK(r.err.find("Infeasible") != std::string::npos);
    CHECK(r.err.find("at point 0 ") != std::string::npos);
    CHECK(r.err.find("threshold 78.125") != std::string::npos);
}

TEST_CASE("cli vv build and metric") {
    Workspace ws("vv");
    const std::string a = ws.path("a.txt");
    const std::string b = ws.path("b.txt");
    REQUIRE(run({"vv", "build", ws.path("scenario.json"), "--x", "250", "--y", "100", "--out", a}).code == kExitOk);
    REQUIRE(run({"vv", "build", ws.path("scenario.json"), "--x", "270", "--y", "100", "--out", b}).code == kExitOk);
    const Run m = run({"vv", "metric", a, b});
    REQUIRE(m.code == kExitOk);
    const Scenario s = load_scenario(ws.dir / "scenario.json");
    const double direct = vv_xor_volume(build_vv_grid(s.env, {250, 100}, s.d_max, s.cell),
                                        build_vv_grid(s.env, {270, 100}, s.d_max, s.cell));
    CHECK(m.out == "xor_volume " + format_double(direct) + "\n");
    CHECK(direct > 0);
    CHECK(run({"vv", "metric", a, ws.path("nope.txt")}).code == kExitValidation);
}
