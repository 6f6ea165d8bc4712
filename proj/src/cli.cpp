#include "occorbit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "occorbit/io.hpp"
#include "occorbit/scenario.hpp"

namespace occorbit {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Turns leftover "--key value" / "--key=value" tokens into overrides.
Overrides collect_overrides(const std::vector<std::string>& extra) {
    Overrides out;
    for (std::size_t i = 0; i < extra.size(); ++i) {
        const std::string& tok = extra[i];
        if (tok.rfind("--", 0) != 0) throw InputError("unexpected argument '" + tok + "'");
        const auto eq = tok.find('=');
        if (eq != std::string::npos) {
            out.emplace_back(tok.substr(2, eq - 2), tok.substr(eq + 1));
        } else {
            if (i + 1 >= extra.size()) throw InputError("missing value for '" + tok + "'");
            out.emplace_back(tok.substr(2), extra[++i]);
        }
    }
    return out;
}

fs::path ensure_output_dir(const Scenario& s) {
    fs::create_directories(s.output_dir);
    return s.output_dir;
}

fs::path schedule_path_or_default(const Scenario& s, const std::string& given) {
    return given.empty() ? s.output_dir / "schedule.json" : fs::path(given);
}

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::string scenario_path;
    std::vector<std::string> extras;
};

Scenario load(const Context& c) {
    return load_scenario(c.scenario_path, collect_overrides(c.extras));
}

// Validation shared by every command that consumes a scenario.
bool validate_scenario(const Scenario& s, std::ostream& out, std::ostream& err) {
    const ValidationReport report = validate_environment(s.env, s.graph);
    const auto problems = check_scenario(s);
    for (const auto& v : report.violations) {
        err << "violation " << to_string(v.kind) << ": " << v.message << '\n';
    }
    for (const auto& p : problems) err << "parameter: " << p << '\n';
    const bool ok = report.ok() && problems.empty();
    out << "scenario " << s.hash << (ok ? " valid" : " invalid") << '\n';
    return ok;
}

int cmd_validate(const Context& c) {
    const Scenario s = load(c);
    return validate_scenario(s, c.out, c.err) ? kExitOk : kExitValidation;
}

int cmd_plan(const Context& c) {
    const Scenario s = load(c);
    if (!validate_scenario(s, c.out, c.err)) return kExitValidation;
    const fs::path dir = ensure_output_dir(s);
    const PoiTrajectory traj = s.trajectory();
    const DiscretizationResult d = adaptive_discretize(s.env, traj, s.discretization());
    {
        std::ofstream f(dir / "discretization.csv");
        write_discretization_csv(f, d, s.hash);
    }
    c.out << "discretized " << d.points.size() << " points"
          << (d.any_floor_hit() ? " (min_spacing floor hit)" : "") << '\n';

    const PlanResult plan = build_orbit_schedule(s.env, traj, d.points, d.times, s.plan_params());
    if (const auto* bad = std::get_if<Infeasible>(&plan)) {
        c.err << "Infeasible: " << bad->reason << " at point " << bad->index << " ("
              << format_double(d.points[bad->index].x) << ", "
              << format_double(d.points[bad->index].y) << ") radius "
              << format_double(bad->radius) << " threshold " << format_double(bad->threshold)
              << '\n';
        return kExitInfeasible;
    }
    const auto& sched = std::get<OrbitSchedule>(plan);
    write_text_file(dir / "schedule.json", schedule_to_json(sched, s.hash).dump(2) + "\n");
    double r_lo = std::numeric_limits<double>::infinity();
    double r_hi = 0.0;
    for (const auto& k : sched.knots) {
        r_lo = std::min(r_lo, k.R);
        r_hi = std::max(r_hi, k.R);
    }
    c.out << "schedule " << sched.knots.size() << " knots, R in [" << format_double(r_lo) << ", "
          << format_double(r_hi) << "] -> " << (dir / "schedule.json").string() << '\n';
    return kExitOk;
}

int cmd_simulate(const Context& c, const std::string& schedule_file) {
    const Scenario s = load(c);
    if (!validate_scenario(s, c.out, c.err)) return kExitValidation;
    const fs::path dir = ensure_output_dir(s);
    const OrbitSchedule sched = schedule_from_json(read_json_file(schedule_path_or_default(s, schedule_file)));
    const PoiTrajectory traj = s.trajectory();

    SimConfig cfg;
    cfg.dt = s.dt;
    cfg.t0 = std::max(s.t0, sched.t0());
    cfg.t_final = std::min(s.t_final.value_or(traj.t_final()), sched.t_final());
    cfg.q0 = s.q0;
    cfg.controller = s.controller();
    cfg.d_max = s.d_max;

    SimTrace trace;
    int code = kExitOk;
    try {
        trace = simulate_closed_loop(s.env, sched, cfg);
    } catch (const SimulationAbort& e) {
        c.err << "simulation aborted: " << e.what() << '\n';
        trace = e.partial();
        code = kExitRuntime;
    }
    {
        std::ofstream f(dir / "trace.csv");
        write_trace_csv(f, trace, s.hash);
    }
    if (trace.rows.empty()) return code;
    const double threshold = 0.05 * orbit_sample(sched, cfg.t0).R;
    const Metrics m = compute_metrics(trace, threshold);
    const auto metrics = metrics_to_json(m, s.hash);
    write_text_file(dir / "metrics.json", metrics.dump(2) + "\n");
    c.out << metrics.dump(2) << '\n';
    return code;
}

ordered_json tune_entry(const std::string& label, double R, double R_dot,
                        const BetaTuneResult& r) {
    ordered_json j;
    j["case"] = label;
    j["R"] = R;
    j["R_dot"] = R_dot;
    j["max"] = r.max_value;
    j["argmax"] = {{"r", r.arg_r}, {"theta", r.arg_theta}, {"q_psi", r.arg_psi}};
    j["pass"] = r.pass;
    return j;
}

struct TuneOptions {
    std::string schedule_file;
    double R = std::numeric_limits<double>::quiet_NaN();
    double R_dot = 0.0;
    BetaGrid grid;
};

int cmd_tune_beta(const Context& c, const TuneOptions& opt) {
    const Scenario s = load(c);
    if (!validate_scenario(s, c.out, c.err)) return kExitValidation;
    const double u_max = s.u_psi_max();

    ordered_json report;
    report["header"] = {{"format", "occorbit-tune-beta"},
                        {"version", kFormatVersion},
                        {"scenario_hash", s.hash}};
    report["inputs"] = {{"v", s.v},          {"v_g", s.v_g},           {"r_min", s.r_min},
                        {"beta", s.beta},    {"tau_inner", s.tau_inner}, {"u_psi_max", u_max}};
    report["grid"] = {{"r_steps", opt.grid.r_steps},
                      {"theta_steps", opt.grid.theta_steps},
                      {"psi_steps", opt.grid.psi_steps},
                      {"r_max_factor", opt.grid.r_max_factor}};

    ordered_json cases = ordered_json::array();
    auto run = [&](const std::string& label, double R, double R_dot) {
        const BetaTuneResult r =
            tune_beta_grid(s.v, s.v_g, R, R_dot, s.beta, s.tau_inner, u_max, opt.grid);
        cases.push_back(tune_entry(label, R, R_dot, r));
        return r;
    };

    if (!std::isnan(opt.R)) {
        run("direct", opt.R, opt.R_dot);
    } else {
        // Worst cases over the schedule: the tightest orbit, the fastest
        // radius change, and their envelope.
        const OrbitSchedule sched =
            schedule_from_json(read_json_file(schedule_path_or_default(s, opt.schedule_file)));
        std::size_t i_small = 0;
        std::size_t i_fast = 0;
        std::vector<double> R(sched.knots.size() - 1);
        std::vector<double> R_dot(sched.knots.size() - 1);
        for (std::size_t i = 0; i + 1 < sched.knots.size(); ++i) {
            const auto& a = sched.knots[i];
            const auto& b = sched.knots[i + 1];
            R[i] = std::min(a.R, b.R);
            R_dot[i] = (b.R - a.R) / (b.t - a.t);
            if (R[i] < R[i_small]) i_small = i;
            if (std::abs(R_dot[i]) > std::abs(R_dot[i_fast])) i_fast = i;
        }
        run("interval " + std::to_string(i_small), R[i_small], R_dot[i_small]);
        if (i_fast != i_small) run("interval " + std::to_string(i_fast), R[i_fast], R_dot[i_fast]);
        run("envelope", R[i_small], std::abs(R_dot[i_fast]));
    }

    bool pass = true;
    double worst = 0.0;
    for (const auto& cj : cases) {
        pass = pass && cj["pass"].get<bool>();
        worst = std::max(worst, cj["max"].get<double>());
    }
    report["cases"] = cases;
    report["max"] = worst;
    report["result"] = pass ? "PASS" : "FAIL";
    const fs::path dir = ensure_output_dir(s);
    write_text_file(dir / "tune_beta.json", report.dump(2) + "\n");
    c.out << report.dump(2) << '\n';
    return kExitOk;
}

struct FieldOptions {
    std::string schedule_file;
    std::string out_file;
    double t = std::numeric_limits<double>::quiet_NaN();
    double half_width = 0.0;  // 0: three orbit radii
    int n = 101;
};

int cmd_field(const Context& c, const FieldOptions& opt) {
    const Scenario s = load(c);
    if (!validate_scenario(s, c.out, c.err)) return kExitValidation;
    const OrbitSchedule sched =
        schedule_from_json(read_json_file(schedule_path_or_default(s, opt.schedule_file)));
    const double t = std::isnan(opt.t) ? sched.t0() : opt.t;
    const OrbitSample o = orbit_sample(sched, t);
    const double half = opt.half_width > 0.0 ? opt.half_width : 3.0 * o.R;
    if (opt.n < 2) throw std::invalid_argument("field grid needs at least 2 points per axis");

    const fs::path path = opt.out_file.empty() ? ensure_output_dir(s) / "field.csv" : fs::path(opt.out_file);
    std::ofstream f(path);
    if (!f) throw InputError(path.string() + ": cannot write file");
    write_field_csv_header(f, s.hash);
    std::size_t rows = 0;
    for (int j = 0; j < opt.n; ++j) {
        for (int i = 0; i < opt.n; ++i) {
            const Vec2 xi{o.g.x - half + 2.0 * half * i / (opt.n - 1),
                          o.g.y - half + 2.0 * half * j / (opt.n - 1)};
            if (distance(xi, o.g) <= kGuardRadius) continue;
            write_field_csv_row(f, xi, vector_field(xi, o, sched.v, sched.v_g, s.beta, sched.direction));
            ++rows;
        }
    }
    c.out << "wrote " << rows << " field rows at t=" << format_double(t) << " -> " << path.string()
          << '\n';
    return kExitOk;
}

struct VvBuildOptions {
    std::string out_file;
    double x = std::numeric_limits<double>::quiet_NaN();
    double y = std::numeric_limits<double>::quiet_NaN();
    double t = std::numeric_limits<double>::quiet_NaN();
};

int cmd_vv_build(const Context& c, const VvBuildOptions& opt) {
    const Scenario s = load(c);
    if (!validate_scenario(s, c.out, c.err)) return kExitValidation;
    Vec2 g;
    if (!std::isnan(opt.x) && !std::isnan(opt.y)) {
        g = {opt.x, opt.y};
    } else {
        g = poi_state(s.trajectory(), std::isnan(opt.t) ? s.t0 : opt.t).g;
    }
    const VisibilityVolumeGrid grid = build_vv_grid(s.env, g, s.d_max, s.cell);
    const fs::path path = opt.out_file.empty() ? ensure_output_dir(s) / "vv.txt" : fs::path(opt.out_file);
    std::ofstream f(path);
    if (!f) throw InputError(path.string() + ": cannot write file");
    write_vv_grid(f, grid);
    c.out << "visible cells " << grid.visible_count() << " volume "
          << format_double(static_cast<double>(grid.visible_count()) * grid.cell * grid.cell * grid.cell)
          << " -> " << path.string() << '\n';
    return kExitOk;
}

VisibilityVolumeGrid read_grid_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError(path + ": cannot open file");
    try {
        return read_vv_grid(f);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

int cmd_vv_metric(std::ostream& out, const std::string& a, const std::string& b) {
    const double vol = vv_xor_volume(read_grid_file(a), read_grid_file(b));
    out << "xor_volume " << format_double(vol) << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Occlusion-free standoff orbit planning, guidance and simulation"};
    app.require_subcommand(1);

    std::string scenario;
    auto add_scenario_cmd = [&](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("scenario", scenario, "Scenario JSON file")->required();
        sub->allow_extras();
        sub->footer("Scenario keys may be overridden with --key value (after the scenario path).");
        return sub;
    };

    CLI::App* validate = add_scenario_cmd("validate", "Check environment, road graph and parameters");
    CLI::App* plan = add_scenario_cmd("plan", "Discretize the POI path and plan the orbit schedule");

    std::string schedule_file;
    CLI::App* simulate = add_scenario_cmd("simulate", "Closed-loop simulation along a schedule");
    simulate->add_option("--schedule", schedule_file, "Schedule JSON (default: output_dir/schedule.json)");

    TuneOptions tune;
    CLI::App* tune_beta = add_scenario_cmd("tune-beta", "Grid search of the turn-rate demand");
    tune_beta->add_option("--schedule", tune.schedule_file, "Schedule JSON (default: output_dir/schedule.json)");
    tune_beta->add_option("--R", tune.R, "Evaluate one orbit radius instead of a schedule");
    tune_beta->add_option("--R_dot", tune.R_dot, "Radius rate for --R");
    tune_beta->add_option("--r-steps", tune.grid.r_steps, "Radial grid points");
    tune_beta->add_option("--theta-steps", tune.grid.theta_steps, "Polar angle grid points");
    tune_beta->add_option("--psi-steps", tune.grid.psi_steps, "Heading grid points");

    FieldOptions field;
    CLI::App* field_cmd = add_scenario_cmd("field", "Evaluate the guidance field on a grid");
    field_cmd->add_option("--schedule", field.schedule_file, "Schedule JSON (default: output_dir/schedule.json)");
    field_cmd->add_option("--t", field.t, "Evaluation time (default: schedule start)");
    field_cmd->add_option("--half-width", field.half_width, "Grid half width in meters (default: 3 R)");
    field_cmd->add_option("--n", field.n, "Grid points per axis");
    field_cmd->add_option("--out", field.out_file, "Output CSV (default: output_dir/field.csv)");

    CLI::App* vv = app.add_subcommand("vv", "Visibility volume grids");
    vv->require_subcommand(1);
    VvBuildOptions vv_build;
    CLI::App* vv_build_cmd = vv->add_subcommand("build", "Build a voxel visibility volume");
    vv_build_cmd->add_option("scenario", scenario, "Scenario JSON file")->required();
    vv_build_cmd->allow_extras();
    vv_build_cmd->add_option("--x", vv_build.x, "Target x (with --y)");
    vv_build_cmd->add_option("--y", vv_build.y, "Target y (with --x)");
    vv_build_cmd->add_option("--t", vv_build.t, "POI time used when no --x/--y is given");
    vv_build_cmd->add_option("--out", vv_build.out_file, "Output file (default: output_dir/vv.txt)");
    std::string grid_a;
    std::string grid_b;
    CLI::App* vv_metric = vv->add_subcommand("metric", "XOR volume between two grid files");
    vv_metric->add_option("a", grid_a, "First grid")->required();
    vv_metric->add_option("b", grid_b, "Second grid")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitValidation;
    }

    try {
        auto ctx = [&](CLI::App* sub) { return Context{out, err, scenario, sub->remaining()}; };
        if (*validate) return cmd_validate(ctx(validate));
        if (*plan) return cmd_plan(ctx(plan));
        if (*simulate) return cmd_simulate(ctx(simulate), schedule_file);
        if (*tune_beta) return cmd_tune_beta(ctx(tune_beta), tune);
        if (*field_cmd) return cmd_field(ctx(field_cmd), field);
        if (*vv_build_cmd) return cmd_vv_build(ctx(vv_build_cmd), vv_build);
        if (*vv_metric) return cmd_vv_metric(out, grid_a, grid_b);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace occorbit
