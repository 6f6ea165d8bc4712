#include "occorbit/scenario.hpp"

#include <algorithm>
#include <sstream>

#include "occorbit/io.hpp"

namespace occorbit {

namespace {

using nlohmann::json;

const std::vector<std::string> kRequired = {
    "environment", "road_graph", "node_sequence", "v_g", "h_uav", "d_max", "v",
    "r_min",       "d_cutoff",   "beta",          "k_psi", "q0"};

json parse_override_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;  // bare strings such as paths or CCW
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

template <typename T>
void read_optional(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

const std::vector<std::string>& scenario_keys() {
    static const std::vector<std::string> keys = {
        "environment", "road_graph",  "node_sequence", "v_g",      "t0",
        "t_final",     "h_uav",       "d_max",         "v",        "r_min",
        "initial_spacing", "min_spacing", "d_cutoff",  "cell",     "n_rays",
        "rate_fraction", "beta",      "k_psi",         "tau_inner", "dt",
        "q0",          "direction",   "output_dir"};
    return keys;
}

Scenario scenario_from_json(json j, const std::filesystem::path& base_dir,
                            const Overrides& overrides) {
    if (!j.is_object()) throw InputError("scenario must be a JSON object");
    const auto& keys = scenario_keys();
    for (const auto& [k, v] : overrides) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            throw InputError("unknown scenario key '--" + k + "'");
        }
        j[k] = parse_override_value(v);
    }
    for (const auto& item : j.items()) {
        if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
            throw InputError("unknown scenario key '" + item.key() + "'");
        }
    }
    for (const auto& k : kRequired) {
        if (!j.contains(k)) throw InputError("scenario is missing required key '" + k + "'");
    }

    Scenario s;
    s.base_dir = base_dir;
    try {
        s.environment_path = resolve(base_dir, j.at("environment").get<std::string>());
        s.road_graph_path = resolve(base_dir, j.at("road_graph").get<std::string>());
        s.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
        s.node_sequence = j.at("node_sequence").get<std::vector<std::size_t>>();
        s.v_g = j.at("v_g").get<double>();
        read_optional(j, "t0", s.t0);
        if (j.contains("t_final")) s.t_final = j.at("t_final").get<double>();
        s.h_uav = j.at("h_uav").get<double>();
        s.d_max = j.at("d_max").get<double>();
        s.v = j.at("v").get<double>();
        s.r_min = j.at("r_min").get<double>();
        read_optional(j, "initial_spacing", s.initial_spacing);
        read_optional(j, "min_spacing", s.min_spacing);
        s.d_cutoff = j.at("d_cutoff").get<double>();
        read_optional(j, "cell", s.cell);
        read_optional(j, "n_rays", s.n_rays);
        read_optional(j, "rate_fraction", s.rate_fraction);
        s.beta = j.at("beta").get<double>();
        s.k_psi = j.at("k_psi").get<double>();
        read_optional(j, "tau_inner", s.tau_inner);
        read_optional(j, "dt", s.dt);
        const auto q0 = j.at("q0").get<std::vector<double>>();
        if (q0.size() != 3) throw InputError("q0 must be [x, y, psi]");
        s.q0 = {q0[0], q0[1], q0[2]};
        if (j.contains("direction")) {
            s.direction = direction_from_string(j.at("direction").get<std::string>());
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("scenario: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("scenario: ") + e.what());
    }

    s.env = environment_from_json(read_json_file(s.environment_path));
    s.graph = road_graph_from_json(read_json_file(s.road_graph_path));
    s.merged = j;

    // The hash covers the scenario keys and the referenced file contents.
    const json canonical = {{"scenario", j},
                            {"environment", environment_to_json(s.env)},
                            {"road_graph", road_graph_to_json(s.graph)}};
    s.hash = hash_hex(fnv1a64(canonical.dump()));
    return s;
}

Scenario load_scenario(const std::filesystem::path& path, const Overrides& overrides) {
    const json j = read_json_file(path);
    return scenario_from_json(j, path.parent_path().empty() ? "." : path.parent_path(),
                              overrides);
}

std::vector<std::string> check_scenario(const Scenario& s) {
    std::vector<std::string> problems;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) problems.push_back(msg);
    };
    need(s.v_g > 0.0, "v_g must be > 0");
    need(s.v > s.v_g, "v must exceed v_g (vehicle slower than the POI)");
    need(s.r_min > 0.0, "r_min must be > 0");
    need(s.h_uav > s.env.h_building() && s.h_uav < s.env.h_feasible,
         "h_uav must lie strictly between the tallest obstacle and h_feasible");
    need(s.d_max > s.h_uav, "d_max must exceed h_uav");
    need(s.min_spacing > 0.0 && s.min_spacing < s.initial_spacing,
         "require 0 < min_spacing < initial_spacing");
    need(s.d_cutoff > 0.0, "d_cutoff must be > 0");
    need(s.cell > 0.0 && s.cell <= s.d_max, "cell must be in (0, d_max]");
    need(s.n_rays >= 8, "n_rays must be >= 8");
    need(s.rate_fraction > 0.0 && s.rate_fraction <= 1.0, "rate_fraction must be in (0, 1]");
    need(s.beta > 0.0, "beta must be > 0");
    need(s.tau_inner > 0.0 && s.tau_inner <= 1.0, "tau_inner must be in (0, 1]");
    need(s.dt > 0.0, "dt must be > 0");
    if (s.v > 0.0 && s.beta > 0.0) {
        std::ostringstream os;
        os << "k_psi must exceed the stability bound " << min_gain(s.v, s.beta);
        need(s.k_psi > min_gain(s.v, s.beta), os.str());
    }
    try {
        const PoiTrajectory traj = s.trajectory();
        if (s.t_final) {
            need(*s.t_final > traj.t0() && *s.t_final <= traj.t_final(),
                 "t_final must lie in (t0, end of POI path]");
        }
    } catch (const std::exception& e) {
        problems.push_back(std::string("POI trajectory: ") + e.what());
    }
    return problems;
}

}  // namespace occorbit
