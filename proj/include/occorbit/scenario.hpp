#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "occorbit/control.hpp"
#include "occorbit/env.hpp"
#include "occorbit/orbit.hpp"
#include "occorbit/sim.hpp"
#include "occorbit/visibility.hpp"

namespace occorbit {

struct Scenario {
    std::filesystem::path base_dir;
    std::filesystem::path environment_path;
    std::filesystem::path road_graph_path;
    std::filesystem::path output_dir;
    Environment env;
    RoadGraph graph;

    std::vector<std::size_t> node_sequence;
    double v_g = 0.0;
    double t0 = 0.0;
    std::optional<double> t_final;  // defaults to the end of the POI path

    double h_uav = 0.0;
    double d_max = 0.0;
    double v = 0.0;
    double r_min = 0.0;

    double initial_spacing = 20.0;
    double min_spacing = 1.0;
    double d_cutoff = 0.0;
    double cell = kDefaultCell;
    int n_rays = kDefaultRays;
    double rate_fraction = 0.5;

    double beta = 0.0;
    double k_psi = 0.0;
    double tau_inner = 1.0;

    double dt = 1e-3;
    Configuration q0;
    Direction direction = Direction::CCW;

    nlohmann::json merged;  // scenario keys after overrides
    std::string hash;

    double u_psi_max() const { return v / r_min; }
    ControllerConfig controller() const { return {beta, k_psi, u_psi_max(), tau_inner}; }
    DiscretizationParams discretization() const {
        return {d_cutoff, initial_spacing, min_spacing, cell, d_max};
    }
    PlanParams plan_params() const {
        return {1.0 / r_min, v, h_uav, d_max, n_rays, direction, rate_fraction};
    }
    PoiTrajectory trajectory() const { return trajectory_from_graph(graph, node_sequence, v_g, t0); }
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Keys accepted in a scenario file and as --key overrides.
const std::vector<std::string>& scenario_keys();

// Applies overrides (flag beats file), resolves paths against the scenario
// file's directory and loads the referenced environment and road graph.
// Throws InputError on parse, type or unknown-key errors.
Scenario load_scenario(const std::filesystem::path& path, const Overrides& overrides = {});
Scenario scenario_from_json(nlohmann::json j, const std::filesystem::path& base_dir,
                            const Overrides& overrides = {});

// Parameter sanity problems (empty when the scenario is usable).
std::vector<std::string> check_scenario(const Scenario& s);

}  // namespace occorbit
