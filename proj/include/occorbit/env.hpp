#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "occorbit/geometry.hpp"

namespace occorbit {

// Extruded polygon resting on the ground plane.
struct Obstacle {
    Polygon base;
    double height = 0.0;
};

struct Environment {
    std::vector<Obstacle> obstacles;
    double h_feasible = 0.0;

    // Height of the tallest obstacle; 0 for an empty world.
    double h_building() const;
};

struct RoadGraph {
    std::vector<Vec2> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    bool connected(std::size_t i, std::size_t j) const;
};

enum class ViolationKind {
    TooFewVertices,
    Orientation,
    NotSimple,
    NonPositiveHeight,
    Overlap,
    FeasibleCeiling,
    DuplicateNode,
    BadEdgeIndex,
    SelfLoopEdge,
    EdgeClearance,
};

const char* to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::vector<std::size_t> indices;  // obstacle or edge indices involved
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has(ViolationKind kind) const;
};

ValidationReport validate_environment(const Environment& env, const RoadGraph& graph);

class TrajectoryError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Piecewise constant-velocity ground path; times[i] is when the POI is at
// waypoints[i].
class PoiTrajectory {
  public:
    PoiTrajectory(std::vector<Vec2> waypoints, double v_g, double t0);

    const std::vector<Vec2>& waypoints() const { return waypoints_; }
    const std::vector<double>& times() const { return times_; }
    double speed() const { return v_g_; }
    double t0() const { return times_.front(); }
    double t_final() const { return times_.back(); }
    std::size_t segment_count() const { return waypoints_.size() - 1; }

    // Cumulative arc length at each waypoint.
    const std::vector<double>& arc_lengths() const { return arc_; }
    double length() const { return arc_.back(); }

    // Position at arc length s (clamped to [0, length]).
    Vec2 position_at_arc(double s) const;

    // Segment active at time t; velocity is left-continuous at interior
    // waypoints so a waypoint time maps to its incoming segment.
    std::size_t segment_at(double t) const;

  private:
    std::vector<Vec2> waypoints_;
    std::vector<double> times_;
    std::vector<double> arc_;
    double v_g_;
};

struct PoiState {
    Vec2 g;
    Vec2 g_dot;
    double gamma = 0.0;
};

// Throws std::out_of_range outside [t0, t_final].
PoiState poi_state(const PoiTrajectory& traj, double t);

PoiTrajectory trajectory_from_graph(const RoadGraph& graph,
                                    const std::vector<std::size_t>& node_sequence, double v_g,
                                    double t0);

}  // namespace occorbit
