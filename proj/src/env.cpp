#include "occorbit/env.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace occorbit {

namespace {

// Time slack absorbing floating-point drift at the trajectory ends.
constexpr double kTimeSlack = 1e-9;

std::optional<Vec2> interior_point(const Polygon& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 c = (v[(i + n - 1) % n] + v[i] + v[(i + 1) % n]) / 3.0;
        if (locate_point(poly, c) == PointLocation::Inside) return c;
    }
    return std::nullopt;
}

bool strictly_inside(const Polygon& poly, const Vec2& p) {
    return locate_point(poly, p) == PointLocation::Inside;
}

bool any_point_strictly_inside(const Polygon& a, const Polygon& b) {
    const auto& v = a.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % v.size()];
        if (strictly_inside(b, p) || strictly_inside(b, (p + q) * 0.5)) return true;
    }
    const auto c = interior_point(a);
    return c && strictly_inside(b, *c);
}

bool interiors_overlap(const Polygon& a, const Polygon& b) {
    const auto& va = a.vertices;
    const auto& vb = b.vertices;
    for (std::size_t i = 0; i < va.size(); ++i) {
        for (std::size_t j = 0; j < vb.size(); ++j) {
            if (segments_cross_properly(va[i], va[(i + 1) % va.size()], vb[j],
                                        vb[(j + 1) % vb.size()])) {
                return true;
            }
        }
    }
    return any_point_strictly_inside(a, b) || any_point_strictly_inside(b, a);
}

std::string describe(const char* what, std::size_t i) {
    std::ostringstream os;
    os << what << ' ' << i;
    return os.str();
}

}  // namespace

double Environment::h_building() const {
    double h = 0.0;
    for (const auto& o : obstacles) h = std::max(h, o.height);
    return h;
}

bool RoadGraph::connected(std::size_t i, std::size_t j) const {
    return std::any_of(edges.begin(), edges.end(), [&](const auto& e) {
        return (e.first == i && e.second == j) || (e.first == j && e.second == i);
    });
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::TooFewVertices: return "too_few_vertices";
        case ViolationKind::Orientation: return "orientation";
        case ViolationKind::NotSimple: return "not_simple";
        case ViolationKind::NonPositiveHeight: return "non_positive_height";
        case ViolationKind::Overlap: return "overlap";
        case ViolationKind::FeasibleCeiling: return "feasible_ceiling";
        case ViolationKind::DuplicateNode: return "duplicate_node";
        case ViolationKind::BadEdgeIndex: return "bad_edge_index";
        case ViolationKind::SelfLoopEdge: return "self_loop_edge";
        case ViolationKind::EdgeClearance: return "edge_clearance";
    }
    return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate_environment(const Environment& env, const RoadGraph& graph) {
    ValidationReport report;
    auto add = [&](ViolationKind k, std::vector<std::size_t> idx, std::string msg) {
        report.violations.push_back({k, std::move(idx), std::move(msg)});
    };

    std::vector<bool> well_formed(env.obstacles.size(), false);
    for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
        const auto& ob = env.obstacles[i];
        if (ob.base.vertices.size() < 3) {
            add(ViolationKind::TooFewVertices, {i}, describe("obstacle", i) + " has fewer than 3 vertices");
            continue;
        }
        bool ok = true;
        if (!is_simple(ob.base)) {
            add(ViolationKind::NotSimple, {i}, describe("obstacle", i) + " base is not simple");
            ok = false;
        }
        if (signed_area(ob.base) <= 0.0) {
            add(ViolationKind::Orientation, {i},
                describe("obstacle", i) + " base is not counter-clockwise");
            ok = false;
        }
        if (!(ob.height > 0.0)) {
            add(ViolationKind::NonPositiveHeight, {i}, describe("obstacle", i) + " height must be > 0");
        }
        well_formed[i] = ok;
    }

    for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
        for (std::size_t j = i + 1; j < env.obstacles.size(); ++j) {
            if (!well_formed[i] || !well_formed[j]) continue;
            if (interiors_overlap(env.obstacles[i].base, env.obstacles[j].base)) {
                std::ostringstream os;
                os << "obstacles " << i << " and " << j << " overlap";
                add(ViolationKind::Overlap, {i, j}, os.str());
            }
        }
    }

    if (!(env.h_feasible > env.h_building())) {
        std::ostringstream os;
        os << "h_feasible " << env.h_feasible << " must exceed tallest obstacle height "
           << env.h_building();
        add(ViolationKind::FeasibleCeiling, {}, os.str());
    }

    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < graph.nodes.size(); ++j) {
            if (coincident(graph.nodes[i], graph.nodes[j])) {
                std::ostringstream os;
                os << "road nodes " << i << " and " << j << " coincide";
                add(ViolationKind::DuplicateNode, {i, j}, os.str());
            }
        }
    }

    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto [a, b] = graph.edges[e];
        if (a >= graph.nodes.size() || b >= graph.nodes.size()) {
            add(ViolationKind::BadEdgeIndex, {e}, describe("edge", e) + " references a missing node");
            continue;
        }
        if (a == b) {
            add(ViolationKind::SelfLoopEdge, {e}, describe("edge", e) + " joins a node to itself");
            continue;
        }
        for (std::size_t k = 0; k < env.obstacles.size(); ++k) {
            if (env.obstacles[k].base.vertices.size() < 3) continue;
            if (segment_polygon_entry(graph.nodes[a], graph.nodes[b], env.obstacles[k].base)) {
                std::ostringstream os;
                os << "edge " << e << " intersects obstacle " << k;
                add(ViolationKind::EdgeClearance, {e, k}, os.str());
            }
        }
    }
    return report;
}

PoiTrajectory::PoiTrajectory(std::vector<Vec2> waypoints, double v_g, double t0)
    : waypoints_(std::move(waypoints)), v_g_(v_g) {
    if (!(v_g_ > 0.0) || !std::isfinite(v_g_)) throw TrajectoryError("POI speed must be > 0");
    if (waypoints_.size() < 2) throw TrajectoryError("POI trajectory needs at least two waypoints");
    if (!std::isfinite(t0)) throw TrajectoryError("t0 must be finite");
    times_.reserve(waypoints_.size());
    arc_.reserve(waypoints_.size());
    times_.push_back(t0);
    arc_.push_back(0.0);
    for (std::size_t i = 1; i < waypoints_.size(); ++i) {
        const double len = distance(waypoints_[i - 1], waypoints_[i]);
        if (len <= kGeomEps) throw TrajectoryError("consecutive waypoints must be distinct");
        arc_.push_back(arc_.back() + len);
        times_.push_back(t0 + arc_.back() / v_g_);
    }
}

Vec2 PoiTrajectory::position_at_arc(double s) const {
    s = std::clamp(s, 0.0, arc_.back());
    auto it = std::lower_bound(arc_.begin() + 1, arc_.end(), s);
    if (it == arc_.end()) --it;
    const std::size_t j = static_cast<std::size_t>(it - arc_.begin());
    const std::size_t i = j - 1;
    const double frac = (s - arc_[i]) / (arc_[j] - arc_[i]);
    return waypoints_[i] + (waypoints_[j] - waypoints_[i]) * frac;
}

std::size_t PoiTrajectory::segment_at(double t) const {
    auto it = std::lower_bound(times_.begin() + 1, times_.end(), t);
    if (it == times_.end()) --it;
    return static_cast<std::size_t>(it - times_.begin()) - 1;
}

PoiState poi_state(const PoiTrajectory& traj, double t) {
    if (!(t >= traj.t0() - kTimeSlack && t <= traj.t_final() + kTimeSlack)) {
        std::ostringstream os;
        os << "time " << t << " outside POI trajectory span [" << traj.t0() << ", " << traj.t_final()
           << "]";
        throw std::out_of_range(os.str());
    }
    t = std::clamp(t, traj.t0(), traj.t_final());
    const std::size_t i = traj.segment_at(t);
    const Vec2& p0 = traj.waypoints()[i];
    const Vec2& p1 = traj.waypoints()[i + 1];
    const Vec2 dir = (p1 - p0) / distance(p0, p1);
    PoiState s;
    s.g_dot = dir * traj.speed();
    s.g = p0 + s.g_dot * (t - traj.times()[i]);
    s.gamma = std::atan2(s.g_dot.y, s.g_dot.x);
    return s;
}

PoiTrajectory trajectory_from_graph(const RoadGraph& graph,
                                    const std::vector<std::size_t>& node_sequence, double v_g,
                                    double t0) {
    if (node_sequence.size() < 2) throw TrajectoryError("node sequence needs at least two nodes");
    std::vector<Vec2> pts;
    pts.reserve(node_sequence.size());
    for (std::size_t k = 0; k < node_sequence.size(); ++k) {
        const std::size_t n = node_sequence[k];
        if (n >= graph.nodes.size()) throw TrajectoryError(describe("unknown road node", n));
        if (k > 0) {
            const std::size_t prev = node_sequence[k - 1];
            if (prev == n) throw TrajectoryError(describe("repeated node in sequence at position", k));
            if (!graph.connected(prev, n)) {
                std::ostringstream os;
                os << "nodes " << prev << " and " << n << " are not joined by a road edge";
                throw TrajectoryError(os.str());
            }
        }
        pts.push_back(graph.nodes[n]);
    }
    return PoiTrajectory(std::move(pts), v_g, t0);
}

}  // namespace occorbit
