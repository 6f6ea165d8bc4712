#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "occorbit/env.hpp"
#include "support.hpp"

using namespace occorbit;
using testsupport::rect;

namespace {

// Independent membership oracle: exact on-segment test, else winding number.
bool winding_inside(const Polygon& poly, const Vec2& p) {
    const auto& v = poly.vertices;
    int wn = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 a = v[i];
        const Vec2 b = v[(i + 1) % v.size()];
        const double c = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        const bool within = std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
                            std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
        if (c == 0.0 && within) return true;
        if (a.y <= p.y) {
            if (b.y > p.y && c > 0) ++wn;
        } else {
            if (b.y <= p.y && c < 0) --wn;
        }
    }
    return wn != 0;
}

Environment two_squares() {
    return testsupport::env_of({{rect(0, 0, 10, 10), 20.0}, {rect(20, 0, 30, 10), 30.0}}, 100.0);
}

RoadGraph clear_road() { return RoadGraph{{{-10, -10}, {40, -10}, {40, 20}}, {{0, 1}, {1, 2}}}; }

}  // namespace

TEST_CASE("point_in_polygon on the unit square") {
    const Polygon sq = rect(0, 0, 1, 1);
    CHECK(point_in_polygon(sq, {0.5, 0.5}));
    CHECK_FALSE(point_in_polygon(sq, {2, 2}));
    CHECK(point_in_polygon(sq, {0.5, 0.0}));
    CHECK(locate_point(sq, {0.5, 0.0}) == PointLocation::Boundary);
    CHECK(locate_point(sq, {0.5, 0.5}) == PointLocation::Inside);
}

TEST_CASE("point_in_polygon matches a winding-number oracle on a vertex/edge grid") {
    const Polygon l_shape{{{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 3}, {0, 3}}};
    const Polygon tri{{{0, 0}, {3, 0}, {0, 2}}};
    for (const Polygon* poly : {&l_shape, &tri}) {
        for (int i = -2; i <= 18; ++i) {
            for (int j = -2; j <= 14; ++j) {
                const Vec2 p{i * 0.25, j * 0.25};
                CHECK_MESSAGE(point_in_polygon(*poly, p) == winding_inside(*poly, p),
                              "p = (" << p.x << ", " << p.y << ")");
            }
        }
    }
}

TEST_CASE("segment_polygon_entry") {
    const Polygon sq = rect(-0.5, -0.5, 0.5, 0.5);
    const auto s = segment_polygon_entry({-2, 0}, {2, 0}, sq);
    REQUIRE(s);
    CHECK(*s == doctest::Approx(0.375).epsilon(1e-12));
    CHECK_FALSE(segment_polygon_entry({-2, 2}, {2, 2}, sq));
    const auto inside = segment_polygon_entry({0, 0}, {2, 0}, sq);
    REQUIRE(inside);
    CHECK(*inside == 0.0);

    SUBCASE("invariant under vertex rotation") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(-3, 3);
        Polygon rotated = sq;
        for (int r = 0; r < 4; ++r) {
            std::rotate(rotated.vertices.begin(), rotated.vertices.begin() + 1, rotated.vertices.end());
            for (int k = 0; k < 50; ++k) {
                const Vec2 a{u(rng), u(rng)};
                const Vec2 b{u(rng), u(rng)};
                const auto e0 = segment_polygon_entry(a, b, sq);
                const auto e1 = segment_polygon_entry(a, b, rotated);
                REQUIRE(e0.has_value() == e1.has_value());
                if (e0) CHECK(*e0 == doctest::Approx(*e1).epsilon(1e-12));
            }
        }
    }

    SUBCASE("grazing an edge counts as entry") {
        const auto graze = segment_polygon_entry({-2, 0.5}, {2, 0.5}, sq);
        REQUIRE(graze);
        CHECK(*graze == doctest::Approx(0.375));
    }
}

TEST_CASE("validate_environment") {
    SUBCASE("valid world") { CHECK(validate_environment(two_squares(), clear_road()).ok()); }

    SUBCASE("overlap names both obstacles") {
        Environment env = two_squares();
        env.obstacles[1].base = rect(5, 5, 15, 15);
        const auto rep = validate_environment(env, clear_road());
        REQUIRE(rep.has(ViolationKind::Overlap));
        const auto& v = rep.violations.front();
        CHECK(v.indices == std::vector<std::size_t>{0, 1});
    }

    SUBCASE("road through an obstacle centroid") {
        RoadGraph g = clear_road();
        g.nodes.push_back({5, -5});
        g.nodes.push_back({5, 15});
        g.edges.push_back({3, 4});
        const auto rep = validate_environment(two_squares(), g);
        REQUIRE(rep.has(ViolationKind::EdgeClearance));
        CHECK(rep.violations.front().indices == std::vector<std::size_t>{2, 0});
    }

    SUBCASE("each single-fault mutation is rejected") {
        const RoadGraph road = clear_road();
        {
            Environment env = two_squares();
            std::reverse(env.obstacles[0].base.vertices.begin(), env.obstacles[0].base.vertices.end());
            CHECK(validate_environment(env, road).has(ViolationKind::Orientation));
        }
        {
            Environment env = two_squares();
            env.obstacles[0].base = Polygon{{{0, 0}, {10, 10}, {10, 0}, {0, 10}}};
            CHECK(validate_environment(env, road).has(ViolationKind::NotSimple));
        }
        {
            Environment env = two_squares();
            env.obstacles[1].height = 0.0;
            CHECK(validate_environment(env, road).has(ViolationKind::NonPositiveHeight));
        }
        {
            Environment env = two_squares();
            env.h_feasible = 30.0;
            CHECK(validate_environment(env, road).has(ViolationKind::FeasibleCeiling));
        }
        {
            Environment env = two_squares();
            env.obstacles[0].base.vertices.pop_back();
            env.obstacles[0].base.vertices.pop_back();
            CHECK(validate_environment(env, road).has(ViolationKind::TooFewVertices));
        }
        {
            RoadGraph g = road;
            g.nodes.push_back(g.nodes[0]);
            CHECK(validate_environment(two_squares(), g).has(ViolationKind::DuplicateNode));
        }
        {
            RoadGraph g = road;
            g.edges.push_back({0, 9});
            CHECK(validate_environment(two_squares(), g).has(ViolationKind::BadEdgeIndex));
        }
        {
            RoadGraph g = road;
            g.edges.push_back({1, 1});
            CHECK(validate_environment(two_squares(), g).has(ViolationKind::SelfLoopEdge));
        }
    }

    SUBCASE("shared edges are not overlaps") {
        Environment env = two_squares();
        env.obstacles[1].base = rect(10, 0, 20, 10);
        CHECK(validate_environment(env, clear_road()).ok());
    }

    SUBCASE("containment is an overlap") {
        Environment env = two_squares();
        env.obstacles[1].base = rect(2, 2, 8, 8);
        CHECK(validate_environment(env, clear_road()).has(ViolationKind::Overlap));
    }
}

TEST_CASE("poi_state") {
    const PoiTrajectory traj({{0, 0}, {10, 0}, {10, 20}}, 5.0, 0.0);
    SUBCASE("uniform motion") {
        const PoiState s = poi_state(traj, 1.0);
        CHECK(s.g.x == doctest::Approx(5.0));
        CHECK(s.g.y == doctest::Approx(0.0));
        CHECK(s.g_dot.x == doctest::Approx(5.0));
        CHECK(s.g_dot.y == doctest::Approx(0.0));
        CHECK(s.gamma == doctest::Approx(0.0));
    }
    SUBCASE("waypoint time gives the waypoint and the incoming velocity") {
        const PoiState s = poi_state(traj, 2.0);
        CHECK(s.g.x == doctest::Approx(10.0));
        CHECK(s.g.y == doctest::Approx(0.0));
        CHECK(s.g_dot.x == doctest::Approx(5.0));
        CHECK(s.g_dot.y == doctest::Approx(0.0));
        CHECK(poi_state(traj, 6.0).g.y == doctest::Approx(20.0));
    }
    SUBCASE("speed and affinity at random times") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u(0.0, 6.0);
        for (int k = 0; k < 100; ++k) {
            const double t = u(rng);
            const PoiState s = poi_state(traj, t);
            CHECK(s.g_dot.norm() == doctest::Approx(5.0).epsilon(1e-14));
            CHECK(s.gamma == doctest::Approx(std::atan2(s.g_dot.y, s.g_dot.x)));
            // Affine within the segment: a small step moves by g_dot * dt.
            const double dt = 1e-3;
            if (traj.segment_at(t) == traj.segment_at(t + dt) && t + dt <= 6.0) {
                const Vec2 step = poi_state(traj, t + dt).g - s.g;
                CHECK(step.x == doctest::Approx(s.g_dot.x * dt).epsilon(1e-9));
                CHECK(step.y == doctest::Approx(s.g_dot.y * dt).epsilon(1e-9));
            }
        }
    }
    SUBCASE("out of range") {
        CHECK_THROWS_AS(poi_state(traj, -0.1), std::out_of_range);
        CHECK_THROWS_AS(poi_state(traj, 6.1), std::out_of_range);
    }
}

TEST_CASE("trajectory_from_graph") {
    const RoadGraph g{{{0, 0}, {10, 0}, {10, 20}, {50, 50}}, {{0, 1}, {1, 2}}};
    SUBCASE("two nodes 10 m apart") {
        const PoiTrajectory t = trajectory_from_graph(g, {0, 1}, 5.0, 0.0);
        CHECK(t.t_final() - t.t0() == doctest::Approx(2.0));
    }
    SUBCASE("L-shaped path") {
        const PoiTrajectory t = trajectory_from_graph(g, {0, 1, 2}, 5.0, 3.0);
        REQUIRE(t.times().size() == 3);
        CHECK(t.times()[0] == doctest::Approx(3.0));
        CHECK(t.times()[1] == doctest::Approx(5.0));
        CHECK(t.times()[2] == doctest::Approx(9.0));
        CHECK(t.length() == doctest::Approx(30.0));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(trajectory_from_graph(g, {0, 2}, 5.0, 0.0), TrajectoryError);
        CHECK_THROWS_AS(trajectory_from_graph(g, {0, 0}, 5.0, 0.0), TrajectoryError);
        CHECK_THROWS_AS(trajectory_from_graph(g, {0, 7}, 5.0, 0.0), TrajectoryError);
        CHECK_THROWS_AS(trajectory_from_graph(g, {0, 1}, 0.0, 0.0), TrajectoryError);
    }
}

TEST_CASE("wrap_angle range") {
    CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
}
