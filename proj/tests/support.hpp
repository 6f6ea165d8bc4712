#pragma once

#include <random>
#include <vector>

#include "occorbit/env.hpp"
#include "occorbit/orbit.hpp"

namespace testsupport {

using occorbit::Environment;
using occorbit::Obstacle;
using occorbit::Polygon;
using occorbit::Vec2;

// Axis-aligned rectangle, counter-clockwise.
inline Polygon rect(double x0, double y0, double x1, double y1) {
    return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

inline Environment env_of(std::vector<Obstacle> obstacles, double h_feasible) {
    return Environment{std::move(obstacles), h_feasible};
}

// A schedule with a straight constant-velocity center and linear radius.
inline occorbit::OrbitSchedule straight_schedule(double v, double v_g, double gamma, double R0,
                                                 double R_dot, double duration,
                                                 occorbit::Direction dir) {
    occorbit::OrbitSchedule s;
    s.v = v;
    s.v_g = v_g;
    s.h_uav = 100.0;
    s.direction = dir;
    const Vec2 g_dot{v_g * std::cos(gamma), v_g * std::sin(gamma)};
    s.knots.push_back({0.0, {0.0, 0.0}, R0});
    s.knots.push_back({duration, g_dot * duration, R0 + R_dot * duration});
    return s;
}

}  // namespace testsupport
