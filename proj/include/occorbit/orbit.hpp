#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "occorbit/env.hpp"
#include "occorbit/visibility.hpp"

namespace occorbit {

enum class Direction { CW, CCW };

// +1 for counter-clockwise circulation, -1 for clockwise.
inline double direction_sign(Direction d) { return d == Direction::CCW ? 1.0 : -1.0; }
const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

// Vehicle pose in the plane; psi is the heading measured from east.
struct Configuration {
    double x = 0.0;
    double y = 0.0;
    double psi = 0.0;
};

struct OrbitKnot {
    double t = 0.0;
    Vec2 g;
    double R = 0.0;
};

// Thrown when the orbit kinematics have no real solution at the query.
class OrbitError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct OrbitSchedule {
    std::vector<OrbitKnot> knots;
    Direction direction = Direction::CCW;
    double v = 0.0;
    double v_g = 0.0;
    double h_uav = 0.0;

    double t0() const { return knots.front().t; }
    double t_final() const { return knots.back().t; }
    // Interval [i, i+1] active at t, left-continuous at interior knots.
    std::size_t interval_at(double t) const;
};

// Throws std::invalid_argument on non-increasing times, non-positive radii,
// or center motion inconsistent with v_g.
void check_schedule(const OrbitSchedule& s);

struct OrbitSample {
    double t = 0.0;
    Vec2 g;
    Vec2 g_dot;
    double R = 0.0;
    double R_dot = 0.0;
};

// Throws std::out_of_range outside the knot span.
OrbitSample orbit_sample(const OrbitSchedule& s, double t);

inline Vec2 radial_unit(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline Vec2 tangential_unit(double theta) { return {-std::sin(theta), std::cos(theta)}; }

// Polar angle rate of a vehicle held on the orbit at angle theta.
double polar_angle_rate(double v, const OrbitSample& o, double theta, Direction dir);

// Unsigned path curvature needed to stay on the orbit at theta.
double orbit_curvature(double v, const OrbitSample& o, double theta, Direction dir);

std::pair<double, double> radius_rate_bounds(double v, double v_g);

// Smallest radius whose worst-case on-orbit curvature stays below kappa_max.
double min_feasible_radius(double v, double v_g, double kappa_max);

// Nondimensional curvature with a = theta - gamma, b = v_g / v, c = R_dot / v,
// radius d + v c t.
double curvature_cost(double a, double b, double c, double d, double t, Direction dir,
                      double v = 1.0);

// Rate-limits consecutive radii to |R_{i+1} - R_i| <= (v - v_g) dt by only
// shrinking: a forward pass then a backward pass.
std::vector<double> rate_limit_radii(std::vector<double> radii, const std::vector<double>& times,
                                     double v, double v_g, double rate_fraction = 1.0);

struct Infeasible {
    std::size_t index = 0;  // offending sample
    double radius = 0.0;
    double threshold = 0.0;
    std::string reason;
};

using PlanResult = std::variant<OrbitSchedule, Infeasible>;

struct PlanParams {
    double kappa_max = 0.0;  // 1/r_min
    double v = 0.0;
    double h_uav = 0.0;
    double d_max = 0.0;
    int n_rays = kDefaultRays;
    Direction direction = Direction::CCW;
    // Share of v - v_g allowed for |R_dot|; below 1 the guidance field keeps
    // a strictly positive attraction on rate-limited intervals.
    double rate_fraction = 1.0;
};

// Plans from raw inscribed radii (already computed per sample).
PlanResult plan_from_radii(const std::vector<Vec2>& points, const std::vector<double>& times,
                           const std::vector<double>& radii, double v_g, const PlanParams& p);

PlanResult build_orbit_schedule(const Environment& env, const PoiTrajectory& traj,
                                const std::vector<Vec2>& points, const std::vector<double>& times,
                                const PlanParams& p);

struct OnOrbitState {
    Configuration q;
    double theta_dot = 0.0;
};

OnOrbitState on_orbit_initial_state(const OrbitSchedule& s, double t0, double theta0);

// Signed curvature that keeps a vehicle on the orbit; u_psi = v * kappa_s.
double open_loop_curvature(double v, const OrbitSample& o, double theta, Direction dir);
double open_loop_curvature_control(const OrbitSchedule& s, double t, double theta);

}  // namespace occorbit
