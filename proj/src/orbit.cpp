#include "occorbit/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "occorbit/parallel.hpp"

namespace occorbit {

namespace {

constexpr double kTimeSlack = 1e-9;

// v^2 - (g_dot . e_r + R_dot)^2, the squared tangential speed on the orbit.
double tangential_discriminant(double v, const OrbitSample& o, double theta) {
    const double a = dot(o.g_dot, radial_unit(theta)) + o.R_dot;
    return v * v - a * a;
}

}  // namespace

const char* to_string(Direction d) { return d == Direction::CCW ? "CCW" : "CW"; }

Direction direction_from_string(const std::string& s) {
    if (s == "CCW" || s == "ccw") return Direction::CCW;
    if (s == "CW" || s == "cw") return Direction::CW;
    throw std::invalid_argument("direction must be CW or CCW, got '" + s + "'");
}

std::size_t OrbitSchedule::interval_at(double t) const {
    auto it = std::lower_bound(knots.begin() + 1, knots.end(), t,
                               [](const OrbitKnot& k, double tt) { return k.t < tt; });
    if (it == knots.end()) --it;
    return static_cast<std::size_t>(it - knots.begin()) - 1;
}

void check_schedule(const OrbitSchedule& s) {
    if (s.knots.size() < 2) throw std::invalid_argument("orbit schedule needs at least two knots");
    if (!(s.v > 0.0) || !(s.v_g >= 0.0)) throw std::invalid_argument("schedule speeds invalid");
    for (std::size_t i = 0; i < s.knots.size(); ++i) {
        if (!(s.knots[i].R > 0.0)) {
            throw std::invalid_argument("knot " + std::to_string(i) + " radius must be > 0");
        }
        if (i == 0) continue;
        const double dt = s.knots[i].t - s.knots[i - 1].t;
        if (!(dt > 0.0)) throw std::invalid_argument("knot times must be strictly increasing");
        const double speed = distance(s.knots[i].g, s.knots[i - 1].g) / dt;
        if (std::abs(speed - s.v_g) > 1e-6 * std::max(1.0, s.v_g)) {
            std::ostringstream os;
            os << "knot interval " << i - 1 << " center speed " << speed << " differs from v_g "
               << s.v_g;
            throw std::invalid_argument(os.str());
        }
    }
}

OrbitSample orbit_sample(const OrbitSchedule& s, double t) {
    if (s.knots.size() < 2) throw std::invalid_argument("orbit schedule needs at least two knots");
    if (!(t >= s.t0() - kTimeSlack && t <= s.t_final() + kTimeSlack)) {
        std::ostringstream os;
        os << "time " << t << " outside orbit schedule span [" << s.t0() << ", " << s.t_final()
           << "]";
        throw std::out_of_range(os.str());
    }
    const std::size_t i = s.interval_at(t);
    const OrbitKnot& a = s.knots[i];
    const OrbitKnot& b = s.knots[i + 1];
    const double span = b.t - a.t;
    const double w = (t - a.t) / span;
    OrbitSample o;
    o.t = t;
    o.g = a.g + (b.g - a.g) * w;
    o.g_dot = (b.g - a.g) / span;
    o.R = a.R * (1.0 - w) + b.R * w;
    o.R_dot = (b.R - a.R) / span;
    return o;
}

double polar_angle_rate(double v, const OrbitSample& o, double theta, Direction dir) {
    const double disc = tangential_discriminant(v, o, theta);
    if (disc < 0.0) throw OrbitError("vehicle too slow to stay on the orbit at this angle");
    const double g_t = dot(o.g_dot, tangential_unit(theta));
    return (-g_t + direction_sign(dir) * std::sqrt(disc)) / o.R;
}

double orbit_curvature(double v, const OrbitSample& o, double theta, Direction dir) {
    const double theta_dot = polar_angle_rate(v, o, theta, dir);
    const double root = std::sqrt(tangential_discriminant(v, o, theta));
    if (!(root > 0.0)) throw OrbitError("tangential speed vanishes; curvature undefined");
    return o.R * theta_dot * theta_dot / (v * root);
}

std::pair<double, double> radius_rate_bounds(double v, double v_g) {
    if (!(v > v_g)) throw std::invalid_argument("vehicle speed must exceed POI speed");
    return {-v + v_g, v - v_g};
}

double min_feasible_radius(double v, double v_g, double kappa_max) {
    const double ratio = v_g / v + 1.0;
    return ratio * ratio / kappa_max;
}

double curvature_cost(double a, double b, double c, double d, double t, Direction dir,
                      double v) {
    if (b + c > 1.0 || -b + c < -1.0) {
        throw std::invalid_argument("radius rate outside the admissible bounds");
    }
    const double radius = d + v * c * t;
    if (!(radius > 0.0)) throw std::invalid_argument("orbit radius must stay positive");
    const double q = b * std::cos(a) + c;
    const double root2 = 1.0 - q * q;
    if (!(root2 > 0.0)) throw OrbitError("tangential speed vanishes; cost undefined");
    const double root = std::sqrt(root2);
    const double num = b * std::sin(a) + direction_sign(dir) * root;
    return num * num / (radius * root);
}

std::vector<double> rate_limit_radii(std::vector<double> radii, const std::vector<double>& times,
                                     double v, double v_g, double rate_fraction) {
    if (radii.size() != times.size()) throw std::invalid_argument("radii/times size mismatch");
    if (!(rate_fraction > 0.0 && rate_fraction <= 1.0)) {
        throw std::invalid_argument("rate_fraction must be in (0, 1]");
    }
    const double rate = rate_fraction * (v - v_g);
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
        radii[i + 1] = std::min(radii[i + 1], radii[i] + rate * (times[i + 1] - times[i]));
    }
    for (std::size_t i = radii.size() - 1; i-- > 0;) {
        radii[i] = std::min(radii[i], radii[i + 1] + rate * (times[i + 1] - times[i]));
    }
    return radii;
}

PlanResult plan_from_radii(const std::vector<Vec2>& points, const std::vector<double>& times,
                           const std::vector<double>& radii, double v_g, const PlanParams& p) {
    if (points.size() != times.size() || points.size() != radii.size()) {
        throw std::invalid_argument("points, times and radii must have equal length");
    }
    if (points.size() < 2) throw std::invalid_argument("need at least two orbit samples");
    if (!(p.v >= v_g)) throw std::invalid_argument("vehicle speed must be at least the POI speed");
    if (!(p.kappa_max > 0.0)) throw std::invalid_argument("kappa_max must be > 0");

    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) {
            return Infeasible{i, radii[i], 0.0, "POI fully occluded at the flight altitude"};
        }
    }
    const std::vector<double> limited = rate_limit_radii(radii, times, p.v, v_g, p.rate_fraction);
    const double threshold = min_feasible_radius(p.v, v_g, p.kappa_max);
    for (std::size_t i = 0; i < limited.size(); ++i) {
        if (limited[i] < threshold) {
            return Infeasible{i, limited[i], threshold, "orbit radius below the curvature limit"};
        }
    }

    OrbitSchedule s;
    s.direction = p.direction;
    s.v = p.v;
    s.v_g = v_g;
    s.h_uav = p.h_uav;
    s.knots.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) s.knots.push_back({times[i], points[i], limited[i]});
    return s;
}

PlanResult build_orbit_schedule(const Environment& env, const PoiTrajectory& traj,
                                const std::vector<Vec2>& points, const std::vector<double>& times,
                                const PlanParams& p) {
    std::vector<double> radii(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        radii[i] = max_inscribed_radius(env, points[i], p.h_uav, p.d_max, p.n_rays);
    });
    return plan_from_radii(points, times, radii, traj.speed(), p);
}

OnOrbitState on_orbit_initial_state(const OrbitSchedule& s, double t0, double theta0) {
    const OrbitSample o = orbit_sample(s, t0);
    OnOrbitState st;
    st.theta_dot = polar_angle_rate(s.v, o, theta0, s.direction);
    const Vec2 e_r = radial_unit(theta0);
    const Vec2 pos = o.g + e_r * o.R;
    const Vec2 vel = o.g_dot + e_r * o.R_dot + tangential_unit(theta0) * (o.R * st.theta_dot);
    st.q = {pos.x, pos.y, std::atan2(vel.y, vel.x)};
    return st;
}

double open_loop_curvature(double v, const OrbitSample& o, double theta, Direction dir) {
    const double theta_dot = polar_angle_rate(v, o, theta, dir);
    const double root = std::sqrt(tangential_discriminant(v, o, theta));
    if (!(root > 0.0)) throw OrbitError("tangential speed vanishes; curvature undefined");
    const double g_t = dot(o.g_dot, tangential_unit(theta));
    return (direction_sign(dir) * (-theta_dot * g_t) / root + theta_dot) / v;
}

double open_loop_curvature_control(const OrbitSchedule& s, double t, double theta) {
    return open_loop_curvature(s.v, orbit_sample(s, t), theta, s.direction);
}

}  // namespace occorbit
