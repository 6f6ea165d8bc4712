#include "occorbit/sim.hpp"

#include <algorithm>
#include <cmath>

#include "occorbit/visibility.hpp"

namespace occorbit {

namespace {

std::array<double, 3> to_array(const Configuration& q) { return {q.x, q.y, q.psi}; }
Configuration from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

std::size_t step_count(double t0, double t_final, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(t_final > t0)) throw std::invalid_argument("t_final must exceed t0");
    return static_cast<std::size_t>(std::llround((t_final - t0) / dt));
}

}  // namespace

Configuration dubins_derivative(const Configuration& q, double u_psi, double v) {
    return {v * std::cos(q.psi), v * std::sin(q.psi), u_psi};
}

Configuration integrate_rk4(const Configuration& q, double t, double dt,
                            const ConfigurationRate& rate) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    auto next = rk4_step<3>(to_array(q), t, dt, [&](double tt, const std::array<double, 3>& x) {
        return to_array(rate(tt, from_array(x)));
    });
    next[2] = wrap_angle(next[2]);
    return from_array(next);
}

SimTrace simulate_closed_loop(const Environment& env, const OrbitSchedule& s,
                              const SimConfig& cfg) {
    const std::size_t n = step_count(cfg.t0, cfg.t_final, cfg.dt);
    SimTrace trace;
    trace.dt = cfg.dt;
    trace.rows.reserve(n + 1);

    // Stage times can overshoot the span by rounding on the last step.
    auto clamp_t = [&](double t) { return std::min(t, cfg.t_final); };
    auto rate = [&](double t, const Configuration& q) {
        const ControlOutput c = steering_control(q, clamp_t(t), s, cfg.controller);
        return dubins_derivative(q, c.u_psi, s.v);
    };

    Configuration q = cfg.q0;
    q.psi = wrap_angle(q.psi);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = clamp_t(cfg.t0 + static_cast<double>(k) * cfg.dt);
        try {
            const OrbitSample o = orbit_sample(s, t);
            const ControlOutput c = steering_control(q, o, s.v, s.v_g, s.direction, cfg.controller);
            SimRow row{t, q, c.u_psi_raw, c.u_psi, c.r_err, c.psi_err, std::nullopt};
            row.visible = los_visible(env, o.g, {q.x, q.y, s.h_uav}, cfg.d_max);
            trace.rows.push_back(row);
            if (k == n) break;
            q = integrate_rk4(q, t, cfg.dt, rate);
        } catch (const SingularityError& e) {
            throw SimulationAbort(e.what(), std::move(trace));
        }
    }
    return trace;
}

OpenLoopResult simulate_open_loop_on_orbit(const OrbitSchedule& s, double theta0, double dt,
                                           double t0, double t_final) {
    const std::size_t n = step_count(t0, t_final, dt);
    const OnOrbitState init = on_orbit_initial_state(s, t0, theta0);
    auto clamp_t = [&](double t) { return std::min(t, t_final); };

    // State: x, y, psi, theta.
    auto rate = [&](double t, const std::array<double, 4>& x) {
        const OrbitSample o = orbit_sample(s, clamp_t(t));
        const double u_psi = s.v * open_loop_curvature(s.v, o, x[3], s.direction);
        return std::array<double, 4>{s.v * std::cos(x[2]), s.v * std::sin(x[2]), u_psi,
                                     polar_angle_rate(s.v, o, x[3], s.direction)};
    };

    OpenLoopResult result;
    result.trace.dt = dt;
    result.trace.rows.reserve(n + 1);
    std::array<double, 4> x{init.q.x, init.q.y, init.q.psi, theta0};
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = clamp_t(t0 + static_cast<double>(k) * dt);
        const OrbitSample o = orbit_sample(s, t);
        const double u_psi = s.v * open_loop_curvature(s.v, o, x[3], s.direction);
        const double r_err = distance({x[0], x[1]}, o.g) - o.R;

        // Heading error against the orbit-following velocity at the current angle.
        const double theta_dot = polar_angle_rate(s.v, o, x[3], s.direction);
        const Vec2 vel = o.g_dot + radial_unit(x[3]) * o.R_dot +
                         tangential_unit(x[3]) * (o.R * theta_dot);
        const double psi_err = wrap_angle(x[2] - std::atan2(vel.y, vel.x));

        result.trace.rows.push_back(
            {t, {x[0], x[1], wrap_angle(x[2])}, u_psi, u_psi, r_err, psi_err, std::nullopt});
        result.max_r_err = std::max(result.max_r_err, std::abs(r_err));
        if (k == n) break;
        x = rk4_step<4>(x, t, dt, rate);
        x[2] = wrap_angle(x[2]);
    }
    return result;
}

VisibilityReport verify_visibility(const Environment& env, const SimTrace& trace,
                                   const std::function<Vec2(double)>& poi, double d_max,
                                   double h_uav) {
    VisibilityReport report;
    report.visible.reserve(trace.rows.size());
    std::size_t count = 0;
    for (const auto& row : trace.rows) {
        const bool vis = los_visible(env, poi(row.t), {row.q.x, row.q.y, h_uav}, d_max);
        report.visible.push_back(vis);
        if (vis) ++count;
    }
    if (!trace.rows.empty()) {
        report.fraction = static_cast<double>(count) / static_cast<double>(trace.rows.size());
    }
    return report;
}

VisibilityReport verify_visibility(const Environment& env, const SimTrace& trace,
                                   const PoiTrajectory& traj, double d_max, double h_uav) {
    return verify_visibility(
        env, trace, [&](double t) { return poi_state(traj, t).g; }, d_max, h_uav);
}

Metrics compute_metrics(const SimTrace& trace, double convergence_threshold) {
    if (trace.rows.empty()) throw std::invalid_argument("empty trace");
    const auto& rows = trace.rows;
    Metrics m;

    std::size_t visible_rows = 0;
    std::size_t flagged_rows = 0;
    std::size_t saturated = 0;
    for (const auto& r : rows) {
        if (r.u_psi_raw != r.u_psi) ++saturated;
        if (r.visible) {
            ++flagged_rows;
            if (*r.visible) ++visible_rows;
        }
    }
    m.saturation_fraction = static_cast<double>(saturated) / static_cast<double>(rows.size());
    if (flagged_rows > 0) {
        m.visibility_fraction = static_cast<double>(visible_rows) / static_cast<double>(flagged_rows);
    }

    // Scan backwards for the last excursion above twice the threshold, then
    // forward for the first row below the threshold after it.
    std::size_t start = 0;
    for (std::size_t i = rows.size(); i-- > 0;) {
        if (std::abs(rows[i].r_err) > 2.0 * convergence_threshold) {
            start = i + 1;
            break;
        }
    }
    std::size_t conv = rows.size();
    for (std::size_t i = start; i < rows.size(); ++i) {
        if (std::abs(rows[i].r_err) < convergence_threshold) {
            conv = i;
            break;
        }
    }
    if (conv == rows.size()) return m;

    m.converged = true;
    m.convergence_time = rows[conv].t;
    double sum = 0.0;
    m.r_err_min = std::abs(rows[conv].r_err);
    std::size_t vis_after = 0;
    std::size_t flagged_after = 0;
    for (std::size_t i = conv; i < rows.size(); ++i) {
        const double e = std::abs(rows[i].r_err);
        sum += e;
        m.r_err_max = std::max(m.r_err_max, e);
        m.r_err_min = std::min(m.r_err_min, e);
        if (rows[i].visible) {
            ++flagged_after;
            if (*rows[i].visible) ++vis_after;
        }
    }
    m.r_err_mean = sum / static_cast<double>(rows.size() - conv);
    if (flagged_after > 0) {
        m.visibility_fraction_converged =
            static_cast<double>(vis_after) / static_cast<double>(flagged_after);
    }
    return m;
}

}  // namespace occorbit
