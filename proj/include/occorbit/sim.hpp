#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "occorbit/control.hpp"
#include "occorbit/env.hpp"
#include "occorbit/orbit.hpp"

namespace occorbit {

// Time derivative of the Dubins configuration (psi slot holds psi_dot).
Configuration dubins_derivative(const Configuration& q, double u_psi, double v);

// One classical RK4 step for a fixed-size state. Throws std::domain_error
// if any stage derivative is not finite.
template <std::size_t N, typename F>
std::array<double, N> rk4_step(const std::array<double, N>& x, double t, double dt, F&& f) {
    auto axpy = [](const std::array<double, N>& a, double s, const std::array<double, N>& b) {
        std::array<double, N> out;
        for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + s * b[i];
        return out;
    };
    auto checked = [](const std::array<double, N>& d) {
        for (double v : d) {
            if (!std::isfinite(v)) throw std::domain_error("non-finite derivative in RK4 step");
        }
        return d;
    };
    const auto k1 = checked(f(t, x));
    const auto k2 = checked(f(t + dt / 2.0, axpy(x, dt / 2.0, k1)));
    const auto k3 = checked(f(t + dt / 2.0, axpy(x, dt / 2.0, k2)));
    const auto k4 = checked(f(t + dt, axpy(x, dt, k3)));
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

using ConfigurationRate = std::function<Configuration(double t, const Configuration& q)>;

// RK4 step of a configuration; the result's heading is wrapped to (-pi, pi].
Configuration integrate_rk4(const Configuration& q, double t, double dt,
                            const ConfigurationRate& rate);

struct SimRow {
    double t = 0.0;
    Configuration q;
    double u_psi_raw = 0.0;
    double u_psi = 0.0;
    double r_err = 0.0;
    double psi_err = 0.0;
    std::optional<bool> visible;  // unset when no environment was consulted
};

struct SimTrace {
    std::vector<SimRow> rows;
    double dt = 0.0;
};

struct SimConfig {
    double dt = 1e-3;
    double t0 = 0.0;
    double t_final = 0.0;
    Configuration q0;
    ControllerConfig controller;
    double d_max = 0.0;  // visibility range recorded per step
};

// Raised when the vehicle enters the guard radius; carries the rows
// integrated so far.
class SimulationAbort : public std::runtime_error {
  public:
    SimulationAbort(const std::string& what, SimTrace partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const SimTrace& partial() const { return partial_; }

  private:
    SimTrace partial_;
};

// Closed-loop run; the POI position is the schedule's orbit center and the
// per-step visibility is los_visible from (x, y, h_uav).
SimTrace simulate_closed_loop(const Environment& env, const OrbitSchedule& s,
                              const SimConfig& cfg);

struct OpenLoopResult {
    SimTrace trace;
    double max_r_err = 0.0;
};

// Integrates the vehicle together with its polar angle under the on-orbit
// curvature control, starting from on_orbit_initial_state.
OpenLoopResult simulate_open_loop_on_orbit(const OrbitSchedule& s, double theta0, double dt,
                                           double t0, double t_final);

struct VisibilityReport {
    std::vector<bool> visible;
    double fraction = 0.0;
};

VisibilityReport verify_visibility(const Environment& env, const SimTrace& trace,
                                   const std::function<Vec2(double)>& poi, double d_max,
                                   double h_uav);
VisibilityReport verify_visibility(const Environment& env, const SimTrace& trace,
                                   const PoiTrajectory& traj, double d_max, double h_uav);

struct Metrics {
    bool converged = false;
    double convergence_time = 0.0;
    double r_err_mean = 0.0;  // |r - R| statistics after convergence
    double r_err_max = 0.0;
    double r_err_min = 0.0;
    double visibility_fraction = 0.0;            // all rows with a visibility flag
    double visibility_fraction_converged = 0.0;  // rows after convergence
    double saturation_fraction = 0.0;
};

// Convergence time is the first t with |r_err| < threshold after which
// |r_err| never exceeds 2 threshold.
Metrics compute_metrics(const SimTrace& trace, double convergence_threshold);

}  // namespace occorbit
