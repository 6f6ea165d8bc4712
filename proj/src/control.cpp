#include "occorbit/control.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "occorbit/parallel.hpp"

namespace occorbit {

namespace {

constexpr double kSeriesThreshold = 1e-4;
constexpr double kPi = std::numbers::pi;

// Bisection for the root of f on [lo, hi]; f(lo) and f(hi) differ in sign.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double f_lo = f(lo);
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// beta (2/pi) atan(beta r~) / (1 + beta^2 r~^2)
double attraction_weight(double r_err, double beta) {
    const double br = beta * r_err;
    return beta * (2.0 / kPi) * std::atan(br) / (1.0 + br * br);
}

}  // namespace

double versinc(double x) {
    if (std::abs(x) < kSeriesThreshold) return x / 2.0 - x * x * x / 24.0;
    return (1.0 - std::cos(x)) / x;
}

double sinc(double x) {
    if (std::abs(x) < kSeriesThreshold) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double saturate(double u, double u_max) { return std::clamp(u, -u_max, u_max); }

double lyapunov_term(const FieldSample& f, const OrbitSample& o, double psi_err, double beta) {
    const double radial = dot(o.g_dot, radial_unit(f.theta)) + o.R_dot;
    return (radial * versinc(psi_err) + f.u_theta * sinc(psi_err)) *
           attraction_weight(f.r_err, beta);
}

ControlOutput steering_control(const Configuration& q, const OrbitSample& o, double v,
                               double v_g, Direction dir, const ControllerConfig& cfg) {
    const FieldSample f = vector_field({q.x, q.y}, o, v, v_g, cfg.beta, dir);
    ControlOutput out;
    out.psi_err = wrap_angle(q.psi - f.psi_d);
    out.r_err = f.r_err;
    out.proportional = -cfg.k_psi * out.psi_err;
    out.feedforward = f.psi_d_dot;
    out.u_lyap = lyapunov_term(f, o, out.psi_err, cfg.beta);
    out.u_psi_raw = out.proportional + out.feedforward + out.u_lyap;
    out.u_psi = saturate(out.u_psi_raw, cfg.u_psi_max);
    return out;
}

ControlOutput steering_control(const Configuration& q, double t, const OrbitSchedule& s,
                               const ControllerConfig& cfg) {
    return steering_control(q, orbit_sample(s, t), s.v, s.v_g, s.direction, cfg);
}

double epsilon_max_root() {
    return bisect([](double x) { return x * std::atan(x) - 1.0; }, 1.0, 2.0);
}

double lambda_max_root() {
    return bisect([](double x) { return x * std::atan(x) - 0.5; }, 0.5, 1.0);
}

double epsilon_max() {
    const double x = epsilon_max_root();
    const double a = std::atan(x);
    return a * a / (1.0 + x * x);
}

double lambda_max() {
    const double x = lambda_max_root();
    return std::atan(x) / (1.0 + x * x);
}

double min_gain(double v, double beta) {
    return v * beta * (4.0 / (kPi * kPi)) * epsilon_max();
}

double lyapunov_v2(double r_err, double psi_err, double beta) {
    const double a = std::atan(beta * r_err);
    return a * a / kPi + psi_err * psi_err / 2.0;
}

double lyapunov_v2_dot(double r_err, double psi_err, double beta, double k_psi, double v,
                       double v_g, double R_dot) {
    const double br = beta * r_err;
    const double a = std::atan(br);
    const double speed = v - v_g - std::abs(R_dot);
    return -k_psi * psi_err * psi_err -
           speed * std::cos(psi_err) * beta * (4.0 / (kPi * kPi)) * a * a / (1.0 + br * br);
}

BetaTuneResult tune_beta_grid(double v, double v_g, double R, double R_dot, double beta,
                              double tau_inner, double u_psi_max, const BetaGrid& grid) {
    if (grid.r_steps < 2 || grid.psi_steps < 1 || grid.theta_steps < 1) {
        throw std::invalid_argument("beta grid resolution must be positive");
    }
    OrbitSample o;
    o.g = {0.0, 0.0};
    o.g_dot = {v_g, 0.0};
    o.R = R;
    o.R_dot = R_dot;

    const double r_lo = tau_inner * R;
    const double r_hi = grid.r_max_factor * R;
    std::vector<BetaTuneResult> per_r(static_cast<std::size_t>(grid.r_steps));
    parallel_for(per_r.size(), [&](std::size_t ir) {
        const double r = r_lo + (r_hi - r_lo) * static_cast<double>(ir) / (grid.r_steps - 1);
        BetaTuneResult best;
        for (int it = 0; it < grid.theta_steps; ++it) {
            const double theta = -kPi + 2.0 * kPi * it / grid.theta_steps;
            const FieldSample f = vector_field(o.g + radial_unit(theta) * r, o, v, v_g, beta,
                                               Direction::CCW);
            for (int iq = 0; iq < grid.psi_steps; ++iq) {
                const double q_psi = -kPi + 2.0 * kPi * iq / grid.psi_steps;
                const double psi_err = wrap_angle(q_psi - f.psi_d);
                const double value = std::abs(f.psi_d_dot + lyapunov_term(f, o, psi_err, beta));
                if (value > best.max_value) best = {value, r, theta, q_psi, false};
            }
        }
        per_r[ir] = best;
    });
    BetaTuneResult result;
    for (const auto& b : per_r) {
        if (b.max_value > result.max_value) result = b;
    }
    result.pass = result.max_value < u_psi_max;
    return result;
}

}  // namespace occorbit
