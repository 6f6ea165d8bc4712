#include "occorbit/guidance.hpp"

#include <cmath>
#include <numbers>

namespace occorbit {

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

double guarded_radius(const Vec2& xi, const OrbitSample& o) {
    const double r = distance(xi, o.g);
    if (r <= kGuardRadius) throw SingularityError("query point within the guard radius of the POI");
    return r;
}

double attraction_speed(double v, double v_g, double R_dot) {
    const double a = v - v_g - std::abs(R_dot);
    if (!(a > 0.0)) throw std::invalid_argument("require v - v_g - |R_dot| > 0");
    return a;
}

}  // namespace

double attraction_level_a1(const Vec2& xi, const OrbitSample& o, double beta) {
    return std::atan(beta * (distance(xi, o.g) - o.R));
}

double attraction_level_a1_dt(const Vec2& xi, const OrbitSample& o, double beta) {
    const double r = guarded_radius(xi, o);
    const double br = beta * (r - o.R);
    return beta / (1.0 + br * br) * (-o.R_dot - dot(o.g_dot, xi - o.g) / r);
}

double phi_prime(double v, double v_g, double R_dot, double beta, double r, double R) {
    return attraction_speed(v, v_g, R_dot) * kTwoOverPi * std::atan(beta * (r - R));
}

FieldSample vector_field(const Vec2& xi, const OrbitSample& o, double v, double v_g, double beta,
                         Direction dir) {
    FieldSample f;
    f.r = guarded_radius(xi, o);
    const Vec2 rel = xi - o.g;
    f.theta = std::atan2(rel.y, rel.x);
    f.r_err = f.r - o.R;
    f.phi_prime = phi_prime(v, v_g, o.R_dot, beta, f.r, o.R);

    const Vec2 e_r = rel / f.r;
    const Vec2 e_t{-e_r.y, e_r.x};
    f.u_r = -f.phi_prime + o.R_dot + dot(o.g_dot, e_r);
    const double tang2 = v * v - f.u_r * f.u_r;
    if (tang2 < 0.0) throw OrbitError("radial field speed exceeds vehicle speed");
    f.u_theta = direction_sign(dir) * std::sqrt(tang2);
    f.u = e_r * f.u_r + e_t * f.u_theta;
    f.psi_d = wrap_angle(std::atan2(f.u.y, f.u.x));

    if (f.u_theta == 0.0) throw SingularityError("field is purely radial; heading rate undefined");
    const double a = attraction_speed(v, v_g, o.R_dot);
    const double br = beta * f.r_err;
    const double at = std::atan(br);
    const double phi_prime_dot =
        -(4.0 / (std::numbers::pi * std::numbers::pi)) * at * beta * a * a / (1.0 + br * br);
    const double theta_dot = (f.u_theta - dot(o.g_dot, e_t)) / f.r;
    f.psi_d_dot = (phi_prime_dot + f.r * theta_dot * theta_dot) / f.u_theta;
    return f;
}

FieldSample vector_field(const Vec2& xi, double t, const OrbitSchedule& s, double beta) {
    return vector_field(xi, orbit_sample(s, t), s.v, s.v_g, beta, s.direction);
}

double psi_d_dot(const Vec2& xi, const OrbitSample& o, double v, double v_g, double beta,
                 Direction dir) {
    return vector_field(xi, o, v, v_g, beta, dir).psi_d_dot;
}

double psi_d_dot(const Vec2& xi, double t, const OrbitSchedule& s, double beta) {
    return vector_field(xi, t, s, beta).psi_d_dot;
}

}  // namespace occorbit
