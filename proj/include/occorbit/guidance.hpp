#pragma once

#include "occorbit/orbit.hpp"

namespace occorbit {

// Below this distance from the POI the field is singular.
inline constexpr double kGuardRadius = 1e-6;

class SingularityError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct FieldSample {
    Vec2 u;              // m/s, world frame
    double u_r = 0.0;    // m/s
    double u_theta = 0.0;
    double psi_d = 0.0;  // (-pi, pi]
    double psi_d_dot = 0.0;
    double r = 0.0;
    double theta = 0.0;
    double r_err = 0.0;  // r - R
    double phi_prime = 0.0;
};

double attraction_level_a1(const Vec2& xi, const OrbitSample& o, double beta);
double attraction_level_a1_dt(const Vec2& xi, const OrbitSample& o, double beta);

// Radial attraction speed; throws std::invalid_argument unless
// v - v_g - |R_dot| > 0.
double phi_prime(double v, double v_g, double R_dot, double beta, double r, double R);

// Field at xi for the orbit state o. v_g is the POI speed used by the
// attraction magnitude.
FieldSample vector_field(const Vec2& xi, const OrbitSample& o, double v, double v_g, double beta,
                         Direction dir);
FieldSample vector_field(const Vec2& xi, double t, const OrbitSchedule& s, double beta);

double psi_d_dot(const Vec2& xi, const OrbitSample& o, double v, double v_g, double beta,
                 Direction dir);
double psi_d_dot(const Vec2& xi, double t, const OrbitSchedule& s, double beta);

}  // namespace occorbit
