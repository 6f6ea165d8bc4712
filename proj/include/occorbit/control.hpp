#pragma once

#include <cstddef>

#include "occorbit/guidance.hpp"

namespace occorbit {

struct ControllerConfig {
    double beta = 0.025;    // 1/m
    double k_psi = 20.0;    // 1/s
    double u_psi_max = 0.0; // rad/s, v / r_min
    double tau_inner = 1.0;
};

struct ControlOutput {
    double u_psi_raw = 0.0;
    double u_psi = 0.0;
    double proportional = 0.0;
    double feedforward = 0.0;  // psi_d_dot
    double u_lyap = 0.0;
    double psi_err = 0.0;      // q_psi - psi_d, shorter arc
    double r_err = 0.0;
};

// (1 - cos x) / x and sin(x) / x with their removable singularities filled.
double versinc(double x);
double sinc(double x);

double saturate(double u, double u_max);

// Stabilizing term that cancels the cross coupling between heading and
// radial error in the Lyapunov derivative.
double lyapunov_term(const FieldSample& f, const OrbitSample& o, double psi_err, double beta);

ControlOutput steering_control(const Configuration& q, const OrbitSample& o, double v,
                               double v_g, Direction dir, const ControllerConfig& cfg);
ControlOutput steering_control(const Configuration& q, double t, const OrbitSchedule& s,
                               const ControllerConfig& cfg);

double epsilon_max();
double lambda_max();
// Roots x* of x atan x = 1 and x atan x = 1/2.
double epsilon_max_root();
double lambda_max_root();

double min_gain(double v, double beta);

double lyapunov_v2(double r_err, double psi_err, double beta);
double lyapunov_v2_dot(double r_err, double psi_err, double beta, double k_psi, double v,
                       double v_g, double R_dot);

struct BetaGrid {
    int r_steps = 400;
    int psi_steps = 720;
    int theta_steps = 360;
    double r_max_factor = 5.0;  // r in [tau R, r_max_factor R]
};

struct BetaTuneResult {
    double max_value = 0.0;
    double arg_r = 0.0;
    double arg_theta = 0.0;
    double arg_psi = 0.0;
    bool pass = false;  // max_value < u_psi_max
};

// Grid maximum of |psi_d_dot + u_lyap| over r >= tau R, all headings and
// polar angles, for a POI moving along +x.
BetaTuneResult tune_beta_grid(double v, double v_g, double R, double R_dot, double beta,
                              double tau_inner, double u_psi_max, const BetaGrid& grid = {});

}  // namespace occorbit
