#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "occorbit/guidance.hpp"
#include "occorbit/sim.hpp"
#include "support.hpp"

using namespace occorbit;
using testsupport::straight_schedule;

namespace {

constexpr double kPi = std::numbers::pi;

// Moves a particle with the field for duration h using RK4 substeps.
Vec2 flow(const OrbitSchedule& s, double beta, Vec2 xi, double t, double h, int steps) {
    const double dt = h / steps;
    for (int k = 0; k < steps; ++k) {
        auto rate = [&](double tt, const std::array<double, 2>& x) {
            const FieldSample f = vector_field({x[0], x[1]}, tt, s, beta);
            return std::array<double, 2>{f.u.x, f.u.y};
        };
        const auto next = rk4_step<2>({xi.x, xi.y}, t + k * dt, dt, rate);
        xi = {next[0], next[1]};
    }
    return xi;
}

}  // namespace

TEST_CASE("attraction level a1 and its time derivative") {
    OrbitSample o;
    o.g = {1, 2};
    o.R = 50;
    CHECK(attraction_level_a1({51, 2}, o, 0.1) == doctest::Approx(0.0));
    CHECK(attraction_level_a1({61, 2}, o, 0.1) == doctest::Approx(kPi / 4));
    CHECK(attraction_level_a1({1e9, 2}, o, 0.1) == doctest::Approx(kPi / 2));
    CHECK(attraction_level_a1_dt({40, 30}, o, 0.1) == 0.0);

    o.R_dot = 1;
    CHECK(attraction_level_a1_dt({51, 2}, o, 0.1) == doctest::Approx(-0.1));

    SUBCASE("matches a central difference in time") {
        std::mt19937 rng(2);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int n = 0; n < 3; ++n) {
            const OrbitSchedule s = straight_schedule(20, 5, u(rng) * kPi, 80, 3 * u(rng), 20, Direction::CCW);
            const Vec2 xi{100 * u(rng), 100 * u(rng)};
            const double beta = 0.03;
            const double t = 10, h = 1e-4;
            const double fd = (attraction_level_a1(xi, orbit_sample(s, t + h), beta) -
                               attraction_level_a1(xi, orbit_sample(s, t - h), beta)) / (2 * h);
            CHECK(std::abs(attraction_level_a1_dt(xi, orbit_sample(s, t), beta) - fd) < 1e-6);
        }
    }

    o.g = {0, 0};
    CHECK_THROWS_AS(attraction_level_a1_dt({0, 0}, o, 0.1), SingularityError);
}

TEST_CASE("phi_prime") {
    CHECK(phi_prime(20, 5, 1, 0.025, 80, 80) == 0.0);
    CHECK(phi_prime(20, 5, 1, 0.025, 1e12, 80) == doctest::Approx(14));
    CHECK_THROWS_AS(phi_prime(20, 5, 15, 0.025, 90, 80), std::invalid_argument);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> r(0, 1000);
    for (int n = 0; n < 200; ++n) CHECK(std::abs(phi_prime(20, 5, -4, 0.05, r(rng), 100)) < 20);
}

TEST_CASE("vector_field") {
    SUBCASE("on a static orbit the field is pure circulation") {
        const OrbitSchedule s = straight_schedule(10, 0, 0, 40, 0, 10, Direction::CCW);
        const FieldSample f = vector_field({0, 40}, 1.0, s, 0.05);
        CHECK(f.u.x == doctest::Approx(-10));
        CHECK(f.u.y == doctest::Approx(0).epsilon(1e-12));
        CHECK(f.u_r == doctest::Approx(0));
        CHECK(f.psi_d == doctest::Approx(kPi));
        const OrbitSchedule cw = straight_schedule(10, 0, 0, 40, 0, 10, Direction::CW);
        CHECK(vector_field({0, 40}, 1.0, cw, 0.05).u.x == doctest::Approx(10));
    }

    SUBCASE("constant magnitude, radial bound and circulation sign") {
        std::mt19937 rng(12);
        std::uniform_real_distribution<double> u(-1, 1);
        std::uniform_real_distribution<double> t01(0, 1);
        for (Direction d : {Direction::CCW, Direction::CW}) {
            const OrbitSchedule s = straight_schedule(20, 5, 0.4, 90, 2.5, 30, d);
            for (int n = 0; n < 1000; ++n) {
                const double t = 30 * t01(rng);
                const Vec2 xi = orbit_sample(s, t).g + Vec2{400 * u(rng), 400 * u(rng)};
                const FieldSample f = vector_field(xi, t, s, 0.025);
                CHECK(std::abs(f.u.norm() - 20) < 1e-9);
                CHECK(std::abs(f.u_r) < 20);
                CHECK(f.psi_d == doctest::Approx(std::atan2(f.u.y, f.u.x)));
                const OrbitSample o = orbit_sample(s, t);
                const double g_t = dot(o.g_dot, tangential_unit(f.theta));
                if (std::abs(f.u_theta) > std::abs(g_t)) {
                    const double theta_dot = (f.u_theta - g_t) / f.r;
                    CHECK(theta_dot * direction_sign(d) > 0);
                }
            }
        }
    }

    SUBCASE("a particle on the moving orbit stays on it") {
        for (Direction d : {Direction::CCW, Direction::CW}) {
            const OrbitSchedule s = straight_schedule(20, 5, -1.1, 100, -4, 15, d);
            Vec2 xi = orbit_sample(s, 0).g + radial_unit(2.0) * 100;
            double worst = 0;
            for (int k = 0; k < 15000; ++k) {
                xi = flow(s, 0.025, xi, k * 1e-3, 1e-3, 1);
                const OrbitSample o = orbit_sample(s, (k + 1) * 1e-3);
                worst = std::max(worst, std::abs(distance(xi, o.g) - o.R));
            }
            CHECK(worst < 1e-4);
        }
    }

    SUBCASE("singularity at the POI") {
        const OrbitSchedule s = straight_schedule(10, 0, 0, 40, 0, 10, Direction::CCW);
        CHECK_THROWS_AS(vector_field({0, 0}, 1.0, s, 0.05), SingularityError);
    }

    SUBCASE("convergence from random starts") {
        std::mt19937 rng(21);
        std::uniform_real_distribution<double> fr(0.2, 3.0);
        std::uniform_real_distribution<double> ang(-kPi, kPi);
        const double R = 100, v = 20;
        const double limit = 5 * (R / v) * kPi;
        const OrbitSchedule s = straight_schedule(v, 5, 0.3, R, 0, 120, Direction::CCW);
        for (int n = 0; n < 50; ++n) {
            Vec2 xi = radial_unit(ang(rng)) * (fr(rng) * R);
            double entered = -1;
            bool stayed = true;
            const double dt = 0.01;
            for (int k = 0; k < 12000; ++k) {
                const double t = k * dt;
                const OrbitSample o = orbit_sample(s, t);
                const double err = std::abs(distance(xi, o.g) - o.R);
                if (entered < 0 && err < 0.01 * R) entered = t;
                if (entered >= 0 && err >= 0.01 * R) stayed = false;
                xi = flow(s, 0.025, xi, t, dt, 1);
            }
            CHECK(entered >= 0);
            CHECK(entered <= limit);
            CHECK(stayed);
        }
    }
}

TEST_CASE("psi_d_dot") {
    const OrbitSchedule s = straight_schedule(10, 0, 0, 40, 0, 10, Direction::CCW);
    CHECK(psi_d_dot({40, 0}, 1.0, s, 0.05) == doctest::Approx(10.0 / 40));
    const OrbitSchedule cw = straight_schedule(10, 0, 0, 40, 0, 10, Direction::CW);
    CHECK(psi_d_dot({40, 0}, 1.0, cw, 0.05) == doctest::Approx(-10.0 / 40));

    SUBCASE("matches the heading change along the flow") {
        const OrbitSchedule m = straight_schedule(20, 5, 0.9, 90, 2, 30, Direction::CCW);
        const Vec2 starts[] = {{150, 40}, {-30, 60}, {20, -170}};
        for (const Vec2& p : starts) {
            const double t = 10, h = 1e-3;
            const Vec2 xi = orbit_sample(m, t).g + p;
            const Vec2 fwd = flow(m, 0.025, xi, t, h, 20);
            const Vec2 bwd = flow(m, 0.025, xi, t, -h, 20);
            const double fd = wrap_angle(vector_field(fwd, t + h, m, 0.025).psi_d -
                                         vector_field(bwd, t - h, m, 0.025).psi_d) / (2 * h);
            CHECK(std::abs(psi_d_dot(xi, t, m, 0.025) - fd) < 1e-5);
        }
    }

    SUBCASE("turn demand is small far outside and grows toward the POI") {
        auto max_over_theta = [&](double r) {
            double best = 0;
            for (int k = 0; k < 360; ++k) {
                const Vec2 xi = radial_unit(k * kPi / 180) * r;
                best = std::max(best, std::abs(psi_d_dot(xi, 1.0, s, 0.05)));
            }
            return best;
        };
        const double far = max_over_theta(5 * 40);
        const double on = max_over_theta(40);
        const double near = max_over_theta(0.2 * 40);
        CHECK(far < 0.5 * on);
        CHECK(near > 2 * on);
    }
}
