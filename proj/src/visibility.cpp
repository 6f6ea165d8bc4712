#include "occorbit/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "occorbit/parallel.hpp"

namespace occorbit {

namespace {

using Entries = std::vector<std::optional<double>>;

// First-entry parameter of the ground projection g -> p into every obstacle
// base. A vertical sight line (p above g) is blocked iff g is in the base.
Entries ground_entries(const Environment& env, const Vec2& g, const Vec2& p) {
    Entries out(env.obstacles.size());
    const bool vertical = coincident(g, p);
    for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
        const Polygon& base = env.obstacles[i].base;
        if (vertical) {
            if (point_in_polygon(base, g)) out[i] = 0.0;
        } else {
            out[i] = segment_polygon_entry(g, p, base);
        }
    }
    return out;
}

// The sight line sits at height s * z above the footprint point at parameter
// s, so the lowest crossing is at the first entry.
bool visible_given_entries(const Environment& env, const Entries& entries, double horiz2,
                           double z, double d_max, double h_building) {
    if (!(z > h_building && z < env.h_feasible)) return false;
    if (horiz2 + z * z > d_max * d_max) return false;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i] && *entries[i] <= env.obstacles[i].height / z) return false;
    }
    return true;
}

std::int64_t floor_div(double x, double cell) {
    return static_cast<std::int64_t>(std::floor(x / cell));
}

std::int64_t ceil_div(double x, double cell) {
    return static_cast<std::int64_t>(std::ceil(x / cell));
}

void check_band(const Environment& env, double h, double d_max) {
    if (!(h > env.h_building() && h < env.h_feasible)) {
        throw std::invalid_argument("slice altitude outside the feasible band");
    }
    if (!(d_max > h)) throw std::invalid_argument("d_max must exceed the slice altitude");
}

}  // namespace

bool los_visible(const Environment& env, const Vec2& g, const Vec3& rho, double d_max) {
    const Vec2 p = rho.ground();
    const Vec2 d = p - g;
    const double horiz2 = dot(d, d);
    if (!(rho.z > env.h_building() && rho.z < env.h_feasible)) return false;
    if (horiz2 + rho.z * rho.z > d_max * d_max) return false;
    return visible_given_entries(env, ground_entries(env, g, p), horiz2, rho.z, d_max,
                                 env.h_building());
}

Vec3 VisibilityVolumeGrid::cell_center(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return {(static_cast<double>(lattice_x + i) + 0.5) * cell,
            (static_cast<double>(lattice_y + j) + 0.5) * cell,
            (static_cast<double>(lattice_z + k) + 0.5) * cell};
}

bool VisibilityVolumeGrid::visible_at_lattice(std::int64_t gx, std::int64_t gy,
                                              std::int64_t gz) const {
    const std::int64_t i = gx - lattice_x;
    const std::int64_t j = gy - lattice_y;
    const std::int64_t k = gz - lattice_z;
    if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) return false;
    return visible(i, j, k);
}

std::size_t VisibilityVolumeGrid::visible_count() const {
    return static_cast<std::size_t>(std::count(occupancy.begin(), occupancy.end(), 1));
}

VisibilityVolumeGrid build_vv_grid(const Environment& env, const Vec2& g, double d_max,
                                   double cell) {
    if (!(cell > 0.0)) throw std::invalid_argument("cell size must be > 0");
    if (cell > d_max) throw std::invalid_argument("cell size larger than d_max");

    VisibilityVolumeGrid grid;
    grid.target = g;
    grid.cell = cell;
    const double h_building = env.h_building();
    const double top = std::min(env.h_feasible, d_max);
    grid.lattice_x = floor_div(g.x - d_max, cell);
    grid.lattice_y = floor_div(g.y - d_max, cell);
    grid.lattice_z = floor_div(h_building, cell);
    grid.nx = ceil_div(g.x + d_max, cell) - grid.lattice_x;
    grid.ny = ceil_div(g.y + d_max, cell) - grid.lattice_y;
    grid.nz = std::max<std::int64_t>(0, ceil_div(top, cell) - grid.lattice_z);
    grid.occupancy.assign(static_cast<std::size_t>(grid.nx * grid.ny * grid.nz), 0);

    const double d_max2 = d_max * d_max;
    parallel_for(static_cast<std::size_t>(grid.ny), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        for (std::int64_t i = 0; i < grid.nx; ++i) {
            const Vec3 c0 = grid.cell_center(i, j, 0);
            const Vec2 d = c0.ground() - g;
            const double horiz2 = dot(d, d);
            if (horiz2 > d_max2) continue;
            const Entries entries = ground_entries(env, g, c0.ground());
            for (std::int64_t k = 0; k < grid.nz; ++k) {
                const double z = grid.cell_center(i, j, k).z;
                if (visible_given_entries(env, entries, horiz2, z, d_max, h_building)) {
                    grid.occupancy[grid.index(i, j, k)] = 1;
                }
            }
        }
    });
    return grid;
}

double vv_xor_volume(const VisibilityVolumeGrid& a, const VisibilityVolumeGrid& b) {
    if (a.cell != b.cell) throw std::invalid_argument("visibility grids use different cell sizes");
    const std::int64_t x0 = std::min(a.lattice_x, b.lattice_x);
    const std::int64_t y0 = std::min(a.lattice_y, b.lattice_y);
    const std::int64_t z0 = std::min(a.lattice_z, b.lattice_z);
    const std::int64_t x1 = std::max(a.lattice_x + a.nx, b.lattice_x + b.nx);
    const std::int64_t y1 = std::max(a.lattice_y + a.ny, b.lattice_y + b.ny);
    const std::int64_t z1 = std::max(a.lattice_z + a.nz, b.lattice_z + b.nz);
    std::size_t differing = 0;
    for (std::int64_t z = z0; z < z1; ++z) {
        for (std::int64_t y = y0; y < y1; ++y) {
            for (std::int64_t x = x0; x < x1; ++x) {
                if (a.visible_at_lattice(x, y, z) != b.visible_at_lattice(x, y, z)) ++differing;
            }
        }
    }
    return static_cast<double>(differing) * a.cell * a.cell * a.cell;
}

double ray_visibility_limit(const Environment& env, const Vec2& g, double theta, double h,
                            double d_max) {
    check_band(env, h, d_max);
    const double range = std::sqrt(d_max * d_max - h * h);
    const Vec2 end = g + unit_from_angle(theta) * range;
    double limit = range;
    for (const auto& ob : env.obstacles) {
        const auto s = segment_polygon_entry(g, end, ob.base);
        if (!s) continue;
        limit = std::min(limit, *s * range * h / ob.height);
    }
    return limit;
}

double max_inscribed_radius(const Environment& env, const Vec2& g, double h, double d_max,
                            int n_rays) {
    if (n_rays < 8) throw std::invalid_argument("n_rays must be >= 8");
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_rays; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / n_rays;
        best = std::min(best, ray_visibility_limit(env, g, theta, h, d_max));
    }
    return best;
}

double max_inscribed_radius_bisection(const Environment& env, const Vec2& g, double h,
                                      double d_max, double tol, int n_rays) {
    if (!(tol > 0.0)) throw std::invalid_argument("bisection tolerance must be > 0");
    if (n_rays < 8) throw std::invalid_argument("n_rays must be >= 8");
    auto feasible = [&](double radius) {
        for (int k = 0; k < n_rays; ++k) {
            const double theta = 2.0 * std::numbers::pi * k / n_rays;
            const Vec2 p = g + unit_from_angle(theta) * radius;
            if (!los_visible(env, g, {p.x, p.y, h}, d_max)) return false;
        }
        return true;
    };
    double lo = 0.0;
    double hi = d_max;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

bool DiscretizationResult::any_floor_hit() const {
    return std::find(floor_hit.begin(), floor_hit.end(), true) != floor_hit.end();
}

namespace {

struct Refiner {
    const Environment& env;
    const PoiTrajectory& traj;
    const DiscretizationParams& params;
    DiscretizationResult& out;

    VisibilityVolumeGrid grid_at(double s) const {
        return build_vv_grid(env, traj.position_at_arc(s), params.d_max, params.cell);
    }

    void push_point(double s) {
        out.points.push_back(traj.position_at_arc(s));
        out.arc.push_back(s);
        out.times.push_back(traj.t0() + s / traj.speed());
    }

    // Appends everything after s_a up to and including s_b.
    void refine(double s_a, const VisibilityVolumeGrid& a, double s_b,
                const VisibilityVolumeGrid& b) {
        const double metric = vv_xor_volume(a, b);
        if (metric > params.d_cutoff) {
            if (s_b - s_a > params.min_spacing) {
                const double s_m = 0.5 * (s_a + s_b);
                const VisibilityVolumeGrid m = grid_at(s_m);
                refine(s_a, a, s_m, m);
                refine(s_m, m, s_b, b);
                return;
            }
            out.metrics.push_back(metric);
            out.floor_hit.push_back(true);
        } else {
            out.metrics.push_back(metric);
            out.floor_hit.push_back(false);
        }
        push_point(s_b);
    }
};

}  // namespace

DiscretizationResult adaptive_discretize(const Environment& env, const PoiTrajectory& traj,
                                         const DiscretizationParams& params) {
    if (!(params.min_spacing > 0.0 && params.min_spacing < params.initial_spacing)) {
        throw std::invalid_argument("require 0 < min_spacing < initial_spacing");
    }
    if (!(params.d_cutoff > 0.0)) throw std::invalid_argument("d_cutoff must be > 0");

    // Initial samples: every initial_spacing along each segment plus both ends.
    std::vector<double> initial{0.0};
    const auto& arc = traj.arc_lengths();
    for (std::size_t seg = 0; seg + 1 < arc.size(); ++seg) {
        for (double s = arc[seg] + params.initial_spacing; s < arc[seg + 1] - kGeomEps;
             s += params.initial_spacing) {
            initial.push_back(s);
        }
        initial.push_back(arc[seg + 1]);
    }

    std::vector<VisibilityVolumeGrid> grids(initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i) {
        grids[i] = build_vv_grid(env, traj.position_at_arc(initial[i]), params.d_max, params.cell);
    }

    DiscretizationResult out;
    Refiner refiner{env, traj, params, out};
    refiner.push_point(initial.front());
    for (std::size_t i = 0; i + 1 < initial.size(); ++i) {
        refiner.refine(initial[i], grids[i], initial[i + 1], grids[i + 1]);
    }
    return out;
}

}  // namespace occorbit
