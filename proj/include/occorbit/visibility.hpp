#pragma once

#include <cstdint>
#include <vector>

#include "occorbit/env.hpp"

namespace occorbit {

inline constexpr double kDefaultCell = 2.0;
inline constexpr int kDefaultRays = 720;

// Line of sight from ground target g to airspace point rho: within range,
// inside the open band (h_building, h_feasible), and not blocked by any
// prism. Grazing contact with a prism counts as blocked.
bool los_visible(const Environment& env, const Vec2& g, const Vec3& rho, double d_max);

// Voxelized visibility volume on a world-aligned lattice. Cell (i, j, k)
// spans [(lattice_x + i) c, (lattice_x + i + 1) c) and likewise in y, z.
struct VisibilityVolumeGrid {
    Vec2 target;
    double cell = kDefaultCell;
    std::int64_t lattice_x = 0;
    std::int64_t lattice_y = 0;
    std::int64_t lattice_z = 0;
    std::int64_t nx = 0;
    std::int64_t ny = 0;
    std::int64_t nz = 0;
    std::vector<std::uint8_t> occupancy;  // x fastest, then y, then z

    Vec2 origin() const {
        return {static_cast<double>(lattice_x) * cell, static_cast<double>(lattice_y) * cell};
    }
    double base_altitude() const { return static_cast<double>(lattice_z) * cell; }
    Vec3 cell_center(std::int64_t i, std::int64_t j, std::int64_t k) const;
    std::size_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return static_cast<std::size_t>((k * ny + j) * nx + i);
    }
    bool visible(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return occupancy[index(i, j, k)] != 0;
    }
    // Occupancy by world lattice index; false outside the grid's extent.
    bool visible_at_lattice(std::int64_t gx, std::int64_t gy, std::int64_t gz) const;
    std::size_t visible_count() const;
};

VisibilityVolumeGrid build_vv_grid(const Environment& env, const Vec2& g, double d_max,
                                   double cell = kDefaultCell);

// Volume (m^3) of the symmetric difference of two grids on a shared lattice.
double vv_xor_volume(const VisibilityVolumeGrid& a, const VisibilityVolumeGrid& b);

// Supremum horizontal distance along heading theta at altitude h that keeps
// line of sight to g.
double ray_visibility_limit(const Environment& env, const Vec2& g, double theta, double h,
                            double d_max);

double max_inscribed_radius(const Environment& env, const Vec2& g, double h, double d_max,
                            int n_rays = kDefaultRays);

double max_inscribed_radius_bisection(const Environment& env, const Vec2& g, double h,
                                      double d_max, double tol, int n_rays = kDefaultRays);

struct DiscretizationParams {
    double d_cutoff = 0.0;         // m^3
    double initial_spacing = 20.0;  // m
    double min_spacing = 1.0;       // m
    double cell = kDefaultCell;     // m
    double d_max = 100.0;           // m
};

struct DiscretizationResult {
    std::vector<Vec2> points;
    std::vector<double> arc;      // arc length along the POI path
    std::vector<double> times;
    std::vector<double> metrics;  // XOR volume between point i and i+1
    std::vector<bool> floor_hit;  // spacing floor stopped refinement of interval i

    bool any_floor_hit() const;
};

DiscretizationResult adaptive_discretize(const Environment& env, const PoiTrajectory& traj,
                                         const DiscretizationParams& params);

}  // namespace occorbit
