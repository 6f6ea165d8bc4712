#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace occorbit {

// Absolute tolerance for point coincidence, meters.
inline constexpr double kGeomEps = 1e-9;

struct Vec2 {
    double x = 0.0;  // east
    double y = 0.0;  // north

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, y); }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }
inline bool coincident(const Vec2& a, const Vec2& b) { return distance(a, b) <= kGeomEps; }
inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;  // up

    Vec2 ground() const { return {x, y}; }
};

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::remainder(a, two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

struct Polygon {
    std::vector<Vec2> vertices;
};

enum class PointLocation { Outside, Boundary, Inside };

double signed_area(const Polygon& poly);

// Simple means no two non-adjacent edges touch and no adjacent edges fold back.
bool is_simple(const Polygon& poly);

// Distinguishes strict interior from the boundary band of width kGeomEps.
PointLocation locate_point(const Polygon& poly, const Vec2& p);

// Closed-polygon membership: boundary points count as inside.
bool point_in_polygon(const Polygon& poly, const Vec2& p);

// Smallest s in [0,1] with p0 + s (p1 - p0) in the closed polygon, if any.
std::optional<double> segment_polygon_entry(const Vec2& p0, const Vec2& p1, const Polygon& poly);

// Intersection of closed segments [a0,a1] and [b0,b1]; returns the smallest
// parameter along a where they meet.
std::optional<double> segment_intersection_param(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                                                 const Vec2& b1);

// True iff the open segments cross at a single point interior to both.
bool segments_cross_properly(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);

}  // namespace occorbit
