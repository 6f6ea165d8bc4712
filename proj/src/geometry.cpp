#include "occorbit/geometry.hpp"

#include <algorithm>
#include <limits>

namespace occorbit {

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

int orientation_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Vec2 ab = b - a;
    const double len = ab.norm();
    const double area2 = cross(ab, c - a);
    // Height of c above line ab compared against the coincidence tolerance.
    if (len == 0.0 || std::abs(area2) <= kGeomEps * len) return 0;
    return area2 > 0.0 ? 1 : -1;
}

}  // namespace

double signed_area(const Polygon& poly) {
    const auto& v = poly.vertices;
    double twice = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        twice += cross(v[i], v[(i + 1) % v.size()]);
    }
    return 0.5 * twice;
}

std::optional<double> segment_intersection_param(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                                                 const Vec2& b1) {
    const Vec2 d = a1 - a0;
    const Vec2 e = b1 - b0;
    const double dl = d.norm();
    const double el = e.norm();
    if (dl == 0.0) {
        if (point_segment_distance(a0, b0, b1) <= kGeomEps) return 0.0;
        return std::nullopt;
    }
    const Vec2 w = b0 - a0;
    const double denom = cross(d, e);

    if (el == 0.0 || std::abs(denom) <= 1e-15 * dl * el) {
        // Parallel (or degenerate b): only a collinear overlap can meet.
        if (std::abs(cross(w, d)) > kGeomEps * dl) return std::nullopt;
        const double t0 = dot(b0 - a0, d) / (dl * dl);
        const double t1 = dot(b1 - a0, d) / (dl * dl);
        const double slack = kGeomEps / dl;
        const double lo = std::max(0.0, std::min(t0, t1));
        const double hi = std::min(1.0, std::max(t0, t1));
        if (lo > hi + slack) return std::nullopt;
        return std::clamp(lo, 0.0, 1.0);
    }

    const double t = cross(w, e) / denom;
    const double u = cross(w, d) / denom;
    const double ts = kGeomEps / dl;
    const double us = kGeomEps / el;
    if (t < -ts || t > 1.0 + ts || u < -us || u > 1.0 + us) return std::nullopt;
    return std::clamp(t, 0.0, 1.0);
}

bool segments_cross_properly(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
    const int o1 = orientation_sign(a0, a1, b0);
    const int o2 = orientation_sign(a0, a1, b1);
    const int o3 = orientation_sign(b0, b1, a0);
    const int o4 = orientation_sign(b0, b1, a1);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

bool is_simple(const Polygon& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if (coincident(v[i], v[(i + 1) % n])) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a0 = v[i];
        const Vec2& a1 = v[(i + 1) % n];
        const Vec2& a2 = v[(i + 2) % n];
        // Adjacent edges must not fold back onto each other.
        const Vec2 e0 = a1 - a0;
        const Vec2 e1 = a2 - a1;
        if (std::abs(cross(e0, e1)) <= kGeomEps * e0.norm() && dot(e0, e1) < 0.0) return false;
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
            if (segment_intersection_param(a0, a1, v[j], v[(j + 1) % n])) return false;
        }
    }
    return true;
}

PointLocation locate_point(const Polygon& poly, const Vec2& p) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (point_segment_distance(p, v[i], v[(i + 1) % n]) <= kGeomEps) {
            return PointLocation::Boundary;
        }
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = v[i];
        const Vec2& b = v[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside ? PointLocation::Inside : PointLocation::Outside;
}

bool point_in_polygon(const Polygon& poly, const Vec2& p) {
    return locate_point(poly, p) != PointLocation::Outside;
}

std::optional<double> segment_polygon_entry(const Vec2& p0, const Vec2& p1, const Polygon& poly) {
    if (point_in_polygon(poly, p0)) return 0.0;
    const auto& v = poly.vertices;
    std::optional<double> best;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto s = segment_intersection_param(p0, p1, v[i], v[(i + 1) % v.size()]);
        if (s && (!best || *s < *best)) best = s;
    }
    return best;
}

}  // namespace occorbit
