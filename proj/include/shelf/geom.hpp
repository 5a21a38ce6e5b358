#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace shelf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0, y = 0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

inline double normalize_yaw(double yaw) {
    double y = std::fmod(yaw, 2.0 * kPi);
    if (y < 0) y += 2.0 * kPi;
    return y;
}

// Upright pose: x,y,z of the bottom-center point, yaw about the vertical axis.
struct Pose {
    double x = 0, y = 0, z = 0, yaw = 0;
    bool operator==(const Pose&) const = default;
};

enum class ShapeKind { Cylinder, Box };

// Cylinder: {radius, height}; Box: {dx, dy, dz} full extents, yaw-rotated.
struct Shape {
    ShapeKind kind = ShapeKind::Cylinder;
    double a = 0, b = 0, c = 0;

    static Shape cylinder(double radius, double height) {
        return {ShapeKind::Cylinder, radius, height, 0};
    }
    static Shape box(double dx, double dy, double dz) { return {ShapeKind::Box, dx, dy, dz}; }

    double height() const { return kind == ShapeKind::Cylinder ? b : c; }
    double radius() const { return a; }
    // Radius of the circumscribed circle of the footprint.
    double circum_radius() const {
        return kind == ShapeKind::Cylinder ? a : 0.5 * std::sqrt(a * a + b * b);
    }
    double footprint_area() const {
        return kind == ShapeKind::Cylinder ? kPi * a * a : a * b;
    }
    bool operator==(const Shape&) const = default;
};

struct Aabb {
    Vec3 min, max;
    bool contains(const Vec3& p, double eps = 0.0) const {
        return p.x >= min.x - eps && p.x <= max.x + eps && p.y >= min.y - eps &&
               p.y <= max.y + eps && p.z >= min.z - eps && p.z <= max.z + eps;
    }
    Vec3 extent() const { return max - min; }
};

// ---------------------------------------------------------------------------
// 2D footprint primitives. All shapes here are vertical prisms, so 3D
// separation decomposes into footprint separation and z-interval gap.
// ---------------------------------------------------------------------------

struct OrientedRect {
    Vec2 center;
    double hx = 0, hy = 0;  // half extents
    double yaw = 0;

    Vec2 to_local(Vec2 p) const {
        const double c = std::cos(yaw), s = std::sin(yaw);
        const Vec2 d = p - center;
        return {c * d.x + s * d.y, -s * d.x + c * d.y};
    }
    std::array<Vec2, 4> corners() const {
        const double c = std::cos(yaw), s = std::sin(yaw);
        const Vec2 ex{c * hx, s * hx}, ey{-s * hy, c * hy};
        return {center + ex + ey, center - ex + ey, center - ex - ey, center + ex - ey};
    }
};

// Signed distance from point to rect boundary: negative inside.
inline double point_rect_distance(Vec2 p, const OrientedRect& r) {
    const Vec2 q = r.to_local(p);
    const double ox = std::abs(q.x) - r.hx;
    const double oy = std::abs(q.y) - r.hy;
    if (ox > 0 || oy > 0) {
        const double px = std::max(ox, 0.0), py = std::max(oy, 0.0);
        return std::sqrt(px * px + py * py);
    }
    return std::max(ox, oy);
}

inline double segment_point_distance(Vec2 a, Vec2 b, Vec2 p) {
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

// Signed separation between two oriented rects: positive = gap between
// boundaries, negative = SAT penetration depth.
double rect_rect_distance(const OrientedRect& a, const OrientedRect& b);

// Signed separation between disk footprint and rect footprint.
inline double disk_rect_distance(Vec2 center, double radius, const OrientedRect& r) {
    return point_rect_distance(center, r) - radius;
}

inline OrientedRect footprint_rect(const Shape& s, const Pose& p) {
    return {{p.x, p.y}, 0.5 * s.a, 0.5 * s.b, p.yaw};
}

// Signed separation between the footprints of two posed shapes.
double footprint_distance(const Shape& sa, const Pose& pa, const Shape& sb, const Pose& pb);

// Signed 3D separation between two upright posed shapes; negative when
// interpenetrating (magnitude is an underestimate of penetration depth).
double shape_distance(const Shape& sa, const Pose& pa, const Shape& sb, const Pose& pb);

// Signed distance from a 2D point to the shape footprint (negative inside).
inline double point_footprint_distance(Vec2 q, const Shape& s, const Pose& p) {
    if (s.kind == ShapeKind::Cylinder) return (q - Vec2{p.x, p.y}).norm() - s.a;
    return point_rect_distance(q, footprint_rect(s, p));
}

inline bool point_in_shape(const Vec3& q, const Shape& s, const Pose& p) {
    if (q.z < p.z || q.z > p.z + s.height()) return false;
    return point_footprint_distance({q.x, q.y}, s, p) <= 0.0;
}

// ---------------------------------------------------------------------------
// Scalar ray casting (reference path; SIMD batch variants live in kernels).
// Returns the smallest t > eps along origin + t*dir hitting the surface,
// or +inf. dir need not be unit length (t is in units of |dir|).
// ---------------------------------------------------------------------------

double ray_cylinder(const Vec3& origin, const Vec3& dir, const Pose& pose, double radius,
                    double height);
double ray_box(const Vec3& origin, const Vec3& dir, const Pose& pose, double dx, double dy,
               double dz);

inline double ray_shape(const Vec3& origin, const Vec3& dir, const Shape& s, const Pose& p) {
    if (s.kind == ShapeKind::Cylinder) return ray_cylinder(origin, dir, p, s.a, s.b);
    return ray_box(origin, dir, p, s.a, s.b, s.c);
}

// Ray vs axis-aligned box: entry/exit parameters, or false when missed.
bool ray_aabb(const Vec3& origin, const Vec3& dir, const Aabb& box, double& t_entry,
              double& t_exit);

// ---------------------------------------------------------------------------
// Vertical-axis oriented box (the arm corridor volume).
// ---------------------------------------------------------------------------

struct UprightObb {
    Vec2 center;        // horizontal center
    double hx = 0, hy = 0;  // horizontal half extents (x along yaw direction)
    double yaw = 0;
    double z_lo = 0, z_hi = 0;

    OrientedRect rect() const { return {center, hx, hy, yaw}; }
    bool contains(const Vec3& p, double inflate = 0.0) const {
        if (p.z < z_lo - inflate || p.z > z_hi + inflate) return false;
        return point_rect_distance({p.x, p.y}, rect()) <= inflate;
    }
    // Signed separation against an upright shape.
    double distance_to(const Shape& s, const Pose& p) const;
};

inline double interval_gap(double a_lo, double a_hi, double b_lo, double b_hi) {
    return std::max(std::max(b_lo - a_hi, a_lo - b_hi), 0.0);
}

inline double interval_overlap(double a_lo, double a_hi, double b_lo, double b_hi) {
    return std::min(a_hi, b_hi) - std::max(a_lo, b_lo);
}

}  // namespace shelf
