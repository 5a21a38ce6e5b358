#include "shelf/geom.hpp"

namespace shelf {

namespace {

// SAT penetration depth for two convex quads known to overlap.
double sat_penetration(const OrientedRect& a, const OrientedRect& b) {
    double depth = kInf;
    const OrientedRect* rects[2] = {&a, &b};
    for (const OrientedRect* r : rects) {
        const double c = std::cos(r->yaw), s = std::sin(r->yaw);
        const Vec2 axes[2] = {{c, s}, {-s, c}};
        for (const Vec2& axis : axes) {
            auto project = [&axis](const OrientedRect& rr, double& lo, double& hi) {
                lo = kInf;
                hi = -kInf;
                for (const Vec2& p : rr.corners()) {
                    const double v = p.dot(axis);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            };
            double alo, ahi, blo, bhi;
            project(a, alo, ahi);
            project(b, blo, bhi);
            const double overlap = interval_overlap(alo, ahi, blo, bhi);
            if (overlap <= 0) return 0.0;  // separated on this axis
            depth = std::min(depth, overlap);
        }
    }
    return depth;
}

}  // namespace

double rect_rect_distance(const OrientedRect& a, const OrientedRect& b) {
    // Overlap test via SAT (exact for rects).
    const double pen = sat_penetration(a, b);
    if (pen > 0.0) return -pen;
    // Disjoint: boundary distance = min over vertex-to-edge pairs.
    const auto ca = a.corners(), cb = b.corners();
    double best = kInf;
    for (int i = 0; i < 4; ++i) {
        const Vec2 a0 = ca[i], a1 = ca[(i + 1) % 4];
        const Vec2 b0 = cb[i], b1 = cb[(i + 1) % 4];
        for (int j = 0; j < 4; ++j) {
            best = std::min(best, segment_point_distance(a0, a1, cb[j]));
            best = std::min(best, segment_point_distance(b0, b1, ca[j]));
        }
    }
    return best;
}

double footprint_distance(const Shape& sa, const Pose& pa, const Shape& sb, const Pose& pb) {
    const Vec2 a{pa.x, pa.y}, b{pb.x, pb.y};
    if (sa.kind == ShapeKind::Cylinder && sb.kind == ShapeKind::Cylinder)
        return (a - b).norm() - sa.a - sb.a;
    if (sa.kind == ShapeKind::Cylinder) return disk_rect_distance(a, sa.a, footprint_rect(sb, pb));
    if (sb.kind == ShapeKind::Cylinder) return disk_rect_distance(b, sb.a, footprint_rect(sa, pa));
    return rect_rect_distance(footprint_rect(sa, pa), footprint_rect(sb, pb));
}

double shape_distance(const Shape& sa, const Pose& pa, const Shape& sb, const Pose& pb) {
    const double d2 = footprint_distance(sa, pa, sb, pb);
    const double dz = interval_gap(pa.z, pa.z + sa.height(), pb.z, pb.z + sb.height());
    if (d2 <= 0.0 && dz <= 0.0) {
        const double zpen = -interval_overlap(pa.z, pa.z + sa.height(), pb.z, pb.z + sb.height());
        return std::max(d2, zpen);  // least-negative axis bounds the push-out
    }
    const double dh = std::max(d2, 0.0);
    return std::sqrt(dh * dh + dz * dz);
}

double ray_cylinder(const Vec3& origin, const Vec3& dir, const Pose& pose, double radius,
                    double height) {
    constexpr double kMinT = 1e-12;
    const double ox = origin.x - pose.x, oy = origin.y - pose.y;
    const double z0 = pose.z, z1 = pose.z + height;
    double best = kInf;

    // Lateral surface: quadratic in the horizontal plane.
    const double a = dir.x * dir.x + dir.y * dir.y;
    if (a > 0) {
        const double bq = ox * dir.x + oy * dir.y;
        const double cq = ox * ox + oy * oy - radius * radius;
        const double disc = bq * bq - a * cq;
        if (disc >= 0) {
            const double sq = std::sqrt(disc);
            for (const double t : {(-bq - sq) / a, (-bq + sq) / a}) {
                if (t > kMinT && t < best) {
                    const double z = origin.z + t * dir.z;
                    if (z >= z0 && z <= z1) best = t;
                }
            }
        }
    }
    // Caps.
    if (dir.z != 0.0) {
        for (const double zc : {z0, z1}) {
            const double t = (zc - origin.z) / dir.z;
            if (t > kMinT && t < best) {
                const double hx = ox + t * dir.x, hy = oy + t * dir.y;
                if (hx * hx + hy * hy <= radius * radius) best = t;
            }
        }
    }
    return best;
}

double ray_box(const Vec3& origin, const Vec3& dir, const Pose& pose, double dx, double dy,
               double dz) {
    constexpr double kMinT = 1e-12;
    const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
    // Into the box frame (origin at bottom-center).
    const double wx = origin.x - pose.x, wy = origin.y - pose.y;
    const double lox = c * wx + s * wy, loy = -s * wx + c * wy, loz = origin.z - pose.z;
    const double ldx = c * dir.x + s * dir.y, ldy = -s * dir.x + c * dir.y, ldz = dir.z;

    const double o[3] = {lox, loy, loz};
    const double d[3] = {ldx, ldy, ldz};
    const double lo[3] = {-0.5 * dx, -0.5 * dy, 0.0};
    const double hi[3] = {0.5 * dx, 0.5 * dy, dz};
    double tmin = -kInf, tmax = kInf;
    for (int i = 0; i < 3; ++i) {
        if (d[i] == 0.0) {
            if (o[i] < lo[i] || o[i] > hi[i]) return kInf;
            continue;
        }
        double t0 = (lo[i] - o[i]) / d[i];
        double t1 = (hi[i] - o[i]) / d[i];
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
        if (tmin > tmax) return kInf;
    }
    if (tmax < kMinT) return kInf;
    return tmin > kMinT ? tmin : tmax;
}

bool ray_aabb(const Vec3& origin, const Vec3& dir, const Aabb& box, double& t_entry,
              double& t_exit) {
    const double o[3] = {origin.x, origin.y, origin.z};
    const double d[3] = {dir.x, dir.y, dir.z};
    const double lo[3] = {box.min.x, box.min.y, box.min.z};
    const double hi[3] = {box.max.x, box.max.y, box.max.z};
    double tmin = -kInf, tmax = kInf;
    for (int i = 0; i < 3; ++i) {
        if (d[i] == 0.0) {
            if (o[i] < lo[i] || o[i] > hi[i]) return false;
            continue;
        }
        double t0 = (lo[i] - o[i]) / d[i];
        double t1 = (hi[i] - o[i]) / d[i];
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
        if (tmin > tmax) return false;
    }
    t_entry = tmin;
    t_exit = tmax;
    return tmax > 0;
}

double UprightObb::distance_to(const Shape& s, const Pose& p) const {
    double d2;
    if (s.kind == ShapeKind::Cylinder) {
        d2 = disk_rect_distance({p.x, p.y}, s.a, rect());
    } else {
        d2 = rect_rect_distance(rect(), footprint_rect(s, p));
    }
    const double dz = interval_gap(z_lo, z_hi, p.z, p.z + s.height());
    if (d2 <= 0.0 && dz <= 0.0) {
        const double zpen = -interval_overlap(z_lo, z_hi, p.z, p.z + s.height());
        return std::max(d2, zpen);
    }
    const double dh = std::max(d2, 0.0);
    return std::sqrt(dh * dh + dz * dz);
}

}  // namespace shelf
