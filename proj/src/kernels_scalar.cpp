#include <algorithm>
#include <cmath>
#include <limits>

#include "shelf/kernels.hpp"

// Reference kernels. Bodies are branch-light and mirror the AVX2 lane logic
// so the two variants stay bit-identical.

namespace shelf::kernels {
namespace {

constexpr double kMinT = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void ray_cylinder_min_scalar(RayOrigin o, const double* dx, const double* dy, const double* dz,
                             size_t n, CylinderParams cyl, double* t_io, int32_t* id_io,
                             int32_t id) {
    const double ox = o.x - cyl.cx;
    const double oy = o.y - cyl.cy;
    const double oz = o.z;
    const double r2 = cyl.radius * cyl.radius;
    const double cq = ox * ox + oy * oy - r2;
    for (size_t i = 0; i < n; ++i) {
        const double a = dx[i] * dx[i] + dy[i] * dy[i];
        const double b = ox * dx[i] + oy * dy[i];
        const double disc = b * b - a * cq;
        double best = t_io[i];
        if (disc >= 0.0 && a > 0.0) {
            const double sq = std::sqrt(disc);
            const double t1 = (-b - sq) / a;
            const double t2 = (-b + sq) / a;
            const double z1 = oz + t1 * dz[i];
            const double z2 = oz + t2 * dz[i];
            if (t1 > kMinT && z1 >= cyl.z0 && z1 <= cyl.z1 && t1 < best) best = t1;
            if (t2 > kMinT && z2 >= cyl.z0 && z2 <= cyl.z1 && t2 < best) best = t2;
        }
        // Caps; dz == 0 yields non-finite t which fails every compare.
        const double inv_dz = 1.0 / dz[i];
        const double tb = (cyl.z0 - oz) * inv_dz;
        const double tt = (cyl.z1 - oz) * inv_dz;
        const double hbx = ox + tb * dx[i], hby = oy + tb * dy[i];
        const double htx = ox + tt * dx[i], hty = oy + tt * dy[i];
        if (tb > kMinT && hbx * hbx + hby * hby <= r2 && tb < best) best = tb;
        if (tt > kMinT && htx * htx + hty * hty <= r2 && tt < best) best = tt;
        if (best < t_io[i]) {
            t_io[i] = best;
            id_io[i] = id;
        }
    }
}

void ray_box_min_scalar(RayOrigin o, const double* dx, const double* dy, const double* dz,
                        size_t n, BoxParams box, double* t_io, int32_t* id_io, int32_t id) {
    const double c = box.cos_yaw, s = box.sin_yaw;
    const double wx = o.x - box.cx, wy = o.y - box.cy;
    const double lox = c * wx + s * wy;
    const double loy = -s * wx + c * wy;
    const double loz = o.z - box.z0;
    for (size_t i = 0; i < n; ++i) {
        const double ldx = c * dx[i] + s * dy[i];
        const double ldy = -s * dx[i] + c * dy[i];
        const double ldz = dz[i];

        const double ix = 1.0 / ldx, iy = 1.0 / ldy, iz = 1.0 / ldz;
        const double tx0 = (-box.hx - lox) * ix, tx1 = (box.hx - lox) * ix;
        const double ty0 = (-box.hy - loy) * iy, ty1 = (box.hy - loy) * iy;
        const double tz0 = (0.0 - loz) * iz, tz1 = (box.height - loz) * iz;
        const double tmin = std::max(std::max(std::min(tx0, tx1), std::min(ty0, ty1)),
                                     std::min(tz0, tz1));
        const double tmax = std::min(std::min(std::max(tx0, tx1), std::max(ty0, ty1)),
                                     std::max(tz0, tz1));
        const double t = tmin > kMinT ? tmin : tmax;
        if (tmax >= tmin && tmax > kMinT && t < t_io[i]) {
            t_io[i] = t;
            id_io[i] = id;
        }
    }
}

bool points_in_obb_any_scalar(const double* px, const double* py, const double* pz, size_t n,
                              ObbParams obb, double inflate) {
    const double c = obb.cos_yaw, s = obb.sin_yaw;
    for (size_t i = 0; i < n; ++i) {
        if (pz[i] < obb.z_lo - inflate || pz[i] > obb.z_hi + inflate) continue;
        const double wx = px[i] - obb.cx, wy = py[i] - obb.cy;
        const double qx = c * wx + s * wy;
        const double qy = -s * wx + c * wy;
        const double ox = std::max(std::abs(qx) - obb.hx, 0.0);
        const double oy = std::max(std::abs(qy) - obb.hy, 0.0);
        if (ox * ox + oy * oy <= inflate * inflate) return true;
    }
    return false;
}

bool row_overlap_any_scalar(const uint8_t* a, const uint8_t* b, size_t n) {
    uint8_t acc = 0;
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc |= static_cast<uint8_t>(a[i] & b[i]) | static_cast<uint8_t>(a[i + 1] & b[i + 1]) |
               static_cast<uint8_t>(a[i + 2] & b[i + 2]) |
               static_cast<uint8_t>(a[i + 3] & b[i + 3]) |
               static_cast<uint8_t>(a[i + 4] & b[i + 4]) |
               static_cast<uint8_t>(a[i + 5] & b[i + 5]) |
               static_cast<uint8_t>(a[i + 6] & b[i + 6]) |
               static_cast<uint8_t>(a[i + 7] & b[i + 7]);
        if (acc) return true;
    }
    for (; i < n; ++i)
        if (a[i] & b[i]) return true;
    return false;
}

}  // namespace

const Dispatch& scalar() {
    static const Dispatch table{"scalar", ray_cylinder_min_scalar, ray_box_min_scalar,
                                points_in_obb_any_scalar, row_overlap_any_scalar};
    return table;
}

}  // namespace shelf::kernels
