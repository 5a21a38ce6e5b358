#pragma once

#include <array>
#include <cmath>

#include "shelf/geom.hpp"

namespace shelf {

struct Mat3 {
    // Row-major.
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                r.m[3 * i + j] = 0;
                for (int k = 0; k < 3; ++k) r.m[3 * i + j] += m[3 * i + k] * o.m[3 * k + j];
            }
        return r;
    }
    bool operator==(const Mat3&) const = default;
};

inline Mat3 rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {{1, 0, 0, 0, c, -s, 0, s, c}};
}
inline Mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {{c, -s, 0, s, c, 0, 0, 0, 1}};
}

// Pinhole camera. Camera frame: +z forward (viewing direction), +x right,
// +y down. rotation/translation map camera coordinates to world.
struct CameraModel {
    double fx = 1, fy = 1, cx = 0, cy = 0;
    int width = 1, height = 1;
    Mat3 rotation;
    Vec3 translation;

    Vec3 origin() const { return translation; }

    // World-frame direction through the center of pixel (u, v). Unit length.
    Vec3 pixel_ray(int u, int v) const {
        const Vec3 d{(u + 0.5 - cx) / fx, (v + 0.5 - cy) / fy, 1.0};
        return (rotation * d).normalized();
    }

    bool operator==(const CameraModel&) const = default;
};

// Camera placed in front of the open (-y) face, looking into the shelf,
// pitched down by `pitch` radians.
CameraModel make_shelf_camera(const Aabb& interior, double stand_off, double cam_z, double pitch,
                              int width = 160, int height = 120, double fx = 130.0,
                              double fy = 130.0);

}  // namespace shelf
