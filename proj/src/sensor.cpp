#include "shelf/sensor.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "shelf/kernels.hpp"

namespace shelf {

namespace {

// Distance to the rendered workspace surface, or +inf. Walls are opaque
// from both sides; the open (-y) face renders nothing. Entry/exit faces are
// identified by comparing the slab parameters bit-exactly, not by
// reconstructing hit points.
double workspace_depth(const Vec3& origin, const Vec3& dir, const Workspace& ws) {
    double t_entry, t_exit;
    if (!ray_aabb(origin, dir, ws.interior, t_entry, t_exit)) return kInf;
    if (t_exit <= 1e-12) return kInf;
    // Parameter at which the ray crosses the open-face plane (toward +y for
    // entry, toward -y for exit).
    const double t_open =
        dir.y != 0.0 ? (ws.open_face_y() - origin.y) / dir.y : -kInf;
    if (t_entry > 1e-12) {
        const bool enters_open = dir.y > 0 && t_open == t_entry;
        if (!enters_open) return t_entry;
    }
    const bool exits_open = dir.y < 0 && t_open == t_exit;
    return exits_open ? kInf : t_exit;
}

}  // namespace

SenseResult render(const Scene& scene, const CameraModel& camera) {
    const auto& kern = kernels::active();
    SenseResult out;
    out.width = camera.width;
    out.height = camera.height;
    out.depth.assign(static_cast<size_t>(camera.width) * camera.height, kInf);
    out.seg.assign(static_cast<size_t>(camera.width) * camera.height, kBackground);

    const Vec3 origin = camera.origin();
    const kernels::RayOrigin ko{origin.x, origin.y, origin.z};
    std::vector<double> dx(camera.width), dy(camera.width), dz(camera.width);

    for (int v = 0; v < camera.height; ++v) {
        double* t_row = out.depth.data() + static_cast<size_t>(v) * camera.width;
        int32_t* id_row = out.seg.data() + static_cast<size_t>(v) * camera.width;
        for (int u = 0; u < camera.width; ++u) {
            const Vec3 d = camera.pixel_ray(u, v);
            dx[u] = d.x;
            dy[u] = d.y;
            dz[u] = d.z;
            t_row[u] = workspace_depth(origin, d, scene.workspace());
        }
        for (const auto& o : scene.objects()) {
            if (o.shape.kind == ShapeKind::Cylinder) {
                kern.ray_cylinder_min(
                    ko, dx.data(), dy.data(), dz.data(), static_cast<size_t>(camera.width),
                    {o.pose.x, o.pose.y, o.pose.z, o.pose.z + o.shape.b, o.shape.a}, t_row,
                    id_row, o.id);
            } else {
                kern.ray_box_min(ko, dx.data(), dy.data(), dz.data(),
                                 static_cast<size_t>(camera.width),
                                 {o.pose.x, o.pose.y, o.pose.z, std::cos(o.pose.yaw),
                                  std::sin(o.pose.yaw), 0.5 * o.shape.a, 0.5 * o.shape.b,
                                  o.shape.c},
                                 t_row, id_row, o.id);
            }
        }
    }
    return out;
}

std::vector<ObjectId> visible_objects(const SenseResult& sense, int min_pixels) {
    std::map<int32_t, int> counts;
    for (int32_t id : sense.seg)
        if (id != kBackground) ++counts[id];
    std::vector<ObjectId> out;
    for (const auto& [id, n] : counts)
        if (n >= min_pixels) out.push_back(id);
    return out;
}

void write_depth_pgm(const SenseResult& sense, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n" << sense.width << ' ' << sense.height << "\n65535\n";
    for (double d : sense.depth) {
        const unsigned mm = std::isfinite(d)
                                ? std::min(65535u, static_cast<unsigned>(d * 1000.0))
                                : 65535u;
        out.put(static_cast<char>(mm >> 8));
        out.put(static_cast<char>(mm & 0xff));
    }
}

void write_seg_ppm(const SenseResult& sense, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    out << "P6\n" << sense.width << ' ' << sense.height << "\n255\n";
    for (int32_t id : sense.seg) {
        // Hash id to a stable color; background is black.
        if (id == kBackground) {
            out.put(0).put(0).put(0);
        } else {
            const uint32_t h = static_cast<uint32_t>(id) * 2654435761u;
            out.put(static_cast<char>(64 + (h & 0x7f)));
            out.put(static_cast<char>(64 + ((h >> 8) & 0x7f)));
            out.put(static_cast<char>(64 + ((h >> 16) & 0x7f)));
        }
    }
}

}  // namespace shelf
