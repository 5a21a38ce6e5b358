#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shelf/scene.hpp"

namespace shelf {

// Depth + instance segmentation image. depth is +inf where the ray leaves
// the workspace (or misses it); such pixels are Background in seg.
struct SenseResult {
    int width = 0, height = 0;
    std::vector<double> depth;   // row-major, meters
    std::vector<int32_t> seg;    // ObjectId or kBackground

    double depth_at(int u, int v) const { return depth[static_cast<size_t>(v) * width + u]; }
    int32_t seg_at(int u, int v) const { return seg[static_cast<size_t>(v) * width + u]; }

    bool operator==(const SenseResult&) const = default;
};

// Analytic ray-cast of the scene: one central ray per pixel, first hit wins.
// Workspace walls render as Background; the -y face is open.
SenseResult render(const Scene& scene, const CameraModel& camera);

inline SenseResult render(const Scene& scene) { return render(scene, scene.camera()); }

// Ids with at least min_pixels pixels in seg, sorted ascending.
std::vector<ObjectId> visible_objects(const SenseResult& sense, int min_pixels = 1);

// Debug dumps: depth as PGM (16-bit, millimeters, clamped), seg as PPM.
void write_depth_pgm(const SenseResult& sense, const std::string& path);
void write_seg_ppm(const SenseResult& sense, const std::string& path);

}  // namespace shelf
