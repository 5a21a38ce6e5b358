#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "shelf/scene.hpp"
#include "shelf/sensor.hpp"

namespace shelf {

struct ModelMissing : SceneError {
    using SceneError::SceneError;
};

enum class VoxelLabel : uint8_t { Free = 0, Occupied = 1, Occluded = 2 };

// Bird's-eye boolean mask over the horizontal grid extents; nonzero = blocked.
struct ShadowMask {
    int nx = 0, ny = 0;
    std::vector<uint8_t> cells;

    uint8_t at(int i, int j) const { return cells[static_cast<size_t>(j) * nx + i]; }
    uint8_t& at(int i, int j) { return cells[static_cast<size_t>(j) * nx + i]; }
};

// Ternary belief over the workspace volume: every voxel is exactly one of
// Free, Occupied(object) or Occluded(nonempty occluder set). Occluder sets
// are bitmasks over the visible objects of the sensing that built the grid.
class VoxelGrid {
public:
    // Labels voxels from a sensing result. known_models must contain a
    // shape+pose for every visible id (ModelMissing otherwise). A voxel is
    // Occupied(o) when its center lies inside visible object o; otherwise
    // Occluded(S) with S = the visible objects whose surface blocks the
    // camera ray to the voxel center at a nearer depth; otherwise Free.
    static VoxelGrid build(const SenseResult& sense, const CameraModel& camera,
                           const Scene& known_models, const Workspace& workspace,
                           double voxel_size);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    double voxel_size() const { return voxel_; }
    const Vec3& origin() const { return origin_; }
    size_t voxel_count() const { return label_.size(); }

    size_t index(int i, int j, int k) const {
        return (static_cast<size_t>(k) * ny_ + j) * nx_ + i;
    }
    Vec3 center(int i, int j, int k) const {
        return {origin_.x + (i + 0.5) * voxel_, origin_.y + (j + 0.5) * voxel_,
                origin_.z + (k + 0.5) * voxel_};
    }

    VoxelLabel label(size_t idx) const { return static_cast<VoxelLabel>(label_[idx]); }
    VoxelLabel label(int i, int j, int k) const { return label(index(i, j, k)); }
    ObjectId occupant(size_t idx) const { return occupant_[idx]; }
    std::vector<ObjectId> occluders(size_t idx) const;
    bool occluded_by(size_t idx, ObjectId id) const;

    // True when the occluder set contains anything besides `except`.
    bool occluded_beyond(size_t idx, ObjectId except) const;

    size_t occupied_count() const { return occupied_count_; }
    size_t occluded_count() const { return occluded_count_; }

    // Volume of the direct occlusion region of each stack: voxel^3 times the
    // number of voxels whose occluder set intersects the stack's members.
    // Jointly occluded voxels count toward every involved stack.
    std::map<ObjectId, double> occlusion_volume_by_stack(const std::vector<Stack>& stacks) const;

    // Cell (i, j) is blocked when any voxel of column (i, j, *) is Occupied
    // or (when include_occluded) Occluded. exclude ignores voxels occupied
    // by that object, and (when exclude_sole_occlusion) also voxels it alone
    // occludes. The latter is unsafe for placement: an unseen object can sit
    // inside the excluded region.
    ShadowMask birds_eye_shadow(bool include_occluded, ObjectId exclude = kBackground,
                                bool exclude_sole_occlusion = true) const;

    // SoA centers of all Occluded voxels, for batched collision kernels.
    struct OccludedCenters {
        std::vector<double> x, y, z;
        std::vector<uint32_t> masks;  // occluder bitmask per entry
    };
    const OccludedCenters& occluded_centers() const { return occluded_; }
    uint32_t slot_mask_for(ObjectId id) const;  // 0 when id occludes nothing

    // One line per non-Free voxel: "i j k occupied <id>" or
    // "i j k occluded <id...>".
    void dump(std::ostream& out) const;

private:
    Vec3 origin_;
    double voxel_ = 0;
    int nx_ = 0, ny_ = 0, nz_ = 0;
    std::vector<uint8_t> label_;
    std::vector<int32_t> occupant_;
    std::vector<uint32_t> occluder_mask_;
    std::vector<ObjectId> slot_ids_;  // bit position -> object id
    OccludedCenters occluded_;
    size_t occupied_count_ = 0, occluded_count_ = 0;
};

// Alg-discovery test: something is newly visible.
bool did_discover_object(const std::vector<ObjectId>& prev_visible,
                         const std::vector<ObjectId>& new_visible);

}  // namespace shelf
