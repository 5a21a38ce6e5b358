#pragma once

#include <optional>

#include "shelf/arm.hpp"
#include "shelf/voxel_grid.hpp"

namespace shelf {

// Vertical projection of an object at a given yaw, rasterized at grid
// resolution and padded by the clearance. anchor_* is the cell the object
// center lands on.
struct Footprint {
    int nx = 0, ny = 0;
    int anchor_i = 0, anchor_j = 0;
    std::vector<uint8_t> mask;

    uint8_t at(int i, int j) const { return mask[static_cast<size_t>(j) * nx + i]; }
    uint8_t& at(int i, int j) { return mask[static_cast<size_t>(j) * nx + i]; }
};

using PlacementGrid = ShadowMask;  // true = valid anchor cell

// Padding applied to footprints, in voxels. Half a voxel measured on the
// cell diagonal, so a cell center just outside the true projection still
// blocks quantization-near placements.
inline constexpr double kClearanceVoxels = 0.71;

// Cell true iff its center offset lies within the projection at `yaw`,
// padded by clearance. Mask is tight (no all-false border rows/columns).
Footprint object_footprint(const Shape& shape, double yaw, double voxel_size,
                           double clearance = -1.0);  // -1: kClearanceVoxels * voxel_size

// Anchor cell valid iff the translated footprint lies fully inside the grid
// and overlaps no blocked shadow cell (zero-overlap cross-correlation).
PlacementGrid valid_placement_cells(const ShadowMask& shadow, const Footprint& fp);

struct PlacementPlan {
    Pose pose;
    GraspCandidate grasp;  // the planned place approach
};

struct PlacementParams {
    int yaw_bins = 8;         // boxes; cylinders always use 1
    int max_place_tries = 50; // anchor draws per yaw bin
    int n_grasps = 16;
};

// Collision- and discovery-safe placement for `obj` (which may still be
// part of `belief`; it is ignored during checks). The shadow releases only
// the object's occupied columns — space it occludes stays blocked, since an
// unseen object could stand there. Yaw bins are tried in random order,
// anchors uniformly without replacement, first plannable pose wins.
std::optional<PlacementPlan> sample_placement(const VoxelGrid& grid, const Scene& belief,
                                              const ObjectInstance& obj, const ArmModel& arm,
                                              const PlacementParams& params, Rng& rng);

}  // namespace shelf
