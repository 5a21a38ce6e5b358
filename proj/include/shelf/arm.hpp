#pragma once

#include <optional>
#include <vector>

#include "shelf/rng.hpp"
#include "shelf/scene.hpp"
#include "shelf/voxel_grid.hpp"

namespace shelf {

struct GraspCandidate {
    ObjectId object = 0;
    Pose gripper_pose;   // gripper center; yaw = approach heading
    Vec2 approach;       // unit horizontal direction, pointing at the object
};

// Abstract arm: a gripper box plus a straight corridor prism swept from the
// shelf's open (-y) face to the gripper pose along the approach direction.
struct ArmModel {
    double gripper_hx = 0.02;  // half extent along the approach
    double gripper_hy = 0.04;  // half width
    double gripper_hz = 0.03;  // half height
    double corridor_width = 0.08;
    double corridor_height = 0.06;
    double standoff = 0.02;
    // Inflation applied when testing the swept volume against Occluded voxel
    // centers; covers geometry protruding past the center-sampled region.
    double occlusion_margin = 0.018;
};

enum class Feasibility {
    Free,
    Blocked,          // collides with one or more known objects
    UnsafeOccluded,   // sweeps through occluded space only
    OutOfReach,       // corridor leaves the workspace (or no valid grasp z)
};

struct GraspCheck {
    Feasibility kind = Feasibility::Free;
    std::vector<ObjectId> blockers;  // sorted, nonempty iff Blocked
};

// The two volumes swept by a grasp: corridor prism and gripper box.
std::vector<UprightObb> grasp_volumes(const GraspCandidate& cand, const Workspace& ws,
                                      const ArmModel& arm);

// n gripper poses on a circle of radius (object circumradius + standoff)
// around the object, approaches entering through the open face, angularly
// ordered and symmetric about head-on. Deterministic; rng reserved for
// future jitter.
std::vector<GraspCandidate> sample_grasps(const ObjectInstance& obj, const Workspace& ws,
                                          const ArmModel& arm, int n, Rng& rng);

// Collision state of one candidate against the belief. Known objects take
// precedence over occluded space.
GraspCheck grasp_feasibility(const GraspCandidate& cand, const Scene& belief,
                             const VoxelGrid::OccludedCenters& occluded, const Workspace& ws,
                             const ArmModel& arm);

inline GraspCheck grasp_feasibility(const GraspCandidate& cand, const Scene& belief,
                                    const VoxelGrid& grid, const ArmModel& arm) {
    return grasp_feasibility(cand, belief, grid.occluded_centers(), belief.workspace(), arm);
}

// Occluded centers with every voxel occluded only by `exclude` dropped
// (used when planning a placement for the object being moved).
VoxelGrid::OccludedCenters filter_occluded(const VoxelGrid& grid, ObjectId exclude);

// First Free candidate in sample order, or nullopt. The same candidate set
// feeds the dependency-graph blocking weights.
std::optional<GraspCandidate> plan_pick(ObjectId object, const Scene& belief,
                                        const VoxelGrid& grid, const ArmModel& arm, int n_grasps,
                                        Rng& rng);

// plan_pick evaluated with the object hypothetically at `pose`. belief must
// not contain the object; occluded is typically filter_occluded(grid, id).
std::optional<GraspCandidate> plan_place(const ObjectInstance& obj, Pose pose,
                                         const Scene& belief,
                                         const VoxelGrid::OccludedCenters& occluded,
                                         const Workspace& ws, const ArmModel& arm, int n_grasps,
                                         Rng& rng);

}  // namespace shelf
