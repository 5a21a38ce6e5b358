#include "shelf/arm.hpp"

#include <algorithm>
#include <cmath>

#include "shelf/kernels.hpp"

namespace shelf {

namespace {

constexpr double kMaxApproachAngle = 1.396;  // ~80 deg off head-on
constexpr double kWsEps = 1e-9;

bool obb_inside_workspace(const UprightObb& obb, const Workspace& ws) {
    const Aabb& in = ws.interior;
    if (obb.z_lo < in.min.z - kWsEps || obb.z_hi > in.max.z + kWsEps) return false;
    for (const Vec2& c : obb.rect().corners()) {
        if (c.x < in.min.x - kWsEps || c.x > in.max.x + kWsEps) return false;
        if (c.y > in.max.y + kWsEps) return false;  // -y is the open face
    }
    return true;
}

bool occluded_hit(const std::vector<UprightObb>& volumes,
                  const VoxelGrid::OccludedCenters& occ, double margin) {
    if (occ.x.empty()) return false;
    const auto& kern = kernels::active();
    for (const UprightObb& v : volumes) {
        const kernels::ObbParams p{v.center.x, v.center.y, std::cos(v.yaw), std::sin(v.yaw),
                                   v.hx,       v.hy,       v.z_lo,          v.z_hi};
        if (kern.points_in_obb_any(occ.x.data(), occ.y.data(), occ.z.data(), occ.x.size(), p,
                                   margin))
            return true;
    }
    return false;
}

}  // namespace

std::vector<UprightObb> grasp_volumes(const GraspCandidate& cand, const Workspace& ws,
                                      const ArmModel& arm) {
    const Pose& gp = cand.gripper_pose;
    const double yaw = std::atan2(cand.approach.y, cand.approach.x);
    std::vector<UprightObb> out;

    // Gripper box around the gripper center.
    out.push_back({{gp.x, gp.y}, arm.gripper_hx, arm.gripper_hy, yaw, gp.z - arm.gripper_hz,
                   gp.z + arm.gripper_hz});

    // Corridor prism from the open face to the gripper center.
    if (cand.approach.y <= 0) return out;  // cannot reach the open face
    const double t_len = (gp.y - ws.open_face_y()) / cand.approach.y;
    const Vec2 mid{gp.x - cand.approach.x * (t_len / 2), gp.y - cand.approach.y * (t_len / 2)};
    out.push_back({mid, t_len / 2, arm.corridor_width / 2, yaw,
                   gp.z - arm.corridor_height / 2, gp.z + arm.corridor_height / 2});
    return out;
}

std::vector<GraspCandidate> sample_grasps(const ObjectInstance& obj, const Workspace& ws,
                                          const ArmModel& arm, int n, Rng& rng) {
    (void)rng;
    const double radius = obj.shape.circum_radius() + arm.standoff + arm.gripper_hx;
    const double mid_z = obj.pose.z + 0.5 * obj.shape.height();
    const double span = std::max(arm.corridor_height, 2 * arm.gripper_hz) / 2;
    const double gz =
        std::clamp(mid_z, ws.interior.min.z + span, std::max(ws.interior.min.z + span,
                                                             ws.interior.max.z - span));

    std::vector<GraspCandidate> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Angle off head-on, symmetric, centered (n=1 gives exactly head-on).
        const double alpha = -kMaxApproachAngle + 2 * kMaxApproachAngle * (i + 0.5) / n;
        const double sa = std::sin(alpha), ca = std::cos(alpha);
        GraspCandidate c;
        c.object = obj.id;
        c.approach = {-sa, ca};
        c.gripper_pose = {obj.pose.x + radius * sa, obj.pose.y - radius * ca, gz,
                          normalize_yaw(std::atan2(c.approach.y, c.approach.x))};
        out.push_back(c);
    }
    return out;
}

GraspCheck grasp_feasibility(const GraspCandidate& cand, const Scene& belief,
                             const VoxelGrid::OccludedCenters& occluded, const Workspace& ws,
                             const ArmModel& arm) {
    const auto volumes = grasp_volumes(cand, ws, arm);
    if (cand.approach.y <= 0) return {Feasibility::OutOfReach, {}};
    for (const UprightObb& v : volumes)
        if (!obb_inside_workspace(v, ws)) return {Feasibility::OutOfReach, {}};

    GraspCheck check;
    for (const auto& o : belief.objects()) {
        if (o.id == cand.object) continue;
        for (const UprightObb& v : volumes)
            if (v.distance_to(o.shape, o.pose) <= 0) {
                check.blockers.push_back(o.id);
                break;
            }
    }
    if (!check.blockers.empty()) {
        std::sort(check.blockers.begin(), check.blockers.end());
        check.kind = Feasibility::Blocked;
        return check;
    }
    if (occluded_hit(volumes, occluded, arm.occlusion_margin))
        return {Feasibility::UnsafeOccluded, {}};
    return check;
}

VoxelGrid::OccludedCenters filter_occluded(const VoxelGrid& grid, ObjectId exclude) {
    const auto& all = grid.occluded_centers();
    const uint32_t excl = grid.slot_mask_for(exclude);
    if (excl == 0) return all;
    VoxelGrid::OccludedCenters out;
    for (size_t i = 0; i < all.masks.size(); ++i) {
        if ((all.masks[i] & ~excl) == 0) continue;
        out.x.push_back(all.x[i]);
        out.y.push_back(all.y[i]);
        out.z.push_back(all.z[i]);
        out.masks.push_back(all.masks[i] & ~excl);
    }
    return out;
}

std::optional<GraspCandidate> plan_pick(ObjectId object, const Scene& belief,
                                        const VoxelGrid& grid, const ArmModel& arm, int n_grasps,
                                        Rng& rng) {
    const ObjectInstance& obj = belief.object(object);
    for (const GraspCandidate& cand :
         sample_grasps(obj, belief.workspace(), arm, n_grasps, rng)) {
        if (grasp_feasibility(cand, belief, grid, arm).kind == Feasibility::Free) return cand;
    }
    return std::nullopt;
}

std::optional<GraspCandidate> plan_place(const ObjectInstance& obj, Pose pose,
                                         const Scene& belief,
                                         const VoxelGrid::OccludedCenters& occluded,
                                         const Workspace& ws, const ArmModel& arm, int n_grasps,
                                         Rng& rng) {
    ObjectInstance moved = obj;
    moved.pose = pose;
    for (const GraspCandidate& cand : sample_grasps(moved, ws, arm, n_grasps, rng)) {
        if (grasp_feasibility(cand, belief, occluded, ws, arm).kind == Feasibility::Free)
            return cand;
    }
    return std::nullopt;
}

}  // namespace shelf
