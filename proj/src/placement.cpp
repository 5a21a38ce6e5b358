#include "shelf/placement.hpp"

#include <algorithm>
#include <cmath>

#include "shelf/kernels.hpp"

namespace shelf {

Footprint object_footprint(const Shape& shape, double yaw, double voxel_size, double clearance) {
    if (clearance < 0) clearance = kClearanceVoxels * voxel_size;
    const double reach = shape.circum_radius() + clearance;
    const int m = static_cast<int>(std::ceil(reach / voxel_size));
    const int side = 2 * m + 1;
    const Pose centered{0, 0, 0, yaw};

    Footprint fp;
    fp.nx = fp.ny = side;
    fp.anchor_i = fp.anchor_j = m;
    fp.mask.assign(static_cast<size_t>(side) * side, 0);
    for (int j = 0; j < side; ++j)
        for (int i = 0; i < side; ++i) {
            const Vec2 offset{(i - m) * voxel_size, (j - m) * voxel_size};
            if (point_footprint_distance(offset, shape, centered) <= clearance) fp.at(i, j) = 1;
        }

    // Trim all-false border rows/columns.
    int i0 = side, i1 = -1, j0 = side, j1 = -1;
    for (int j = 0; j < side; ++j)
        for (int i = 0; i < side; ++i)
            if (fp.at(i, j)) {
                i0 = std::min(i0, i);
                i1 = std::max(i1, i);
                j0 = std::min(j0, j);
                j1 = std::max(j1, j);
            }
    if (i1 < 0) throw SceneError("empty footprint");
    Footprint tight;
    tight.nx = i1 - i0 + 1;
    tight.ny = j1 - j0 + 1;
    tight.anchor_i = m - i0;
    tight.anchor_j = m - j0;
    tight.mask.assign(static_cast<size_t>(tight.nx) * tight.ny, 0);
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) tight.at(i - i0, j - j0) = fp.at(i, j);
    return tight;
}

PlacementGrid valid_placement_cells(const ShadowMask& shadow, const Footprint& fp) {
    const auto& kern = kernels::active();
    PlacementGrid out;
    out.nx = shadow.nx;
    out.ny = shadow.ny;
    out.cells.assign(static_cast<size_t>(shadow.nx) * shadow.ny, 0);

    for (int j = 0; j < shadow.ny; ++j) {
        const int base_j = j - fp.anchor_j;
        if (base_j < 0 || base_j + fp.ny > shadow.ny) continue;
        for (int i = 0; i < shadow.nx; ++i) {
            const int base_i = i - fp.anchor_i;
            if (base_i < 0 || base_i + fp.nx > shadow.nx) continue;
            bool overlap = false;
            for (int b = 0; b < fp.ny && !overlap; ++b) {
                const uint8_t* srow =
                    shadow.cells.data() + static_cast<size_t>(base_j + b) * shadow.nx + base_i;
                const uint8_t* frow = fp.mask.data() + static_cast<size_t>(b) * fp.nx;
                overlap = kern.row_overlap_any(srow, frow, static_cast<size_t>(fp.nx));
            }
            if (!overlap) out.at(i, j) = 1;
        }
    }
    return out;
}

namespace {

bool placement_fits(const Shape& shape, const Pose& pose, const Scene& others,
                    const Workspace& ws) {
    const Aabb& box = ws.interior;
    if (pose.z + shape.height() > box.max.z + kSupportEps) return false;
    if (shape.kind == ShapeKind::Cylinder) {
        if (pose.x - shape.a < box.min.x || pose.x + shape.a > box.max.x ||
            pose.y - shape.a < box.min.y || pose.y + shape.a > box.max.y)
            return false;
    } else {
        for (const Vec2& c : footprint_rect(shape, pose).corners())
            if (c.x < box.min.x || c.x > box.max.x || c.y < box.min.y || c.y > box.max.y)
                return false;
    }
    for (const auto& o : others.objects())
        if (shape_distance(shape, pose, o.shape, o.pose) <= 0.0) return false;
    return true;
}

}  // namespace

std::optional<PlacementPlan> sample_placement(const VoxelGrid& grid, const Scene& belief,
                                              const ObjectInstance& obj, const ArmModel& arm,
                                              const PlacementParams& params, Rng& rng) {
    const Workspace& ws = belief.workspace();
    // Only the object's occupied columns are released; the region it alone
    // occludes stays blocked (an unseen object could be standing there), and
    // the corridor check keeps the full occluded set for the same reason.
    const ShadowMask shadow = grid.birds_eye_shadow(true, obj.id, false);
    const auto& occluded = grid.occluded_centers();
    const Scene others = belief.without_object(obj.id);

    const int bins = obj.shape.kind == ShapeKind::Cylinder ? 1 : params.yaw_bins;
    std::vector<int> bin_order(static_cast<size_t>(bins));
    for (int b = 0; b < bins; ++b) bin_order[static_cast<size_t>(b)] = b;
    rng.shuffle(bin_order);

    for (int b : bin_order) {
        const double yaw = bins == 1 ? 0.0 : b * kPi / bins;
        const Footprint fp = object_footprint(obj.shape, yaw, grid.voxel_size());
        const PlacementGrid valid = valid_placement_cells(shadow, fp);

        std::vector<std::pair<int, int>> anchors;
        for (int j = 0; j < valid.ny; ++j)
            for (int i = 0; i < valid.nx; ++i)
                if (valid.at(i, j)) anchors.push_back({i, j});
        rng.shuffle(anchors);
        const size_t tries = std::min(anchors.size(), static_cast<size_t>(params.max_place_tries));

        for (size_t a = 0; a < tries; ++a) {
            const auto [i, j] = anchors[a];
            Pose pose;
            pose.x = grid.origin().x + (i + 0.5) * grid.voxel_size();
            pose.y = grid.origin().y + (j + 0.5) * grid.voxel_size();
            pose.z = ws.table_z();
            pose.yaw = yaw;
            // The rasterized masks are center-sampled, so geometry within
            // half a cell diagonal of a boundary can slip through; confirm
            // exactly against the known objects and the walls.
            if (!placement_fits(obj.shape, pose, others, ws)) continue;
            if (auto grasp =
                    plan_place(obj, pose, others, occluded, ws, arm, params.n_grasps, rng)) {
                return PlacementPlan{pose, *grasp};
            }
        }
    }
    return std::nullopt;
}

}  // namespace shelf
