#include "shelf/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "shelf/kernels.hpp"

namespace shelf {

namespace {

int exact_dim(double extent, double voxel, const char* axis) {
    const double n = extent / voxel;
    const int ni = static_cast<int>(std::lround(n));
    if (ni < 1 || std::abs(n - ni) > 1e-6)
        throw SceneError(std::string("voxel size does not tile workspace along ") + axis);
    return ni;
}

}  // namespace

VoxelGrid VoxelGrid::build(const SenseResult& sense, const CameraModel& camera,
                           const Scene& known_models, const Workspace& workspace,
                           double voxel_size) {
    const std::vector<ObjectId> visible = visible_objects(sense);
    for (ObjectId id : visible)
        if (!known_models.has_object(id))
            throw ModelMissing("no model for visible object " + std::to_string(id));
    if (visible.size() > 32) throw SceneError("more than 32 visible objects");

    VoxelGrid g;
    g.origin_ = workspace.interior.min;
    g.voxel_ = voxel_size;
    const Vec3 ext = workspace.interior.extent();
    g.nx_ = exact_dim(ext.x, voxel_size, "x");
    g.ny_ = exact_dim(ext.y, voxel_size, "y");
    g.nz_ = exact_dim(ext.z, voxel_size, "z");
    const size_t n = static_cast<size_t>(g.nx_) * g.ny_ * g.nz_;
    g.label_.assign(n, static_cast<uint8_t>(VoxelLabel::Free));
    g.occupant_.assign(n, kBackground);
    g.occluder_mask_.assign(n, 0);
    g.slot_ids_ = visible;

    // Occupancy: center-in-shape, restricted to each object's index range.
    for (ObjectId id : visible) {
        const ObjectInstance& o = known_models.object(id);
        const double r = o.shape.circum_radius();
        const auto clamp_lo = [&](double w, double org, int dim) {
            return std::clamp(static_cast<int>(std::floor((w - org) / voxel_size)), 0, dim - 1);
        };
        const auto clamp_hi = [&](double w, double org, int dim) {
            return std::clamp(static_cast<int>(std::ceil((w - org) / voxel_size)), 0, dim - 1);
        };
        const int i0 = clamp_lo(o.pose.x - r, g.origin_.x, g.nx_);
        const int i1 = clamp_hi(o.pose.x + r, g.origin_.x, g.nx_);
        const int j0 = clamp_lo(o.pose.y - r, g.origin_.y, g.ny_);
        const int j1 = clamp_hi(o.pose.y + r, g.origin_.y, g.ny_);
        const int k0 = clamp_lo(o.pose.z, g.origin_.z, g.nz_);
        const int k1 = clamp_hi(o.pose.z + o.shape.height(), g.origin_.z, g.nz_);
        for (int k = k0; k <= k1; ++k)
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i) {
                    const size_t idx = g.index(i, j, k);
                    if (g.occupant_[idx] != kBackground) continue;
                    if (point_in_shape(g.center(i, j, k), o.shape, o.pose)) {
                        g.occupant_[idx] = id;
                        g.label_[idx] = static_cast<uint8_t>(VoxelLabel::Occupied);
                    }
                }
    }

    // Occlusion: one ray per voxel center per visible object, batched per z
    // slab. Directions are unnormalized (center at t = 1), so an object
    // blocks the center when it is hit at t < 1 - eps.
    const auto& kern = kernels::active();
    const Vec3 cam = camera.origin();
    const kernels::RayOrigin ko{cam.x, cam.y, cam.z};
    const size_t slab = static_cast<size_t>(g.nx_) * g.ny_;
    std::vector<double> dx(slab), dy(slab), dz(slab), t(slab);
    std::vector<int32_t> hit(slab);
    constexpr double kBlockT = 1.0 - 1e-9;

    for (int k = 0; k < g.nz_; ++k) {
        size_t p = 0;
        for (int j = 0; j < g.ny_; ++j)
            for (int i = 0; i < g.nx_; ++i, ++p) {
                const Vec3 c = g.center(i, j, k);
                dx[p] = c.x - cam.x;
                dy[p] = c.y - cam.y;
                dz[p] = c.z - cam.z;
            }
        for (size_t slot = 0; slot < visible.size(); ++slot) {
            const ObjectInstance& o = known_models.object(visible[slot]);
            std::fill(t.begin(), t.end(), kBlockT);
            std::fill(hit.begin(), hit.end(), kBackground);
            if (o.shape.kind == ShapeKind::Cylinder) {
                kern.ray_cylinder_min(
                    ko, dx.data(), dy.data(), dz.data(), slab,
                    {o.pose.x, o.pose.y, o.pose.z, o.pose.z + o.shape.b, o.shape.a}, t.data(),
                    hit.data(), o.id);
            } else {
                kern.ray_box_min(ko, dx.data(), dy.data(), dz.data(), slab,
                                 {o.pose.x, o.pose.y, o.pose.z, std::cos(o.pose.yaw),
                                  std::sin(o.pose.yaw), 0.5 * o.shape.a, 0.5 * o.shape.b,
                                  o.shape.c},
                                 t.data(), hit.data(), o.id);
            }
            const size_t base = g.index(0, 0, k);
            for (size_t q = 0; q < slab; ++q)
                if (hit[q] != kBackground) g.occluder_mask_[base + q] |= 1u << slot;
        }
    }

    // Final labels + occluded-center SoA.
    for (int k = 0; k < g.nz_; ++k)
        for (int j = 0; j < g.ny_; ++j)
            for (int i = 0; i < g.nx_; ++i) {
                const size_t idx = g.index(i, j, k);
                if (g.label_[idx] == static_cast<uint8_t>(VoxelLabel::Occupied)) {
                    g.occluder_mask_[idx] = 0;
                    ++g.occupied_count_;
                } else if (g.occluder_mask_[idx] != 0) {
                    g.label_[idx] = static_cast<uint8_t>(VoxelLabel::Occluded);
                    ++g.occluded_count_;
                    const Vec3 c = g.center(i, j, k);
                    g.occluded_.x.push_back(c.x);
                    g.occluded_.y.push_back(c.y);
                    g.occluded_.z.push_back(c.z);
                    g.occluded_.masks.push_back(g.occluder_mask_[idx]);
                }
            }
    return g;
}

std::vector<ObjectId> VoxelGrid::occluders(size_t idx) const {
    std::vector<ObjectId> out;
    const uint32_t m = occluder_mask_[idx];
    for (size_t s = 0; s < slot_ids_.size(); ++s)
        if (m & (1u << s)) out.push_back(slot_ids_[s]);
    return out;
}

uint32_t VoxelGrid::slot_mask_for(ObjectId id) const {
    for (size_t s = 0; s < slot_ids_.size(); ++s)
        if (slot_ids_[s] == id) return 1u << s;
    return 0;
}

bool VoxelGrid::occluded_by(size_t idx, ObjectId id) const {
    return (occluder_mask_[idx] & slot_mask_for(id)) != 0;
}

bool VoxelGrid::occluded_beyond(size_t idx, ObjectId except) const {
    return (occluder_mask_[idx] & ~slot_mask_for(except)) != 0;
}

std::map<ObjectId, double> VoxelGrid::occlusion_volume_by_stack(
    const std::vector<Stack>& stacks) const {
    std::map<ObjectId, double> out;
    const double vol = voxel_ * voxel_ * voxel_;
    for (const Stack& st : stacks) {
        uint32_t stack_mask = 0;
        for (ObjectId id : st.members) stack_mask |= slot_mask_for(id);
        size_t count = 0;
        for (uint32_t m : occluded_.masks)
            if (m & stack_mask) ++count;
        out[st.base] = vol * static_cast<double>(count);
    }
    return out;
}

ShadowMask VoxelGrid::birds_eye_shadow(bool include_occluded, ObjectId exclude,
                                       bool exclude_sole_occlusion) const {
    ShadowMask mask;
    mask.nx = nx_;
    mask.ny = ny_;
    mask.cells.assign(static_cast<size_t>(nx_) * ny_, 0);
    const uint32_t excl =
        exclude == kBackground || !exclude_sole_occlusion ? 0 : slot_mask_for(exclude);
    for (int k = 0; k < nz_; ++k)
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) {
                const size_t idx = index(i, j, k);
                const auto l = static_cast<VoxelLabel>(label_[idx]);
                bool blocked = false;
                if (l == VoxelLabel::Occupied)
                    blocked = occupant_[idx] != exclude;
                else if (l == VoxelLabel::Occluded && include_occluded)
                    blocked = (occluder_mask_[idx] & ~excl) != 0;
                if (blocked) mask.at(i, j) = 1;
            }
    return mask;
}

void VoxelGrid::dump(std::ostream& out) const {
    for (int k = 0; k < nz_; ++k)
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) {
                const size_t idx = index(i, j, k);
                const auto l = static_cast<VoxelLabel>(label_[idx]);
                if (l == VoxelLabel::Free) continue;
                out << i << ' ' << j << ' ' << k << ' ';
                if (l == VoxelLabel::Occupied) {
                    out << "occupied " << occupant_[idx];
                } else {
                    out << "occluded";
                    for (ObjectId id : occluders(idx)) out << ' ' << id;
                }
                out << '\n';
            }
}

bool did_discover_object(const std::vector<ObjectId>& prev_visible,
                         const std::vector<ObjectId>& new_visible) {
    const std::set<ObjectId> prev(prev_visible.begin(), prev_visible.end());
    return std::any_of(new_visible.begin(), new_visible.end(),
                       [&prev](ObjectId id) { return !prev.count(id); });
}

}  // namespace shelf
