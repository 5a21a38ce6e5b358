#pragma once

// Independent reference implementations shared by the unit tests and the
// acceptance checks. Everything here is written against the definitions,
// not the production code paths: straight loops, scalar geometry, no
// kernels, no shared helpers beyond the basic geom primitives.

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "shelf/dep_graph.hpp"
#include "shelf/placement.hpp"
#include "shelf/sensor.hpp"
#include "shelf/voxel_grid.hpp"

namespace shelf::oracles {

// --- rank_sinks: exhaustive simple-path enumeration -----------------------

inline void enumerate_paths(const std::vector<DepEdge>& edges, ObjectId node, double product,
                            std::vector<ObjectId>& path, std::map<ObjectId, double>& sums) {
    if (auto it = sums.find(node); it != sums.end()) it->second += product;
    for (const DepEdge& e : edges) {
        if (e.from != node) continue;
        if (std::find(path.begin(), path.end(), e.to) != path.end()) continue;
        path.push_back(e.to);
        enumerate_paths(edges, e.to, product * e.weight, path, sums);
        path.pop_back();
    }
}

// Rank of every sink by brute-force path enumeration from `source`.
inline std::map<ObjectId, double> rank_oracle(const DependencyGraph& dg, ObjectId source) {
    std::set<ObjectId> has_out;
    for (const DepEdge& e : dg.edges) has_out.insert(e.from);
    std::map<ObjectId, double> sums;
    for (ObjectId n : dg.nodes)
        if (n != kTargetNode && !has_out.count(n)) sums[n] = 0.0;
    if (std::find(dg.nodes.begin(), dg.nodes.end(), source) != dg.nodes.end()) {
        std::vector<ObjectId> path{source};
        enumerate_paths(dg.edges, source, 1.0, path, sums);
    }
    for (auto& [id, r] : sums)
        if (r <= 0.0) r = kRankFloor;
    return sums;
}

// Random DAG-ish graph (may contain cycles among non-sink nodes; simple-path
// semantics handle either).
inline DependencyGraph random_graph(int n_nodes, Rng& rng) {
    DependencyGraph dg;
    for (int i = 0; i < n_nodes; ++i) dg.nodes.push_back(i);
    dg.nodes.push_back(kTargetNode);
    dg.has_target_node = true;
    for (int i = -1; i < n_nodes; ++i)
        for (int j = 0; j < n_nodes; ++j) {
            const ObjectId from = i < 0 ? kTargetNode : i;
            if (from == j) continue;
            if (rng.uniform() < 0.35)
                dg.edges.push_back({from, j, RelationKind::GraspBlockedBy,
                                    rng.uniform(1e-3, 1.0)});
        }
    return dg;
}

// --- voxel grid: per-voxel ray-cast reference -----------------------------

struct VoxelRef {
    VoxelLabel label = VoxelLabel::Free;
    ObjectId occupant = kBackground;
    std::vector<ObjectId> occluders;  // sorted
};

// Labels one voxel center from first principles: center-in-shape over the
// visible models for occupancy; one scalar ray per visible object for
// occlusion (blocker iff it intersects the camera->center segment strictly
// before the center).
inline VoxelRef voxel_oracle(const Vec3& center, const Vec3& cam,
                             const std::vector<ObjectInstance>& visible) {
    VoxelRef ref;
    for (const auto& o : visible)
        if (point_in_shape(center, o.shape, o.pose)) {
            ref.label = VoxelLabel::Occupied;
            ref.occupant = o.id;
            return ref;
        }
    const Vec3 dir = center - cam;
    for (const auto& o : visible) {
        const double t = ray_shape(cam, dir, o.shape, o.pose);
        if (t < 1.0 - 1e-9) ref.occluders.push_back(o.id);
    }
    if (!ref.occluders.empty()) {
        ref.label = VoxelLabel::Occluded;
        std::sort(ref.occluders.begin(), ref.occluders.end());
    }
    return ref;
}

// Full-grid comparison; returns the number of mismatching voxels.
inline size_t compare_grid(const VoxelGrid& grid, const Scene& belief, const Vec3& cam) {
    size_t mismatches = 0;
    for (int k = 0; k < grid.nz(); ++k)
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) {
                const size_t idx = grid.index(i, j, k);
                const VoxelRef ref = voxel_oracle(grid.center(i, j, k), cam, belief.objects());
                if (grid.label(idx) != ref.label) {
                    ++mismatches;
                    continue;
                }
                if (ref.label == VoxelLabel::Occupied && grid.occupant(idx) != ref.occupant)
                    ++mismatches;
                else if (ref.label == VoxelLabel::Occluded &&
                         grid.occluders(idx) != ref.occluders)
                    ++mismatches;
            }
    return mismatches;
}

// --- placement: exhaustive per-anchor overlap scan ------------------------

inline PlacementGrid anchor_scan_oracle(const ShadowMask& shadow, const Footprint& fp) {
    PlacementGrid out;
    out.nx = shadow.nx;
    out.ny = shadow.ny;
    out.cells.assign(static_cast<size_t>(shadow.nx) * shadow.ny, 0);
    for (int j = 0; j < shadow.ny; ++j)
        for (int i = 0; i < shadow.nx; ++i) {
            bool valid = true;
            for (int b = 0; b < fp.ny && valid; ++b)
                for (int a = 0; a < fp.nx && valid; ++a) {
                    if (!fp.at(a, b)) continue;
                    const int si = i - fp.anchor_i + a;
                    const int sj = j - fp.anchor_j + b;
                    if (si < 0 || si >= shadow.nx || sj < 0 || sj >= shadow.ny ||
                        shadow.at(si, sj))
                        valid = false;
                }
            if (valid) out.at(i, j) = 1;
        }
    return out;
}

inline ShadowMask random_shadow(int nx, int ny, double fill, Rng& rng) {
    ShadowMask m;
    m.nx = nx;
    m.ny = ny;
    m.cells.assign(static_cast<size_t>(nx) * ny, 0);
    for (auto& c : m.cells) c = rng.uniform() < fill ? 1 : 0;
    return m;
}

}  // namespace shelf::oracles
