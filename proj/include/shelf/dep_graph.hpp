#pragma once

#include <map>
#include <vector>

#include "shelf/arm.hpp"
#include "shelf/scene.hpp"
#include "shelf/voxel_grid.hpp"

namespace shelf {

// The synthetic node standing for the unseen target.
inline constexpr ObjectId kTargetNode = -2;

enum class RelationKind { Below, GraspBlockedBy, HiddenBy };

// Edge (from, to, kind): `to` must be picked and placed before `from` can
// be picked. weight in (0, 1].
struct DepEdge {
    ObjectId from = 0;
    ObjectId to = 0;
    RelationKind kind = RelationKind::Below;
    double weight = 1.0;
};

enum class HiddenByMode { Proportional, Inverse };

struct NoSinks : SceneError {
    using SceneError::SceneError;
};

struct DependencyGraph {
    std::vector<ObjectId> nodes;  // visible ids, plus kTargetNode when unseen
    std::vector<DepEdge> edges;
    bool has_target_node = false;

    // Diagnostics: sum of HiddenBy weights (0 when no such edges).
    double hidden_by_weight_sum = 0.0;

    std::vector<DepEdge> edges_from(ObjectId node) const;
};

// Floor rank for sinks with no path from the target (keeps every sink
// selectable).
inline constexpr double kRankFloor = 1e-6;

// Builds Below / GraspBlockedBy / HiddenBy edges over the belief.
// belief_scene holds only visible objects with exact models; target gets a
// synthetic node when unseen. Grasp candidates are shared with plan_pick
// (same sampler, same order).
DependencyGraph build_dep_graph(const Scene& belief_scene, const VoxelGrid& grid,
                                const ArmModel& arm, ObjectId target, int n_grasps, Rng& rng,
                                HiddenByMode mode = HiddenByMode::Proportional);

// Object nodes with zero outgoing edges. The target node is excluded while
// HiddenBy edges exist; a visible, unblocked target is an ordinary sink.
std::vector<ObjectId> sinks(const DependencyGraph& dg);

struct RankedSinks {
    std::vector<ObjectId> ordered;          // descending rank, ties by id
    std::map<ObjectId, double> ranks;       // >= kRankFloor
};

// rank(s) = sum over simple directed paths source->s of the product of edge
// weights, where the source is the synthetic target node when the target is
// unseen and the target itself otherwise (the empty path contributes 1 when
// the source is itself a sink). Sinks with no path get kRankFloor. Throws
// NoSinks when the graph has no sink. Node counts above 25 abort (simple
// path enumeration is exponential; graphs here are small).
RankedSinks rank_sinks(ObjectId target, const DependencyGraph& dg);

// Order drawn by successive weighted sampling without replacement,
// proportional to rank.
std::vector<ObjectId> biased_shuffle(const std::vector<ObjectId>& sink_ids,
                                     const std::map<ObjectId, double>& ranks, Rng& rng);

// Graphviz dot dump (nodes labeled by id, edges annotated kind/weight).
void dump_dot(const DependencyGraph& dg, std::ostream& out);

}  // namespace shelf
