#include "shelf/dep_graph.hpp"

#include <algorithm>
#include <ostream>
#include <set>

namespace shelf {

std::vector<DepEdge> DependencyGraph::edges_from(ObjectId node) const {
    std::vector<DepEdge> out;
    for (const DepEdge& e : edges)
        if (e.from == node) out.push_back(e);
    return out;
}

DependencyGraph build_dep_graph(const Scene& belief_scene, const VoxelGrid& grid,
                                const ArmModel& arm, ObjectId target, int n_grasps, Rng& rng,
                                HiddenByMode mode) {
    DependencyGraph dg;
    for (const auto& o : belief_scene.objects()) dg.nodes.push_back(o.id);
    std::sort(dg.nodes.begin(), dg.nodes.end());

    // Below: contact + lower center of mass, weight exactly 1.
    for (const auto& x : belief_scene.objects())
        for (const auto& y : belief_scene.objects()) {
            if (x.id == y.id) continue;
            const double com_x = x.pose.z + 0.5 * x.shape.height();
            const double com_y = y.pose.z + 0.5 * y.shape.height();
            if (com_x >= com_y) continue;
            if (shape_distance(x.shape, x.pose, y.shape, y.pose) <= kContactEps)
                dg.edges.push_back({x.id, y.id, RelationKind::Below, 1.0});
        }

    // GraspBlockedBy: shared candidate sampling with plan_pick. No edges
    // when any candidate is collision free; otherwise one edge per blocker
    // weighted by its blocked-candidate fraction.
    for (const auto& x : belief_scene.objects()) {
        std::map<ObjectId, int> block_counts;
        bool any_free = false;
        for (const GraspCandidate& cand :
             sample_grasps(x, belief_scene.workspace(), arm, n_grasps, rng)) {
            const GraspCheck check = grasp_feasibility(cand, belief_scene, grid, arm);
            if (check.kind == Feasibility::Free) {
                any_free = true;
                break;
            }
            for (ObjectId b : check.blockers) ++block_counts[b];
        }
        if (any_free) continue;
        for (const auto& [blocker, count] : block_counts)
            dg.edges.push_back({x.id, blocker, RelationKind::GraspBlockedBy,
                                static_cast<double>(count) / n_grasps});
    }

    // HiddenBy: unseen target -> table-touching stack bases, weighted by
    // occlusion volume share.
    if (!belief_scene.has_object(target)) {
        dg.has_target_node = true;
        dg.nodes.push_back(kTargetNode);
        const auto stacks = belief_scene.stacks();
        const auto volumes = grid.occlusion_volume_by_stack(stacks);

        std::vector<std::pair<ObjectId, double>> scores;
        double total = 0;
        for (const Stack& st : stacks) {
            if (!st.base_on_table) continue;
            const double v = volumes.at(st.base);
            if (v <= 0) continue;
            const double score = mode == HiddenByMode::Proportional ? v : 1.0 / v;
            scores.push_back({st.base, score});
            total += score;
        }
        if (scores.empty()) {
            // Target unseen but no attributable occlusion: fall back to a
            // uniform belief over table-touching bases.
            for (const Stack& st : stacks)
                if (st.base_on_table) scores.push_back({st.base, 1.0});
            total = static_cast<double>(scores.size());
        }
        for (const auto& [base, score] : scores) {
            const double w = score / total;
            dg.edges.push_back({kTargetNode, base, RelationKind::HiddenBy, w});
            dg.hidden_by_weight_sum += w;
        }
    }
    return dg;
}

std::vector<ObjectId> sinks(const DependencyGraph& dg) {
    std::set<ObjectId> has_out;
    for (const DepEdge& e : dg.edges) has_out.insert(e.from);
    std::vector<ObjectId> out;
    for (ObjectId n : dg.nodes) {
        if (n == kTargetNode) continue;
        if (!has_out.count(n)) out.push_back(n);
    }
    return out;
}

namespace {

// DFS over simple paths, accumulating the weight product into each sink.
void accumulate_paths(const DependencyGraph& dg, ObjectId node, double product,
                      std::set<ObjectId>& on_path, std::map<ObjectId, double>& totals) {
    if (auto it = totals.find(node); it != totals.end()) it->second += product;
    for (const DepEdge& e : dg.edges_from(node)) {
        if (on_path.count(e.to)) continue;
        on_path.insert(e.to);
        accumulate_paths(dg, e.to, product * e.weight, on_path, totals);
        on_path.erase(e.to);
    }
}

}  // namespace

RankedSinks rank_sinks(ObjectId target, const DependencyGraph& dg) {
    if (dg.nodes.size() > 25)
        throw SceneError("dependency graph too large for simple-path enumeration (" +
                         std::to_string(dg.nodes.size()) + " nodes)");
    const auto sink_ids = sinks(dg);
    if (sink_ids.empty()) throw NoSinks("dependency graph has no sinks");

    RankedSinks out;
    for (ObjectId s : sink_ids) out.ranks[s] = 0.0;

    const ObjectId source = dg.has_target_node ? kTargetNode : target;
    const bool source_present =
        std::find(dg.nodes.begin(), dg.nodes.end(), source) != dg.nodes.end();
    if (source_present) {
        std::set<ObjectId> on_path{source};
        accumulate_paths(dg, source, 1.0, on_path, out.ranks);
    }
    // A visible target reached by the "path" of length zero keeps its own
    // accumulated value; unreachable sinks get the floor.
    for (auto& [id, rank] : out.ranks)
        if (rank <= 0.0) rank = kRankFloor;

    out.ordered = sink_ids;
    std::sort(out.ordered.begin(), out.ordered.end(), [&out](ObjectId a, ObjectId b) {
        const double ra = out.ranks.at(a), rb = out.ranks.at(b);
        if (ra != rb) return ra > rb;
        return a < b;
    });
    return out;
}

std::vector<ObjectId> biased_shuffle(const std::vector<ObjectId>& sink_ids,
                                     const std::map<ObjectId, double>& ranks, Rng& rng) {
    std::vector<ObjectId> pool = sink_ids;
    std::vector<ObjectId> out;
    out.reserve(pool.size());
    while (!pool.empty()) {
        double total = 0;
        for (ObjectId id : pool) total += ranks.at(id);
        double draw = rng.uniform() * total;
        size_t chosen = pool.size() - 1;
        for (size_t i = 0; i < pool.size(); ++i) {
            draw -= ranks.at(pool[i]);
            if (draw < 0) {
                chosen = i;
                break;
            }
        }
        out.push_back(pool[chosen]);
        pool.erase(pool.begin() + static_cast<long>(chosen));
    }
    return out;
}

void dump_dot(const DependencyGraph& dg, std::ostream& out) {
    out << "digraph dep {\n";
    for (ObjectId n : dg.nodes) {
        if (n == kTargetNode)
            out << "  T [label=\"target\"];\n";
        else
            out << "  o" << n << " [label=\"" << n << "\"];\n";
    }
    auto name = [](ObjectId n) {
        return n == kTargetNode ? std::string("T") : "o" + std::to_string(n);
    };
    for (const DepEdge& e : dg.edges) {
        const char* kind = e.kind == RelationKind::Below
                               ? "below"
                               : e.kind == RelationKind::GraspBlockedBy ? "blocked" : "hidden";
        out << "  " << name(e.from) << " -> " << name(e.to) << " [label=\"" << kind << " "
            << e.weight << "\"];\n";
    }
    out << "}\n";
}

}  // namespace shelf
