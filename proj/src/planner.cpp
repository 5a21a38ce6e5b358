#include "shelf/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>

#include "shelf/sensor.hpp"

namespace shelf {

const char* to_string(ActionKind k) {
    switch (k) {
        case ActionKind::Pick: return "pick";
        case ActionKind::Place: return "place";
        case ActionKind::TemporaryHold: return "hold";
        case ActionKind::PlaceBack: return "placeback";
        case ActionKind::Retrieve: return "retrieve";
        case ActionKind::Sense: return "sense";
    }
    return "?";
}

const char* to_string(TrialStatus s) {
    switch (s) {
        case TrialStatus::Success: return "success";
        case TrialStatus::Timeout: return "timeout";
        case TrialStatus::InfeasibleDetected: return "infeasible";
        case TrialStatus::Error: return "error";
    }
    return "?";
}

int TrialOutcome::n_actions() const {
    int n = 0;
    for (const auto& a : actions)
        if (a.kind != ActionKind::Sense) ++n;
    return n;
}

namespace {

// Hidden objects directly above a pick candidate are vetoed by looking for
// Occluded voxel centers within this many voxels of its top face.
constexpr double kHiddenSupportVoxels = 1.5;
// ... but only when the occlusion also persists through this z band above
// the top face: any real object is at least this tall, so a shallow sliver
// of occluded space just above the top cannot conceal a resting object.
constexpr double kHiddenProbeLo = 0.04;
constexpr double kHiddenProbeHi = 0.07;

struct TrialState {
    const PipelineConfig& cfg;
    Rng& rng;
    ObjectId target;
    Scene world;  // ground truth; held object removed while in hand
    std::optional<ObjectInstance> held;
    SenseResult sense;
    std::vector<ObjectId> visible;
    Scene belief;
    std::optional<VoxelGrid> grid;
    std::set<ObjectId> ever_seen;
    double clock = 0.0;
    std::vector<ActionRecord> actions;
    double max_hidden_dev = 0.0;
};

void push_action(TrialState& st, ActionKind kind, ObjectId object, const Pose& from,
                 std::optional<Pose> to, std::optional<GraspCandidate> grasp) {
    st.clock += kind == ActionKind::Sense ? st.cfg.sense_cost_s : st.cfg.action_cost_s;
    ActionRecord r;
    r.index = static_cast<int>(st.actions.size());
    r.kind = kind;
    r.object = object;
    r.from_pose = from;
    r.to_pose = to;
    r.grasp = std::move(grasp);
    r.time_s = st.clock;
    st.actions.push_back(std::move(r));
}

// Renders the current world, rebuilds belief + grid, charges sense cost.
// Returns true when a never-before-seen object became visible.
bool sense_now(TrialState& st) {
    st.sense = render(st.world);
    st.visible = visible_objects(st.sense);
    st.belief = st.world.restricted_to(st.visible);
    st.grid = VoxelGrid::build(st.sense, st.world.camera(), st.belief, st.world.workspace(),
                               st.cfg.voxel_size);
    const bool newly = std::any_of(st.visible.begin(), st.visible.end(),
                                   [&](ObjectId id) { return !st.ever_seen.count(id); });
    st.ever_seen.insert(st.visible.begin(), st.visible.end());
    push_action(st, ActionKind::Sense, kBackground, Pose{}, std::nullopt, std::nullopt);
    return newly;
}

bool timed_out(const TrialState& st) { return st.clock >= st.cfg.time_limit_s; }

// True when Occluded space sits directly above the object's top face inside
// its footprint: an unseen object could be resting on it, so picking it is
// unsafe (the hidden load would be dragged or toppled).
bool maybe_supports_hidden(const TrialState& st, const ObjectInstance& obj) {
    const double top = obj.pose.z + obj.shape.height();
    const double band = kHiddenSupportVoxels * st.grid->voxel_size();
    const auto& occ = st.grid->occluded_centers();
    bool at_face = false, at_probe = false;
    for (size_t i = 0; i < occ.x.size(); ++i) {
        const double dz = occ.z[i] - top;
        const bool in_face = dz > -kSupportEps && dz <= band;
        const bool in_probe = dz > kHiddenProbeLo && dz <= kHiddenProbeHi;
        if (!in_face && !in_probe) continue;
        if (point_footprint_distance({occ.x[i], occ.y[i]}, obj.shape, obj.pose) > 0.0) continue;
        at_face = at_face || in_face;
        at_probe = at_probe || in_probe;
        if (at_face && at_probe) return true;
    }
    return false;
}

// Pick feasibility in the current belief, including the hidden-support veto
// and visible objects resting on it.
std::optional<GraspCandidate> pick_plan(TrialState& st, ObjectId id) {
    if (!st.belief.has_object(id)) return std::nullopt;
    if (!st.belief.supported_by(id).empty()) return std::nullopt;
    if (maybe_supports_hidden(st, st.belief.object(id))) return std::nullopt;
    return plan_pick(id, st.belief, *st.grid, st.cfg.arm, st.cfg.n_grasps, st.rng);
}

PlacementParams placement_params(const PipelineConfig& cfg) {
    return {cfg.yaw_bins, cfg.max_place_tries, cfg.n_grasps};
}

enum class MoveResult { Moved, NoMove, TimedOut };

// Tries to pick one object from `order` and place it somewhere new; the
// first fully plannable move is executed (one pick + one place).
MoveResult try_move_one(TrialState& st, const std::vector<ObjectId>& order) {
    for (ObjectId id : order) {
        if (timed_out(st)) return MoveResult::TimedOut;
        auto grasp = pick_plan(st, id);
        if (!grasp) continue;
        const ObjectInstance inst = st.belief.object(id);
        auto plan =
            sample_placement(*st.grid, st.belief, inst, st.cfg.arm, placement_params(st.cfg),
                             st.rng);
        if (!plan) continue;
        st.world = st.world.apply_pick(id);
        push_action(st, ActionKind::Pick, id, inst.pose, std::nullopt, *grasp);
        try {
            st.world = st.world.apply_place(id, inst, plan->pose);
        } catch (const SceneError& e) {
            throw SceneError(std::string("try_move_one: ") + e.what());
        }
        push_action(st, ActionKind::Place, id, inst.pose, plan->pose, plan->grasp);
        return MoveResult::Moved;
    }
    return MoveResult::NoMove;
}

struct FallbackStep {
    bool acted = false;       // the object was actually lifted
    bool discovered = false;  // a new object became visible
};

// Picks `id`, holds it out of the camera view, re-senses, then either
// places it at a fresh spot or puts it back exactly where it was.
// `discovered` compares against the sensing preceding the hold (a re-reveal
// of a previously seen object counts: the dependency graph changes).
FallbackStep move_or_placeback(TrialState& st, ObjectId id) {
    FallbackStep out;
    auto grasp = pick_plan(st, id);
    if (!grasp) return out;
    out.acted = true;

    const std::vector<ObjectId> before = st.visible;
    const ObjectInstance inst = st.belief.object(id);
    st.held = inst;
    st.world = st.world.apply_pick(id);
    push_action(st, ActionKind::Pick, id, inst.pose, std::nullopt, *grasp);
    push_action(st, ActionKind::TemporaryHold, id, inst.pose, std::nullopt, *grasp);

    sense_now(st);
    out.discovered = did_discover_object(before, st.visible);

    auto plan = sample_placement(*st.grid, st.belief, inst, st.cfg.arm, placement_params(st.cfg),
                                 st.rng);
    if (plan) {
        try {
            st.world = st.world.apply_place(id, inst, plan->pose);
        } catch (const SceneError& e) {
            throw SceneError(std::string("fallback: ") + e.what());
        }
        push_action(st, ActionKind::Place, id, inst.pose, plan->pose, plan->grasp);
    } else {
        st.world = st.world.apply_restore(inst);
        push_action(st, ActionKind::PlaceBack, id, inst.pose, inst.pose, *grasp);
    }
    st.held.reset();

    sense_now(st);
    out.discovered = out.discovered || did_discover_object(before, st.visible);
    return out;
}

void track_hidden_dev(TrialState& st, const DependencyGraph& dg) {
    if (!dg.has_target_node || dg.hidden_by_weight_sum <= 0.0) return;
    st.max_hidden_dev = std::max(st.max_hidden_dev, std::abs(dg.hidden_by_weight_sum - 1.0));
}

TrialOutcome finish(TrialState& st, TrialStatus status, std::string error = {}) {
    TrialOutcome out;
    out.status = status;
    out.actions = std::move(st.actions);
    out.elapsed_s = st.clock;
    out.objects_discovered = static_cast<int>(st.ever_seen.size());
    out.max_hidden_by_dev = st.max_hidden_dev;
    out.error = std::move(error);
    return out;
}

// Retrieval attempt shared by both pipelines: target is a sink; if it can be
// grasped it is pulled out and the trial succeeds.
bool try_retrieve(TrialState& st) {
    auto grasp = pick_plan(st, st.target);
    if (!grasp) return false;
    const Pose from = st.world.object(st.target).pose;
    st.world = st.world.apply_pick(st.target);
    push_action(st, ActionKind::Retrieve, st.target, from, std::nullopt, *grasp);
    return true;
}

std::map<ObjectId, double> uniform_ranks(const std::vector<ObjectId>& ids) {
    std::map<ObjectId, double> r;
    for (ObjectId id : ids) r[id] = 1.0;
    return r;
}

}  // namespace

TrialOutcome rc_pipeline(const Scene& world, ObjectId target, const PipelineConfig& config,
                         Rng& rng) {
    TrialState st{config, rng, target, world, {}, {}, {}, {}, {}, {}, 0.0, {}, 0.0};
    try {
        while (true) {
            if (timed_out(st)) return finish(st, TrialStatus::Timeout);
            sense_now(st);

            DependencyGraph dg = build_dep_graph(st.belief, *st.grid, config.arm, target,
                                                 config.n_grasps, rng, config.rank_mode);
            track_hidden_dev(st, dg);

            RankedSinks ranked;
            try {
                ranked = rank_sinks(target, dg);
            } catch (const NoSinks&) {
                return finish(st, TrialStatus::InfeasibleDetected);
            }
            const bool target_is_sink =
                std::find(ranked.ordered.begin(), ranked.ordered.end(), target) !=
                ranked.ordered.end();
            if (target_is_sink && try_retrieve(st)) return finish(st, TrialStatus::Success);
            // An unretrievable sink target falls through to rearrangement:
            // moving neighbors (or the target itself) can free a grasp.

            const auto& ranks = config.heuristic == Heuristic::RankBiased
                                    ? ranked.ranks
                                    : uniform_ranks(ranked.ordered);
            const MoveResult moved = try_move_one(st, biased_shuffle(ranked.ordered, ranks, rng));
            if (moved == MoveResult::TimedOut) return finish(st, TrialStatus::Timeout);
            if (moved == MoveResult::Moved) continue;

            // Fallback sweep: look behind each sink, restart on discovery or
            // on any placement becoming possible.
            bool failure = true;
            const std::vector<ObjectId> sink_ids =
                config.heuristic == Heuristic::RankBiased ? ranked.ordered : sinks(dg);
            for (ObjectId s : sink_ids) {
                if (timed_out(st)) return finish(st, TrialStatus::Timeout);
                const FallbackStep step = move_or_placeback(st, s);
                if (!step.acted) continue;
                if (step.discovered) {
                    failure = false;
                    break;
                }
                std::vector<ObjectId> uniform = sink_ids;
                rng.shuffle(uniform);
                const MoveResult again = try_move_one(st, uniform);
                if (again == MoveResult::TimedOut) return finish(st, TrialStatus::Timeout);
                if (again == MoveResult::Moved) {
                    failure = false;
                    break;
                }
            }
            if (failure) return finish(st, TrialStatus::InfeasibleDetected);
        }
    } catch (const SceneError& e) {
        return finish(st, TrialStatus::Error, e.what());
    }
}

TrialOutcome random_pipeline(const Scene& world, ObjectId target, const PipelineConfig& config,
                             Rng& rng) {
    TrialState st{config, rng, target, world, {}, {}, {}, {}, {}, {}, 0.0, {}, 0.0};
    try {
        while (true) {
            if (timed_out(st)) return finish(st, TrialStatus::Timeout);
            sense_now(st);

            DependencyGraph dg = build_dep_graph(st.belief, *st.grid, config.arm, target,
                                                 config.n_grasps, rng, config.rank_mode);
            track_hidden_dev(st, dg);
            std::vector<ObjectId> sink_ids = sinks(dg);
            if (sink_ids.empty()) continue;  // no infeasibility detection here

            if (std::find(sink_ids.begin(), sink_ids.end(), target) != sink_ids.end() &&
                try_retrieve(st))
                return finish(st, TrialStatus::Success);

            rng.shuffle(sink_ids);
            const MoveResult moved = try_move_one(st, sink_ids);
            if (moved == MoveResult::TimedOut) return finish(st, TrialStatus::Timeout);
            // NoMove: keep sensing until the clock runs out.
        }
    } catch (const SceneError& e) {
        return finish(st, TrialStatus::Error, e.what());
    }
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_pose(std::ostream& out, const Pose& p) {
    out << fmt_double(p.x) << ' ' << fmt_double(p.y) << ' ' << fmt_double(p.z) << ' '
        << fmt_double(p.yaw);
}

}  // namespace

void write_action_log(const TrialOutcome& outcome, std::ostream& out) {
    out << "shelf-log v1 status " << to_string(outcome.status) << " elapsed "
        << fmt_double(outcome.elapsed_s) << " discovered " << outcome.objects_discovered << '\n';
    for (const auto& a : outcome.actions) {
        out << "action " << a.index << ' ' << to_string(a.kind) << ' ' << a.object << ' '
            << fmt_double(a.time_s) << " from ";
        write_pose(out, a.from_pose);
        if (a.to_pose) {
            out << " to ";
            write_pose(out, *a.to_pose);
        }
        if (a.grasp) {
            out << " grasp ";
            write_pose(out, a.grasp->gripper_pose);
            out << ' ' << fmt_double(a.grasp->approach.x) << ' '
                << fmt_double(a.grasp->approach.y);
        }
        out << '\n';
    }
    out << "end\n";
}

namespace {

// Swept-volume audit of one arm motion: signed clearance against every
// ground-truth object except the grasped one, plus proximity to plan-time
// Occluded voxel centers within half a voxel diagonal.
void check_sweep(const Scene& world, const GraspCandidate& grasp, ObjectId moving,
                 const VoxelGrid::OccludedCenters& occluded, double voxel_size,
                 const ArmModel& arm, const char* what, SafetyReport& report) {
    const auto volumes = grasp_volumes(grasp, world.workspace(), arm);
    for (const auto& obj : world.objects()) {
        if (obj.id == moving) continue;
        for (const auto& v : volumes) {
            if (v.distance_to(obj.shape, obj.pose) <= 0.0) {
                ++report.violations;
                report.details.push_back(std::string(what) + ": sweep hits object " +
                                         std::to_string(obj.id));
                break;
            }
        }
    }
    const double half_diag = 0.5 * voxel_size * std::sqrt(3.0);
    for (size_t i = 0; i < occluded.x.size(); ++i) {
        const Vec3 c{occluded.x[i], occluded.y[i], occluded.z[i]};
        for (const auto& v : volumes) {
            if (v.contains(c, half_diag)) {
                ++report.violations;
                report.details.push_back(std::string(what) +
                                         ": sweep enters occluded voxel near (" +
                                         std::to_string(c.x) + ", " + std::to_string(c.y) +
                                         ", " + std::to_string(c.z) + ")");
                break;
            }
        }
    }
}

}  // namespace

SafetyReport verify_trial_safety(const Scene& initial_world, const TrialOutcome& outcome,
                                 const PipelineConfig& config) {
    SafetyReport report;
    Scene world = initial_world;
    std::optional<ObjectInstance> held;
    std::optional<VoxelGrid> grid;

    for (const auto& a : outcome.actions) {
        try {
            switch (a.kind) {
                case ActionKind::Sense: {
                    const SenseResult s = render(world);
                    const Scene belief = world.restricted_to(visible_objects(s));
                    grid = VoxelGrid::build(s, world.camera(), belief, world.workspace(),
                                            config.voxel_size);
                    break;
                }
                case ActionKind::Pick:
                case ActionKind::Retrieve: {
                    ++report.checked_actions;
                    if (!a.grasp) throw SceneError("missing grasp in log");
                    check_sweep(world, *a.grasp, a.object,
                                grid ? grid->occluded_centers() : VoxelGrid::OccludedCenters{},
                                config.voxel_size, config.arm, to_string(a.kind), report);
                    held = world.object(a.object);
                    world = world.apply_pick(a.object);
                    break;
                }
                case ActionKind::TemporaryHold:
                    ++report.checked_actions;
                    break;
                case ActionKind::Place:
                case ActionKind::PlaceBack: {
                    ++report.checked_actions;
                    if (!a.grasp || !a.to_pose || !held || held->id != a.object)
                        throw SceneError("inconsistent place record in log");
                    const auto occluded =
                        grid ? grid->occluded_centers() : VoxelGrid::OccludedCenters{};
                    check_sweep(world, *a.grasp, a.object, occluded, config.voxel_size,
                                config.arm, to_string(a.kind), report);
                    if (a.kind == ActionKind::Place) {
                        // The body itself must stay clear of occluded columns.
                        for (size_t i = 0; i < occluded.x.size(); ++i) {
                            if (point_footprint_distance({occluded.x[i], occluded.y[i]},
                                                         held->shape, *a.to_pose) <= 0.0) {
                                ++report.violations;
                                report.details.push_back("place: body overlaps occluded column");
                                break;
                            }
                        }
                        world = world.apply_place(a.object, *held, *a.to_pose);
                    } else {
                        world = world.apply_restore(*held);
                    }
                    held.reset();
                    break;
                }
            }
        } catch (const SceneError& e) {
            ++report.violations;
            report.details.push_back(std::string(to_string(a.kind)) + ": " + e.what());
        }
    }
    return report;
}

}  // namespace shelf
