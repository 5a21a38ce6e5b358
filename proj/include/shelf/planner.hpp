#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shelf/dep_graph.hpp"
#include "shelf/placement.hpp"

namespace shelf {

enum class Heuristic { RankBiased, UniformSinks };

struct PipelineConfig {
    double time_limit_s = 30.0;
    double voxel_size = 0.01;
    int n_grasps = 16;
    int yaw_bins = 8;
    int max_place_tries = 50;
    Heuristic heuristic = Heuristic::RankBiased;
    HiddenByMode rank_mode = HiddenByMode::Proportional;
    uint64_t seed = 0;
    ArmModel arm;

    // Simulated clock costs. Trial time is deterministic virtual time, not
    // wallclock, so outcomes and logs are bit-reproducible.
    double sense_cost_s = 0.1;
    double action_cost_s = 0.5;
};

enum class ActionKind { Pick, Place, TemporaryHold, PlaceBack, Retrieve, Sense };

const char* to_string(ActionKind k);

struct ActionRecord {
    int index = 0;
    ActionKind kind = ActionKind::Sense;
    ObjectId object = kBackground;       // kBackground for Sense
    Pose from_pose;                      // pose before the action
    std::optional<Pose> to_pose;         // Place/PlaceBack destination
    std::optional<GraspCandidate> grasp; // approach used (non-Sense)
    double time_s = 0.0;                 // simulated clock at completion
};

enum class TrialStatus { Success, Timeout, InfeasibleDetected, Error };

const char* to_string(TrialStatus s);

struct TrialOutcome {
    TrialStatus status = TrialStatus::Error;
    std::vector<ActionRecord> actions;
    double elapsed_s = 0.0;
    int objects_discovered = 0;
    // Diagnostics: worst |sum(HiddenBy weights) - 1| over sensing steps
    // with an unseen target and attributable occlusion.
    double max_hidden_by_dev = 0.0;
    std::string error;

    // Manipulation count (Sense records excluded).
    int n_actions() const;
};

// The resolution-complete pipeline: sense -> voxel grid -> dependency graph
// -> ranked sinks -> TryMoveOne, with the MoveOrPlaceback fallback loop and
// exhaustion-based failure detection. heuristic=UniformSinks keeps the same
// structure with equal sink weights.
TrialOutcome rc_pipeline(const Scene& world, ObjectId target, const PipelineConfig& config,
                         Rng& rng);

// Baseline: uniformly random sink, uniformly random valid placement, no
// ranking and no fallback; terminates on success or timeout only.
TrialOutcome random_pipeline(const Scene& world, ObjectId target, const PipelineConfig& config,
                             Rng& rng);

// Line-delimited action log (stable field order, diff-friendly).
void write_action_log(const TrialOutcome& outcome, std::ostream& out);

// Post-hoc safety audit: replays the log against ground truth and reports
// any swept volume touching a non-grasped object or coming within half a
// voxel diagonal of a plan-time Occluded voxel center.
struct SafetyReport {
    int checked_actions = 0;
    int violations = 0;
    std::vector<std::string> details;
};

SafetyReport verify_trial_safety(const Scene& initial_world, const TrialOutcome& outcome,
                                 const PipelineConfig& config);

}  // namespace shelf
