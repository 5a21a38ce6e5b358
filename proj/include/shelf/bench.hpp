#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "shelf/planner.hpp"

namespace shelf {

enum class Algorithm { Random, RC, RCHeuristic };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);  // throws SceneError

struct GenerationExhausted : SceneError {
    using SceneError::SceneError;
};

// Scene generation knobs. Dimension ranges and the shelf size are artifact
// defaults chosen so large scenes are tight but generable.
struct GenParams {
    double cyl_r_min = 0.02, cyl_r_max = 0.04;
    double box_side_min = 0.04, box_side_max = 0.08;
    double height_min = 0.08, height_max = 0.20;
    double p_stack = 0.25;
    double min_gap = 0.005;  // enforced free-space gap between placed objects
    int max_gen_tries = 10000;
};

Workspace default_workspace();  // 0.6 x 0.4 x 0.4 shelf, open face at -y
CameraModel default_camera(const Workspace& ws);

// Rejection-samples a valid scene with at least one hidden object; the
// target is the hidden object with the most objects stacked above it (ties
// to the lowest id). Throws GenerationExhausted when the workspace cannot
// accommodate the request.
Scene generate_scene(int n_objects, Rng& rng, const GenParams& params = {});

struct TrialSpec {
    int trial_id = 0;
    uint64_t scene_seed = 0;
    int n_objects = 0;
    Algorithm algorithm = Algorithm::RCHeuristic;
    PipelineConfig config;
    GenParams gen;
};

struct BenchRow {
    int trial_id = 0;
    Algorithm algorithm = Algorithm::RCHeuristic;
    int n_objects = 0;
    uint64_t scene_seed = 0;
    TrialStatus status = TrialStatus::Error;
    int n_actions = 0;
    double elapsed_s = 0.0;
    int discovered = 0;
};

struct BenchResult {
    std::vector<BenchRow> rows;          // one per spec, in spec order
    std::vector<TrialOutcome> outcomes;  // aligned with rows
};

// Deterministic seed streams for one spec: the scene stream depends only on
// (scene_seed, n_objects) so every algorithm sees the identical scene; the
// trial stream additionally mixes in the algorithm.
uint64_t scene_stream_seed(const TrialSpec& spec);
uint64_t trial_stream_seed(const TrialSpec& spec);

// Runs one spec start to finish (generation + pipeline).
TrialOutcome run_trial(const TrialSpec& spec);

// Executes all specs on a bounded worker pool (workers <= 0: SHELF_WORKERS
// env, else hardware concurrency). Results merge in spec order; per-trial
// errors become Error rows, never abort the batch.
BenchResult run_benchmark(const std::vector<TrialSpec>& specs, int workers = 0);

// CSV: trial_id,algorithm,n_objects,scene_seed,status,n_actions,elapsed_s,
// discovered. Bit-stable.
void write_csv(const std::vector<BenchRow>& rows, std::ostream& out);
std::vector<BenchRow> read_csv(std::istream& in);  // throws SceneError

// Manifest (JSON): defaults block plus one entry per trial.
void write_manifest(const std::vector<TrialSpec>& specs, std::ostream& out);
std::vector<TrialSpec> read_manifest(std::istream& in);  // throws SceneError

// The paper-shaped reference batch: `seeds` scene seeds per size, every
// algorithm, shared config.
std::vector<TrialSpec> make_reference_specs(int seeds, const std::vector<int>& sizes,
                                            const PipelineConfig& config,
                                            uint64_t base_seed = 1);

// Aggregates per (algorithm, n_objects). Medians/quartiles cover only the
// subset of scenes solved by every algorithm present in the rows.
struct AggregateRow {
    Algorithm algorithm = Algorithm::RCHeuristic;
    int n_objects = 0;
    int trials = 0;
    int successes = 0;
    int timeouts = 0;
    int infeasible = 0;
    int errors = 0;
    // Solved-by-all subset stats; count 0 means the subset is empty.
    int subset_count = 0;
    double actions_q1 = 0, actions_median = 0, actions_q3 = 0;
    double elapsed_q1 = 0, elapsed_median = 0, elapsed_q3 = 0;
};

std::vector<AggregateRow> aggregate(const std::vector<BenchRow>& rows);

// Human-readable summary plus plot-data TSVs (success_rate.tsv,
// actions.tsv, runtime.tsv) under out_dir (skipped when out_dir empty).
void write_report(const std::vector<BenchRow>& rows, std::ostream& summary,
                  const std::string& out_dir = {});

}  // namespace shelf
