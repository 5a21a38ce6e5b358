#include <doctest.h>

#include <sstream>
#include <vector>

#include "shelf/bench.hpp"

using namespace shelf;

namespace {

PipelineConfig coarse_config() {
    PipelineConfig cfg;
    cfg.voxel_size = 0.02;
    return cfg;
}

std::vector<ActionKind> kinds(const TrialOutcome& out) {
    std::vector<ActionKind> k;
    for (const auto& a : out.actions) k.push_back(a.kind);
    return k;
}

// Fixture 1: a lone, visible, reachable target.
Scene lone_target_scene() {
    const Workspace ws = default_workspace();
    return Scene({{0, Shape::cylinder(0.03, 0.12), {0.0, 0.2, 0, 0}, "red"}}, ws,
                 default_camera(ws), 0);
}

// Fixture 2: one wall eclipses the target; moving it aside is forced.
Scene single_occluder_scene() {
    const Workspace ws = default_workspace();
    return Scene({{1, Shape::box(0.2, 0.06, 0.25), {0.0, 0.12, 0, 0}, "gray"},
                  {0, Shape::cylinder(0.02, 0.08), {0.0, 0.25, 0, 0}, "red"}},
                 ws, default_camera(ws), 0);
}

// Fixture 3: the target is visible but wedged against the wall of a narrow
// shelf. Every approach corridor leaves the workspace, so no sink is
// actionable and the pipeline must prove infeasibility rather than time out.
Scene wedged_scene() {
    Workspace ws;
    ws.interior = {{-0.06, 0.0, 0.0}, {0.06, 0.4, 0.4}};
    return Scene({{0, Shape::cylinder(0.02, 0.1), {0.03, 0.3, 0, 0}, "red"}}, ws,
                 default_camera(ws), 0);
}

// Legality of the action stream: picks and places pair up around a single
// held object, holds keep it, Retrieve happens empty-handed.
void check_action_grammar(const TrialOutcome& out, ObjectId target) {
    std::optional<ObjectId> held;
    for (size_t i = 0; i < out.actions.size(); ++i) {
        const ActionRecord& a = out.actions[i];
        switch (a.kind) {
            case ActionKind::Sense:
                CHECK(a.object == kBackground);
                break;
            case ActionKind::Pick:
                CHECK(!held.has_value());
                held = a.object;
                break;
            case ActionKind::TemporaryHold:
                REQUIRE(held.has_value());
                CHECK(*held == a.object);
                break;
            case ActionKind::Place:
            case ActionKind::PlaceBack:
                REQUIRE(held.has_value());
                CHECK(*held == a.object);
                CHECK(a.to_pose.has_value());
                held.reset();
                break;
            case ActionKind::Retrieve:
                CHECK(!held.has_value());
                CHECK(a.object == target);
                CHECK(i + 1 == out.actions.size());
                break;
        }
        if (a.kind != ActionKind::Sense) CHECK(a.grasp.has_value());
    }
    if (out.status == TrialStatus::Success) {
        REQUIRE(!out.actions.empty());
        CHECK(out.actions.back().kind == ActionKind::Retrieve);
    } else {
        CHECK(!held.has_value());  // never ends mid-hold
    }
    // The virtual clock is exactly the per-action cost sum.
    double t = 0;
    for (const auto& a : out.actions) {
        t += a.kind == ActionKind::Sense ? 0.1 : 0.5;
        CHECK(a.time_s == doctest::Approx(t).epsilon(1e-12));
    }
    CHECK(out.elapsed_s == doctest::Approx(t).epsilon(1e-12));
}

}  // namespace

TEST_CASE("fixture: lone visible target is solved in one action") {
    const Scene w = lone_target_scene();
    Rng rng(5);
    const TrialOutcome out = rc_pipeline(w, 0, coarse_config(), rng);
    CHECK(out.status == TrialStatus::Success);
    CHECK(kinds(out) == std::vector<ActionKind>{ActionKind::Sense, ActionKind::Retrieve});
    CHECK(out.actions[1].object == 0);
    CHECK(out.n_actions() == 1);
    CHECK(out.elapsed_s == doctest::Approx(0.6));
    CHECK(out.objects_discovered == 1);
    check_action_grammar(out, 0);
}

TEST_CASE("fixture: single occluder forces pick, place, retrieve") {
    const Scene w = single_occluder_scene();
    Rng rng(5);
    const TrialOutcome out = rc_pipeline(w, 0, coarse_config(), rng);
    CHECK(out.status == TrialStatus::Success);
    CHECK(kinds(out) == std::vector<ActionKind>{ActionKind::Sense, ActionKind::Pick,
                                                ActionKind::Place, ActionKind::Sense,
                                                ActionKind::Retrieve});
    CHECK(out.actions[1].object == 1);  // the wall moves...
    CHECK(out.actions[2].object == 1);
    CHECK(out.actions[4].object == 0);  // ...then the target comes out
    CHECK(out.n_actions() == 3);
    CHECK(out.elapsed_s == doctest::Approx(1.7));
    CHECK(out.objects_discovered == 2);
    CHECK(out.max_hidden_by_dev <= 1e-9);
    check_action_grammar(out, 0);

    // The same fixture replays safely against ground truth.
    const SafetyReport report = verify_trial_safety(w, out, coarse_config());
    CHECK(report.checked_actions == 3);
    CHECK(report.violations == 0);
}

TEST_CASE("fixture: wedged target yields InfeasibleDetected, not Timeout") {
    const Scene w = wedged_scene();
    Rng rng(5);
    const TrialOutcome out = rc_pipeline(w, 0, coarse_config(), rng);
    CHECK(out.status == TrialStatus::InfeasibleDetected);
    CHECK(kinds(out) == std::vector<ActionKind>{ActionKind::Sense});
    CHECK(out.n_actions() == 0);
    CHECK(out.elapsed_s == doctest::Approx(0.1));
    CHECK(out.elapsed_s < coarse_config().time_limit_s);
}

TEST_CASE("pipelines are deterministic for a fixed seed") {
    Rng gen(91);
    const Scene w = generate_scene(6, gen);
    const PipelineConfig cfg = coarse_config();
    auto log_of = [&](auto&& pipeline, uint64_t seed) {
        Rng rng(seed);
        const TrialOutcome out = pipeline(w, w.target(), cfg, rng);
        std::ostringstream s;
        write_action_log(out, s);
        return s.str();
    };
    CHECK(log_of(rc_pipeline, 7) == log_of(rc_pipeline, 7));
    CHECK(log_of(random_pipeline, 7) == log_of(random_pipeline, 7));
}

TEST_CASE("random baseline solves the lone-target fixture") {
    const Scene w = lone_target_scene();
    Rng rng(5);
    const TrialOutcome out = random_pipeline(w, 0, coarse_config(), rng);
    CHECK(out.status == TrialStatus::Success);
    CHECK(kinds(out) == std::vector<ActionKind>{ActionKind::Sense, ActionKind::Retrieve});
    check_action_grammar(out, 0);
}

TEST_CASE("action log format is stable and parseable by line") {
    const Scene w = single_occluder_scene();
    Rng rng(5);
    const TrialOutcome out = rc_pipeline(w, 0, coarse_config(), rng);
    std::ostringstream s;
    write_action_log(out, s);
    std::istringstream in(s.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("shelf-log v1 status success ", 0) == 0);
    size_t n_lines = 0;
    std::string last;
    while (std::getline(in, line)) {
        ++n_lines;
        last = line;
        if (line != "end") CHECK(line.rfind("action ", 0) == 0);
    }
    CHECK(last == "end");
    CHECK(n_lines == out.actions.size() + 1);
}

TEST_CASE("structural invariants and safety on generated scenes") {
    PipelineConfig cfg = coarse_config();
    cfg.time_limit_s = 10.0;  // virtual seconds; keeps the unit suite quick
    for (uint64_t seed : {92u, 93u, 94u}) {
        Rng gen(seed);
        const Scene w = generate_scene(6, gen);
        for (Heuristic h : {Heuristic::RankBiased, Heuristic::UniformSinks}) {
            cfg.heuristic = h;
            Rng rng(seed + 100);
            const TrialOutcome out = rc_pipeline(w, w.target(), cfg, rng);
            CHECK(out.status != TrialStatus::Error);
            check_action_grammar(out, w.target());
            CHECK(out.max_hidden_by_dev <= 1e-9);
            const SafetyReport report = verify_trial_safety(w, out, cfg);
            CHECK(report.checked_actions == out.n_actions());
            CHECK(report.violations == 0);
        }
        Rng rng(seed + 200);
        const TrialOutcome out = random_pipeline(w, w.target(), cfg, rng);
        CHECK(out.status != TrialStatus::Error);
        check_action_grammar(out, w.target());
        const SafetyReport report = verify_trial_safety(w, out, cfg);
        CHECK(report.violations == 0);
    }
}
