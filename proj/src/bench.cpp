#include "shelf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "shelf/sensor.hpp"

namespace shelf {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

constexpr int kInnerPlaceTries = 200;

}  // namespace

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Random: return "random";
        case Algorithm::RC: return "rc";
        case Algorithm::RCHeuristic: return "rc_heuristic";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "random") return Algorithm::Random;
    if (name == "rc") return Algorithm::RC;
    if (name == "rc_heuristic") return Algorithm::RCHeuristic;
    throw SceneError("unknown algorithm: " + name);
}

Workspace default_workspace() {
    Workspace ws;
    ws.interior = {{-0.3, 0.0, 0.0}, {0.3, 0.4, 0.4}};
    return ws;
}

CameraModel default_camera(const Workspace& ws) {
    // Stand-off and pitch chosen so the full interior projects inside the
    // image (asserted in tests): nothing can hide by leaving the frustum.
    return make_shelf_camera(ws.interior, 0.5, ws.interior.max.z + 0.10, 0.45);
}

namespace {

double in_radius(const Shape& s) {
    if (s.kind == ShapeKind::Cylinder) return s.a;
    return 0.5 * std::min(s.a, s.b);
}

bool footprint_inside(const ObjectInstance& o, const Aabb& ws) {
    const double top = o.pose.z + o.shape.height();
    if (o.pose.z < ws.min.z - kSupportEps || top > ws.max.z + kSupportEps) return false;
    if (o.shape.kind == ShapeKind::Cylinder) {
        return o.pose.x - o.shape.a >= ws.min.x && o.pose.x + o.shape.a <= ws.max.x &&
               o.pose.y - o.shape.a >= ws.min.y && o.pose.y + o.shape.a <= ws.max.y;
    }
    for (const Vec2& c : footprint_rect(o.shape, o.pose).corners())
        if (c.x < ws.min.x || c.x > ws.max.x || c.y < ws.min.y || c.y > ws.max.y) return false;
    return true;
}

Shape sample_shape(Rng& rng, const GenParams& p) {
    const bool cylinder = rng.uniform() < 0.5;
    const double h = rng.uniform(p.height_min, p.height_max);
    if (cylinder) return Shape::cylinder(rng.uniform(p.cyl_r_min, p.cyl_r_max), h);
    return Shape::box(rng.uniform(p.box_side_min, p.box_side_max),
                      rng.uniform(p.box_side_min, p.box_side_max), h);
}

bool clear_of_others(const ObjectInstance& cand, const std::vector<ObjectInstance>& placed,
                     ObjectId skip, double min_gap) {
    for (const auto& o : placed) {
        if (o.id == skip) continue;
        if (shape_distance(cand.shape, cand.pose, o.shape, o.pose) < min_gap) return false;
    }
    return true;
}

// One full scene attempt; empty optional when an object could not be placed.
std::optional<std::vector<ObjectInstance>> try_layout(int n_objects, Rng& rng,
                                                      const GenParams& p, const Workspace& ws) {
    std::vector<ObjectInstance> placed;
    std::set<ObjectId> used_supports;
    for (int i = 0; i < n_objects; ++i) {
        bool ok = false;
        for (int t = 0; t < kInnerPlaceTries && !ok; ++t) {
            ObjectInstance cand;
            cand.id = i;
            cand.shape = sample_shape(rng, p);
            cand.pose.yaw = cand.shape.kind == ShapeKind::Box ? rng.uniform(0.0, kPi) : 0.0;

            const bool want_stack = rng.uniform() < p.p_stack;
            std::vector<size_t> supports;
            if (want_stack) {
                for (size_t s = 0; s < placed.size(); ++s) {
                    const auto& sup = placed[s];
                    if (used_supports.count(sup.id)) continue;
                    const double top = sup.pose.z + sup.shape.height();
                    if (top + cand.shape.height() > ws.interior.max.z + kSupportEps) continue;
                    if (cand.shape.circum_radius() > in_radius(sup.shape)) continue;
                    supports.push_back(s);
                }
            }
            if (!supports.empty()) {
                const auto& sup = placed[supports[rng.uniform_index(supports.size())]];
                cand.pose.x = sup.pose.x;
                cand.pose.y = sup.pose.y;
                cand.pose.z = sup.pose.z + sup.shape.height();
                if (!footprint_inside(cand, ws.interior)) continue;
                if (!clear_of_others(cand, placed, sup.id, p.min_gap)) continue;
                used_supports.insert(sup.id);
                placed.push_back(cand);
                ok = true;
            } else {
                const double r = cand.shape.circum_radius();
                if (ws.interior.max.x - ws.interior.min.x <= 2 * r ||
                    ws.interior.max.y - ws.interior.min.y <= 2 * r)
                    continue;
                cand.pose.x = rng.uniform(ws.interior.min.x + r, ws.interior.max.x - r);
                cand.pose.y = rng.uniform(ws.interior.min.y + r, ws.interior.max.y - r);
                cand.pose.z = ws.table_z();
                if (!footprint_inside(cand, ws.interior)) continue;
                if (!clear_of_others(cand, placed, kBackground, p.min_gap)) continue;
                placed.push_back(cand);
                ok = true;
            }
        }
        if (!ok) return std::nullopt;
    }
    return placed;
}

}  // namespace

Scene generate_scene(int n_objects, Rng& rng, const GenParams& params) {
    if (n_objects < 1) throw SceneError("n_objects must be >= 1");
    const Workspace ws = default_workspace();
    const CameraModel cam = default_camera(ws);

    for (int attempt = 0; attempt < params.max_gen_tries; ++attempt) {
        auto layout = try_layout(n_objects, rng, params, ws);
        if (!layout) continue;

        Scene scene(std::move(*layout), ws, cam, 0);
        try {
            scene.validate();
        } catch (const SceneError&) {
            continue;
        }

        const auto visible = visible_objects(render(scene));
        std::vector<ObjectId> hidden;
        for (const auto& o : scene.objects())
            if (std::find(visible.begin(), visible.end(), o.id) == visible.end())
                hidden.push_back(o.id);
        if (hidden.empty()) continue;

        // Target: hidden object with the most objects stacked above it.
        const auto stacks = scene.stacks();
        ObjectId best = hidden.front();
        int best_above = -1;
        for (ObjectId h : hidden) {
            int above = 0;
            for (const auto& st : stacks) {
                if (std::find(st.members.begin(), st.members.end(), h) == st.members.end())
                    continue;
                const double hz = scene.object(h).pose.z;
                for (ObjectId m : st.members)
                    if (m != h && scene.object(m).pose.z > hz + kSupportEps) ++above;
                break;
            }
            if (above > best_above) {
                best_above = above;
                best = h;
            }
        }
        return Scene(scene.objects(), ws, cam, best);
    }
    throw GenerationExhausted("no valid scene with a hidden object after " +
                              std::to_string(params.max_gen_tries) + " attempts (n=" +
                              std::to_string(n_objects) + ")");
}

uint64_t scene_stream_seed(const TrialSpec& spec) {
    return mix_seed(spec.scene_seed, static_cast<uint64_t>(spec.n_objects), 0x5ce9eull);
}

uint64_t trial_stream_seed(const TrialSpec& spec) {
    return mix_seed(spec.scene_seed, static_cast<uint64_t>(spec.n_objects),
                    0x7a1a1ull + static_cast<uint64_t>(spec.algorithm));
}

TrialOutcome run_trial(const TrialSpec& spec) {
    Rng gen_rng(scene_stream_seed(spec));
    const Scene scene = generate_scene(spec.n_objects, gen_rng, spec.gen);

    PipelineConfig cfg = spec.config;
    cfg.seed = trial_stream_seed(spec);
    Rng rng(cfg.seed);
    switch (spec.algorithm) {
        case Algorithm::Random:
            return random_pipeline(scene, scene.target(), cfg, rng);
        case Algorithm::RC:
            cfg.heuristic = Heuristic::UniformSinks;
            return rc_pipeline(scene, scene.target(), cfg, rng);
        case Algorithm::RCHeuristic:
            cfg.heuristic = Heuristic::RankBiased;
            return rc_pipeline(scene, scene.target(), cfg, rng);
    }
    throw SceneError("bad algorithm");
}

BenchResult run_benchmark(const std::vector<TrialSpec>& specs, int workers) {
    if (workers <= 0) {
        if (const char* env = std::getenv("SHELF_WORKERS")) workers = std::atoi(env);
        if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 1;
    }
    workers = std::min<int>(workers, std::max<size_t>(specs.size(), size_t{1}));

    std::vector<TrialOutcome> outcomes(specs.size());
    std::atomic<size_t> cursor{0};
    auto work = [&] {
        while (true) {
            const size_t i = cursor.fetch_add(1);
            if (i >= specs.size()) return;
            try {
                outcomes[i] = run_trial(specs[i]);
            } catch (const std::exception& e) {
                TrialOutcome out;
                out.status = TrialStatus::Error;
                out.error = e.what();
                outcomes[i] = std::move(out);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    BenchResult result;
    result.outcomes = std::move(outcomes);
    result.rows.reserve(specs.size());
    for (size_t i = 0; i < specs.size(); ++i) {
        const auto& spec = specs[i];
        const auto& out = result.outcomes[i];
        BenchRow row;
        row.trial_id = spec.trial_id;
        row.algorithm = spec.algorithm;
        row.n_objects = spec.n_objects;
        row.scene_seed = spec.scene_seed;
        row.status = out.status;
        row.n_actions = out.n_actions();
        row.elapsed_s = out.elapsed_s;
        row.discovered = out.objects_discovered;
        result.rows.push_back(row);
    }
    return result;
}

void write_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
    out << "trial_id,algorithm,n_objects,scene_seed,status,n_actions,elapsed_s,discovered\n";
    for (const auto& r : rows) {
        out << r.trial_id << ',' << to_string(r.algorithm) << ',' << r.n_objects << ','
            << r.scene_seed << ',' << to_string(r.status) << ',' << r.n_actions << ','
            << fmt_double(r.elapsed_s) << ',' << r.discovered << '\n';
    }
}

namespace {

TrialStatus parse_status(const std::string& s) {
    if (s == "success") return TrialStatus::Success;
    if (s == "timeout") return TrialStatus::Timeout;
    if (s == "infeasible") return TrialStatus::InfeasibleDetected;
    if (s == "error") return TrialStatus::Error;
    throw SceneError("unknown status: " + s);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

std::vector<BenchRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        line != "trial_id,algorithm,n_objects,scene_seed,status,n_actions,elapsed_s,discovered")
        throw SceneError("bad CSV header");
    std::vector<BenchRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8) throw SceneError("malformed CSV row: " + line);
        try {
            BenchRow r;
            r.trial_id = std::stoi(f[0]);
            r.algorithm = parse_algorithm(f[1]);
            r.n_objects = std::stoi(f[2]);
            r.scene_seed = std::stoull(f[3]);
            r.status = parse_status(f[4]);
            r.n_actions = std::stoi(f[5]);
            r.elapsed_s = std::stod(f[6]);
            r.discovered = std::stoi(f[7]);
            rows.push_back(r);
        } catch (const std::invalid_argument&) {
            throw SceneError("malformed CSV row: " + line);
        } catch (const std::out_of_range&) {
            throw SceneError("malformed CSV row: " + line);
        }
    }
    return rows;
}

void write_manifest(const std::vector<TrialSpec>& specs, std::ostream& out) {
    nlohmann::json j;
    j["format"] = "shelf-bench v1";
    if (!specs.empty()) {
        const PipelineConfig& c = specs.front().config;
        j["config"] = {{"time_limit_s", c.time_limit_s},
                       {"voxel_size", c.voxel_size},
                       {"n_grasps", c.n_grasps},
                       {"yaw_bins", c.yaw_bins},
                       {"max_place_tries", c.max_place_tries},
                       {"rank_mode",
                        c.rank_mode == HiddenByMode::Proportional ? "proportional" : "inverse"},
                       {"sense_cost_s", c.sense_cost_s},
                       {"action_cost_s", c.action_cost_s}};
        const GenParams& g = specs.front().gen;
        j["gen"] = {{"cyl_r_min", g.cyl_r_min},       {"cyl_r_max", g.cyl_r_max},
                    {"box_side_min", g.box_side_min}, {"box_side_max", g.box_side_max},
                    {"height_min", g.height_min},     {"height_max", g.height_max},
                    {"p_stack", g.p_stack},           {"min_gap", g.min_gap},
                    {"max_gen_tries", g.max_gen_tries}};
    }
    j["trials"] = nlohmann::json::array();
    for (const auto& s : specs) {
        j["trials"].push_back({{"trial_id", s.trial_id},
                               {"scene_seed", s.scene_seed},
                               {"n_objects", s.n_objects},
                               {"algorithm", to_string(s.algorithm)}});
    }
    out << j.dump(2) << '\n';
}

std::vector<TrialSpec> read_manifest(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
        if (j.at("format") != "shelf-bench v1")
            throw SceneError("unsupported manifest format");
        PipelineConfig cfg;
        GenParams gen;
        if (j.contains("config")) {
            const auto& c = j["config"];
            cfg.time_limit_s = c.value("time_limit_s", cfg.time_limit_s);
            cfg.voxel_size = c.value("voxel_size", cfg.voxel_size);
            cfg.n_grasps = c.value("n_grasps", cfg.n_grasps);
            cfg.yaw_bins = c.value("yaw_bins", cfg.yaw_bins);
            cfg.max_place_tries = c.value("max_place_tries", cfg.max_place_tries);
            cfg.sense_cost_s = c.value("sense_cost_s", cfg.sense_cost_s);
            cfg.action_cost_s = c.value("action_cost_s", cfg.action_cost_s);
            const std::string mode = c.value("rank_mode", std::string("proportional"));
            if (mode == "proportional")
                cfg.rank_mode = HiddenByMode::Proportional;
            else if (mode == "inverse")
                cfg.rank_mode = HiddenByMode::Inverse;
            else
                throw SceneError("unknown rank_mode: " + mode);
        }
        if (j.contains("gen")) {
            const auto& g = j["gen"];
            gen.cyl_r_min = g.value("cyl_r_min", gen.cyl_r_min);
            gen.cyl_r_max = g.value("cyl_r_max", gen.cyl_r_max);
            gen.box_side_min = g.value("box_side_min", gen.box_side_min);
            gen.box_side_max = g.value("box_side_max", gen.box_side_max);
            gen.height_min = g.value("height_min", gen.height_min);
            gen.height_max = g.value("height_max", gen.height_max);
            gen.p_stack = g.value("p_stack", gen.p_stack);
            gen.min_gap = g.value("min_gap", gen.min_gap);
            gen.max_gen_tries = g.value("max_gen_tries", gen.max_gen_tries);
        }
        std::vector<TrialSpec> specs;
        for (const auto& t : j.at("trials")) {
            TrialSpec s;
            s.trial_id = t.at("trial_id").get<int>();
            s.scene_seed = t.at("scene_seed").get<uint64_t>();
            s.n_objects = t.at("n_objects").get<int>();
            s.algorithm = parse_algorithm(t.at("algorithm").get<std::string>());
            s.config = cfg;
            s.gen = gen;
            if (s.n_objects < 1) throw SceneError("n_objects must be >= 1");
            specs.push_back(std::move(s));
        }
        return specs;
    } catch (const nlohmann::json::exception& e) {
        throw SceneError(std::string("malformed manifest: ") + e.what());
    }
}

std::vector<TrialSpec> make_reference_specs(int seeds, const std::vector<int>& sizes,
                                            const PipelineConfig& config, uint64_t base_seed) {
    std::vector<TrialSpec> specs;
    int trial_id = 0;
    for (int n : sizes)
        for (int i = 0; i < seeds; ++i)
            for (Algorithm a : {Algorithm::Random, Algorithm::RC, Algorithm::RCHeuristic}) {
                TrialSpec s;
                s.trial_id = trial_id++;
                s.scene_seed = base_seed + static_cast<uint64_t>(i);
                s.n_objects = n;
                s.algorithm = a;
                s.config = config;
                specs.push_back(s);
            }
    return specs;
}

namespace {

double quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return 0.0;
    const double pos = p * (static_cast<double>(v.size()) - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<BenchRow>& rows) {
    std::set<Algorithm> algorithms;
    for (const auto& r : rows) algorithms.insert(r.algorithm);

    // Scenes solved by every algorithm present.
    std::map<std::pair<int, uint64_t>, std::set<Algorithm>> solved;
    for (const auto& r : rows)
        if (r.status == TrialStatus::Success) solved[{r.n_objects, r.scene_seed}].insert(r.algorithm);
    std::set<std::pair<int, uint64_t>> subset;
    for (const auto& [key, algs] : solved)
        if (algs.size() == algorithms.size()) subset.insert(key);

    std::map<std::pair<Algorithm, int>, AggregateRow> groups;
    std::map<std::pair<Algorithm, int>, std::vector<double>> actions, elapsed;
    for (const auto& r : rows) {
        AggregateRow& g = groups[{r.algorithm, r.n_objects}];
        g.algorithm = r.algorithm;
        g.n_objects = r.n_objects;
        ++g.trials;
        switch (r.status) {
            case TrialStatus::Success: ++g.successes; break;
            case TrialStatus::Timeout: ++g.timeouts; break;
            case TrialStatus::InfeasibleDetected: ++g.infeasible; break;
            case TrialStatus::Error: ++g.errors; break;
        }
        if (r.status == TrialStatus::Success && subset.count({r.n_objects, r.scene_seed})) {
            actions[{r.algorithm, r.n_objects}].push_back(r.n_actions);
            elapsed[{r.algorithm, r.n_objects}].push_back(r.elapsed_s);
        }
    }
    std::vector<AggregateRow> out;
    for (auto& [key, g] : groups) {
        const auto& acts = actions[key];
        g.subset_count = static_cast<int>(acts.size());
        if (g.subset_count > 0) {
            g.actions_q1 = quantile(acts, 0.25);
            g.actions_median = quantile(acts, 0.5);
            g.actions_q3 = quantile(acts, 0.75);
            const auto& el = elapsed[key];
            g.elapsed_q1 = quantile(el, 0.25);
            g.elapsed_median = quantile(el, 0.5);
            g.elapsed_q3 = quantile(el, 0.75);
        }
        out.push_back(g);
    }
    return out;
}

void write_report(const std::vector<BenchRow>& rows, std::ostream& summary,
                  const std::string& out_dir) {
    const auto agg = aggregate(rows);
    summary << "algorithm      n  trials  success  timeout  infeasible  error  rate\n";
    for (const auto& g : agg) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-12s %3d %7d %8d %8d %11d %6d  %.3f\n",
                      to_string(g.algorithm), g.n_objects, g.trials, g.successes, g.timeouts,
                      g.infeasible, g.errors,
                      g.trials ? static_cast<double>(g.successes) / g.trials : 0.0);
        summary << buf;
    }
    bool any_subset = false;
    for (const auto& g : agg) any_subset = any_subset || g.subset_count > 0;
    summary << "\nsolved-by-all subset (actions, elapsed):\n";
    if (!any_subset) {
        summary << "  EMPTY (no scene solved by all algorithms)\n";
    } else {
        for (const auto& g : agg) {
            if (g.subset_count == 0) continue;
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "  %-12s n=%d count=%d actions[q1 %.1f med %.1f q3 %.1f] "
                          "elapsed[q1 %.2f med %.2f q3 %.2f]\n",
                          to_string(g.algorithm), g.n_objects, g.subset_count, g.actions_q1,
                          g.actions_median, g.actions_q3, g.elapsed_q1, g.elapsed_median,
                          g.elapsed_q3);
            summary << buf;
        }
    }
    if (out_dir.empty()) return;

    std::filesystem::create_directories(out_dir);
    std::ofstream sr(out_dir + "/success_rate.tsv");
    sr << "algorithm\tn_objects\ttrials\tsuccesses\tsuccess_rate\ttimeouts\tinfeasible\terrors\n";
    for (const auto& g : agg)
        sr << to_string(g.algorithm) << '\t' << g.n_objects << '\t' << g.trials << '\t'
           << g.successes << '\t'
           << fmt_double(g.trials ? static_cast<double>(g.successes) / g.trials : 0.0) << '\t'
           << g.timeouts << '\t' << g.infeasible << '\t' << g.errors << '\n';

    auto write_metric = [&](const std::string& name, auto q1, auto med, auto q3) {
        std::ofstream f(out_dir + "/" + name + ".tsv");
        f << "algorithm\tn_objects\tsubset_count\tq1\tmedian\tq3\n";
        if (!any_subset) f << "# solved-by-all subset empty\n";
        for (const auto& g : agg)
            f << to_string(g.algorithm) << '\t' << g.n_objects << '\t' << g.subset_count << '\t'
              << fmt_double(q1(g)) << '\t' << fmt_double(med(g)) << '\t' << fmt_double(q3(g))
              << '\n';
    };
    write_metric(
        "actions", [](const AggregateRow& g) { return g.actions_q1; },
        [](const AggregateRow& g) { return g.actions_median; },
        [](const AggregateRow& g) { return g.actions_q3; });
    write_metric(
        "runtime", [](const AggregateRow& g) { return g.elapsed_q1; },
        [](const AggregateRow& g) { return g.elapsed_median; },
        [](const AggregateRow& g) { return g.elapsed_q3; });
}

}  // namespace shelf
