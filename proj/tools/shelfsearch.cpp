#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "shelf/bench.hpp"
#include "shelf/sensor.hpp"

namespace {

using namespace shelf;

int cmd_gen(uint64_t seed, int n, const std::string& out, const std::string& manifest_out,
            int manifest_seeds, std::vector<int> sizes, double time_limit) {
    if (!manifest_out.empty()) {
        PipelineConfig cfg;
        cfg.time_limit_s = time_limit;
        if (sizes.empty()) sizes = {6, 8, 10};
        const auto specs = make_reference_specs(manifest_seeds, sizes, cfg, seed);
        std::ofstream f(manifest_out);
        if (!f) throw SceneError("cannot open " + manifest_out);
        write_manifest(specs, f);
        std::cout << "wrote " << specs.size() << " trial specs to " << manifest_out << "\n";
        return 0;
    }
    Rng rng(mix_seed(seed, static_cast<uint64_t>(n), 0x5ce9eull));
    const Scene scene = generate_scene(n, rng);
    if (out.empty()) {
        scene.save(std::cout);
    } else {
        scene.save_file(out);
        std::cout << "wrote scene (target " << scene.target() << ") to " << out << "\n";
    }
    return 0;
}

int cmd_run(const std::string& manifest_path, const std::string& csv_path,
            const std::string& log_dir, int workers, bool safety) {
    std::ifstream mf(manifest_path);
    if (!mf) throw SceneError("cannot open " + manifest_path);
    const auto specs = read_manifest(mf);
    if (specs.empty()) throw SceneError("manifest has no trials");

    const BenchResult result = run_benchmark(specs, workers);

    std::ofstream csv(csv_path);
    if (!csv) throw SceneError("cannot open " + csv_path);
    write_csv(result.rows, csv);

    if (!log_dir.empty()) {
        std::filesystem::create_directories(log_dir);
        for (size_t i = 0; i < specs.size(); ++i) {
            std::ostringstream name;
            name << log_dir << "/trial_" << specs[i].trial_id << '_'
                 << to_string(specs[i].algorithm) << ".log";
            std::ofstream lf(name.str());
            write_action_log(result.outcomes[i], lf);
        }
    }

    for (size_t i = 0; i < specs.size(); ++i)
        if (result.outcomes[i].status == TrialStatus::Error)
            std::cerr << "trial " << specs[i].trial_id << " (" << to_string(specs[i].algorithm)
                      << ", n=" << specs[i].n_objects << ", seed=" << specs[i].scene_seed
                      << ") error: " << result.outcomes[i].error << "\n";

    int violations = 0;
    if (safety) {
        for (size_t i = 0; i < specs.size(); ++i) {
            if (result.outcomes[i].status == TrialStatus::Error) continue;
            Rng gen_rng(scene_stream_seed(specs[i]));
            const Scene scene = generate_scene(specs[i].n_objects, gen_rng, specs[i].gen);
            const auto report = verify_trial_safety(scene, result.outcomes[i], specs[i].config);
            violations += report.violations;
            for (const auto& d : report.details)
                std::cerr << "trial " << specs[i].trial_id << " ("
                          << to_string(specs[i].algorithm) << "): " << d << "\n";
        }
        std::cout << "safety violations: " << violations << "\n";
    }

    std::cout << "wrote " << result.rows.size() << " rows to " << csv_path << "\n";
    return violations == 0 ? 0 : 1;
}

int cmd_report(const std::string& csv_path, const std::string& out_dir) {
    std::ifstream f(csv_path);
    if (!f) throw SceneError("cannot open " + csv_path);
    const auto rows = read_csv(f);
    if (rows.empty()) throw SceneError("CSV has no data rows");
    write_report(rows, std::cout, out_dir);
    return 0;
}

int cmd_solve(const std::string& scene_path, const std::string& algorithm, uint64_t seed,
              double time_limit, double voxel_size) {
    const Scene scene = Scene::load_file(scene_path);
    scene.validate();
    PipelineConfig cfg;
    cfg.time_limit_s = time_limit;
    cfg.voxel_size = voxel_size;
    cfg.seed = seed;
    Rng rng(seed);

    const Algorithm alg = parse_algorithm(algorithm);
    TrialOutcome outcome;
    switch (alg) {
        case Algorithm::Random:
            outcome = random_pipeline(scene, scene.target(), cfg, rng);
            break;
        case Algorithm::RC:
            cfg.heuristic = Heuristic::UniformSinks;
            outcome = rc_pipeline(scene, scene.target(), cfg, rng);
            break;
        case Algorithm::RCHeuristic:
            cfg.heuristic = Heuristic::RankBiased;
            outcome = rc_pipeline(scene, scene.target(), cfg, rng);
            break;
    }
    write_action_log(outcome, std::cout);
    if (outcome.status == TrialStatus::Error) {
        std::cerr << "trial error: " << outcome.error << "\n";
        return 1;
    }
    return 0;
}

int cmd_dump(const std::string& scene_path, double voxel_size, const std::string& grid_out,
             const std::string& graph_out, const std::string& depth_out,
             const std::string& seg_out) {
    const Scene scene = Scene::load_file(scene_path);
    scene.validate();
    const SenseResult sense = render(scene);
    if (!depth_out.empty()) write_depth_pgm(sense, depth_out);
    if (!seg_out.empty()) write_seg_ppm(sense, seg_out);

    const Scene belief = scene.restricted_to(visible_objects(sense));
    const VoxelGrid grid =
        VoxelGrid::build(sense, scene.camera(), belief, scene.workspace(), voxel_size);
    if (!grid_out.empty()) {
        std::ofstream f(grid_out);
        if (!f) throw SceneError("cannot open " + grid_out);
        grid.dump(f);
    }
    if (!graph_out.empty()) {
        Rng rng(0);
        const DependencyGraph dg =
            build_dep_graph(belief, grid, ArmModel{}, scene.target(), 16, rng);
        std::ofstream f(graph_out);
        if (!f) throw SceneError("cannot open " + graph_out);
        dump_dot(dg, f);
    }
    std::cout << "visible " << visible_objects(sense).size() << " objects, occupied "
              << grid.occupied_count() << " voxels, occluded " << grid.occluded_count()
              << " voxels\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shelfsearch: occluded-object retrieval planning benchmark"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate a scene (or a benchmark manifest)");
    uint64_t gen_seed = 1;
    int gen_n = 6;
    std::string gen_out, gen_manifest;
    int gen_seeds = 20;
    std::vector<int> gen_sizes;
    double gen_time_limit = 30.0;
    gen->add_option("--seed", gen_seed, "scene seed (or manifest base seed)");
    gen->add_option("--n", gen_n, "object count");
    gen->add_option("-o,--out", gen_out, "scene output path (default stdout)");
    gen->add_option("--manifest", gen_manifest, "write a reference manifest instead");
    gen->add_option("--seeds", gen_seeds, "manifest: scene seeds per size");
    gen->add_option("--sizes", gen_sizes, "manifest: object counts (default 6 8 10)");
    gen->add_option("--time-limit", gen_time_limit, "manifest: per-trial limit, seconds");

    auto* run = app.add_subcommand("run", "execute a benchmark manifest");
    std::string run_manifest, run_csv = "results.csv", run_logs;
    int run_workers = 0;
    bool run_safety = false;
    run->add_option("--manifest", run_manifest, "manifest path")->required();
    run->add_option("--csv", run_csv, "CSV output path");
    run->add_option("--logs", run_logs, "directory for per-trial action logs");
    run->add_option("--workers", run_workers, "worker threads (0: SHELF_WORKERS or auto)");
    run->add_flag("--safety", run_safety, "replay logs through the safety checker");

    auto* report = app.add_subcommand("report", "aggregate a results CSV");
    std::string rep_csv, rep_out;
    report->add_option("--csv", rep_csv, "results CSV path")->required();
    report->add_option("--out", rep_out, "directory for plot-data TSVs");

    auto* solve = app.add_subcommand("solve", "run one scene, print the action trace");
    std::string sol_scene, sol_alg = "rc_heuristic";
    uint64_t sol_seed = 1;
    double sol_limit = 30.0, sol_voxel = 0.01;
    solve->add_option("--scene", sol_scene, "scene file")->required();
    solve->add_option("--algorithm", sol_alg, "random | rc | rc_heuristic");
    solve->add_option("--seed", sol_seed, "rng seed");
    solve->add_option("--time-limit", sol_limit, "limit, seconds");
    solve->add_option("--voxel", sol_voxel, "voxel size, meters");

    auto* dump = app.add_subcommand("dump", "debug exports for one scene");
    std::string dmp_scene, dmp_grid, dmp_graph, dmp_depth, dmp_seg;
    double dmp_voxel = 0.01;
    dump->add_option("--scene", dmp_scene, "scene file")->required();
    dump->add_option("--voxel", dmp_voxel, "voxel size, meters");
    dump->add_option("--grid", dmp_grid, "voxel grid dump path");
    dump->add_option("--graph", dmp_graph, "dependency graph dot path");
    dump->add_option("--depth", dmp_depth, "depth PGM path");
    dump->add_option("--seg", dmp_seg, "segmentation PPM path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(gen_seed, gen_n, gen_out, gen_manifest, gen_seeds, gen_sizes,
                           gen_time_limit);
        if (run->parsed()) return cmd_run(run_manifest, run_csv, run_logs, run_workers, run_safety);
        if (report->parsed()) return cmd_report(rep_csv, rep_out);
        if (solve->parsed()) return cmd_solve(sol_scene, sol_alg, sol_seed, sol_limit, sol_voxel);
        if (dump->parsed())
            return cmd_dump(dmp_scene, dmp_voxel, dmp_grid, dmp_graph, dmp_depth, dmp_seg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
