// Command-line front end: scene generation, localization benchmarks,
// mission simulation, and the single-flight vs two-flight comparison.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "insp/baseline.hpp"
#include "insp/bench.hpp"
#include "insp/kernels.hpp"
#include "insp/mission.hpp"
#include "insp/scene.hpp"

namespace {

using namespace insp;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

SceneConfig default_scene(const std::string& tower_kind, std::uint64_t seed) {
  SceneConfig scene;
  scene.seed = seed;
  scene.towers.push_back(build_tower(tower_kind == "B" ? TowerKind::B : TowerKind::A,
                                     RigidTransform::identity(), 25.0, 10.0));
  scene.neighbor_tower_positions = {{-80.0, 0.0, 0.0}, {80.0, 0.0, 0.0}};
  return scene;
}

int cmd_scene_gen(const std::string& tower, std::uint64_t seed, const std::string& out,
                  const std::string& dump_scan) {
  SceneConfig scene = default_scene(tower, seed);
  save_scene(scene, out);
  std::cout << "wrote " << out << " (" << ground_truth(scene).size() << " insulators)\n";

  if (!dump_scan.empty()) {
    // one scan from a standoff vantage on the +y side, facing the tower
    const TowerModel& t = scene.primary_tower();
    RigidTransform pose;
    pose.translation = t.center_world() + Vec3{0.0, t.width / 2.0 + 9.0, 0.7 * t.height};
    pose.rotation = rot_z(deg2rad(-90.0));
    pose.from_frame = Frame::Lidar;
    pose.to_frame = Frame::World;
    Rng rng = Rng(seed).stream("lidar");
    const PointCloud cloud = simulate_lidar_scan(scene, pose, rng);
    save_xyz(cloud, dump_scan);
    std::cout << "wrote " << dump_scan << " (" << cloud.size() << " points)\n";
  }
  return 0;
}

int cmd_localize_bench(const std::string& config, std::uint64_t seed, int trials,
                       const std::vector<double>& w_values,
                       const std::vector<std::string>& method_names, const std::string& out) {
  SceneConfig scene = config.empty() ? default_scene("A", seed) : load_scene(config);

  BenchOptions opts;
  opts.seed = seed;
  opts.trials = trials;
  if (!w_values.empty()) opts.w_values = w_values;
  if (!method_names.empty()) {
    opts.methods.clear();
    for (const std::string& m : method_names) opts.methods.push_back(method_from_name(m));
  }

  const BenchReport report = run_localize_bench(scene, opts);
  std::cout << report.to_table();
  if (!out.empty()) {
    write_file(out, report.to_csv());
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_mission_sim(const std::string& config, std::uint64_t seed, const std::string& method,
                    const std::string& out_prefix) {
  SceneConfig scene = config.empty() ? default_scene("B", seed) : load_scene(config);
  scene.seed = seed;

  MissionConfig cfg;
  cfg.method = method_from_name(method);
  const MissionLog log = run_mission(scene, cfg);

  std::printf("mission %s in %.2f s: %zu insulators registered, %zu captures\n",
              log.failure ? "FAILED" : "finished", log.total_duration, log.registry.size(),
              log.captures.size());
  if (!out_prefix.empty()) {
    write_file(out_prefix + ".json", log.to_json());
    write_file(out_prefix + "_path.csv", log.flight_path_csv());
    std::cout << "wrote " << out_prefix << ".json and " << out_prefix << "_path.csv\n";
  }
  return log.failure ? 1 : 0;
}

int cmd_compare(const std::string& config, const std::string& tower,
                const std::vector<int>& n_values, const std::vector<std::uint64_t>& seeds,
                const std::string& out) {
  SceneConfig scene = config.empty() ? default_scene(tower, seeds.front()) : load_scene(config);
  const std::string scene_id = config.empty() ? ("tower_" + tower) : config;

  CompareOptions opts;
  if (!n_values.empty()) opts.n_values = n_values;
  opts.seeds = seeds;

  const auto rows = run_compare(scene, scene_id, opts);
  const std::string csv = compare_csv(rows);
  std::cout << csv;
  if (!out.empty()) {
    write_file(out, csv);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"camera-LiDAR insulator inspection simulator"};
  app.require_subcommand(1);

  std::string backend = "auto";
  app.add_option("--kernel-backend", backend, "kernel backend: auto, scalar, avx2");

  // scene-gen
  auto* gen = app.add_subcommand("scene-gen", "generate a synthetic tower scene config");
  std::string gen_tower;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "scene.json";
  std::string gen_dump;
  gen->add_option("--tower", gen_tower, "tower kind: A or B")->required()
      ->check(CLI::IsMember({"A", "B"}));
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output scene config path");
  gen->add_option("--dump-scan", gen_dump, "also write one LiDAR scan as x y z lines");

  // localize-bench
  auto* bench = app.add_subcommand("localize-bench", "localization error benchmark");
  std::string bench_config;
  std::uint64_t bench_seed = 1;
  int bench_trials = 150;
  std::vector<double> bench_w;
  std::vector<std::string> bench_methods;
  std::string bench_out = "bench.csv";
  bench->add_option("--config", bench_config, "scene config (default: built-in tower A)");
  bench->add_option("--seed", bench_seed, "random seed");
  bench->add_option("--trials", bench_trials, "cumulated clouds per (method, w) cell");
  bench->add_option("--w", bench_w, "standoff distances in meters");
  bench->add_option("--methods", bench_methods,
                    "subset of: dbscan ransac dbscan_ransac dbscan_pca");
  bench->add_option("--out", bench_out, "output CSV path");

  // mission-sim
  auto* sim = app.add_subcommand("mission-sim", "run the online single-flight inspection");
  std::string sim_config;
  std::uint64_t sim_seed = 1;
  std::string sim_method = "dbscan_ransac";
  std::string sim_out = "mission";
  sim->add_option("--config", sim_config, "scene config (default: built-in tower B)");
  sim->add_option("--seed", sim_seed, "random seed");
  sim->add_option("--method", sim_method, "localization method");
  sim->add_option("--out", sim_out, "output prefix for .json log and _path.csv");

  // compare
  auto* cmp = app.add_subcommand("compare", "single-flight vs scan+TSP durations");
  std::string cmp_config;
  std::string cmp_tower = "A";
  std::vector<int> cmp_n;
  std::vector<std::uint64_t> cmp_seeds = {1};
  std::string cmp_out = "compare.csv";
  cmp->add_option("--config", cmp_config, "scene config (default: built-in tower)");
  cmp->add_option("--tower", cmp_tower, "built-in tower kind when no config is given")
      ->check(CLI::IsMember({"A", "B"}));
  cmp->add_option("--n", cmp_n, "inspection waypoint counts (default 4 8 12 16 20 24)");
  cmp->add_option("--seeds", cmp_seeds, "seeds, one paired run each");
  cmp->add_option("--out", cmp_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (backend == "scalar") {
      insp::kernels::select(insp::kernels::Backend::Scalar);
    } else if (backend == "avx2") {
      insp::kernels::select(insp::kernels::Backend::Avx2);
    } else if (backend != "auto") {
      throw insp::Error("unknown kernel backend: " + backend);
    }

    if (gen->parsed()) return cmd_scene_gen(gen_tower, gen_seed, gen_out, gen_dump);
    if (bench->parsed()) {
      return cmd_localize_bench(bench_config, bench_seed, bench_trials, bench_w, bench_methods,
                                bench_out);
    }
    if (sim->parsed()) return cmd_mission_sim(sim_config, sim_seed, sim_method, sim_out);
    if (cmp->parsed()) return cmd_compare(cmp_config, cmp_tower, cmp_n, cmp_seeds, cmp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
