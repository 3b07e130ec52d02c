// Acceptance suite: runs the project's end-to-end guarantees and prints
// one PASS/FAIL line per criterion. Exits nonzero if any fail.
//
// Usage: acceptance [path-to-cli-binary]
// The CLI path enables the byte-identical-output determinism check; it
// is skipped (and fails) when the binary is missing.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "insp/baseline.hpp"
#include "insp/bench.hpp"
#include "insp/localization.hpp"
#include "insp/mission.hpp"
#include "insp/planner.hpp"
#include "insp/scene.hpp"
#include "insp/stats.hpp"
#include "support/reference_impls.hpp"

using namespace insp;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-28s %s\n", pass ? "PASS" : "FAIL", idx, name,
              detail.c_str());
  if (!pass) ++g_failures;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

SceneConfig tower_scene(TowerKind kind, std::uint64_t seed) {
  SceneConfig scene;
  scene.seed = seed;
  scene.towers.push_back(build_tower(kind, RigidTransform::identity(), 25.0, 10.0));
  scene.neighbor_tower_positions = {{-80, 0, 0}, {80, 0, 0}};
  return scene;
}

// --------------------------------------------------------------------------

void criterion_1_geometry_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  refimpl::TestRng rng(1);
  CameraIntrinsics k;
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    RigidTransform a, b, c;
    for (RigidTransform* t : {&a, &b, &c}) {
      t->rotation =
          rot_ypr(rng.uniform(-M_PI, M_PI), rng.uniform(-1.2, 1.2), rng.uniform(-M_PI, M_PI));
      t->translation = {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
      t->from_frame = Frame::Local;
      t->to_frame = Frame::Local;
    }
    const Vec3 p{rng.uniform(-8, 8), rng.uniform(-8, 8), rng.uniform(-8, 8)};

    if (distance(transform_point(a.inverse(), transform_point(a, p)), p) > 1e-9) ++bad;
    const Vec3 left = transform_point(compose(compose(a, b), c), p);
    const Vec3 right = transform_point(compose(a, compose(b, c)), p);
    if (distance(left, right) > 1e-9) ++bad;

    const Vec3 pc{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.5, 25)};
    const auto s = project_to_image(k, pc);
    if (distance(back_project(k, s, pc.z), pc) > 1e-9) ++bad;
  }
  const double dt = elapsed_s(t0);
  report(1, "geometry exactness", bad == 0 && dt < 1.0,
         fmt("10^4 cases, %d violations, %.2f s (< 1 s)", bad, dt));
}

void criterion_2_dbscan_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  refimpl::TestRng rng(2);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + static_cast<std::size_t>(rng.uniform(0, 280));
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back({rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)});
    }
    const double eps = rng.uniform(0.3, 1.0);
    const int min_pts = 2 + static_cast<int>(rng.uniform(0, 4));

    const auto grid = dbscan(pts, eps, min_pts);
    const auto ref = refimpl::dbscan_quadratic(pts, eps, min_pts);

    std::set<std::set<std::size_t>> a, b;
    for (const auto& c : grid) a.insert({c.point_indices.begin(), c.point_indices.end()});
    for (const auto& c : ref) b.insert({c.begin(), c.end()});
    if (a != b) ++mismatches;
  }
  const double dt = elapsed_s(t0);
  report(2, "dbscan oracle equivalence", mismatches == 0 && dt < 5.0,
         fmt("100 clouds, %d partition mismatches, %.2f s (< 5 s)", mismatches, dt));
}

void criterion_3_ransac_robustness() {
  refimpl::TestRng rng(3);
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // insulator surface samples with sigma = 2 cm
    const Vec3 axis =
        Vec3{rng.uniform(0.6, 1.0), rng.uniform(-0.3, 0.3), rng.uniform(-0.25, 0.25)}.normalized();
    const Vec3 center{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    Vec3 ref = (std::abs(axis.z) < 0.9) ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    const Vec3 b1 = axis.cross(ref).normalized();
    const Vec3 b2 = axis.cross(b1);

    std::vector<Vec3> pts;
    const int n_inlier = 70;
    for (int i = 0; i < n_inlier; ++i) {
      const double t = rng.uniform(-0.6, 0.6);
      const double phi = rng.uniform(-M_PI / 2, M_PI / 2);  // sensor-facing half shell
      Vec3 p = center + axis * t + b1 * (0.12 * std::cos(phi)) + b2 * (0.12 * std::sin(phi));
      p += Vec3{rng.normal() * 0.02, rng.normal() * 0.02, rng.normal() * 0.02};
      pts.push_back(p);
    }
    // 30% structured outliers: a crossarm-like run plus a line stub
    const int n_outlier = 30;
    const Vec3 arm_dir = b1;
    for (int i = 0; i < n_outlier; ++i) {
      if (i % 2 == 0) {
        pts.push_back(center + axis * 0.7 + arm_dir * rng.uniform(0.3, 1.6) +
                      Vec3{rng.normal() * 0.02, rng.normal() * 0.02, rng.normal() * 0.02});
      } else {
        pts.push_back(center - axis * 0.8 + b2 * rng.uniform(0.3, 1.2) +
                      Vec3{rng.normal() * 0.02, rng.normal() * 0.02, rng.normal() * 0.02});
      }
    }

    LocalizerParams params;
    params.rng_seed = 1000 + static_cast<std::uint64_t>(trial);
    try {
      const auto res = ransac_line(pts, params);
      const double angle = rad2deg(std::acos(std::min(1.0, std::abs(res.line.direction.dot(axis)))));
      if (angle <= 5.0) ++ok;
    } catch (const Error&) {
    }
  }
  report(3, "ransac axis robustness", ok >= 95, fmt("axis within 5 deg in %d/100 trials", ok));
}

void criterion_4_localization_bench() {
  const auto t0 = std::chrono::steady_clock::now();
  const SceneConfig scene = tower_scene(TowerKind::A, 1);
  BenchOptions opts;
  opts.seed = 1;
  opts.trials = 150;
  opts.w_values = {8.0, 9.0, 10.0};
  opts.methods = {LocalizeMethod::Ransac, LocalizeMethod::DbscanRansac};
  const BenchReport report_data = run_localize_bench(scene, opts);

  bool pass = true;
  std::string detail;
  for (const double w : opts.w_values) {
    const BenchCell* dr = report_data.find(LocalizeMethod::DbscanRansac, w);
    const BenchCell* r = report_data.find(LocalizeMethod::Ransac, w);
    if (!dr || !r || dr->n_trials == 0 || r->n_trials == 0) {
      pass = false;
      detail += fmt("w=%.0f missing; ", w);
      continue;
    }
    if (dr->mean_error_m > 0.5) pass = false;
    if (dr->mean_error_m > r->mean_error_m) pass = false;
    detail += fmt("w=%.0f: D+R %.3f R %.3f; ", w, dr->mean_error_m, r->mean_error_m);
  }
  const double dt = elapsed_s(t0);
  if (dt >= 60.0) pass = false;
  report(4, "localization bench (tab. I)", pass, detail + fmt("%.1f s (< 60 s)", dt));
}

void criterion_5_method_agreement() {
  std::vector<Vec3> pts;
  const Vec3 dir = Vec3{0.7, 0.3, 0.65}.normalized();
  for (int i = 0; i < 21; ++i) pts.push_back(Vec3{1, 2, 3} + dir * (0.05 * i));
  PointCloud cloud;
  cloud.frame = Frame::Body;
  cloud.points = pts;
  LocalizerParams params;

  const Vec3 c1 = localize_dbscan(cloud, params).center;
  const Vec3 c2 = localize_ransac(cloud, params).center;
  const Vec3 c3 = localize_dbscan_ransac(cloud, params).center;
  const Vec3 c4 = localize_dbscan_pca(cloud, params).center;
  const double worst = std::max({distance(c1, c2), distance(c1, c3), distance(c1, c4)});
  report(5, "method agreement", worst < 1e-6, fmt("max center disagreement %.2e m", worst));
}

void criterion_6_trajectory_closed_forms() {
  refimpl::TestRng rng(6);
  int bad = 0;
  int cases = 0;
  const DynamicLimits sets[2] = {DynamicLimits::simulation(), DynamicLimits::real_world()};
  for (int i = 0; i < 1000; ++i) {
    const DynamicLimits& lim = sets[i % 2];
    const double d = (i < 4) ? (i % 2 ? 0.1 : 9.0) : rng.uniform(0.0, 60.0);
    // closed form: triangular below the velocity ceiling, trapezoid above
    const double v_tri = std::sqrt(d * lim.a_max_h);
    const double expect = (d == 0.0) ? 0.0
                          : (v_tri <= lim.v_max_h ? 2.0 * std::sqrt(d / lim.a_max_h)
                                                  : d / lim.v_max_h + lim.v_max_h / lim.a_max_h);
    const Trajectory traj = plan_segment({0, 0, 0}, {d, 0, 0}, lim);
    if (std::abs(traj.total_duration - expect) > 1e-9) ++bad;
    if (distance(traj.sample(traj.total_duration).position, {d, 0, 0}) > 1e-9) ++bad;
    ++cases;
  }
  report(6, "trajectory closed forms", bad == 0, fmt("%d cases, %d violations", cases, bad));
}

void criterion_7_tsp_optimality() {
  const auto t0 = std::chrono::steady_clock::now();
  refimpl::TestRng rng(7);
  int bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform(0, 6.99));
    CostMatrix m;
    m.n = n;
    m.cost.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double c = rng.uniform(1.0, 40.0);
        m.at(i, j) = c;
        m.at(j, i) = c;
      }
    }
    std::vector<std::size_t> order(n - 1);
    std::iota(order.begin(), order.end(), std::size_t{1});
    double brute = 1e18;
    do {
      double c = m.at(0, order[0]);
      for (std::size_t i = 0; i + 1 < order.size(); ++i) c += m.at(order[i], order[i + 1]);
      brute = std::min(brute, c);
    } while (std::next_permutation(order.begin(), order.end()));

    const Tour exact = solve_tsp(m, TspMode::Exact);
    const Tour heur = solve_tsp(m, TspMode::TwoOpt);
    if (std::abs(exact.total_duration - brute) > 1e-9) ++bad;
    if (heur.total_duration < exact.total_duration - 1e-9) ++bad;
  }
  const double dt = elapsed_s(t0);
  report(7, "tsp optimality", bad == 0 && dt < 30.0,
         fmt("50 instances, %d violations, %.2f s (< 30 s)", bad, dt));
}

void criterion_8_mission_completeness() {
  int bad_seeds = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SceneConfig scene = tower_scene(TowerKind::B, seed);
    MissionConfig cfg;
    MissionLog log;
    try {
      log = run_mission(scene, cfg);
    } catch (const Error& e) {
      ++bad_seeds;
      detail += fmt("seed %llu threw; ", static_cast<unsigned long long>(seed));
      continue;
    }
    bool ok = !log.failure && log.registry.size() == 4;

    const auto gt = ground_truth(scene);
    for (const auto& g : gt) {
      int matches = 0;
      for (const auto& e : log.registry) {
        if (distance(e.world_center, g.center) <= cfg.merge_radius) ++matches;
      }
      if (matches != 1) ok = false;
    }

    std::map<int, int> captures;
    for (const auto& c : log.captures) captures[c.insulator_id]++;
    if (captures.size() != 4) ok = false;
    for (const auto& [id, n] : captures) {
      if (n != cfg.per_insulator) ok = false;
    }

    const SafetyRegion safety = SafetyRegion::around_tower(
        scene.primary_tower(), scene.neighbor_tower_positions, cfg.safety_margin);
    for (const auto& s : log.flight_path) {
      if (safety.violates(s.position)) ok = false;
    }

    if (!ok) {
      ++bad_seeds;
      detail += fmt("seed %llu bad; ", static_cast<unsigned long long>(seed));
    }
  }
  report(8, "mission completeness", bad_seeds == 0,
         detail.empty() ? "20/20 tower-B seeds clean" : detail);
}

void criterion_9_strategy_comparison() {
  const auto t0 = std::chrono::steady_clock::now();
  const SceneConfig base = tower_scene(TowerKind::A, 1);
  CompareOptions opts;
  opts.n_values = {4, 8, 12, 16, 20, 24};
  opts.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto rows = run_compare(base, "tower_A", opts);

  std::vector<double> ns, savings, savings_at_8, savings_at_24;
  for (const auto& r : rows) {
    ns.push_back(r.n);
    savings.push_back(r.savings_pct);
    if (r.n == 8) savings_at_8.push_back(r.savings_pct);
    if (r.n == 24) savings_at_24.push_back(r.savings_pct);
  }

  const double mean8 = stats::mean(savings_at_8);
  const double mean24 = stats::mean(savings_at_24);
  const double rho = stats::spearman(ns, savings);
  const double p = stats::spearman_p_negative(rho, ns.size());
  const double penalty24 = std::max(0.0, -mean24);
  const double dt = elapsed_s(t0);

  const bool pass = mean8 > 0.0 && rho < 0.0 && p < 0.05 && penalty24 < 15.0 && dt < 300.0;
  report(9, "strategy comparison trend", pass,
         fmt("savings@8 %.1f%%, rho %.3f (p %.1e), penalty@24 %.1f%%, %.0f s (< 300 s)", mean8,
             rho, p, penalty24, dt));
}

void criterion_10_cli_determinism(const char* cli_path) {
  if (!cli_path) {
    report(10, "cli determinism", false, "no CLI binary path given");
    return;
  }
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "insp_acceptance";
  fs::create_directories(dir);

  auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto run = [&](const std::string& args) {
    const std::string cmd = std::string(cli_path) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };

  bool pass = true;
  std::string detail;

  struct Case {
    std::string name;
    std::string args;  // with %s placeholder for the output path
  };
  const std::vector<Case> cases{
      {"scene-gen", "scene-gen --tower B --seed 17 --out %s"},
      {"localize-bench",
       "localize-bench --seed 17 --trials 4 --w 8 --methods dbscan_ransac --out %s"},
      {"compare", "compare --tower B --n 4 --seeds 17 --out %s"},
  };
  for (const auto& c : cases) {
    const fs::path out1 = dir / (c.name + "_1.out");
    const fs::path out2 = dir / (c.name + "_2.out");
    std::string a1 = c.args, a2 = c.args;
    a1.replace(a1.find("%s"), 2, out1.string());
    a2.replace(a2.find("%s"), 2, out2.string());
    if (!run(a1) || !run(a2)) {
      pass = false;
      detail += c.name + " failed to run; ";
      continue;
    }
    if (read_file(out1) != read_file(out2)) {
      pass = false;
      detail += c.name + " output differs; ";
    }
  }

  // mission-sim writes a json + csv pair
  const fs::path m1 = dir / "m1", m2 = dir / "m2";
  if (run("mission-sim --seed 17 --out " + m1.string()) &&
      run("mission-sim --seed 17 --out " + m2.string())) {
    if (read_file(m1.string() + ".json") != read_file(m2.string() + ".json") ||
        read_file(m1.string() + "_path.csv") != read_file(m2.string() + "_path.csv")) {
      pass = false;
      detail += "mission-sim output differs; ";
    }
  } else {
    pass = false;
    detail += "mission-sim failed to run; ";
  }

  report(10, "cli determinism", pass, pass ? "byte-identical reruns" : detail);
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = (argc > 1) ? argv[1] : nullptr;

  criterion_1_geometry_exactness();
  criterion_2_dbscan_oracle();
  criterion_3_ransac_robustness();
  criterion_4_localization_bench();
  criterion_5_method_agreement();
  criterion_6_trajectory_closed_forms();
  criterion_7_tsp_optimality();
  criterion_8_mission_completeness();
  criterion_9_strategy_comparison();
  criterion_10_cli_determinism(cli);

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
