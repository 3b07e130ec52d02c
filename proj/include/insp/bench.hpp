// Localization benchmark (per-method error tables) and the single-flight
// vs two-flight duration comparison. These back the CLI subcommands and
// the acceptance runs.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "insp/localization.hpp"
#include "insp/mission.hpp"
#include "insp/scene.hpp"

namespace insp {

struct BenchCell {
  LocalizeMethod method = LocalizeMethod::DbscanRansac;
  TowerKind tower_kind = TowerKind::A;
  double w = 8.0;  // sensing standoff from the insulator
  std::size_t n_trials = 0;
  std::size_t n_failures = 0;  // localization errors (NoCluster etc.)
  double mean_error_m = 0.0;
  double std_error_m = 0.0;
  double mean_xy_m = 0.0;
  double std_xy_m = 0.0;
  double mean_z_m = 0.0;
  double std_z_m = 0.0;
};

struct BenchReport {
  std::vector<BenchCell> cells;

  std::string to_csv() const;
  std::string to_table() const;
  const BenchCell* find(LocalizeMethod m, double w) const;
};

struct BenchOptions {
  std::vector<LocalizeMethod> methods = {LocalizeMethod::Ransac, LocalizeMethod::DbscanRansac,
                                         LocalizeMethod::Dbscan, LocalizeMethod::DbscanPca};
  std::vector<double> w_values = {8.0, 9.0, 10.0};
  int trials = 150;
  std::uint64_t seed = 1;
  SensorRig rig = SensorRig::standard();
  LocalizerParams localizer;
};

// For each (method, w): park the sensor at distance w from each insulator
// in turn (trials round-robin), cumulate three detections, run the method
// on the cumulated cloud, and score the euclidean/xy/z error against
// ground truth. All methods see identical clouds.
BenchReport run_localize_bench(const SceneConfig& scene, const BenchOptions& opts);

struct CompareRow {
  std::string scene_id;
  std::uint64_t seed = 0;
  int n = 0;
  double t_fusion = 0.0;
  double t_scan = 0.0;
  double t_tsp = 0.0;
  double total_two_flight = 0.0;
  double savings_pct = 0.0;  // (total - t_fusion)/total * 100
};

struct CompareOptions {
  std::vector<int> n_values = {4, 8, 12, 16, 20, 24};
  std::vector<std::uint64_t> seeds = {1};
  MissionConfig mission;
};

std::vector<CompareRow> run_compare(const SceneConfig& base_scene, const std::string& scene_id,
                                    const CompareOptions& opts);

std::string compare_csv(const std::vector<CompareRow>& rows);

}  // namespace insp
