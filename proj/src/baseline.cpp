#include "insp/baseline.hpp"

#include <algorithm>
#include <limits>

namespace insp {

double scan_flight_duration(const SceneConfig& scene, const DynamicLimits& limits, double standoff,
                            double safety_margin) {
  const TowerModel& tower = scene.primary_tower();
  const SafetyRegion safety =
      SafetyRegion::around_tower(tower, scene.neighbor_tower_positions, safety_margin);
  const ExplorationPath path = build_exploration_path(tower, scene.neighbor_tower_positions,
                                                      standoff, limits, safety);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
    total += plan_segment(path.waypoints[i].position, path.waypoints[i + 1].position, limits)
                 .total_duration;
  }
  return total;
}

CostMatrix build_cost_matrix(const std::vector<InspectionWaypoint>& waypoints, const Vec3& depot,
                             const SafetyRegion& safety, const DynamicLimits& limits) {
  std::vector<Vec3> nodes;
  nodes.reserve(waypoints.size() + 1);
  nodes.push_back(depot);
  for (const InspectionWaypoint& wp : waypoints) nodes.push_back(wp.position);

  CostMatrix m;
  m.n = nodes.size();
  m.cost.assign(m.n * m.n, 0.0);
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = i + 1; j < m.n; ++j) {
      const double d = total_duration(plan_safe_route(nodes[i], nodes[j], safety, limits));
      m.at(i, j) = d;
      m.at(j, i) = d;  // rest-to-rest segments are direction-symmetric
    }
  }
  return m;
}

namespace {

Tour solve_exact(const CostMatrix& costs) {
  // Held-Karp over open paths anchored at the depot (node 0): dp[S][j] is
  // the cheapest way to start at 0, visit exactly the nodes in S, and end
  // at j in S.
  const std::size_t n = costs.n;
  if (n > 13) throw TooLargeForExact("solve_tsp: exact mode supports n <= 13");
  const std::size_t k = n - 1;  // nodes 1..n-1
  if (k == 0) return Tour{{0}, 0.0};

  const std::size_t full = std::size_t{1} << k;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(full * k, inf);
  std::vector<std::int8_t> parent(full * k, -1);

  for (std::size_t j = 0; j < k; ++j) {
    dp[(std::size_t{1} << j) * k + j] = costs.at(0, j + 1);
  }
  for (std::size_t s = 1; s < full; ++s) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!(s & (std::size_t{1} << j))) continue;
      const double base = dp[s * k + j];
      if (base == inf) continue;
      for (std::size_t m2 = 0; m2 < k; ++m2) {
        if (s & (std::size_t{1} << m2)) continue;
        const std::size_t ns = s | (std::size_t{1} << m2);
        const double cand = base + costs.at(j + 1, m2 + 1);
        if (cand < dp[ns * k + m2]) {
          dp[ns * k + m2] = cand;
          parent[ns * k + m2] = static_cast<std::int8_t>(j);
        }
      }
    }
  }

  std::size_t best_end = 0;
  double best = inf;
  for (std::size_t j = 0; j < k; ++j) {
    if (dp[(full - 1) * k + j] < best) {
      best = dp[(full - 1) * k + j];
      best_end = j;
    }
  }

  Tour tour;
  tour.total_duration = best;
  std::vector<std::size_t> rev;
  std::size_t s = full - 1, j = best_end;
  while (true) {
    rev.push_back(j + 1);
    const std::int8_t p = parent[s * k + j];
    s &= ~(std::size_t{1} << j);
    if (p < 0) break;
    j = static_cast<std::size_t>(p);
  }
  tour.order.push_back(0);
  tour.order.insert(tour.order.end(), rev.rbegin(), rev.rend());
  return tour;
}

double path_cost(const CostMatrix& costs, const std::vector<std::size_t>& order) {
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) d += costs.at(order[i], order[i + 1]);
  return d;
}

Tour solve_two_opt(const CostMatrix& costs) {
  const std::size_t n = costs.n;
  // nearest-neighbor construction from the depot
  std::vector<std::size_t> order{0};
  std::vector<bool> used(n, false);
  used[0] = true;
  while (order.size() < n) {
    const std::size_t last = order.back();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (!used[j] && costs.at(last, j) < best_d) {
        best_d = costs.at(last, j);
        best = j;
      }
    }
    used[best] = true;
    order.push_back(best);
  }

  // first-improvement 2-opt on the open path (depot stays fixed)
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 1; i + 1 < n && !improved; ++i) {
      for (std::size_t j = i + 1; j < n && !improved; ++j) {
        const double before = costs.at(order[i - 1], order[i]) +
                              ((j + 1 < n) ? costs.at(order[j], order[j + 1]) : 0.0);
        const double after = costs.at(order[i - 1], order[j]) +
                             ((j + 1 < n) ? costs.at(order[i], order[j + 1]) : 0.0);
        if (after + 1e-12 < before) {
          std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i),
                       order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
        }
      }
    }
  }

  Tour tour;
  tour.order = order;
  tour.total_duration = path_cost(costs, order);
  return tour;
}

}  // namespace

Tour solve_tsp(const CostMatrix& costs, TspMode mode) {
  if (costs.n == 0) throw Error("solve_tsp: empty cost matrix");
  if (costs.n == 1) return Tour{{0}, 0.0};
  return (mode == TspMode::Exact) ? solve_exact(costs) : solve_two_opt(costs);
}

std::vector<InspectionWaypoint> ground_truth_waypoints(const SceneConfig& scene,
                                                       std::size_t count, const MissionConfig& cfg,
                                                       const SafetyRegion& safety) {
  std::vector<GroundTruthEntry> gt = ground_truth(scene);
  std::sort(gt.begin(), gt.end(),
            [](const GroundTruthEntry& a, const GroundTruthEntry& b) { return a.id < b.id; });
  if (count < gt.size()) gt.resize(count);

  std::vector<InspectionWaypoint> wps;
  for (const GroundTruthEntry& e : gt) {
    const auto per = compute_inspection_waypoints(e.center, e.id, cfg.inspection_standoff,
                                                  cfg.per_insulator, safety);
    wps.insert(wps.end(), per.begin(), per.end());
  }
  return wps;
}

TwoFlightResult two_flight_duration(const SceneConfig& scene, int n_waypoints,
                                    const MissionConfig& cfg) {
  const TowerModel& tower = scene.primary_tower();
  const SafetyRegion safety =
      SafetyRegion::around_tower(tower, scene.neighbor_tower_positions, cfg.safety_margin);
  const ExplorationPath path = build_exploration_path(
      tower, scene.neighbor_tower_positions, cfg.exploration_standoff, cfg.limits, safety);
  const Vec3 depot = path.waypoints.front().position;

  const std::size_t total_insulators = ground_truth(scene).size();
  std::size_t n_insulators =
      static_cast<std::size_t>(n_waypoints) / static_cast<std::size_t>(cfg.per_insulator);
  n_insulators = std::min(n_insulators, total_insulators);

  const auto wps = ground_truth_waypoints(scene, n_insulators, cfg, safety);

  TwoFlightResult res;
  res.waypoint_count = wps.size();
  res.t_scan = scan_flight_duration(scene, cfg.limits, cfg.exploration_standoff,
                                    cfg.safety_margin);

  const CostMatrix costs = build_cost_matrix(wps, depot, safety, cfg.limits);
  const TspMode mode = (costs.n <= 13) ? TspMode::Exact : TspMode::TwoOpt;
  const Tour tour = solve_tsp(costs, mode);
  res.t_tsp = tour.total_duration + cfg.capture_dwell * static_cast<double>(wps.size());
  res.total = res.t_scan + res.t_tsp;
  return res;
}

}  // namespace insp
