// Two-flight strategy: a scan flight over the exploration path, then a
// TSP-ordered inspection flight over waypoints derived from the map.
// Yields T_scan and T_tsp for the duration comparison.

#pragma once

#include <cstdint>
#include <vector>

#include "insp/mission.hpp"
#include "insp/planner.hpp"
#include "insp/scene.hpp"

namespace insp {

// Symmetric nonnegative segment durations; index 0 is the depot.
struct CostMatrix {
  std::size_t n = 0;
  std::vector<double> cost;  // row-major n*n

  double at(std::size_t i, std::size_t j) const { return cost[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return cost[i * n + j]; }
};

struct Tour {
  std::vector<std::size_t> order;  // starts at depot (index 0), visits all
  double total_duration = 0.0;     // open path, no return to depot
};

enum class TspMode : std::uint8_t { Exact, TwoOpt };

// Duration of flying the exploration path with no inspection stops.
double scan_flight_duration(const SceneConfig& scene, const DynamicLimits& limits, double standoff,
                            double safety_margin = 1.5);

// Entry (i,j): direct segment duration when the straight route is safe,
// overflight detour duration otherwise.
CostMatrix build_cost_matrix(const std::vector<InspectionWaypoint>& waypoints, const Vec3& depot,
                             const SafetyRegion& safety, const DynamicLimits& limits);

// Exact = Held-Karp dynamic program over open paths from the depot
// (n <= 13); TwoOpt = nearest-neighbor construction plus deterministic
// 2-opt descent. Throws TooLargeForExact.
Tour solve_tsp(const CostMatrix& costs, TspMode mode);

struct TwoFlightResult {
  double t_scan = 0.0;
  double t_tsp = 0.0;  // tour duration including capture dwells
  double total = 0.0;  // t_scan + t_tsp
  std::size_t waypoint_count = 0;
};

// The idealized baseline: inspection waypoints come from ground-truth
// insulator poses (the scan map at its best), visited in TSP order. N is
// capped at per_insulator times the number of scene insulators; the first
// N/per_insulator insulators by id are used.
TwoFlightResult two_flight_duration(const SceneConfig& scene, int n_waypoints,
                                    const MissionConfig& cfg);

// Ground-truth inspection waypoints for the first `count` insulators.
std::vector<InspectionWaypoint> ground_truth_waypoints(const SceneConfig& scene,
                                                       std::size_t count,
                                                       const MissionConfig& cfg,
                                                       const SafetyRegion& safety);

}  // namespace insp
