// Exploration paths, inspection waypoints, the safety region, and
// per-axis time-optimal point-mass trajectories.

#pragma once

#include <vector>

#include "insp/geometry.hpp"
#include "insp/scene.hpp"

namespace insp {

struct DynamicLimits {
  double v_max_h = 3.0;  // m/s, per horizontal axis
  double v_max_v = 3.0;
  double a_max_h = 12.0;  // m/s^2
  double a_max_v = 12.0;

  void validate() const;

  static DynamicLimits simulation() { return {3.0, 3.0, 12.0, 12.0}; }
  static DynamicLimits real_world() { return {1.0, 1.0, 3.0, 3.0}; }
};

struct AxisAlignedBox {
  Vec3 lo;
  Vec3 hi;
  bool contains(const Vec3& p) const {
    return p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y && p.z > lo.z && p.z < hi.z;
  }
};

// Tower envelope plus inter-tower line corridors the UAV must not enter.
// Built from the minimal prior knowledge: h_max, w_max and GPS-equivalent
// tower coordinates.
struct SafetyRegion {
  Vec3 tower_center;
  double half_width = 6.5;  // w_max/2 + margin
  double height = 26.5;     // h_max + margin
  double margin = 1.5;
  std::vector<AxisAlignedBox> line_corridors;

  static SafetyRegion around_tower(const TowerModel& tower, const std::vector<Vec3>& neighbors,
                                   double margin = 1.5);

  bool violates(const Vec3& p) const;
  AxisAlignedBox tower_box() const {
    return {{tower_center.x - half_width, tower_center.y - half_width, 0.0},
            {tower_center.x + half_width, tower_center.y + half_width, height}};
  }
};

struct PathWaypoint {
  Vec3 position;
  double gaze_yaw = 0.0;  // radians, world frame
};

struct ExplorationPath {
  std::vector<PathWaypoint> waypoints;
  double standoff = 9.0;  // w, horizontal distance from the tower axis
};

struct InspectionWaypoint {
  Vec3 position;
  Vec3 gaze_target;  // insulator center
  int insulator_id = 0;
};

// Per-axis trapezoidal/triangular profile: accelerate at +/-a to a peak
// velocity, cruise, decelerate. Rest-to-rest on both ends.
struct AxisProfile {
  double start = 0.0;
  double displacement = 0.0;  // signed
  double peak_velocity = 0.0; // magnitude
  double accel = 0.0;         // magnitude
  double t_accel = 0.0;
  double t_cruise = 0.0;

  double position(double t, double total) const;
  double velocity(double t, double total) const;
};

struct TrajectorySample {
  Vec3 position;
  Vec3 velocity;
};

// Time-synchronized per-axis profiles: every axis finishes at
// total_duration, the slowest axis at its optimum and the others
// stretched by peak-velocity reduction.
struct Trajectory {
  AxisProfile axis[3];
  double total_duration = 0.0;

  TrajectorySample sample(double t) const;
  Vec3 start() const { return {axis[0].start, axis[1].start, axis[2].start}; }
  Vec3 goal() const {
    return {axis[0].start + axis[0].displacement, axis[1].start + axis[1].displacement,
            axis[2].start + axis[2].displacement};
  }
};

// Closed-form 1-D rest-to-rest optimum: 2*sqrt(d/a) while the triangular
// peak stays under v_max, d/v + v/a beyond.
double min_segment_time(double dist, double v_max, double a_max);

Trajectory plan_segment(const Vec3& start, const Vec3& goal, const DynamicLimits& limits);

// True iff no position sampled at step dt (plus the exact endpoint) lies
// inside the tower box or a line corridor.
bool check_safety(const Trajectory& traj, const SafetyRegion& safety, double dt = 0.05);

// Two vertical lawnmower sweeps, one per lateral side of the power line,
// linked by an overflight crossing above the tower. Throws
// InfeasibleStandoff when standoff does not clear the safety envelope.
ExplorationPath build_exploration_path(const TowerModel& tower, const std::vector<Vec3>& neighbors,
                                       double standoff, const DynamicLimits& limits,
                                       const SafetyRegion& safety);

// Waypoints on the horizontal circle of radius standoff around the
// estimated center, at azimuths within +/-35 degrees of the outward
// tower-normal, pushed radially outward until they clear the safety
// region. Gaze always at the center estimate.
std::vector<InspectionWaypoint> compute_inspection_waypoints(const Vec3& center_world,
                                                             int insulator_id, double standoff,
                                                             int per_insulator,
                                                             const SafetyRegion& safety);

// Collision-free route above the tower for segments that fail the direct
// safety check: through the apex over the tower center at
// height + clearance, escalating to climb/cross/descend via points when
// the plain two-segment route clips the envelope. Returns the waypoint
// chain including start and goal.
std::vector<Vec3> detour_via_overflight_waypoints(const Vec3& start, const Vec3& goal,
                                                  const SafetyRegion& safety,
                                                  const DynamicLimits& limits,
                                                  double clearance = 2.0);

// Sum of rest-to-rest segments along the detour chain.
std::vector<Trajectory> detour_via_overflight(const Vec3& start, const Vec3& goal,
                                              const SafetyRegion& safety,
                                              const DynamicLimits& limits,
                                              double clearance = 2.0);

double total_duration(const std::vector<Trajectory>& segments);

// plan_segment if the direct route is safe, detour otherwise.
std::vector<Trajectory> plan_safe_route(const Vec3& start, const Vec3& goal,
                                        const SafetyRegion& safety, const DynamicLimits& limits);

}  // namespace insp
