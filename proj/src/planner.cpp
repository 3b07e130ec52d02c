#include "insp/planner.hpp"

#include <algorithm>
#include <cmath>

namespace insp {

void DynamicLimits::validate() const {
  if (v_max_h <= 0.0 || v_max_v <= 0.0 || a_max_h <= 0.0 || a_max_v <= 0.0) {
    throw Error("DynamicLimits: all limits must be positive");
  }
}

SafetyRegion SafetyRegion::around_tower(const TowerModel& tower, const std::vector<Vec3>& neighbors,
                                        double margin) {
  SafetyRegion s;
  s.tower_center = tower.center_world();
  s.margin = margin;
  s.half_width = tower.width / 2.0 + margin;
  s.height = tower.height + margin;

  // Conductor corridors toward each neighbor. They start one corridor gap
  // beyond the tower envelope so the inspection space beside the tower
  // stays flyable, and span the altitude band the lines can occupy.
  const double gap = 5.0;
  const double z_lo = 0.4 * tower.height;
  const double z_hi = s.height;
  for (const Vec3& n : neighbors) {
    Vec3 d = n - s.tower_center;
    d.z = 0.0;
    const double dist = d.norm();
    if (dist < 1e-6) continue;
    const Vec3 u = d / dist;
    const Vec3 from = s.tower_center + u * (s.half_width + gap);
    const Vec3 to = s.tower_center + u * dist;
    AxisAlignedBox box;
    box.lo = {std::min(from.x, to.x), std::min(from.y, to.y), z_lo};
    box.hi = {std::max(from.x, to.x), std::max(from.y, to.y), z_hi};
    // widen laterally to the corridor half-width
    const Vec3 lat{-u.y, u.x, 0.0};
    const double w = s.half_width;
    box.lo.x -= std::abs(lat.x) * w;
    box.lo.y -= std::abs(lat.y) * w;
    box.hi.x += std::abs(lat.x) * w;
    box.hi.y += std::abs(lat.y) * w;
    s.line_corridors.push_back(box);
  }
  return s;
}

bool SafetyRegion::violates(const Vec3& p) const {
  if (tower_box().contains(p)) return true;
  for (const AxisAlignedBox& c : line_corridors) {
    if (c.contains(p)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Per-axis time-optimal profiles

double min_segment_time(double dist, double v_max, double a_max) {
  const double d = std::abs(dist);
  if (d == 0.0) return 0.0;
  const double v_tri = std::sqrt(d * a_max);
  if (v_tri <= v_max) return 2.0 * std::sqrt(d / a_max);
  return d / v_max + v_max / a_max;
}

double AxisProfile::position(double t, double total) const {
  const double s = (displacement >= 0.0) ? 1.0 : -1.0;
  const double d = std::abs(displacement);
  if (d == 0.0 || total <= 0.0) return start;
  t = std::clamp(t, 0.0, total);
  const double t1 = t_accel;
  const double t2 = t_accel + t_cruise;
  double p;
  if (t <= t1) {
    p = 0.5 * accel * t * t;
  } else if (t <= t2) {
    p = 0.5 * accel * t1 * t1 + peak_velocity * (t - t1);
  } else {
    const double td = total - t;  // time remaining in deceleration
    p = d - 0.5 * accel * td * td;
  }
  return start + s * p;
}

double AxisProfile::velocity(double t, double total) const {
  const double s = (displacement >= 0.0) ? 1.0 : -1.0;
  if (std::abs(displacement) == 0.0 || total <= 0.0) return 0.0;
  if (t <= 0.0 || t >= total) return 0.0;
  const double t1 = t_accel;
  const double t2 = t_accel + t_cruise;
  double v;
  if (t <= t1) {
    v = accel * t;
  } else if (t <= t2) {
    v = peak_velocity;
  } else {
    v = accel * (total - t);
  }
  return s * v;
}

TrajectorySample Trajectory::sample(double t) const {
  TrajectorySample s;
  s.position = {axis[0].position(t, total_duration), axis[1].position(t, total_duration),
                axis[2].position(t, total_duration)};
  s.velocity = {axis[0].velocity(t, total_duration), axis[1].velocity(t, total_duration),
                axis[2].velocity(t, total_duration)};
  return s;
}

namespace {

// Stretch one axis to finish exactly at time T >= its optimum by lowering
// the peak velocity: d = v (T - v/a)  =>  v = (aT - sqrt(a^2 T^2 - 4ad))/2.
AxisProfile stretch_axis(double start, double displacement, double a_max, double total) {
  AxisProfile p;
  p.start = start;
  p.displacement = displacement;
  p.accel = a_max;
  const double d = std::abs(displacement);
  if (d == 0.0 || total <= 0.0) {
    return p;
  }
  const double disc = std::max(a_max * a_max * total * total - 4.0 * a_max * d, 0.0);
  const double v = (a_max * total - std::sqrt(disc)) / 2.0;
  p.peak_velocity = v;
  p.t_accel = v / a_max;
  p.t_cruise = total - 2.0 * p.t_accel;
  if (p.t_cruise < 0.0) p.t_cruise = 0.0;
  return p;
}

}  // namespace

Trajectory plan_segment(const Vec3& start, const Vec3& goal, const DynamicLimits& limits) {
  if (!start.finite() || !goal.finite()) throw Error("plan_segment: endpoints must be finite");
  limits.validate();
  const double d[3] = {goal.x - start.x, goal.y - start.y, goal.z - start.z};
  const double v[3] = {limits.v_max_h, limits.v_max_h, limits.v_max_v};
  const double a[3] = {limits.a_max_h, limits.a_max_h, limits.a_max_v};

  double total = 0.0;
  for (int i = 0; i < 3; ++i) total = std::max(total, min_segment_time(d[i], v[i], a[i]));

  Trajectory traj;
  traj.total_duration = total;
  const double s[3] = {start.x, start.y, start.z};
  for (int i = 0; i < 3; ++i) traj.axis[i] = stretch_axis(s[i], d[i], a[i], total);
  return traj;
}

bool check_safety(const Trajectory& traj, const SafetyRegion& safety, double dt) {
  if (dt <= 0.0) throw Error("check_safety: dt must be positive");
  const double total = traj.total_duration;
  for (double t = 0.0; t < total; t += dt) {
    if (safety.violates(traj.sample(t).position)) return false;
  }
  return !safety.violates(traj.sample(total).position);
}

// ---------------------------------------------------------------------------
// Exploration path

ExplorationPath build_exploration_path(const TowerModel& tower, const std::vector<Vec3>& neighbors,
                                       double standoff, const DynamicLimits& limits,
                                       const SafetyRegion& safety) {
  limits.validate();
  if (standoff <= safety.half_width) {
    throw InfeasibleStandoff("build_exploration_path: standoff inside the safety envelope");
  }

  const Vec3 center = tower.center_world();
  // line direction from the neighbor coordinates; x axis when absent
  Vec3 line_dir{1.0, 0.0, 0.0};
  for (const Vec3& n : neighbors) {
    Vec3 d = n - center;
    d.z = 0.0;
    if (d.norm() > 1e-6) {
      line_dir = d.normalized();
      break;
    }
  }
  const Vec3 side_dir{-line_dir.y, line_dir.x, 0.0};

  const double z_lo = 0.40 * tower.height;
  const double z_hi = 1.05 * tower.height;
  const double z_cross = tower.height + safety.margin + 2.0;  // above box and corridors
  const int stations = 4;
  const double span = 0.60 * tower.width;

  ExplorationPath path;
  path.standoff = standoff;

  auto gaze_toward_tower = [&](const Vec3& p) {
    return std::atan2(center.y - p.y, center.x - p.x);
  };
  auto add = [&](const Vec3& p) { path.waypoints.push_back({p, gaze_toward_tower(p)}); };

  for (int side = 0; side < 2; ++side) {
    const double sgn = (side == 0) ? 1.0 : -1.0;
    const Vec3 lateral = side_dir * (sgn * standoff);
    for (int st = 0; st < stations; ++st) {
      // sweep the far column first on the second side so the crossing stays short
      const int idx = (side == 0) ? st : (stations - 1 - st);
      const double along = -span / 2.0 + span * idx / (stations - 1);
      const Vec3 base = center + line_dir * along + lateral;
      const bool up = (st % 2 == 0);
      add({base.x, base.y, up ? z_lo : z_hi});
      add({base.x, base.y, up ? z_hi : z_lo});
    }
    if (side == 0) {
      // overflight transition to the other lateral side
      const Vec3 last = path.waypoints.back().position;
      add({last.x, last.y, z_cross});
      add({center.x, center.y, z_cross});
      const Vec3 entry = center + line_dir * (span / 2.0) - side_dir * standoff;
      add({entry.x, entry.y, z_cross});
    }
  }

  for (const PathWaypoint& wp : path.waypoints) {
    if (safety.violates(wp.position)) {
      throw InfeasibleStandoff("build_exploration_path: waypoint inside safety region");
    }
  }
  return path;
}

std::vector<InspectionWaypoint> compute_inspection_waypoints(const Vec3& center_world,
                                                             int insulator_id, double standoff,
                                                             int per_insulator,
                                                             const SafetyRegion& safety) {
  if (standoff <= 0.0) throw Error("compute_inspection_waypoints: standoff must be positive");
  if (per_insulator < 1) throw Error("compute_inspection_waypoints: per_insulator >= 1");

  Vec3 outward = center_world - safety.tower_center;
  outward.z = 0.0;
  if (outward.norm() < 1e-9) outward = {1.0, 0.0, 0.0};
  outward = outward.normalized();
  const double base_azimuth = std::atan2(outward.y, outward.x);

  std::vector<double> offsets;
  const double spread = deg2rad(35.0);
  if (per_insulator == 1) {
    offsets.push_back(0.0);
  } else {
    for (int i = 0; i < per_insulator; ++i) {
      offsets.push_back(-spread + 2.0 * spread * i / (per_insulator - 1));
    }
  }

  std::vector<InspectionWaypoint> wps;
  for (const double off : offsets) {
    const double az = base_azimuth + off;
    const Vec3 radial{std::cos(az), std::sin(az), 0.0};
    Vec3 pos = center_world + radial * standoff;

    // push radially outward until clear of the safety region
    const double step = 0.25;
    int guard = 0;
    while (safety.violates(pos)) {
      pos += radial * step;
      if (++guard > 400) {
        throw NoFeasibleWaypoint("compute_inspection_waypoints: cannot clear safety region");
      }
    }
    wps.push_back(InspectionWaypoint{pos, center_world, insulator_id});
  }
  return wps;
}

// ---------------------------------------------------------------------------
// Overflight detour

std::vector<Vec3> detour_via_overflight_waypoints(const Vec3& start, const Vec3& goal,
                                                  const SafetyRegion& safety,
                                                  const DynamicLimits& limits,
                                                  double clearance) {
  const double z_apex = safety.height + clearance;
  const Vec3 apex{safety.tower_center.x, safety.tower_center.y, z_apex};

  auto route_safe = [&](const std::vector<Vec3>& pts) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (!check_safety(plan_segment(pts[i], pts[i + 1], limits), safety)) return false;
    }
    return true;
  };

  // plain two-segment route through the apex
  std::vector<Vec3> direct{start, apex, goal};
  if (route_safe(direct)) return direct;

  // climb above the start, cross over the tower, descend above the goal;
  // synchronized per-axis profiles would otherwise cut the envelope corner
  std::vector<Vec3> chain{start, Vec3{start.x, start.y, z_apex}, apex,
                          Vec3{goal.x, goal.y, z_apex}, goal};
  // drop degenerate hops
  std::vector<Vec3> pruned;
  for (const Vec3& p : chain) {
    if (pruned.empty() || distance(pruned.back(), p) > 1e-9) pruned.push_back(p);
  }
  if (route_safe(pruned)) return pruned;
  throw NoFeasibleDetour("detour_via_overflight: no collision-free overflight route");
}

std::vector<Trajectory> detour_via_overflight(const Vec3& start, const Vec3& goal,
                                              const SafetyRegion& safety,
                                              const DynamicLimits& limits, double clearance) {
  const std::vector<Vec3> chain =
      detour_via_overflight_waypoints(start, goal, safety, limits, clearance);
  std::vector<Trajectory> segments;
  segments.reserve(chain.size() - 1);
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    segments.push_back(plan_segment(chain[i], chain[i + 1], limits));
  }
  return segments;
}

double total_duration(const std::vector<Trajectory>& segments) {
  double t = 0.0;
  for (const Trajectory& s : segments) t += s.total_duration;
  return t;
}

std::vector<Trajectory> plan_safe_route(const Vec3& start, const Vec3& goal,
                                        const SafetyRegion& safety, const DynamicLimits& limits) {
  Trajectory direct = plan_segment(start, goal, limits);
  if (check_safety(direct, safety)) return {direct};
  return detour_via_overflight(start, goal, safety, limits);
}

}  // namespace insp
