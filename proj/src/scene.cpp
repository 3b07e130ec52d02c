#include "insp/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "insp/fusion.hpp"

namespace insp {

void LidarParams::validate() const {
  if (horizontal_rays <= 0 || vertical_rays <= 0) throw Error("LidarParams: ray counts must be positive");
  if (horizontal_fov_deg <= 0.0 || horizontal_fov_deg > 360.0 || vertical_fov_deg <= 0.0 ||
      vertical_fov_deg > 360.0) {
    throw Error("LidarParams: fov must lie in (0, 360]");
  }
  if (max_range <= 0.0) throw Error("LidarParams: max_range must be positive");
  if (range_noise_sigma < 0.0) throw Error("LidarParams: range_noise_sigma must be >= 0");
  if (dropout_prob < 0.0 || dropout_prob > 1.0) throw Error("LidarParams: dropout_prob in [0,1]");
}

void DetectorParams::validate() const {
  if (detection_range <= 0.0) throw Error("DetectorParams: detection_range must be positive");
  if (false_negative_prob < 0.0 || false_negative_prob > 1.0) {
    throw Error("DetectorParams: false_negative_prob in [0,1]");
  }
  if (bbox_pixel_noise_sigma < 0.0) throw Error("DetectorParams: bbox noise sigma must be >= 0");
}

const TowerModel& SceneConfig::primary_tower() const {
  if (towers.empty()) throw Error("SceneConfig: no towers");
  return towers.front();
}

std::vector<SceneSegment> SceneConfig::all_segments() const {
  std::vector<SceneSegment> segs;
  for (const TowerModel& tower : towers) {
    segs.insert(segs.end(), tower.structure_segments.begin(), tower.structure_segments.end());
    for (const InsulatorSpec& ins : tower.insulators) {
      const Vec3 half = ins.axis * (ins.length / 2.0);
      segs.push_back(SceneSegment{ins.center - half, ins.center + half, ins.radius, ins.id, true});
    }
  }
  return segs;
}

namespace {

constexpr double kInsulatorLength = 1.2;
constexpr double kInsulatorRadius = 0.14;
constexpr double kLegRadius = 0.05;
constexpr double kBraceRadius = 0.04;
constexpr double kArmRadius = 0.06;
constexpr double kConductorRadius = 0.02;
constexpr double kConductorStubLength = 25.0;
// shackle/yoke/arcing-horn hardware between the crossarm and the string
// top; wide enough that clustering separates insulator from arm returns
constexpr double kAttachGap = 0.55;
constexpr double kTipGap = 0.05;

Vec3 tf(const RigidTransform& pose, const Vec3& p) { return transform_point(pose, p); }
Vec3 rot(const RigidTransform& pose, const Vec3& v) { return pose.rotation * v; }

void add_lattice(TowerModel& t, const RigidTransform& pose, double h, double w) {
  const double base = 0.30 * w;
  const double top = 0.06 * w;
  auto leg_xy = [&](double z) { return base + (top - base) * (z / h); };

  const double corner_sign[4][2] = {{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}};
  for (const auto& s : corner_sign) {
    t.structure_segments.push_back(SceneSegment{
        tf(pose, {s[0] * base, s[1] * base, 0.0}), tf(pose, {s[0] * top, s[1] * top, h}),
        kLegRadius, -1});
  }
  // bracing rings, kept clear of the crossarm levels where insulators hang
  for (const double frac : {1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0, 4.0 / 6.0, 0.98}) {
    const double z = h * frac;
    const double s = leg_xy(z);
    const Vec3 c[4] = {tf(pose, {+s, +s, z}), tf(pose, {+s, -s, z}), tf(pose, {-s, -s, z}),
                       tf(pose, {-s, +s, z})};
    for (int k = 0; k < 4; ++k) {
      t.structure_segments.push_back(SceneSegment{c[k], c[(k + 1) % 4], kBraceRadius, -1});
    }
  }
}

// Crossarms rise a touch toward the tips; a perfectly horizontal thin
// cylinder can align with a whole LiDAR scan row and paint a spurious
// point string through every bounding box at that height.
void add_crossarm(TowerModel& t, const RigidTransform& pose, double arm, double z) {
  const double lift = 0.03 * arm;
  t.structure_segments.push_back(
      SceneSegment{tf(pose, {0.0, 0.0, z - lift}), tf(pose, {0.0, +arm, z}), kArmRadius, -1});
  t.structure_segments.push_back(
      SceneSegment{tf(pose, {0.0, 0.0, z - lift}), tf(pose, {0.0, -arm, z}), kArmRadius, -1});
}

// Conductors leave the insulator live end through clamp hardware (a gap,
// so clustering can separate them) and sag away like a real span.
// Suspension strings (vertical) drop the conductor well below the live
// end; tension strings continue it nearly coaxially before the sag
// takes over, which is what puts line returns inside tower-A bounding
// boxes at oblique viewing angles.
void add_conductor(TowerModel& t, const RigidTransform& pose, const Vec3& live_tip_local,
                   const Vec3& dir_local, bool tension) {
  const Vec3 start = tension ? live_tip_local + dir_local * 0.35 + Vec3{0.0, 0.0, -0.10}
                             : live_tip_local + dir_local * 0.3 + Vec3{0.0, 0.0, -0.6};
  const double spans[3] = {8.0, 16.0, kConductorStubLength};
  const double droop[3] = {1.0, 2.2, 3.8};
  Vec3 prev = start;
  for (int i = 0; i < 3; ++i) {
    const Vec3 next = start + dir_local * spans[i] + Vec3{0.0, 0.0, -droop[i]};
    t.structure_segments.push_back(
        SceneSegment{tf(pose, prev), tf(pose, next), kConductorRadius, -1});
    prev = next;
  }
}

void add_insulator(TowerModel& t, const RigidTransform& pose, int id, const Vec3& attach_local,
                   const Vec3& axis_local, const std::vector<Vec3>& stub_dirs_local,
                   bool tension) {
  InsulatorSpec ins;
  ins.id = id;
  ins.length = kInsulatorLength;
  ins.radius = kInsulatorRadius;
  ins.axis = rot(pose, axis_local);
  ins.center = tf(pose, attach_local + axis_local * (kAttachGap + kInsulatorLength / 2.0));
  t.insulators.push_back(ins);

  const Vec3 live_tip_local = attach_local + axis_local * (kAttachGap + kInsulatorLength + kTipGap);
  for (const Vec3& d : stub_dirs_local) {
    add_conductor(t, pose, live_tip_local, d, tension);
  }
}

}  // namespace

TowerModel build_tower(TowerKind kind, const RigidTransform& pose, double height, double width) {
  if (height <= 0.0 || width <= 0.0) {
    throw InvalidDimensions("build_tower: height and width must be positive");
  }
  TowerModel t;
  t.kind = kind;
  t.pose = pose;
  t.height = height;
  t.width = width;

  add_lattice(t, pose, height, width);

  int id = 0;
  if (kind == TowerKind::A) {
    // three crossarm levels, two near-horizontal insulators per side per
    // level, tilted 10 degrees below horizontal along the line direction
    const double level_frac[3] = {0.60, 0.75, 0.90};
    const double arm_frac[3] = {0.48, 0.42, 0.36};
    const double tilt = deg2rad(10.0);
    for (int l = 0; l < 3; ++l) {
      const double z = level_frac[l] * height;
      const double arm = arm_frac[l] * width;
      add_crossarm(t, pose, arm, z);
      for (const double side : {+1.0, -1.0}) {
        for (const double dir : {+1.0, -1.0}) {
          // bridle hardware offsets the two strings of a tension pair
          // along the line, so their live ends do not meet at a point
          const Vec3 attach{dir * 0.30, side * arm, z};
          const Vec3 axis{dir * std::cos(tilt), 0.0, -std::sin(tilt)};
          add_insulator(t, pose, id++, attach, axis, {Vec3{dir, 0.0, 0.0}}, true);
        }
      }
    }
  } else {
    // one crossarm near the top with four vertical suspension insulators,
    // the inner pair kept well clear of the tower body
    const double z = 0.85 * height;
    const double half = 0.5 * width;
    add_crossarm(t, pose, half, z);
    for (const double frac : {-0.44, -0.22, 0.22, 0.44}) {
      const Vec3 attach{0.0, frac * width, z - 0.03};
      add_insulator(t, pose, id++, attach, Vec3{0.0, 0.0, -1.0},
                    {Vec3{1.0, 0.0, 0.0}, Vec3{-1.0, 0.0, 0.0}}, false);
    }
  }
  return t;
}

namespace {

struct SegmentAabb {
  Vec3 lo;
  Vec3 hi;
};

SegmentAabb segment_aabb(const SceneSegment& s) {
  SegmentAabb box;
  box.lo = {std::min(s.a.x, s.b.x) - s.radius, std::min(s.a.y, s.b.y) - s.radius,
            std::min(s.a.z, s.b.z) - s.radius};
  box.hi = {std::max(s.a.x, s.b.x) + s.radius, std::max(s.a.y, s.b.y) + s.radius,
            std::max(s.a.z, s.b.z) + s.radius};
  return box;
}

// Slab test; dir need not be normalized but must be finite.
bool ray_hits_aabb(const Vec3& o, const Vec3& inv_dir, const SegmentAabb& box, double t_max) {
  double t0 = 0.0, t1 = t_max;
  const double od[3] = {o.x, o.y, o.z};
  const double id[3] = {inv_dir.x, inv_dir.y, inv_dir.z};
  const double lo[3] = {box.lo.x, box.lo.y, box.lo.z};
  const double hi[3] = {box.hi.x, box.hi.y, box.hi.z};
  for (int a = 0; a < 3; ++a) {
    double ta = (lo[a] - od[a]) * id[a];
    double tb = (hi[a] - od[a]) * id[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

// First intersection of a ray with a capped cylinder, or +inf.
double ray_capped_cylinder(const Vec3& o, const Vec3& d, const SceneSegment& seg) {
  const Vec3 ab = seg.b - seg.a;
  const double len = ab.norm();
  if (len < 1e-12) return std::numeric_limits<double>::infinity();
  const Vec3 u = ab / len;
  const Vec3 m = o - seg.a;
  const double md = m.dot(u);
  const double dd = d.dot(u);
  const double r2 = seg.radius * seg.radius;

  double best = std::numeric_limits<double>::infinity();

  const double a_coef = 1.0 - dd * dd;
  const double b_coef = m.dot(d) - md * dd;
  const double c_coef = m.dot(m) - md * md - r2;
  if (a_coef > 1e-12) {
    const double disc = b_coef * b_coef - a_coef * c_coef;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (const double s : {(-b_coef - sq) / a_coef, (-b_coef + sq) / a_coef}) {
        if (s >= 0.0 && s < best) {
          const double q = md + s * dd;
          if (q >= 0.0 && q <= len) best = s;
        }
      }
    }
  }
  if (seg.rounded_ends) {
    // hemispherical ends: spheres at both endpoints
    for (const Vec3& c : {seg.a, seg.b}) {
      const Vec3 mc = o - c;
      const double b = mc.dot(d);
      const double disc = b * b - (mc.norm_sq() - r2);
      if (disc < 0.0) continue;
      const double s = -b - std::sqrt(disc);
      if (s >= 0.0 && s < best) best = s;
    }
  } else if (std::abs(dd) > 1e-12) {
    // flat end caps
    for (const double q0 : {0.0, len}) {
      const double s = (q0 - md) / dd;
      if (s < 0.0 || s >= best) continue;
      const Vec3 p = m + d * s - u * q0;
      if (p.norm_sq() <= r2) best = s;
    }
  }
  return best;
}

}  // namespace

std::optional<RayHit> cast_ray(const std::vector<SceneSegment>& segments, const Vec3& origin,
                               const Vec3& dir, double max_range) {
  const Vec3 inv{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
  double best = max_range;
  int best_idx = -1;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const SegmentAabb box = segment_aabb(segments[i]);
    if (!ray_hits_aabb(origin, inv, box, best)) continue;
    const double s = ray_capped_cylinder(origin, dir, segments[i]);
    if (s < best) {
      best = s;
      best_idx = static_cast<int>(i);
    }
  }
  if (best_idx < 0) return std::nullopt;
  return RayHit{best, best_idx, segments[static_cast<std::size_t>(best_idx)].insulator_id};
}

PointCloud simulate_lidar_scan(const SceneConfig& scene, const RigidTransform& sensor_pose_world,
                               Rng& rng, double timestamp) {
  if (!sensor_pose_world.translation.finite()) throw Error("simulate_lidar_scan: pose not finite");
  const LidarParams& lp = scene.lidar;
  lp.validate();

  const std::vector<SceneSegment> segments = scene.all_segments();
  PointCloud cloud;
  cloud.frame = Frame::Lidar;
  cloud.timestamp = timestamp;
  cloud.points.reserve(static_cast<std::size_t>(lp.horizontal_rays) *
                       static_cast<std::size_t>(lp.vertical_rays) / 4);

  const Vec3 origin = sensor_pose_world.translation;
  const double hfov = deg2rad(lp.horizontal_fov_deg);
  const double vfov = deg2rad(lp.vertical_fov_deg);

  for (int iv = 0; iv < lp.vertical_rays; ++iv) {
    const double el = -vfov / 2.0 + vfov * (iv + 0.5) / lp.vertical_rays;
    for (int ih = 0; ih < lp.horizontal_rays; ++ih) {
      const double az = -hfov / 2.0 + hfov * (ih + 0.5) / lp.horizontal_rays;
      const Vec3 dir_lidar{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
      const Vec3 dir_world = sensor_pose_world.rotation * dir_lidar;
      const auto hit = cast_ray(segments, origin, dir_world, lp.max_range);
      if (!hit) continue;
      double range = hit->distance;
      if (lp.range_noise_sigma > 0.0) range += rng.normal(0.0, lp.range_noise_sigma);
      if (lp.dropout_prob > 0.0 && rng.uniform() < lp.dropout_prob) continue;
      if (range <= 0.0) continue;
      cloud.points.push_back(dir_lidar * range);
    }
  }
  return cloud;
}

std::vector<DetectionEvent> simulate_detection(const SceneConfig& scene,
                                               const RigidTransform& camera_pose_world,
                                               const CameraIntrinsics& k, Rng& rng,
                                               double timestamp) {
  if (!camera_pose_world.translation.finite()) throw Error("simulate_detection: pose not finite");
  k.validate();
  const DetectorParams& dp = scene.detector;
  dp.validate();

  const std::vector<SceneSegment> segments = scene.all_segments();
  const RigidTransform world_from_camera = camera_pose_world;
  const RigidTransform camera_from_world = world_from_camera.inverse();
  const Vec3 cam_origin = world_from_camera.translation;

  std::vector<DetectionEvent> events;
  for (const TowerModel& tower : scene.towers) {
    for (const InsulatorSpec& ins : tower.insulators) {
      const Vec3 center_cam = transform_point(camera_from_world, ins.center);
      if (center_cam.z <= 0.0) continue;
      const double dist = distance(ins.center, cam_origin);
      if (dist > dp.detection_range) continue;
      const ImagePoint center_px = project_to_image(k, center_cam);
      if (!k.in_image(center_px)) continue;

      // occlusion: rays to the center and both ends must all reach this
      // insulator first; a body mostly hidden behind structure would not
      // be classified as an insulator
      bool occluded = false;
      for (const double e : {-0.4, 0.0, 0.4}) {
        const Vec3 sample = ins.center + ins.axis * (e * ins.length);
        const Vec3 rel = sample - cam_origin;
        const double d = rel.norm();
        const auto hit = cast_ray(segments, cam_origin, rel / d, d + 1.0);
        if (hit && hit->insulator_id != ins.id) {
          occluded = true;
          break;
        }
      }
      if (occluded) continue;

      if (dp.false_negative_prob > 0.0 && rng.uniform() < dp.false_negative_prob) continue;

      // hull of projected cylinder extremal samples
      const Vec3 axis = ins.axis;
      Vec3 ref = (std::abs(axis.z) < 0.9) ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
      const Vec3 b1 = axis.cross(ref).normalized();
      const Vec3 b2 = axis.cross(b1);
      double u_min = std::numeric_limits<double>::infinity(), v_min = u_min;
      double u_max = -u_min, v_max = -v_min;
      bool any = false;
      for (const double e : {-0.5, 0.0, 0.5}) {
        const Vec3 ring_c = ins.center + axis * (e * ins.length);
        for (int a = 0; a < 8; ++a) {
          const double phi = 2.0 * M_PI * a / 8.0;
          const Vec3 p = ring_c + b1 * (ins.radius * std::cos(phi)) + b2 * (ins.radius * std::sin(phi));
          const Vec3 pc = transform_point(camera_from_world, p);
          if (pc.z <= 0.0) continue;
          const ImagePoint s = project_to_image(k, pc);
          u_min = std::min(u_min, s.u);
          u_max = std::max(u_max, s.u);
          v_min = std::min(v_min, s.v);
          v_max = std::max(v_max, s.v);
          any = true;
        }
      }
      if (!any) continue;

      BBox box{u_min - dp.bbox_inflation, v_min - dp.bbox_inflation, u_max + dp.bbox_inflation,
               v_max + dp.bbox_inflation};
      if (dp.bbox_pixel_noise_sigma > 0.0) {
        box.u_min += rng.normal(0.0, dp.bbox_pixel_noise_sigma);
        box.v_min += rng.normal(0.0, dp.bbox_pixel_noise_sigma);
        box.u_max += rng.normal(0.0, dp.bbox_pixel_noise_sigma);
        box.v_max += rng.normal(0.0, dp.bbox_pixel_noise_sigma);
      }
      box.u_min = std::clamp(box.u_min, 0.0, static_cast<double>(k.image_width - 1));
      box.u_max = std::clamp(box.u_max, 0.0, static_cast<double>(k.image_width - 1));
      box.v_min = std::clamp(box.v_min, 0.0, static_cast<double>(k.image_height - 1));
      box.v_max = std::clamp(box.v_max, 0.0, static_cast<double>(k.image_height - 1));
      if (box.u_min >= box.u_max || box.v_min >= box.v_max) continue;

      DetectionEvent ev;
      ev.bbox = box;
      ev.timestamp = timestamp;
      ev.camera_pose_world = camera_pose_world;
      ev.true_insulator_id = ins.id;
      events.push_back(ev);
    }
  }
  return events;
}

std::vector<GroundTruthEntry> ground_truth(const SceneConfig& scene) {
  std::vector<GroundTruthEntry> out;
  for (const TowerModel& tower : scene.towers) {
    for (const InsulatorSpec& ins : tower.insulators) {
      out.push_back(GroundTruthEntry{ins.id, ins.center, ins.axis});
    }
  }
  return out;
}

}  // namespace insp
