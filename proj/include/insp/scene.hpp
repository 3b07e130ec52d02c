// Synthetic transmission-tower world: tower geometry, a ray-cast LiDAR
// model, and a bounding-box detector standing in for the CNN.
//
// Tower kinds follow the two simulated towers used throughout: kind A
// carries twelve nearly horizontal insulators on three crossarm levels,
// kind B carries four vertical suspension insulators on one crossarm.
// Thin lattice members and power-line stubs are part of the geometry on
// purpose: they produce the structured outliers the localization methods
// are measured against.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "insp/geometry.hpp"
#include "insp/rng.hpp"

namespace insp {

struct InsulatorSpec {
  Vec3 center;       // world, meters
  Vec3 axis;         // unit
  double length = 1.2;
  double radius = 0.12;
  int id = 0;
};

// Capped cylinder between two endpoints; the building block of all
// scene geometry. Insulator bodies use rounded (hemispherical) ends --
// the live-end fittings of a real string -- so LiDAR returns off the tip
// stay contiguous with the shell returns.
struct SceneSegment {
  Vec3 a;
  Vec3 b;
  double radius = 0.05;
  // >= 0 when this segment belongs to an insulator, -1 otherwise.
  int insulator_id = -1;
  bool rounded_ends = false;
};

enum class TowerKind : std::uint8_t { A, B };

struct TowerModel {
  TowerKind kind = TowerKind::A;
  RigidTransform pose;  // local -> world
  double height = 25.0;
  double width = 10.0;
  std::vector<InsulatorSpec> insulators;
  std::vector<SceneSegment> structure_segments;  // lattice + conductor stubs

  Vec3 center_world() const { return pose.translation; }
};

struct LidarParams {
  int horizontal_rays = 96;
  int vertical_rays = 56;
  double horizontal_fov_deg = 100.0;
  double vertical_fov_deg = 52.0;
  double max_range = 30.0;
  double range_noise_sigma = 0.02;
  double dropout_prob = 0.02;

  void validate() const;
};

struct DetectorParams {
  double detection_range = 8.5;
  double false_negative_prob = 0.05;
  double bbox_pixel_noise_sigma = 1.5;
  double bbox_inflation = 3.0;

  void validate() const;
};

struct BBox {
  double u_min = 0.0, v_min = 0.0, u_max = 0.0, v_max = 0.0;

  bool contains(const ImagePoint& s) const {
    return s.u >= u_min && s.u <= u_max && s.v >= v_min && s.v <= v_max;
  }
  double width() const { return u_max - u_min; }
  double height() const { return v_max - v_min; }
  ImagePoint center() const { return {(u_min + u_max) / 2.0, (v_min + v_max) / 2.0}; }
};

struct DetectionEvent {
  BBox bbox;
  double timestamp = 0.0;
  RigidTransform camera_pose_world;  // camera -> world
  // Ground-truth tag for evaluation only; the pipeline never reads it.
  std::optional<int> true_insulator_id;
};

struct SceneConfig {
  std::vector<TowerModel> towers;
  std::vector<Vec3> neighbor_tower_positions;
  LidarParams lidar;
  DetectorParams detector;
  std::uint64_t seed = 0;

  const TowerModel& primary_tower() const;
  std::vector<SceneSegment> all_segments() const;
};

struct GroundTruthEntry {
  int id = 0;
  Vec3 center;
  Vec3 axis;
};

// Deterministic tower geometry. Throws InvalidDimensions for
// non-positive height/width.
TowerModel build_tower(TowerKind kind, const RigidTransform& pose, double height, double width);

struct PointCloud;  // fusion.hpp

// First-hit ray casting over every segment in the scene.
struct RayHit {
  double distance = 0.0;
  int segment_index = -1;
  int insulator_id = -1;
};
std::optional<RayHit> cast_ray(const std::vector<SceneSegment>& segments, const Vec3& origin,
                               const Vec3& dir, double max_range);

// One point per ray that hits geometry within max_range, range-perturbed
// by N(0, sigma^2) and dropped with dropout_prob. Points in frame L.
PointCloud simulate_lidar_scan(const SceneConfig& scene, const RigidTransform& sensor_pose_world,
                               Rng& rng, double timestamp = 0.0);

// Axis-aligned bbox per unoccluded insulator inside the field of view and
// detection range: hull of projected cylinder extremal points, inflated,
// per-edge noise, clamped to the image.
std::vector<DetectionEvent> simulate_detection(const SceneConfig& scene,
                                               const RigidTransform& camera_pose_world,
                                               const CameraIntrinsics& k, Rng& rng,
                                               double timestamp = 0.0);

std::vector<GroundTruthEntry> ground_truth(const SceneConfig& scene);

// Scene config JSON (schema documented in docs/scene_config.md).
std::string scene_to_json(const SceneConfig& scene);
SceneConfig scene_from_json(const std::string& text);
SceneConfig load_scene(const std::string& path);
void save_scene(const SceneConfig& scene, const std::string& path);

}  // namespace insp
