#include "insp/fusion.hpp"

#include <algorithm>

#include "insp/kernels.hpp"

namespace insp {

std::vector<std::pair<std::size_t, ImagePoint>> project_cloud(
    const PointCloud& cloud, const RigidTransform& t_body_from_lidar,
    const RigidTransform& t_camera_from_body, const CameraIntrinsics& k) {
  std::vector<std::pair<std::size_t, ImagePoint>> out;
  if (cloud.empty()) return out;

  const RigidTransform t_camera_from_lidar = compose(t_camera_from_body, t_body_from_lidar);

  kernels::Soa3 in(cloud.points);
  kernels::Soa3 cam;
  kernels::transform_points(t_camera_from_lidar.rotation, t_camera_from_lidar.translation, in, cam);

  // distortion falls back to the per-point path; the zero-distortion batch
  // kernel covers the simulation default
  if (k.distortion.any()) {
    out.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Vec3 pc = cam.at(i);
      if (pc.z <= 0.0) continue;
      out.emplace_back(i, project_to_image(k, pc));
    }
    return out;
  }

  std::vector<double> u, v;
  kernels::project_pinhole(k.fx, k.fy, k.cx, k.cy, cam, u, v);
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cam.z[i] <= 0.0) continue;
    out.emplace_back(i, ImagePoint{u[i], v[i]});
  }
  return out;
}

FilteredCloud filter_by_bbox(const PointCloud& cloud,
                             const std::vector<std::pair<std::size_t, ImagePoint>>& projections,
                             const BBox& bbox, const RigidTransform& t_body_from_lidar) {
  FilteredCloud fc;
  fc.source_bbox = bbox;
  fc.detection_timestamp = cloud.timestamp;
  fc.body_pose_world = RigidTransform::identity(Frame::Body, Frame::World);
  fc.points.reserve(projections.size());
  for (const auto& [idx, s] : projections) {
    if (bbox.contains(s)) {
      fc.points.push_back(transform_point(t_body_from_lidar, cloud.points[idx]));
    }
  }
  return fc;
}

std::optional<PointCloud> DetectionBuffer::push_and_poll(const FilteredCloud& fc) {
  if (!entries_.empty() && fc.detection_timestamp < entries_.back().detection_timestamp) {
    throw NonMonotonicTimestamp("push_and_poll: detection timestamps must be non-decreasing");
  }
  if (!entries_.empty() &&
      fc.detection_timestamp - entries_.back().detection_timestamp > max_gap_) {
    entries_.clear();
  }
  entries_.push_back(fc);
  if (entries_.size() < kCapacity) return std::nullopt;

  // Lift each stored cloud to the world frame with its own scan-time pose,
  // then express everything in the body frame of the newest entry.
  const RigidTransform world_from_latest = entries_.back().body_pose_world;
  const RigidTransform latest_from_world = world_from_latest.inverse();

  PointCloud cumulated;
  cumulated.frame = Frame::Body;
  cumulated.timestamp = entries_.back().detection_timestamp;
  std::size_t total = 0;
  for (const FilteredCloud& e : entries_) total += e.points.size();
  cumulated.points.reserve(total);
  for (const FilteredCloud& e : entries_) {
    for (const Vec3& p : e.points) {
      cumulated.points.push_back(
          transform_point(latest_from_world, transform_point(e.body_pose_world, p)));
    }
  }
  entries_.clear();
  return cumulated;
}

std::optional<PointCloud> DetectionTracker::feed(const FilteredCloud& fc,
                                                 const RigidTransform& camera_pose_world) {
  if (fc.points.empty()) return std::nullopt;

  // world ray through the bbox center (camera z axis tilted to the bbox
  // center would need intrinsics; the centroid of the filtered points is
  // on that ray up to noise, so use it to build the ray direction)
  Vec3 centroid_body{};
  for (const Vec3& p : fc.points) centroid_body += p;
  centroid_body = centroid_body / static_cast<double>(fc.points.size());
  const Vec3 centroid_world = transform_point(fc.body_pose_world, centroid_body);
  const Vec3 cam_origin = camera_pose_world.translation;
  Vec3 ray_dir = centroid_world - cam_origin;
  const double ray_len = ray_dir.norm();
  if (ray_len < 1e-9) return std::nullopt;
  ray_dir = ray_dir / ray_len;

  // associate: existing track whose last centroid lies near the ray
  std::size_t best = tracks_.size();
  double best_dist = associate_radius_;
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    const Vec3 rel = tracks_[i].last_centroid_world - cam_origin;
    const double along = rel.dot(ray_dir);
    const double d = (rel - ray_dir * along).norm();
    if (along > 0.0 && d <= best_dist) {
      best_dist = d;
      best = i;
    }
  }
  if (best == tracks_.size()) {
    tracks_.emplace_back(max_gap_);
  }
  Track& track = tracks_[best];
  track.last_centroid_world = centroid_world;
  track.last_seen = fc.detection_timestamp;
  auto result = track.buffer.push_and_poll(fc);

  // drop stale tracks so the list stays small on long missions
  std::erase_if(tracks_, [&](const Track& t) {
    return t.last_seen + 5.0 * max_gap_ < fc.detection_timestamp && t.buffer.pending() == 0;
  });
  return result;
}

}  // namespace insp
