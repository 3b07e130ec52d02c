// Camera-LiDAR fusion: project the cloud into the image, keep the points
// inside a detection bounding box, and cumulate three consecutive
// detection events into one denser cloud.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "insp/geometry.hpp"
#include "insp/scene.hpp"

namespace insp {

struct PointCloud {
  std::vector<Vec3> points;
  Frame frame = Frame::Lidar;
  double timestamp = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// ASCII dump, one "x y z" line per point.
void save_xyz(const PointCloud& cloud, const std::string& path);
PointCloud load_xyz(const std::string& path, Frame frame = Frame::Lidar);

// Points that projected into one detection bbox, re-expressed in the body
// frame, together with the scan-time pose needed to cumulate them while
// the platform moves.
struct FilteredCloud {
  std::vector<Vec3> points;  // frame B
  BBox source_bbox;
  double detection_timestamp = 0.0;
  RigidTransform body_pose_world;  // body -> world at scan time
};

// Pixel coordinates of every cloud point in front of the camera, keyed by
// the point's index in the input cloud.
std::vector<std::pair<std::size_t, ImagePoint>> project_cloud(const PointCloud& cloud,
                                                              const RigidTransform& t_body_from_lidar,
                                                              const RigidTransform& t_camera_from_body,
                                                              const CameraIntrinsics& k);

// Keeps exactly the points whose projection falls inside bbox (inclusive
// edges), in input order, re-expressed in frame B via t_body_from_lidar.
// The caller is responsible for stamping body_pose_world with the pose at
// scan time before cumulation; it defaults to identity (static platform).
FilteredCloud filter_by_bbox(const PointCloud& cloud,
                             const std::vector<std::pair<std::size_t, ImagePoint>>& projections,
                             const BBox& bbox, const RigidTransform& t_body_from_lidar);

// FIFO of up to three filtered clouds. A gap larger than max_gap between
// consecutive detections resets the buffer; the third entry flushes the
// cumulated cloud.
class DetectionBuffer {
 public:
  explicit DetectionBuffer(double max_gap = 1.0) : max_gap_(max_gap) {}

  // Appends fc (resetting first if it is too late to be "consecutive") and
  // returns the cumulated cloud once three entries are in. The cumulated
  // cloud is expressed in the body frame of the latest entry: each stored
  // cloud is lifted to the world frame with its own scan-time pose before
  // concatenation, so platform motion does not smear the geometry.
  // Throws NonMonotonicTimestamp if fc is older than the newest entry.
  std::optional<PointCloud> push_and_poll(const FilteredCloud& fc);

  std::size_t pending() const { return entries_.size(); }
  void clear() { entries_.clear(); }
  double max_gap() const { return max_gap_; }
  double last_timestamp() const {
    return entries_.empty() ? 0.0 : entries_.back().detection_timestamp;
  }

 private:
  static constexpr std::size_t kCapacity = 3;
  double max_gap_;
  std::vector<FilteredCloud> entries_;
};

// One DetectionBuffer per tracked insulator candidate. Incoming filtered
// clouds are associated to a track when the track's last world centroid
// lies within `associate_radius` of the world ray through the bbox center.
class DetectionTracker {
 public:
  explicit DetectionTracker(double max_gap = 1.0, double associate_radius = 1.0)
      : max_gap_(max_gap), associate_radius_(associate_radius) {}

  // Returns the cumulated cloud (body frame of the latest pose) when a
  // track reaches three consecutive detections.
  std::optional<PointCloud> feed(const FilteredCloud& fc, const RigidTransform& camera_pose_world);

  std::size_t track_count() const { return tracks_.size(); }

 private:
  struct Track {
    DetectionBuffer buffer;
    Vec3 last_centroid_world;
    double last_seen = 0.0;
    explicit Track(double gap) : buffer(gap) {}
  };

  double max_gap_;
  double associate_radius_;
  std::vector<Track> tracks_;
};

}  // namespace insp
