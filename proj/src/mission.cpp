#include "insp/mission.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>

namespace insp {

const char* mission_state_name(MissionState s) {
  switch (s) {
    case MissionState::Exploring: return "exploring";
    case MissionState::FlyingToInspection: return "flying_to_inspection";
    case MissionState::Capturing: return "capturing";
    case MissionState::ReturningToPath: return "returning_to_path";
    case MissionState::Finished: return "finished";
  }
  return "?";
}

SensorRig SensorRig::standard() {
  SensorRig rig;
  rig.t_body_from_lidar = RigidTransform{Mat3::identity(), {0.0, 0.0, 0.08}, Frame::Lidar,
                                         Frame::Body};
  // body x-forward maps to camera z-forward, body -y to camera x, body -z
  // to camera y; camera sits 0.1 m ahead of the body origin
  Mat3 r;
  r.m = {0, -1, 0, 0, 0, -1, 1, 0, 0};
  const Vec3 cam_in_body{0.1, 0.0, 0.0};
  rig.t_camera_from_body = RigidTransform{r, -(r * cam_in_body), Frame::Body, Frame::Camera};
  rig.camera = CameraIntrinsics{};
  return rig;
}

RegisterResult InsulatorRegistry::register_insulator(const Vec3& est_center_world,
                                                     const Vec3& orientation_world,
                                                     const Vec3& uav_position,
                                                     const Vec3& tower_center) {
  for (const RegistryEntry& e : entries_) {
    if (distance(e.world_center, est_center_world) <= merge_radius_) {
      return {RegisterOutcome::Duplicate, e.id};
    }
  }
  const Vec3 a = est_center_world - tower_center;
  const Vec3 b = uav_position - tower_center;
  if (a.x * b.x + a.y * b.y < 0.0) {
    return {RegisterOutcome::FarSide, -1};
  }
  RegistryEntry entry;
  entry.id = next_id_++;
  entry.world_center = est_center_world;
  entry.orientation = orientation_world;
  entries_.push_back(entry);
  return {RegisterOutcome::New, entry.id};
}

// ---------------------------------------------------------------------------

MissionSim::MissionSim(const SceneConfig& scene, const MissionConfig& cfg)
    : scene_(scene),
      cfg_(cfg),
      safety_(SafetyRegion::around_tower(scene.primary_tower(), scene.neighbor_tower_positions,
                                         cfg.safety_margin)),
      exploration_(build_exploration_path(scene.primary_tower(), scene.neighbor_tower_positions,
                                          cfg.exploration_standoff, cfg.limits, safety_)),
      registry_(cfg.merge_radius),
      tracker_(cfg.fusion_max_gap, 1.0),
      lidar_rng_(Rng(scene.seed).stream("lidar")),
      detector_rng_(Rng(scene.seed).stream("detector")) {
  position_ = exploration_.waypoints.front().position;
  log_.events.push_back({0.0, "state", "exploring", MissionState::Exploring});
  if (!start_route_to(exploration_.waypoints[explore_next_].position, "exploration leg")) return;
}

Vec3 MissionSim::position() const { return position_; }

MissionLog MissionSim::take_log() { return std::move(log_); }

void MissionSim::enter_state(MissionState s, const std::string& detail) {
  state_ = s;
  log_.events.push_back({now_, "state", detail.empty() ? mission_state_name(s) : detail, s});
}

void MissionSim::fail(const std::string& reason) {
  log_.failure = true;
  log_.failure_reason = reason;
  log_.events.push_back({now_, "failure", reason, state_});
  waypoint_buffer_.clear();
  route_ = {};
  enter_state(MissionState::Finished, "finished (failure)");
  log_.total_duration = now_;
}

bool MissionSim::start_route_to(const Vec3& goal, const std::string& what) {
  try {
    route_.segments = plan_safe_route(position_, goal, safety_, cfg_.limits);
    route_.seg = 0;
    route_.seg_elapsed = 0.0;
    return true;
  } catch (const Error& e) {
    fail("planning failure (" + what + "): " + e.what());
    return false;
  }
}

double MissionSim::current_gaze_yaw() const {
  Vec3 target;
  if ((state_ == MissionState::FlyingToInspection || state_ == MissionState::Capturing) &&
      current_target_) {
    target = current_target_->gaze_target;
  } else {
    target = safety_.tower_center;
  }
  return std::atan2(target.y - position_.y, target.x - position_.x);
}

RigidTransform MissionSim::body_pose_at(double) const {
  RigidTransform pose;
  pose.rotation = rot_z(current_gaze_yaw());
  pose.translation = position_;
  pose.from_frame = Frame::Body;
  pose.to_frame = Frame::World;
  return pose;
}

void MissionSim::log_path_sample(double t) {
  log_.flight_path.push_back({t, position_, state_});
}

void MissionSim::lidar_tick(double t) {
  Rng scan_rng = lidar_rng_.stream(scan_counter_++);
  const RigidTransform body_pose = body_pose_now();
  const RigidTransform lidar_pose = compose(body_pose, cfg_.rig.t_body_from_lidar);
  latest_scan_ = simulate_lidar_scan(scene_, lidar_pose, scan_rng, t);
  latest_scan_pose_ = body_pose;
  log_path_sample(t);
}

void MissionSim::detection_tick(double t) {
  if (!latest_scan_) return;
  // the camera is busy with the inspection image while capturing, and a
  // hovering platform has no parallax to break sight-line coincidences
  if (state_ == MissionState::Capturing) return;
  Rng det_rng = detector_rng_.stream(detect_counter_++);
  const RigidTransform body_pose = body_pose_now();
  const RigidTransform camera_pose = compose(body_pose, cfg_.rig.t_camera_from_body.inverse());

  const auto events = simulate_detection(scene_, camera_pose, cfg_.rig.camera, det_rng, t);
  if (events.empty()) return;

  const auto projections = project_cloud(*latest_scan_, cfg_.rig.t_body_from_lidar,
                                         cfg_.rig.t_camera_from_body, cfg_.rig.camera);
  for (const DetectionEvent& ev : events) {
    if (!cfg_.target_insulator_ids.empty() && ev.true_insulator_id &&
        std::find(cfg_.target_insulator_ids.begin(), cfg_.target_insulator_ids.end(),
                  *ev.true_insulator_id) == cfg_.target_insulator_ids.end()) {
      continue;  // asset not on the inspection list
    }
    FilteredCloud fc =
        filter_by_bbox(*latest_scan_, projections, ev.bbox, cfg_.rig.t_body_from_lidar);
    fc.detection_timestamp = t;
    fc.body_pose_world = latest_scan_pose_;
    if (fc.points.size() < static_cast<std::size_t>(cfg_.localizer.dbscan_min_pts)) continue;
    auto cumulated = tracker_.feed(fc, camera_pose);
    if (cumulated) process_cumulated(*cumulated, latest_scan_pose_, t);
    if (finished()) return;
  }
}

void MissionSim::process_cumulated(const PointCloud& cumulated, const RigidTransform& body_pose,
                                   double t) {
  LocalizerParams params = cfg_.localizer;
  params.rng_seed = detail::mix64(scene_.seed ^ (0x10c0 + localize_counter_++));

  InsulatorEstimate est;
  try {
    est = localize(cfg_.method, cumulated, params);
  } catch (const Error&) {
    return;  // sparse or degenerate cloud; wait for better data
  }

  const Vec3 center_world = transform_point(body_pose, est.center);
  const Vec3 orientation_world = body_pose.rotation * est.orientation;
  const RegisterResult rr = registry_.register_insulator(center_world, orientation_world,
                                                         position_, safety_.tower_center);
  if (rr.outcome != RegisterOutcome::New) {
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%s (%.2f, %.2f, %.2f)",
                  rr.outcome == RegisterOutcome::Duplicate ? "duplicate" : "far_side",
                  center_world.x, center_world.y, center_world.z);
    log_.events.push_back({t, "estimate", detail, state_});
    return;
  }

  log_.events.push_back({t, "register", "insulator " + std::to_string(rr.id), state_});
  std::vector<InspectionWaypoint> wps;
  try {
    wps = compute_inspection_waypoints(center_world, rr.id, cfg_.inspection_standoff,
                                       cfg_.per_insulator, safety_);
  } catch (const Error& e) {
    fail(std::string("planning failure (inspection waypoints): ") + e.what());
    return;
  }
  for (const InspectionWaypoint& wp : wps) {
    const bool dup = std::any_of(
        waypoint_buffer_.begin(), waypoint_buffer_.end(), [&](const InspectionWaypoint& q) {
          return q.insulator_id == wp.insulator_id && distance(q.position, wp.position) <= 1e-6;
        });
    if (!dup) waypoint_buffer_.push_back(wp);
  }
}

void MissionSim::on_route_complete() {
  position_ = route_.segments.back().goal();
  route_ = {};
  switch (state_) {
    case MissionState::Exploring: {
      explore_next_ += 1;
      if (!waypoint_buffer_.empty()) {
        resume_index_ = explore_next_;
        current_target_ = waypoint_buffer_.front();
        waypoint_buffer_.pop_front();
        enter_state(MissionState::FlyingToInspection, "");
        start_route_to(current_target_->position, "inspection waypoint");
        return;
      }
      if (explore_next_ < exploration_.waypoints.size()) {
        start_route_to(exploration_.waypoints[explore_next_].position, "exploration leg");
        return;
      }
      enter_state(MissionState::Finished, "finished");
      log_.total_duration = now_;
      return;
    }
    case MissionState::FlyingToInspection: {
      if (current_target_ &&
          distance(position_, current_target_->position) > cfg_.arrival_tolerance) {
        fail("arrival check failed at inspection waypoint");
        return;
      }
      enter_state(MissionState::Capturing, "");
      dwell_until_ = now_ + cfg_.capture_dwell;
      return;
    }
    case MissionState::ReturningToPath: {
      enter_state(MissionState::Exploring, "exploring (resumed)");
      explore_next_ = resume_index_;
      if (explore_next_ < exploration_.waypoints.size()) {
        start_route_to(exploration_.waypoints[explore_next_].position, "exploration leg");
      } else if (waypoint_buffer_.empty()) {
        enter_state(MissionState::Finished, "finished");
        log_.total_duration = now_;
      }
      return;
    }
    default: return;
  }
}

void MissionSim::step(double dt) {
  if (dt <= 0.0) throw Error("step: dt must be positive");
  if (finished()) return;

  const double target = now_ + dt;
  int guard = 0;
  while (now_ < target && !finished()) {
    if (++guard > 10000) throw Error("step: event loop stuck");

    // interrupt exploration as soon as inspection work is buffered
    if (state_ == MissionState::Exploring && !waypoint_buffer_.empty()) {
      resume_index_ = explore_next_;
      current_target_ = waypoint_buffer_.front();
      waypoint_buffer_.pop_front();
      enter_state(MissionState::FlyingToInspection, "");
      if (!start_route_to(current_target_->position, "inspection waypoint")) break;
    }

    // next thing that happens: a sensing tick, a segment boundary, a dwell
    // end, or the end of this step
    double t_next = target;
    bool boundary = false, dwell_end = false;

    if (state_ == MissionState::Capturing) {
      if (dwell_until_ <= t_next) {
        t_next = dwell_until_;
        dwell_end = true;
      }
    } else if (!route_.done()) {
      const double seg_end =
          now_ - route_.seg_elapsed + route_.segments[route_.seg].total_duration;
      if (seg_end <= t_next) {
        t_next = seg_end;
        boundary = true;
        dwell_end = false;
      }
    }
    const double tick = std::min(next_lidar_t_, next_detection_t_);
    if (tick <= t_next) {
      t_next = tick;
      boundary = false;
      dwell_end = false;
    }

    // advance position along the active segment to t_next
    const double advance = t_next - now_;
    if (!route_.done() && state_ != MissionState::Capturing) {
      route_.seg_elapsed += advance;
      position_ = route_.segments[route_.seg].sample(route_.seg_elapsed).position;
    }
    now_ = t_next;

    if (t_next == tick) {
      if (next_lidar_t_ <= next_detection_t_ && next_lidar_t_ == tick) {
        next_lidar_t_ += cfg_.lidar_period;
        lidar_tick(tick);
      } else {
        next_detection_t_ += cfg_.detection_period;
        detection_tick(tick);
      }
      continue;
    }

    if (dwell_end) {
      // capture complete
      if (current_target_) {
        log_.captures.push_back({current_target_->insulator_id, current_target_->position, now_});
        log_.events.push_back(
            {now_, "capture", "insulator " + std::to_string(current_target_->insulator_id),
             state_});
        for (RegistryEntry& e : registry_.entries()) {
          if (e.id == current_target_->insulator_id) e.inspected = true;
        }
      }
      current_target_.reset();
      dwell_until_ = -1.0;
      if (!waypoint_buffer_.empty()) {
        current_target_ = waypoint_buffer_.front();
        waypoint_buffer_.pop_front();
        enter_state(MissionState::FlyingToInspection, "");
        start_route_to(current_target_->position, "inspection waypoint");
      } else if (resume_index_ < exploration_.waypoints.size()) {
        enter_state(MissionState::ReturningToPath, "");
        start_route_to(exploration_.waypoints[resume_index_].position, "resume point");
      } else {
        enter_state(MissionState::Finished, "finished");
        log_.total_duration = now_;
      }
      continue;
    }

    if (boundary) {
      const bool last_segment = (route_.seg + 1 == route_.segments.size());
      if (last_segment) {
        on_route_complete();
      } else {
        position_ = route_.segments[route_.seg].goal();
        route_.seg += 1;
        route_.seg_elapsed = 0.0;
      }
      continue;
    }
  }

  registry_sync();
}

void MissionSim::registry_sync() { log_.registry = registry_.entries(); }

MissionLog run_mission(const SceneConfig& scene, const MissionConfig& cfg) {
  MissionSim sim(scene, cfg);
  int guard = 0;
  while (!sim.finished()) {
    sim.step(cfg.step_dt);
    if (++guard > 4000000) throw Error("run_mission: mission did not terminate");
  }
  return sim.take_log();
}

// ---------------------------------------------------------------------------

std::string MissionLog::to_json() const {
  nlohmann::ordered_json j;
  j["total_duration"] = total_duration;
  j["failure"] = failure;
  if (failure) j["failure_reason"] = failure_reason;
  j["registry"] = nlohmann::ordered_json::array();
  for (const RegistryEntry& e : registry) {
    j["registry"].push_back(nlohmann::ordered_json{
        {"id", e.id},
        {"center", {e.world_center.x, e.world_center.y, e.world_center.z}},
        {"orientation", {e.orientation.x, e.orientation.y, e.orientation.z}},
        {"inspected", e.inspected}});
  }
  j["captures"] = nlohmann::ordered_json::array();
  for (const CaptureRecord& c : captures) {
    j["captures"].push_back(nlohmann::ordered_json{
        {"insulator_id", c.insulator_id},
        {"waypoint", {c.waypoint.x, c.waypoint.y, c.waypoint.z}},
        {"t", c.t}});
  }
  j["events"] = nlohmann::ordered_json::array();
  for (const MissionEvent& e : events) {
    j["events"].push_back(nlohmann::ordered_json{
        {"t", e.t}, {"type", e.type}, {"detail", e.detail}, {"state", mission_state_name(e.state)}});
  }
  return j.dump(2) + "\n";
}

std::string MissionLog::flight_path_csv() const {
  std::string out = "t,x,y,z,state\n";
  char line[160];
  for (const PathSample& s : flight_path) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f,%.6f,%s\n", s.t, s.position.x, s.position.y,
                  s.position.z, mission_state_name(s.state));
    out += line;
  }
  return out;
}

}  // namespace insp
