// Scene config JSON and the plain "x y z" point-cloud dump.

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "insp/fusion.hpp"
#include "insp/scene.hpp"

namespace insp {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json pose_to_json(const RigidTransform& pose) {
  // Decompose R = Rz(yaw) Ry(pitch) Rx(roll)
  const Mat3& r = pose.rotation;
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  double yaw, roll;
  if (std::abs(std::cos(pitch)) > 1e-9) {
    yaw = std::atan2(r(1, 0), r(0, 0));
    roll = std::atan2(r(2, 1), r(2, 2));
  } else {
    yaw = std::atan2(-r(0, 1), r(1, 1));
    roll = 0.0;
  }
  return ordered_json{{"x", pose.translation.x},     {"y", pose.translation.y},
                      {"z", pose.translation.z},     {"yaw_deg", rad2deg(yaw)},
                      {"pitch_deg", rad2deg(pitch)}, {"roll_deg", rad2deg(roll)}};
}

RigidTransform pose_from_json(const ordered_json& j) {
  RigidTransform pose;
  pose.from_frame = Frame::Local;
  pose.to_frame = Frame::World;
  pose.translation = {j.value("x", 0.0), j.value("y", 0.0), j.value("z", 0.0)};
  pose.rotation = rot_ypr(deg2rad(j.value("yaw_deg", 0.0)), deg2rad(j.value("pitch_deg", 0.0)),
                          deg2rad(j.value("roll_deg", 0.0)));
  return pose;
}

void renumber_insulators(SceneConfig& scene) {
  int id = 0;
  for (TowerModel& tower : scene.towers) {
    for (InsulatorSpec& ins : tower.insulators) ins.id = id++;
  }
}

}  // namespace

std::string scene_to_json(const SceneConfig& scene) {
  ordered_json j;
  j["seed"] = scene.seed;
  j["towers"] = ordered_json::array();
  for (const TowerModel& t : scene.towers) {
    j["towers"].push_back(ordered_json{{"kind", t.kind == TowerKind::A ? "A" : "B"},
                                       {"pose", pose_to_json(t.pose)},
                                       {"height", t.height},
                                       {"width", t.width}});
  }
  j["neighbors"] = ordered_json::array();
  for (const Vec3& n : scene.neighbor_tower_positions) {
    j["neighbors"].push_back(ordered_json::array({n.x, n.y, n.z}));
  }
  j["lidar"] = ordered_json{{"horizontal_rays", scene.lidar.horizontal_rays},
                            {"vertical_rays", scene.lidar.vertical_rays},
                            {"horizontal_fov_deg", scene.lidar.horizontal_fov_deg},
                            {"vertical_fov_deg", scene.lidar.vertical_fov_deg},
                            {"max_range", scene.lidar.max_range},
                            {"range_noise_sigma", scene.lidar.range_noise_sigma},
                            {"dropout_prob", scene.lidar.dropout_prob}};
  j["detector"] = ordered_json{{"detection_range", scene.detector.detection_range},
                               {"false_negative_prob", scene.detector.false_negative_prob},
                               {"bbox_pixel_noise_sigma", scene.detector.bbox_pixel_noise_sigma},
                               {"bbox_inflation", scene.detector.bbox_inflation}};
  return j.dump(2) + "\n";
}

SceneConfig scene_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  SceneConfig scene;
  scene.seed = j.value("seed", std::uint64_t{0});

  if (!j.contains("towers") || j["towers"].empty()) {
    throw Error("scene config: at least one tower is required");
  }
  for (const auto& tj : j["towers"]) {
    const std::string kind = tj.value("kind", "A");
    if (kind != "A" && kind != "B") throw Error("scene config: tower kind must be A or B");
    const RigidTransform pose =
        tj.contains("pose") ? pose_from_json(tj["pose"]) : RigidTransform::identity();
    scene.towers.push_back(build_tower(kind == "A" ? TowerKind::A : TowerKind::B, pose,
                                       tj.value("height", 25.0), tj.value("width", 10.0)));
  }
  renumber_insulators(scene);

  if (j.contains("neighbors")) {
    for (const auto& nj : j["neighbors"]) {
      scene.neighbor_tower_positions.push_back(
          {nj.at(0).get<double>(), nj.at(1).get<double>(), nj.at(2).get<double>()});
    }
  }
  if (j.contains("lidar")) {
    const auto& lj = j["lidar"];
    LidarParams& lp = scene.lidar;
    lp.horizontal_rays = lj.value("horizontal_rays", lp.horizontal_rays);
    lp.vertical_rays = lj.value("vertical_rays", lp.vertical_rays);
    lp.horizontal_fov_deg = lj.value("horizontal_fov_deg", lp.horizontal_fov_deg);
    lp.vertical_fov_deg = lj.value("vertical_fov_deg", lp.vertical_fov_deg);
    lp.max_range = lj.value("max_range", lp.max_range);
    lp.range_noise_sigma = lj.value("range_noise_sigma", lp.range_noise_sigma);
    lp.dropout_prob = lj.value("dropout_prob", lp.dropout_prob);
  }
  if (j.contains("detector")) {
    const auto& dj = j["detector"];
    DetectorParams& dp = scene.detector;
    dp.detection_range = dj.value("detection_range", dp.detection_range);
    dp.false_negative_prob = dj.value("false_negative_prob", dp.false_negative_prob);
    dp.bbox_pixel_noise_sigma = dj.value("bbox_pixel_noise_sigma", dp.bbox_pixel_noise_sigma);
    dp.bbox_inflation = dj.value("bbox_inflation", dp.bbox_inflation);
  }
  scene.lidar.validate();
  scene.detector.validate();
  return scene;
}

SceneConfig load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scene config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json(ss.str());
}

void save_scene(const SceneConfig& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write scene config: " + path);
  out << scene_to_json(scene);
}

void save_xyz(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write point cloud: " + path);
  char line[128];
  for (const Vec3& p : cloud.points) {
    std::snprintf(line, sizeof(line), "%.6f %.6f %.6f\n", p.x, p.y, p.z);
    out << line;
  }
}

PointCloud load_xyz(const std::string& path, Frame frame) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open point cloud: " + path);
  PointCloud cloud;
  cloud.frame = frame;
  double x, y, z;
  while (in >> x >> y >> z) cloud.points.push_back({x, y, z});
  return cloud;
}

}  // namespace insp
