#include "insp/geometry.hpp"

#include <cmath>

namespace insp {

double Mat3::orthonormality_defect() const {
  const Mat3 g = transposed() * (*this);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double want = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g(i, j) - want));
    }
  }
  return worst;
}

Mat3 rot_x(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Mat3 r;
  r.m = {1, 0, 0, 0, c, -s, 0, s, c};
  return r;
}

Mat3 rot_y(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Mat3 r;
  r.m = {c, 0, s, 0, 1, 0, -s, 0, c};
  return r;
}

Mat3 rot_z(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Mat3 r;
  r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
  return r;
}

Mat3 rot_ypr(double yaw_rad, double pitch_rad, double roll_rad) {
  return rot_z(yaw_rad) * rot_y(pitch_rad) * rot_x(roll_rad);
}

const char* frame_name(Frame f) {
  switch (f) {
    case Frame::World: return "world";
    case Frame::Body: return "body";
    case Frame::Lidar: return "lidar";
    case Frame::Camera: return "camera";
    case Frame::Local: return "local";
  }
  return "?";
}

void RigidTransform::validate(double tol) const {
  if (rotation.orthonormality_defect() > tol) {
    throw Error("RigidTransform: rotation is not orthonormal");
  }
  if (std::abs(rotation.det() - 1.0) > tol) {
    throw Error("RigidTransform: rotation determinant is not +1");
  }
  if (!translation.finite()) {
    throw Error("RigidTransform: translation is not finite");
  }
}

RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner) {
  if (outer.from_frame != inner.to_frame) {
    throw FrameMismatch(std::string("compose: outer expects ") + frame_name(outer.from_frame) +
                        " but inner produces " + frame_name(inner.to_frame));
  }
  return RigidTransform{outer.rotation * inner.rotation,
                        outer.rotation * inner.translation + outer.translation,
                        inner.from_frame, outer.to_frame};
}

Vec3 lidar_to_camera(const Vec3& p_lidar, const RigidTransform& t_body_from_lidar,
                     const RigidTransform& t_camera_from_body) {
  if (t_camera_from_body.from_frame != t_body_from_lidar.to_frame) {
    throw FrameMismatch("lidar_to_camera: L->B->C chain is inconsistent");
  }
  return transform_point(t_camera_from_body, transform_point(t_body_from_lidar, p_lidar));
}

void CameraIntrinsics::validate() const {
  if (fx <= 0.0 || fy <= 0.0) throw Error("CameraIntrinsics: focal lengths must be positive");
  if (image_width <= 0 || image_height <= 0) {
    throw Error("CameraIntrinsics: image dimensions must be positive");
  }
  if (cx < 0.0 || cx >= image_width || cy < 0.0 || cy >= image_height) {
    throw Error("CameraIntrinsics: principal point outside image");
  }
}

ImagePoint project_to_image(const CameraIntrinsics& k, const Vec3& p) {
  if (p.z <= 0.0) throw BehindCamera("project_to_image: point has non-positive depth");
  double xn = p.x / p.z;
  double yn = p.y / p.z;
  if (k.distortion.any()) {
    const Distortion& d = k.distortion;
    const double r2 = xn * xn + yn * yn;
    const double radial = 1.0 + r2 * (d.k1 + r2 * (d.k2 + r2 * d.k3));
    const double xd = xn * radial + 2.0 * d.p1 * xn * yn + d.p2 * (r2 + 2.0 * xn * xn);
    const double yd = yn * radial + d.p1 * (r2 + 2.0 * yn * yn) + 2.0 * d.p2 * xn * yn;
    xn = xd;
    yn = yd;
  }
  return {k.fx * xn + k.cx, k.fy * yn + k.cy};
}

Vec3 back_project(const CameraIntrinsics& k, const ImagePoint& s, double depth) {
  return {(s.u - k.cx) / k.fx * depth, (s.v - k.cy) / k.fy * depth, depth};
}

}  // namespace insp
