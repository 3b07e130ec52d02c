// Rigid-frame algebra and pinhole camera projection.
//
// Frames follow the usual UAV conventions: world and body are z-up,
// the camera is z-forward / x-right / y-down. Rotations are stored as
// orthonormal 3x3 matrices; configuration files speak yaw-pitch-roll
// degrees (Z-Y-X intrinsic).

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "insp/errors.hpp"

namespace insp {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double px, double py, double pz) : x(px), y(py), z(pz) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  constexpr double norm_sq() const { return dot(*this); }
  Vec3 normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
  }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static constexpr Mat3 identity() { return Mat3{}; }

  double& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }
  double operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    }
    return r;
  }

  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }

  // Max absolute entry of R^T R - I.
  double orthonormality_defect() const;
};

Mat3 rot_x(double rad);
Mat3 rot_y(double rad);
Mat3 rot_z(double rad);

// Z-Y-X intrinsic: R = Rz(yaw) * Ry(pitch) * Rx(roll).
Mat3 rot_ypr(double yaw_rad, double pitch_rad, double roll_rad);

constexpr double deg2rad(double d) { return d * (M_PI / 180.0); }
constexpr double rad2deg(double r) { return r * (180.0 / M_PI); }

enum class Frame : std::uint8_t { World, Body, Lidar, Camera, Local };

const char* frame_name(Frame f);

// SE(3) pose carrying its frame chain; maps points from `from_frame`
// coordinates into `to_frame` coordinates.
struct RigidTransform {
  Mat3 rotation;
  Vec3 translation;
  Frame from_frame = Frame::Local;
  Frame to_frame = Frame::World;

  static RigidTransform identity(Frame from = Frame::Local, Frame to = Frame::World) {
    return RigidTransform{Mat3::identity(), Vec3{}, from, to};
  }
  static RigidTransform translate(const Vec3& t, Frame from = Frame::Local,
                                  Frame to = Frame::World) {
    return RigidTransform{Mat3::identity(), t, from, to};
  }

  // Checks RᵀR = I and det R = 1 within tol. Throws Error on violation.
  void validate(double tol = 1e-9) const;

  RigidTransform inverse() const {
    const Mat3 rt = rotation.transposed();
    return RigidTransform{rt, -(rt * translation), to_frame, from_frame};
  }
};

RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner);

inline Vec3 transform_point(const RigidTransform& t, const Vec3& p) {
  return t.rotation * p + t.translation;
}

// ᶜp = T_CB · T_BL · p_L. Throws FrameMismatch when the L→B→C chain is broken.
Vec3 lidar_to_camera(const Vec3& p_lidar, const RigidTransform& t_body_from_lidar,
                     const RigidTransform& t_camera_from_body);

struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
};

// Brown-Conrady distortion coefficients; all zero in simulation.
struct Distortion {
  double k1 = 0.0, k2 = 0.0, p1 = 0.0, p2 = 0.0, k3 = 0.0;
  bool any() const { return k1 != 0.0 || k2 != 0.0 || p1 != 0.0 || p2 != 0.0 || k3 != 0.0; }
};

struct CameraIntrinsics {
  double fx = 420.0;
  double fy = 420.0;
  double cx = 320.0;
  double cy = 240.0;
  int image_width = 640;
  int image_height = 480;
  Distortion distortion;

  void validate() const;
  bool in_image(const ImagePoint& s) const {
    return s.u >= 0.0 && s.u <= image_width - 1 && s.v >= 0.0 && s.v <= image_height - 1;
  }
};

// Pinhole projection; distortion applied in normalized coordinates when
// any coefficient is nonzero. Throws BehindCamera for z <= 0.
ImagePoint project_to_image(const CameraIntrinsics& k, const Vec3& p_camera);

// Inverse of the zero-distortion projection at a given depth.
Vec3 back_project(const CameraIntrinsics& k, const ImagePoint& s, double depth);

}  // namespace insp
