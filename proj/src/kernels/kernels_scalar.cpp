// Scalar reference kernels. The AVX2 lane mirrors these expression
// trees exactly; keep the evaluation order in sync between the two.

#include <algorithm>

#include "insp/kernels.hpp"

namespace insp::kernels {

void Soa3::assign(std::span<const Vec3> pts) {
  const std::size_t n = pts.size();
  resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = pts[i].x;
    y[i] = pts[i].y;
    z[i] = pts[i].z;
  }
}

namespace scalar {

void transform_points(const Mat3& r, const Vec3& t, const Soa3& in, Soa3& out) {
  const std::size_t n = in.size();
  out.resize(n);
  const double r00 = r(0, 0), r01 = r(0, 1), r02 = r(0, 2);
  const double r10 = r(1, 0), r11 = r(1, 1), r12 = r(1, 2);
  const double r20 = r(2, 0), r21 = r(2, 1), r22 = r(2, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double px = in.x[i], py = in.y[i], pz = in.z[i];
    out.x[i] = ((r00 * px + r01 * py) + r02 * pz) + t.x;
    out.y[i] = ((r10 * px + r11 * py) + r12 * pz) + t.y;
    out.z[i] = ((r20 * px + r21 * py) + r22 * pz) + t.z;
  }
}

void project_pinhole(double fx, double fy, double cx, double cy, const Soa3& in,
                     std::vector<double>& u, std::vector<double>& v) {
  const std::size_t n = in.size();
  u.resize(n);
  v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // true division per lane, not reciprocal-multiply
    u[i] = fx * (in.x[i] / in.z[i]) + cx;
    v[i] = fy * (in.y[i] / in.z[i]) + cy;
  }
}

void line_metrics(const Vec3& anchor, const Vec3& dir, const Soa3& pts,
                  std::vector<double>& dist_sq, std::vector<double>& tparam) {
  const std::size_t n = pts.size();
  dist_sq.resize(n);
  tparam.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = pts.x[i] - anchor.x;
    const double dy = pts.y[i] - anchor.y;
    const double dz = pts.z[i] - anchor.z;
    const double t = (dx * dir.x + dy * dir.y) + dz * dir.z;
    const double d2 = ((dx * dx + dy * dy) + dz * dz) - t * t;
    tparam[i] = t;
    dist_sq[i] = std::max(d2, 0.0);
  }
}

std::size_t line_inlier_count(const Vec3& anchor, const Vec3& dir, const Soa3& pts, double r_sq) {
  const std::size_t n = pts.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = pts.x[i] - anchor.x;
    const double dy = pts.y[i] - anchor.y;
    const double dz = pts.z[i] - anchor.z;
    const double t = (dx * dir.x + dy * dir.y) + dz * dir.z;
    const double d2 = ((dx * dx + dy * dy) + dz * dz) - t * t;
    count += (std::max(d2, 0.0) <= r_sq) ? 1u : 0u;
  }
  return count;
}

void dist_sq_to_point(const Vec3& q, const Soa3& pts, std::size_t first, std::size_t last,
                      std::vector<double>& out) {
  out.resize(last - first);
  for (std::size_t i = first; i < last; ++i) {
    const double dx = pts.x[i] - q.x;
    const double dy = pts.y[i] - q.y;
    const double dz = pts.z[i] - q.z;
    out[i - first] = (dx * dx + dy * dy) + dz * dz;
  }
}

}  // namespace scalar
}  // namespace insp::kernels
