// Batch kernels for the point-heavy inner loops: rigid transforms,
// pinhole projection, point-to-line metrics, and range queries.
//
// Each kernel has a scalar reference implementation and an AVX2 variant
// selected at runtime. Both lanes evaluate the same expression trees
// with plain IEEE mul/add/div (the project builds with -ffp-contract=off),
// so their outputs are bit-identical; the kernel test suite enforces
// that equivalence. Anything built on top of the kernels therefore gives
// the same bits no matter which backend the CPU probe picks.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "insp/geometry.hpp"

namespace insp::kernels {

enum class Backend { Scalar, Avx2 };

const char* backend_name(Backend b);
bool supported(Backend b);
Backend active();
// Force a backend (tests); throws insp::Error if unsupported on this CPU.
void select(Backend b);
// Back to CPU-probe selection.
void select_auto();

// Structure-of-arrays point buffer the kernels operate on.
struct Soa3 {
  std::vector<double> x, y, z;

  Soa3() = default;
  explicit Soa3(std::span<const Vec3> pts) { assign(pts); }

  void assign(std::span<const Vec3> pts);
  void resize(std::size_t n) {
    x.resize(n);
    y.resize(n);
    z.resize(n);
  }
  std::size_t size() const { return x.size(); }
  Vec3 at(std::size_t i) const { return {x[i], y[i], z[i]}; }
};

// out = R * p + t, elementwise over the buffer.
void transform_points(const Mat3& r, const Vec3& t, const Soa3& in, Soa3& out);

// u = fx*(x/z) + cx, v = fy*(y/z) + cy. No distortion; callers must mask
// by z > 0 themselves (lanes with z <= 0 produce garbage, never traps).
void project_pinhole(double fx, double fy, double cx, double cy, const Soa3& in,
                     std::vector<double>& u, std::vector<double>& v);

// For each point: tparam = (p - anchor)·dir and dist_sq = |p - anchor|² - tparam²
// (clamped at zero). `dir` must be unit length.
void line_metrics(const Vec3& anchor, const Vec3& dir, const Soa3& pts,
                  std::vector<double>& dist_sq, std::vector<double>& tparam);

// Number of points with squared line distance <= r_sq.
std::size_t line_inlier_count(const Vec3& anchor, const Vec3& dir, const Soa3& pts, double r_sq);

// Squared distances to a fixed query point over [first, last).
void dist_sq_to_point(const Vec3& q, const Soa3& pts, std::size_t first, std::size_t last,
                      std::vector<double>& out);

// Raw kernel entry points, exposed so the equivalence tests can drive
// both lanes directly.
namespace scalar {
void transform_points(const Mat3& r, const Vec3& t, const Soa3& in, Soa3& out);
void project_pinhole(double fx, double fy, double cx, double cy, const Soa3& in,
                     std::vector<double>& u, std::vector<double>& v);
void line_metrics(const Vec3& anchor, const Vec3& dir, const Soa3& pts,
                  std::vector<double>& dist_sq, std::vector<double>& tparam);
std::size_t line_inlier_count(const Vec3& anchor, const Vec3& dir, const Soa3& pts, double r_sq);
void dist_sq_to_point(const Vec3& q, const Soa3& pts, std::size_t first, std::size_t last,
                      std::vector<double>& out);
}  // namespace scalar

#if defined(INSP_HAVE_AVX2)
namespace avx2 {
void transform_points(const Mat3& r, const Vec3& t, const Soa3& in, Soa3& out);
void project_pinhole(double fx, double fy, double cx, double cy, const Soa3& in,
                     std::vector<double>& u, std::vector<double>& v);
void line_metrics(const Vec3& anchor, const Vec3& dir, const Soa3& pts,
                  std::vector<double>& dist_sq, std::vector<double>& tparam);
std::size_t line_inlier_count(const Vec3& anchor, const Vec3& dir, const Soa3& pts, double r_sq);
void dist_sq_to_point(const Vec3& q, const Soa3& pts, std::size_t first, std::size_t last,
                      std::vector<double>& out);
}  // namespace avx2
#endif

}  // namespace insp::kernels
