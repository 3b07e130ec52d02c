// AVX2 kernels, 4 doubles per iteration with a scalar tail.
//
// Only _mm256_{mul,add,sub,div,max}_pd are used — no FMA — so every lane
// rounds exactly like the scalar reference and the outputs match it bit
// for bit. The equivalence tests rely on that.

#if defined(INSP_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>

#include "insp/kernels.hpp"

namespace insp::kernels::avx2 {

namespace {

inline __m256d load(const double* p) { return _mm256_loadu_pd(p); }
inline void store(double* p, __m256d v) { _mm256_storeu_pd(p, v); }

}  // namespace

void transform_points(const Mat3& r, const Vec3& t, const Soa3& in, Soa3& out) {
  const std::size_t n = in.size();
  out.resize(n);
  const __m256d r00 = _mm256_set1_pd(r(0, 0)), r01 = _mm256_set1_pd(r(0, 1)),
                r02 = _mm256_set1_pd(r(0, 2));
  const __m256d r10 = _mm256_set1_pd(r(1, 0)), r11 = _mm256_set1_pd(r(1, 1)),
                r12 = _mm256_set1_pd(r(1, 2));
  const __m256d r20 = _mm256_set1_pd(r(2, 0)), r21 = _mm256_set1_pd(r(2, 1)),
                r22 = _mm256_set1_pd(r(2, 2));
  const __m256d tx = _mm256_set1_pd(t.x), ty = _mm256_set1_pd(t.y), tz = _mm256_set1_pd(t.z);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d px = load(&in.x[i]);
    const __m256d py = load(&in.y[i]);
    const __m256d pz = load(&in.z[i]);
    const __m256d ox = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r00, px), _mm256_mul_pd(r01, py)),
                      _mm256_mul_pd(r02, pz)),
        tx);
    const __m256d oy = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r10, px), _mm256_mul_pd(r11, py)),
                      _mm256_mul_pd(r12, pz)),
        ty);
    const __m256d oz = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r20, px), _mm256_mul_pd(r21, py)),
                      _mm256_mul_pd(r22, pz)),
        tz);
    store(&out.x[i], ox);
    store(&out.y[i], oy);
    store(&out.z[i], oz);
  }
  for (; i < n; ++i) {
    const double px = in.x[i], py = in.y[i], pz = in.z[i];
    out.x[i] = ((r(0, 0) * px + r(0, 1) * py) + r(0, 2) * pz) + t.x;
    out.y[i] = ((r(1, 0) * px + r(1, 1) * py) + r(1, 2) * pz) + t.y;
    out.z[i] = ((r(2, 0) * px + r(2, 1) * py) + r(2, 2) * pz) + t.z;
  }
}

void project_pinhole(double fx, double fy, double cx, double cy, const Soa3& in,
                     std::vector<double>& u, std::vector<double>& v) {
  const std::size_t n = in.size();
  u.resize(n);
  v.resize(n);
  const __m256d vfx = _mm256_set1_pd(fx), vfy = _mm256_set1_pd(fy);
  const __m256d vcx = _mm256_set1_pd(cx), vcy = _mm256_set1_pd(cy);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d px = load(&in.x[i]);
    const __m256d py = load(&in.y[i]);
    const __m256d pz = load(&in.z[i]);
    store(&u[i], _mm256_add_pd(_mm256_mul_pd(vfx, _mm256_div_pd(px, pz)), vcx));
    store(&v[i], _mm256_add_pd(_mm256_mul_pd(vfy, _mm256_div_pd(py, pz)), vcy));
  }
  for (; i < n; ++i) {
    u[i] = fx * (in.x[i] / in.z[i]) + cx;
    v[i] = fy * (in.y[i] / in.z[i]) + cy;
  }
}

namespace {

// Shared body for line_metrics / line_inlier_count vector step.
struct LineVecs {
  __m256d ax, ay, az, vx, vy, vz, zero;
  explicit LineVecs(const Vec3& anchor, const Vec3& dir)
      : ax(_mm256_set1_pd(anchor.x)),
        ay(_mm256_set1_pd(anchor.y)),
        az(_mm256_set1_pd(anchor.z)),
        vx(_mm256_set1_pd(dir.x)),
        vy(_mm256_set1_pd(dir.y)),
        vz(_mm256_set1_pd(dir.z)),
        zero(_mm256_setzero_pd()) {}

  inline void eval(__m256d px, __m256d py, __m256d pz, __m256d& t, __m256d& d2) const {
    const __m256d dx = _mm256_sub_pd(px, ax);
    const __m256d dy = _mm256_sub_pd(py, ay);
    const __m256d dz = _mm256_sub_pd(pz, az);
    t = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, vx), _mm256_mul_pd(dy, vy)),
                      _mm256_mul_pd(dz, vz));
    const __m256d nsq = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
    d2 = _mm256_max_pd(_mm256_sub_pd(nsq, _mm256_mul_pd(t, t)), zero);
  }
};

}  // namespace

void line_metrics(const Vec3& anchor, const Vec3& dir, const Soa3& pts,
                  std::vector<double>& dist_sq, std::vector<double>& tparam) {
  const std::size_t n = pts.size();
  dist_sq.resize(n);
  tparam.resize(n);
  const LineVecs lv(anchor, dir);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t, d2;
    lv.eval(load(&pts.x[i]), load(&pts.y[i]), load(&pts.z[i]), t, d2);
    store(&tparam[i], t);
    store(&dist_sq[i], d2);
  }
  for (; i < n; ++i) {
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
  const LineVecs lv(anchor, dir);
  const __m256d vr = _mm256_set1_pd(r_sq);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t, d2;
    lv.eval(load(&pts.x[i]), load(&pts.y[i]), load(&pts.z[i]), t, d2);
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr, _CMP_LE_OQ));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) {
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
  const __m256d qx = _mm256_set1_pd(q.x), qy = _mm256_set1_pd(q.y), qz = _mm256_set1_pd(q.z);
  std::size_t i = first;
  for (; i + 4 <= last; i += 4) {
    const __m256d dx = _mm256_sub_pd(load(&pts.x[i]), qx);
    const __m256d dy = _mm256_sub_pd(load(&pts.y[i]), qy);
    const __m256d dz = _mm256_sub_pd(load(&pts.z[i]), qz);
    const __m256d d2 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
    store(&out[i - first], d2);
  }
  for (; i < last; ++i) {
    const double dx = pts.x[i] - q.x;
    const double dy = pts.y[i] - q.y;
    const double dz = pts.z[i] - q.z;
    out[i - first] = (dx * dx + dy * dy) + dz * dz;
  }
}

}  // namespace insp::kernels::avx2

#endif  // INSP_HAVE_AVX2
