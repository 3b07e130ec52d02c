// Runtime backend selection for the batch kernels.

#include "insp/kernels.hpp"

#include "insp/errors.hpp"

namespace insp::kernels {

namespace {

Backend probe() {
#if defined(INSP_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#endif
  return Backend::Scalar;
}

Backend& current() {
  static Backend b = probe();
  return b;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "?";
}

bool supported(Backend b) {
  if (b == Backend::Scalar) return true;
#if defined(INSP_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend active() { return current(); }

void select(Backend b) {
  if (!supported(b)) {
    throw Error(std::string("kernel backend not supported on this CPU: ") + backend_name(b));
  }
  current() = b;
}

void select_auto() { current() = probe(); }

#if defined(INSP_HAVE_AVX2)
#define INSP_DISPATCH(fn, ...) \
  return (current() == Backend::Avx2) ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define INSP_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void transform_points(const Mat3& r, const Vec3& t, const Soa3& in, Soa3& out) {
  INSP_DISPATCH(transform_points, r, t, in, out);
}

void project_pinhole(double fx, double fy, double cx, double cy, const Soa3& in,
                     std::vector<double>& u, std::vector<double>& v) {
  INSP_DISPATCH(project_pinhole, fx, fy, cx, cy, in, u, v);
}

void line_metrics(const Vec3& anchor, const Vec3& dir, const Soa3& pts,
                  std::vector<double>& dist_sq, std::vector<double>& tparam) {
  INSP_DISPATCH(line_metrics, anchor, dir, pts, dist_sq, tparam);
}

std::size_t line_inlier_count(const Vec3& anchor, const Vec3& dir, const Soa3& pts, double r_sq) {
  INSP_DISPATCH(line_inlier_count, anchor, dir, pts, r_sq);
}

void dist_sq_to_point(const Vec3& q, const Soa3& pts, std::size_t first, std::size_t last,
                      std::vector<double>& out) {
  INSP_DISPATCH(dist_sq_to_point, q, pts, first, last, out);
}

#undef INSP_DISPATCH

}  // namespace insp::kernels
