// Independent reference implementations used as oracles by the unit and
// acceptance tests. These deliberately avoid the library's own code
// paths: the quadratic DBSCAN checks the grid-indexed one, the
// closed-form eigen solver checks the Jacobi iteration, and so on.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "insp/geometry.hpp"

namespace refimpl {

using insp::Vec3;

// ---------------------------------------------------------------------------
// Textbook O(n^2) DBSCAN with the same deterministic policy the library
// documents: seeds in index order, FIFO expansion, neighbors ascending.

inline std::vector<std::vector<std::size_t>> dbscan_quadratic(const std::vector<Vec3>& pts,
                                                              double eps, int min_pts) {
  const std::size_t n = pts.size();
  const double eps_sq = eps * eps;
  auto neighbors_of = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = pts[j].x - pts[i].x;
      const double dy = pts[j].y - pts[i].y;
      const double dz = pts[j].z - pts[i].z;
      if ((dx * dx + dy * dy) + dz * dz <= eps_sq) out.push_back(j);
    }
    return out;
  };

  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  std::vector<std::vector<std::size_t>> clusters;

  for (std::size_t seed = 0; seed < n; ++seed) {
    if (label[seed] != kUnvisited) continue;
    auto nb = neighbors_of(seed);
    if (nb.size() < static_cast<std::size_t>(min_pts)) {
      label[seed] = kNoise;
      continue;
    }
    const int cid = static_cast<int>(clusters.size());
    clusters.push_back({seed});
    label[seed] = cid;
    std::vector<std::size_t> queue(nb);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const std::size_t p = queue[qi];
      if (label[p] == kNoise) {
        label[p] = cid;
        clusters.back().push_back(p);
        continue;
      }
      if (label[p] != kUnvisited) continue;
      label[p] = cid;
      clusters.back().push_back(p);
      auto pn = neighbors_of(p);
      if (pn.size() >= static_cast<std::size_t>(min_pts)) {
        queue.insert(queue.end(), pn.begin(), pn.end());
      }
    }
  }
  for (auto& c : clusters) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return clusters;
}

// ---------------------------------------------------------------------------
// Closed-form eigenvalues of a symmetric 3x3 (trigonometric method) and
// the eigenvector of the largest one via cross products.

inline void sym_eigenvalues(const insp::Mat3& a, double out[3]) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  if (p1 < 1e-30) {
    out[0] = a(0, 0);
    out[1] = a(1, 1);
    out[2] = a(2, 2);
    std::sort(out, out + 3, std::greater<>());
    return;
  }
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  insp::Mat3 b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
  double r = b.det() / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  out[0] = q + 2.0 * p * std::cos(phi);
  out[2] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  out[1] = 3.0 * q - out[0] - out[2];
}

inline Vec3 sym_principal_eigenvector(const insp::Mat3& a) {
  double ev[3];
  sym_eigenvalues(a, ev);
  const double lambda = ev[0];
  // rows of (A - lambda I); the eigenvector is orthogonal to two of them
  Vec3 r0{a(0, 0) - lambda, a(0, 1), a(0, 2)};
  Vec3 r1{a(1, 0), a(1, 1) - lambda, a(1, 2)};
  Vec3 r2{a(2, 0), a(2, 1), a(2, 2) - lambda};
  Vec3 c01 = r0.cross(r1), c02 = r0.cross(r2), c12 = r1.cross(r2);
  Vec3 best = c01;
  if (c02.norm_sq() > best.norm_sq()) best = c02;
  if (c12.norm_sq() > best.norm_sq()) best = c12;
  return best.normalized();
}

// ---------------------------------------------------------------------------
// Distance from a point to a capped cylinder surface (for LiDAR checks).

inline double point_to_cylinder_surface(const Vec3& p, const Vec3& a, const Vec3& b, double r) {
  const Vec3 ab = b - a;
  const double len = ab.norm();
  const Vec3 u = ab / len;
  const double t = std::clamp((p - a).dot(u), 0.0, len);
  const Vec3 foot = a + u * t;
  const double radial = (p - foot).norm();
  return std::abs(radial - r);
}

// Distance to a capsule surface (insulator bodies have rounded ends).
inline double point_to_capsule_surface(const Vec3& p, const Vec3& a, const Vec3& b, double r) {
  const Vec3 ab = b - a;
  const double len = ab.norm();
  const Vec3 u = ab / len;
  const double t = std::clamp((p - a).dot(u), 0.0, len);
  const Vec3 foot = a + u * t;
  return std::abs((p - foot).norm() - r);
}

// ---------------------------------------------------------------------------
// Deterministic test-local generator (independent of insp::Rng).

struct TestRng {
  std::uint64_t s;
  explicit TestRng(std::uint64_t seed) : s(seed * 2654435761u + 1) {}
  std::uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    double u1 = std::max(uniform(), 1e-16), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
};

}  // namespace refimpl
