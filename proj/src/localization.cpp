#include "insp/localization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "insp/kernels.hpp"
#include "insp/rng.hpp"

namespace insp {

void LocalizerParams::validate() const {
  if (tau <= 0.0 || dbscan_eps <= 0.0 || ransac_inlier_dist <= 0.0) {
    throw Error("LocalizerParams: distances must be positive");
  }
  if (dbscan_min_pts < 2) throw Error("LocalizerParams: min_pts >= 2");
  if (ransac_iters <= 0) throw Error("LocalizerParams: ransac_iters must be positive");
}

const char* method_name(LocalizeMethod m) {
  switch (m) {
    case LocalizeMethod::Dbscan: return "dbscan";
    case LocalizeMethod::Ransac: return "ransac";
    case LocalizeMethod::DbscanRansac: return "dbscan_ransac";
    case LocalizeMethod::DbscanPca: return "dbscan_pca";
  }
  return "?";
}

LocalizeMethod method_from_name(const std::string& name) {
  if (name == "dbscan") return LocalizeMethod::Dbscan;
  if (name == "ransac") return LocalizeMethod::Ransac;
  if (name == "dbscan_ransac") return LocalizeMethod::DbscanRansac;
  if (name == "dbscan_pca") return LocalizeMethod::DbscanPca;
  throw Error("unknown localization method: " + name);
}

// ---------------------------------------------------------------------------
// DBSCAN on a uniform grid of cell size eps.
//
// The grid only accelerates the eps-range queries; clustering policy
// (seed order, FIFO expansion, neighbor lists sorted ascending) is the
// textbook one, so the partition matches a quadratic reference exactly.

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator<(const CellKey& o) const {
    if (x != o.x) return x < o.x;
    if (y != o.y) return y < o.y;
    return z < o.z;
  }
  bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
};

class EpsGrid {
 public:
  EpsGrid(const std::vector<Vec3>& points, double eps) : eps_(eps), eps_sq_(eps * eps) {
    const std::size_t n = points.size();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::vector<CellKey> keys(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = key_of(points[i]);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

    sorted_.resize(n);
    std::vector<Vec3> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = points[order_[i]];
    sorted_.assign(tmp);

    // contiguous [begin, end) range per occupied cell
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      const CellKey k = keys[order_[i]];
      while (j < n && keys[order_[j]] == k) ++j;
      cells_.push_back({k, i, j});
      i = j;
    }
  }

  // indices (into the original point list) within eps of q, sorted ascending
  void query(const Vec3& q, std::vector<std::size_t>& out) const {
    out.clear();
    const CellKey ck = key_of(q);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const CellKey k{ck.x + dx, ck.y + dy, ck.z + dz};
          const auto it = std::lower_bound(
              cells_.begin(), cells_.end(), k,
              [](const CellRange& c, const CellKey& kk) { return c.key < kk; });
          if (it == cells_.end() || !(it->key == k)) continue;
          kernels::dist_sq_to_point(q, sorted_, it->begin, it->end, scratch_);
          for (std::size_t s = it->begin; s < it->end; ++s) {
            if (scratch_[s - it->begin] <= eps_sq_) out.push_back(order_[s]);
          }
        }
      }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  struct CellRange {
    CellKey key;
    std::size_t begin, end;
  };

  CellKey key_of(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / eps_)),
            static_cast<std::int64_t>(std::floor(p.y / eps_)),
            static_cast<std::int64_t>(std::floor(p.z / eps_))};
  }

  double eps_;
  double eps_sq_;
  kernels::Soa3 sorted_;
  std::vector<std::size_t> order_;
  std::vector<CellRange> cells_;
  mutable std::vector<double> scratch_;
};

Vec3 mean_of(const std::vector<Vec3>& points, const std::vector<std::size_t>& idx) {
  Vec3 m{};
  for (const std::size_t i : idx) m += points[i];
  return m / static_cast<double>(idx.size());
}

std::vector<Vec3> gather(const std::vector<Vec3>& points, const std::vector<std::size_t>& idx) {
  std::vector<Vec3> out;
  out.reserve(idx.size());
  for (const std::size_t i : idx) out.push_back(points[i]);
  return out;
}

}  // namespace

std::vector<Cluster> dbscan(const std::vector<Vec3>& points, double eps, int min_pts) {
  if (eps <= 0.0) throw Error("dbscan: eps must be positive");
  if (min_pts < 2) throw Error("dbscan: min_pts >= 2");
  const std::size_t n = points.size();
  std::vector<Cluster> clusters;
  if (n == 0) return clusters;

  const EpsGrid grid(points, eps);
  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  std::vector<std::size_t> neighbors, expand_neighbors;

  for (std::size_t seed = 0; seed < n; ++seed) {
    if (label[seed] != kUnvisited) continue;
    grid.query(points[seed], neighbors);
    if (neighbors.size() < static_cast<std::size_t>(min_pts)) {
      label[seed] = kNoise;
      continue;
    }
    const int cid = static_cast<int>(clusters.size());
    clusters.push_back({});
    label[seed] = cid;
    clusters.back().point_indices.push_back(seed);

    // FIFO expansion over the seed's eps-neighborhood
    std::vector<std::size_t> queue(neighbors);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const std::size_t p = queue[qi];
      if (label[p] == kNoise) {
        label[p] = cid;  // border point adopted by this cluster
        clusters.back().point_indices.push_back(p);
        continue;
      }
      if (label[p] != kUnvisited) continue;
      label[p] = cid;
      clusters.back().point_indices.push_back(p);
      grid.query(points[p], expand_neighbors);
      if (expand_neighbors.size() >= static_cast<std::size_t>(min_pts)) {
        queue.insert(queue.end(), expand_neighbors.begin(), expand_neighbors.end());
      }
    }
  }

  for (Cluster& c : clusters) {
    std::sort(c.point_indices.begin(), c.point_indices.end());
    c.point_indices.erase(std::unique(c.point_indices.begin(), c.point_indices.end()),
                          c.point_indices.end());
    c.center = mean_of(points, c.point_indices);
  }
  return clusters;
}

const Cluster& nearest_cluster(const std::vector<Cluster>& clusters, const Vec3& origin) {
  if (clusters.empty()) throw NoCluster("nearest_cluster: empty cluster list");
  std::size_t best = 0;
  double best_d = (clusters[0].center - origin).norm_sq();
  for (std::size_t i = 1; i < clusters.size(); ++i) {
    const double d = (clusters[i].center - origin).norm_sq();
    if (d < best_d || (d == best_d && clusters[i].point_indices.front() <
                                          clusters[best].point_indices.front())) {
      best = i;
      best_d = d;
    }
  }
  return clusters[best];
}

namespace {

// Sign convention shared by PCA and RANSAC directions: the component of
// largest magnitude is made positive so estimates compare across frames.
Vec3 canonical_sign(const Vec3& v) {
  double c = v.x;
  if (std::abs(v.y) > std::abs(c)) c = v.y;
  if (std::abs(v.z) > std::abs(c)) c = v.z;
  return (c < 0.0) ? -v : v;
}

// Jacobi eigen-decomposition of a symmetric 3x3; returns the eigenvector
// of the largest eigenvalue.
Vec3 principal_eigenvector(const Mat3& sym) {
  Mat3 a = sym;
  Mat3 v = Mat3::identity();
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-26) break;
    for (int p = 0; p < 3; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Mat3 r = Mat3::identity();
        r(p, p) = c;
        r(q, q) = c;
        r(p, q) = s;
        r(q, p) = -s;
        a = r.transposed() * a * r;
        v = v * r;
      }
    }
  }
  int best = 0;
  if (a(1, 1) > a(best, best)) best = 1;
  if (a(2, 2) > a(best, best)) best = 2;
  return Vec3{v(0, best), v(1, best), v(2, best)};
}

}  // namespace

PcaResult pca_axis(const std::vector<Vec3>& points) {
  if (points.size() < 2) throw DegenerateInput("pca_axis: need at least two points");
  Vec3 c{};
  for (const Vec3& p : points) c += p;
  c = c / static_cast<double>(points.size());

  Mat3 cov;
  cov.m = {0, 0, 0, 0, 0, 0, 0, 0, 0};
  for (const Vec3& p : points) {
    const Vec3 d = p - c;
    cov(0, 0) += d.x * d.x;
    cov(0, 1) += d.x * d.y;
    cov(0, 2) += d.x * d.z;
    cov(1, 1) += d.y * d.y;
    cov(1, 2) += d.y * d.z;
    cov(2, 2) += d.z * d.z;
  }
  cov(1, 0) = cov(0, 1);
  cov(2, 0) = cov(0, 2);
  cov(2, 1) = cov(1, 2);
  const double scale = 1.0 / static_cast<double>(points.size() - 1);
  for (double& m : cov.m) m *= scale;

  if (cov(0, 0) + cov(1, 1) + cov(2, 2) < 1e-20) {
    throw DegenerateInput("pca_axis: all points coincide");
  }
  const Vec3 dir = principal_eigenvector(cov);
  const double norm = dir.norm();
  if (!(norm > 0.0)) throw DegenerateInput("pca_axis: degenerate covariance");
  return {c, canonical_sign(dir / norm)};
}

RansacResult ransac_line(const std::vector<Vec3>& points, const LocalizerParams& params) {
  params.validate();
  if (points.size() < 2) throw DegenerateInput("ransac_line: need at least two points");

  kernels::Soa3 soa(points);
  const double r_sq = params.ransac_inlier_dist * params.ransac_inlier_dist;
  Rng rng = Rng(params.rng_seed).stream("ransac");
  const std::size_t n = points.size();

  std::size_t best_count = 0;
  Vec3 best_anchor{}, best_dir{};
  for (int it = 0; it < params.ransac_iters; ++it) {
    const std::size_t i = rng.below(n);
    const std::size_t j = rng.below(n);
    if (i == j) continue;
    const Vec3 diff = points[j] - points[i];
    const double len = diff.norm();
    if (len < 1e-12) continue;
    const Vec3 dir = diff / len;
    const std::size_t count = kernels::line_inlier_count(points[i], dir, soa, r_sq);
    if (count > best_count) {
      best_count = count;
      best_anchor = points[i];
      best_dir = dir;
    }
  }
  if (best_count < 2) throw DegenerateInput("ransac_line: no non-degenerate hypothesis found");

  // least-squares refinement over the inlier set, iterated once: refit the
  // line, re-select inliers against it, and refit again so a hypothesis
  // band that clipped part of the structure cannot skew the final axis
  RansacResult res;
  Vec3 anchor = best_anchor;
  Vec3 dir = best_dir;
  std::vector<double> d2, tp;
  for (int pass = 0; pass < 2; ++pass) {
    kernels::line_metrics(anchor, dir, soa, d2, tp);
    res.inliers.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= r_sq) res.inliers.push_back(i);
    }
    try {
      const PcaResult fit = pca_axis(gather(points, res.inliers));
      anchor = fit.centroid;
      dir = fit.direction;
    } catch (const DegenerateInput&) {
      dir = canonical_sign(dir);
      break;
    }
  }
  res.line.anchor = anchor;
  res.line.direction = canonical_sign(dir);
  return res;
}

Vec3 median_projection_center(const std::vector<Vec3>& points, const LineModel& line, double tau) {
  kernels::Soa3 soa(points);
  std::vector<double> d2, tp;
  kernels::line_metrics(line.anchor, line.direction, soa, d2, tp);

  std::vector<double> params;
  params.reserve(points.size());
  const double tau_sq = tau * tau;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (d2[i] <= tau_sq) params.push_back(tp[i]);
  }
  if (params.empty()) throw NoPointsWithinTau("median_projection_center: no points within tau");

  std::sort(params.begin(), params.end());
  const std::size_t m = params.size();
  const double median =
      (m % 2 == 1) ? params[m / 2] : 0.5 * (params[m / 2 - 1] + params[m / 2]);
  return line.anchor + line.direction * median;
}

namespace {

InsulatorEstimate make_estimate(const Vec3& center, const Vec3& orientation, LocalizeMethod m,
                                double ts) {
  InsulatorEstimate est;
  est.center = center;
  est.orientation = orientation;
  est.method = m;
  est.timestamp = ts;
  return est;
}

}  // namespace

InsulatorEstimate localize_dbscan(const PointCloud& cloud, const LocalizerParams& params) {
  const auto clusters = dbscan(cloud.points, params.dbscan_eps, params.dbscan_min_pts);
  const Cluster& nearest = nearest_cluster(clusters, Vec3{});
  const PcaResult fit = pca_axis(gather(cloud.points, nearest.point_indices));
  return make_estimate(nearest.center, fit.direction, LocalizeMethod::Dbscan, cloud.timestamp);
}

InsulatorEstimate localize_ransac(const PointCloud& cloud, const LocalizerParams& params) {
  const RansacResult res = ransac_line(cloud.points, params);
  const Vec3 center =
      median_projection_center(gather(cloud.points, res.inliers), res.line, params.tau);
  return make_estimate(center, res.line.direction, LocalizeMethod::Ransac, cloud.timestamp);
}

InsulatorEstimate localize_dbscan_ransac(const PointCloud& cloud, const LocalizerParams& params) {
  const auto clusters = dbscan(cloud.points, params.dbscan_eps, params.dbscan_min_pts);
  const Cluster& nearest = nearest_cluster(clusters, Vec3{});
  const std::vector<Vec3> cluster_pts = gather(cloud.points, nearest.point_indices);
  const RansacResult res = ransac_line(cluster_pts, params);
  const Vec3 center =
      median_projection_center(gather(cluster_pts, res.inliers), res.line, params.tau);
  return make_estimate(center, res.line.direction, LocalizeMethod::DbscanRansac, cloud.timestamp);
}

InsulatorEstimate localize_dbscan_pca(const PointCloud& cloud, const LocalizerParams& params) {
  const auto clusters = dbscan(cloud.points, params.dbscan_eps, params.dbscan_min_pts);
  const Cluster& nearest = nearest_cluster(clusters, Vec3{});
  const std::vector<Vec3> cluster_pts = gather(cloud.points, nearest.point_indices);

  const PcaResult initial = pca_axis(cluster_pts);
  const LineModel initial_line{initial.centroid, initial.direction};

  kernels::Soa3 soa(cluster_pts);
  std::vector<double> d2, tp;
  kernels::line_metrics(initial_line.anchor, initial_line.direction, soa, d2, tp);
  const double tau_sq = params.tau * params.tau;
  std::vector<Vec3> within;
  for (std::size_t i = 0; i < cluster_pts.size(); ++i) {
    if (d2[i] <= tau_sq) within.push_back(cluster_pts[i]);
  }

  const auto sub = dbscan(within, params.dbscan_eps, params.dbscan_min_pts);
  if (sub.size() > 1) {
    // reiterate on the largest sub-cluster; ties go to the lowest first index
    std::size_t largest = 0;
    for (std::size_t i = 1; i < sub.size(); ++i) {
      if (sub[i].point_indices.size() > sub[largest].point_indices.size()) largest = i;
    }
    const std::vector<Vec3> t_pts = gather(within, sub[largest].point_indices);
    const Vec3 refined_center = sub[largest].center;
    const PcaResult refined = pca_axis(t_pts);
    const LineModel refined_line{refined_center, refined.direction};
    const Vec3 center = median_projection_center(cluster_pts, refined_line, params.tau);
    return make_estimate(center, refined.direction, LocalizeMethod::DbscanPca, cloud.timestamp);
  }
  return make_estimate(initial.centroid, initial.direction, LocalizeMethod::DbscanPca,
                       cloud.timestamp);
}

InsulatorEstimate localize(LocalizeMethod method, const PointCloud& cloud,
                           const LocalizerParams& params) {
  switch (method) {
    case LocalizeMethod::Dbscan: return localize_dbscan(cloud, params);
    case LocalizeMethod::Ransac: return localize_ransac(cloud, params);
    case LocalizeMethod::DbscanRansac: return localize_dbscan_ransac(cloud, params);
    case LocalizeMethod::DbscanPca: return localize_dbscan_pca(cloud, params);
  }
  throw Error("localize: unknown method");
}

}  // namespace insp
