// The four insulator localization methods: DBSCAN, RANSAC,
// DBSCAN+RANSAC, and DBSCAN+PCA, plus their shared building blocks.
//
// All methods take the cumulated filtered cloud in the body frame and
// return a center/orientation estimate. RANSAC draws from a seeded
// counter-based generator, so a fixed seed reproduces results bit for
// bit; DBSCAN uses a uniform grid index whose output is required (and
// tested) to match a quadratic reference exactly.

#pragma once

#include <cstdint>
#include <vector>

#include "insp/fusion.hpp"
#include "insp/geometry.hpp"

namespace insp {

struct Cluster {
  std::vector<std::size_t> point_indices;  // ascending, unique
  Vec3 center;                             // arithmetic mean of members
};

struct LineModel {
  Vec3 anchor;
  Vec3 direction;  // unit
};

struct LocalizerParams {
  double tau = 0.3;              // axis distance threshold (m)
  double dbscan_eps = 0.25;      // m
  int dbscan_min_pts = 4;
  int ransac_iters = 200;
  double ransac_inlier_dist = 0.16;  // m, covers the insulator tube: radius + 2 sigma
  std::uint64_t rng_seed = 1;

  void validate() const;
};

enum class LocalizeMethod : std::uint8_t { Dbscan, Ransac, DbscanRansac, DbscanPca };

const char* method_name(LocalizeMethod m);
LocalizeMethod method_from_name(const std::string& name);

struct InsulatorEstimate {
  Vec3 center;       // frame B, meters
  Vec3 orientation;  // unit
  LocalizeMethod method = LocalizeMethod::DbscanRansac;
  double timestamp = 0.0;
};

// Density-based clustering over a uniform grid of cell size eps.
// Deterministic for a fixed input order: seeds expand in index order and
// neighbor lists are visited sorted ascending. Noise points belong to no
// cluster. Empty input gives an empty list.
std::vector<Cluster> dbscan(const std::vector<Vec3>& points, double eps, int min_pts);

// Cluster whose mean is closest to origin; exact ties go to the cluster
// with the lowest first point index. Throws NoCluster on an empty list.
const Cluster& nearest_cluster(const std::vector<Cluster>& clusters, const Vec3& origin);

struct RansacResult {
  LineModel line;
  std::vector<std::size_t> inliers;  // indices into the input list, ascending
};

// Best two-point line hypothesis over ransac_iters seeded draws, scored by
// inlier count at ransac_inlier_dist, then refined by a least-squares fit
// (centroid + principal axis) of the winning inlier set.
RansacResult ransac_line(const std::vector<Vec3>& points, const LocalizerParams& params);

struct PcaResult {
  Vec3 centroid;
  Vec3 direction;  // unit, largest-|component| positive
};

// Principal axis of the sample covariance. Throws DegenerateInput when
// fewer than two distinct points are given.
PcaResult pca_axis(const std::vector<Vec3>& points);

// Median of the line parameters of the points within tau of the line
// (mean of the two middle values for even counts), mapped back onto the
// line. Throws NoPointsWithinTau.
Vec3 median_projection_center(const std::vector<Vec3>& points, const LineModel& line, double tau);

InsulatorEstimate localize_dbscan(const PointCloud& cloud, const LocalizerParams& params);
InsulatorEstimate localize_ransac(const PointCloud& cloud, const LocalizerParams& params);
InsulatorEstimate localize_dbscan_ransac(const PointCloud& cloud, const LocalizerParams& params);
InsulatorEstimate localize_dbscan_pca(const PointCloud& cloud, const LocalizerParams& params);

InsulatorEstimate localize(LocalizeMethod method, const PointCloud& cloud,
                           const LocalizerParams& params);

}  // namespace insp
