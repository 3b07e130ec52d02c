#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "insp/localization.hpp"
#include "support/reference_impls.hpp"

using namespace insp;

namespace {

std::vector<Vec3> collinear_points(std::size_t n, const Vec3& origin, const Vec3& dir,
                                   double spacing) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(origin + dir * (spacing * double(i)));
  return pts;
}

// cylinder surface sample with optional noise, axis through `center`.
// A LiDAR sees only the sensor-facing half of the shell, so the samples
// cover half the circumference, like a real filtered cloud.
std::vector<Vec3> cylinder_samples(const Vec3& center, const Vec3& axis, double length,
                                   double radius, std::size_t n, refimpl::TestRng& rng,
                                   double sigma) {
  Vec3 ref = (std::abs(axis.z) < 0.9) ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  const Vec3 b1 = axis.cross(ref).normalized();
  const Vec3 b2 = axis.cross(b1);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = rng.uniform(-length / 2, length / 2);
    const double phi = rng.uniform(-M_PI / 2, M_PI / 2);
    Vec3 p = center + axis * t + b1 * (radius * std::cos(phi)) + b2 * (radius * std::sin(phi));
    p += Vec3{rng.normal() * sigma, rng.normal() * sigma, rng.normal() * sigma};
    pts.push_back(p);
  }
  return pts;
}

std::set<std::set<std::size_t>> as_partition(const std::vector<Cluster>& clusters) {
  std::set<std::set<std::size_t>> out;
  for (const Cluster& c : clusters) {
    out.insert(std::set<std::size_t>(c.point_indices.begin(), c.point_indices.end()));
  }
  return out;
}

std::set<std::set<std::size_t>> as_partition(const std::vector<std::vector<std::size_t>>& ref) {
  std::set<std::set<std::size_t>> out;
  for (const auto& c : ref) out.insert(std::set<std::size_t>(c.begin(), c.end()));
  return out;
}

PointCloud as_cloud(std::vector<Vec3> pts) {
  PointCloud c;
  c.frame = Frame::Body;
  c.points = std::move(pts);
  return c;
}

}  // namespace

TEST_CASE("dbscan base cases") {
  // two pairs far apart
  std::vector<Vec3> pts = {{0, 0, 0}, {0.3, 0, 0}, {10, 0, 0}, {10.3, 0, 0}};
  auto clusters = dbscan(pts, 0.5, 2);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].point_indices.size() == 2);
  CHECK(clusters[1].point_indices.size() == 2);

  // a lone point is noise
  CHECK(dbscan({{1, 1, 1}}, 0.5, 2).empty());
  CHECK(dbscan({}, 0.5, 2).empty());
}

TEST_CASE("grid dbscan equals the quadratic reference on seeded clouds") {
  refimpl::TestRng rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 50 + static_cast<std::size_t>(rng.uniform(0, 250));
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back({rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)});
    }
    const double eps = rng.uniform(0.3, 1.2);
    const int min_pts = 2 + static_cast<int>(rng.uniform(0, 4));
    const auto grid = dbscan(pts, eps, min_pts);
    const auto ref = refimpl::dbscan_quadratic(pts, eps, min_pts);
    CHECK(as_partition(grid) == as_partition(ref));
  }
}

TEST_CASE("dbscan partition invariants") {
  refimpl::TestRng rng(55);
  std::vector<Vec3> pts;
  for (int i = 0; i < 300; ++i) {
    pts.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)});
  }
  const auto clusters = dbscan(pts, 0.35, 4);
  std::set<std::size_t> seen;
  for (const auto& c : clusters) {
    CHECK(!c.point_indices.empty());
    for (const auto i : c.point_indices) {
      CHECK(!seen.count(i));  // pairwise disjoint
      seen.insert(i);
    }
    // cluster center is the member mean
    Vec3 mean{};
    for (const auto i : c.point_indices) mean += pts[i];
    mean = mean / double(c.point_indices.size());
    CHECK(distance(mean, c.center) < 1e-12);
  }
  CHECK(seen.size() <= pts.size());
}

TEST_CASE("nearest cluster selection and tie break") {
  std::vector<Cluster> clusters(2);
  clusters[0].point_indices = {4, 5};
  clusters[0].center = {7, 0, 0};
  clusters[1].point_indices = {0, 1};
  clusters[1].center = {3, 0, 0};
  CHECK(&nearest_cluster(clusters, {0, 0, 0}) == &clusters[1]);

  // single cluster returns itself
  std::vector<Cluster> one(1);
  one[0].point_indices = {0};
  one[0].center = {5, 5, 5};
  CHECK(&nearest_cluster(one, {0, 0, 0}) == &one[0]);

  // exact tie: lower first index wins
  std::vector<Cluster> tie(2);
  tie[0].point_indices = {7, 9};
  tie[0].center = {2, 0, 0};
  tie[1].point_indices = {1, 3};
  tie[1].center = {-2, 0, 0};
  CHECK(&nearest_cluster(tie, {0, 0, 0}) == &tie[1]);

  CHECK_THROWS_AS(nearest_cluster({}, {0, 0, 0}), NoCluster);
}

TEST_CASE("ransac_line on clean and contaminated lines") {
  LocalizerParams params;

  const auto line_pts = collinear_points(10, {1, 2, 3}, Vec3{1, 1, 0}.normalized(), 0.1);
  const auto res = ransac_line(line_pts, params);
  CHECK(res.inliers.size() == 10);
  CHECK(std::abs(res.line.direction.dot(Vec3{1, 1, 0}.normalized())) ==
        doctest::Approx(1.0).epsilon(1e-9));

  // outliers at 5 m with a 0.1 m threshold are excluded
  auto contaminated = collinear_points(20, {0, 0, 0}, {1, 0, 0}, 0.05);
  contaminated.push_back({0.5, 5, 0});
  contaminated.push_back({0.2, -5, 1});
  contaminated.push_back({0.8, 0, 5});
  LocalizerParams p2;
  p2.ransac_inlier_dist = 0.1;
  const auto res2 = ransac_line(contaminated, p2);
  CHECK(res2.inliers.size() == 20);
  for (const auto i : res2.inliers) CHECK(i < 20);

  CHECK_THROWS_AS(ransac_line({{1, 1, 1}, {1, 1, 1}}, params), DegenerateInput);
  CHECK_THROWS_AS(ransac_line({{1, 1, 1}}, params), DegenerateInput);
}

TEST_CASE("ransac_line is bit-deterministic for a fixed seed") {
  refimpl::TestRng rng(77);
  auto pts = cylinder_samples({0, 0, 0}, Vec3{1, 0, 0}, 1.2, 0.14, 60, rng, 0.02);
  LocalizerParams params;
  params.rng_seed = 99;
  const auto a = ransac_line(pts, params);
  const auto b = ransac_line(pts, params);
  CHECK(a.inliers == b.inliers);
  CHECK(a.line.anchor.x == b.line.anchor.x);
  CHECK(a.line.direction.x == b.line.direction.x);
  CHECK(a.line.direction.y == b.line.direction.y);
  CHECK(a.line.direction.z == b.line.direction.z);
}

TEST_CASE("pca_axis") {
  // points along x
  const auto xs = collinear_points(12, {-1, 0, 0}, {1, 0, 0}, 0.2);
  const auto fit = pca_axis(xs);
  CHECK(distance(fit.direction, {1, 0, 0}) < 1e-9);

  // two points give the segment direction
  const auto two = pca_axis({{0, 0, 0}, {0, 0, 2}});
  CHECK(distance(two.direction, {0, 0, 1}) < 1e-9);
  CHECK(distance(two.centroid, {0, 0, 1}) < 1e-12);

  CHECK_THROWS_AS(pca_axis({{1, 1, 1}}), DegenerateInput);
  CHECK_THROWS_AS(pca_axis({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}), DegenerateInput);
}

TEST_CASE("pca_axis matches the closed-form eigen oracle on gaussian data") {
  refimpl::TestRng rng(202);
  for (int trial = 0; trial < 20; ++trial) {
    // anisotropic gaussian with a clear major axis
    const Vec3 axis = Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}.normalized();
    Vec3 ref = (std::abs(axis.z) < 0.9) ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    const Vec3 b1 = axis.cross(ref).normalized();
    const Vec3 b2 = axis.cross(b1);
    std::vector<Vec3> pts;
    for (int i = 0; i < 400; ++i) {
      pts.push_back(axis * (2.0 * rng.normal()) + b1 * (0.3 * rng.normal()) +
                    b2 * (0.2 * rng.normal()));
    }
    const auto fit = pca_axis(pts);

    // independent covariance + closed-form eigenvector
    Vec3 mean{};
    for (const auto& p : pts) mean += p;
    mean = mean / double(pts.size());
    Mat3 cov;
    cov.m = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    for (const auto& p : pts) {
      const Vec3 d = p - mean;
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
    for (auto& m : cov.m) m /= double(pts.size() - 1);
    const Vec3 oracle = refimpl::sym_principal_eigenvector(cov);
    CHECK(std::abs(std::abs(fit.direction.dot(oracle)) - 1.0) < 1e-6);
  }
}

TEST_CASE("median projection center") {
  const LineModel line{{0, 0, 0}, {1, 0, 0}};

  // symmetric points at t = -1, 0, 1
  CHECK(distance(median_projection_center({{-1, 0.1, 0}, {0, -0.1, 0}, {1, 0, 0.1}}, line, 0.3),
                 {0, 0, 0}) < 1e-9);

  // outlier beyond tau is excluded
  CHECK(distance(median_projection_center({{-1, 0, 0}, {0, 0.1, 0}, {1, 0, 0}, {100, 5, 0}}, line,
                                           0.3),
                 {0, 0, 0}) < 1e-9);

  CHECK_THROWS_AS(median_projection_center({{0, 5, 5}}, line, 0.3), NoPointsWithinTau);
}

TEST_CASE("median projection equals the sort-and-pick oracle") {
  refimpl::TestRng rng(303);
  const LineModel line{{1, -2, 0.5}, Vec3{2, 1, -1}.normalized()};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Vec3> pts;
    const std::size_t n = 5 + static_cast<std::size_t>(rng.uniform(0, 40));
    for (std::size_t i = 0; i < n; ++i) {
      const double t = rng.uniform(-4, 7);  // asymmetric support
      Vec3 radial{rng.normal(), rng.normal(), rng.normal()};
      radial = radial - line.direction * radial.dot(line.direction);
      if (radial.norm() > 1e-9) radial = radial.normalized() * rng.uniform(0, 0.6);
      pts.push_back(line.anchor + line.direction * t + radial);
    }
    const double tau = 0.3;
    std::vector<double> params;
    for (const auto& p : pts) {
      const Vec3 d = p - line.anchor;
      const double t = d.dot(line.direction);
      if ((d - line.direction * t).norm() <= tau) params.push_back(t);
    }
    if (params.empty()) {
      CHECK_THROWS_AS(median_projection_center(pts, line, tau), NoPointsWithinTau);
      continue;
    }
    std::sort(params.begin(), params.end());
    const std::size_t m = params.size();
    const double expect_t = (m % 2 == 1) ? params[m / 2] : 0.5 * (params[m / 2 - 1] + params[m / 2]);
    const Vec3 got = median_projection_center(pts, line, tau);
    CHECK(distance(got, line.anchor + line.direction * expect_t) < 1e-9);

    // permutation invariance
    std::vector<Vec3> shuffled = pts;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(distance(median_projection_center(shuffled, line, tau), got) < 1e-12);
  }
}

TEST_CASE("all four methods agree on uniformly spaced collinear input") {
  const auto pts = collinear_points(15, {4, 1, -2}, Vec3{0.8, 0.1, 0.59}.normalized(), 0.05);
  const PointCloud cloud = as_cloud(pts);
  LocalizerParams params;

  const Vec3 c1 = localize_dbscan(cloud, params).center;
  const Vec3 c2 = localize_ransac(cloud, params).center;
  const Vec3 c3 = localize_dbscan_ransac(cloud, params).center;
  const Vec3 c4 = localize_dbscan_pca(cloud, params).center;
  CHECK(distance(c1, c2) < 1e-6);
  CHECK(distance(c1, c3) < 1e-6);
  CHECK(distance(c1, c4) < 1e-6);
}

TEST_CASE("localizers on a clean synthetic insulator") {
  refimpl::TestRng rng(404);
  const Vec3 center{8, 0, 12};
  const Vec3 axis = Vec3{0.95, 0.05, -0.17}.normalized();
  const auto pts = cylinder_samples(center, axis, 1.2, 0.12, 120, rng, 0.01);
  const PointCloud cloud = as_cloud(pts);
  LocalizerParams params;

  for (const auto method : {LocalizeMethod::Dbscan, LocalizeMethod::Ransac,
                            LocalizeMethod::DbscanRansac, LocalizeMethod::DbscanPca}) {
    const auto est = localize(method, cloud, params);
    CHECK(distance(est.center, center) < 0.15);
    CHECK(std::abs(est.orientation.norm() - 1.0) < 1e-9);
    CHECK(std::abs(est.orientation.dot(axis)) > std::cos(deg2rad(10.0)));
  }
}

TEST_CASE("dbscan localizer separates a nearby power line cluster") {
  refimpl::TestRng rng(505);
  // insulator cluster near the origin plus a parallel line of points 0.5 m
  // away: with eps below the gap the line forms its own cluster and the
  // nearest one (the insulator) is selected
  auto pts = cylinder_samples({5, 0, 0}, {1, 0, 0}, 1.2, 0.12, 80, rng, 0.01);
  const std::size_t n_ins = pts.size();
  for (int i = 0; i < 30; ++i) {
    pts.push_back({5.0 + i * 0.1, 0.0, -0.5 + rng.normal() * 0.01});
  }
  LocalizerParams params;
  params.dbscan_eps = 0.25;
  const auto clusters = dbscan(pts, params.dbscan_eps, params.dbscan_min_pts);
  REQUIRE(clusters.size() >= 2);
  const auto est = localize_dbscan_ransac(as_cloud(pts), params);
  CHECK(distance(est.center, {5, 0, 0}) < 0.15);
  (void)n_ins;
}

TEST_CASE("dbscan+pca takes the reiteration branch on an attached blob") {
  refimpl::TestRng rng(606);
  // insulator plus a dense side blob within tau of the initial axis; the
  // sub-clustering step must isolate the dominant sub-cluster
  auto pts = cylinder_samples({3, 0, 0}, {1, 0, 0}, 1.2, 0.1, 140, rng, 0.008);
  for (int i = 0; i < 25; ++i) {
    pts.push_back({3.75 + rng.uniform(0, 0.18), 0.3 + rng.uniform(0, 0.18),
                   0.1 + rng.uniform(0, 0.18)});
  }
  LocalizerParams params;
  const auto est = localize_dbscan_pca(as_cloud(pts), params);
  CHECK(distance(est.center, {3, 0, 0}) < 0.3);
}

TEST_CASE("localizer error paths") {
  LocalizerParams params;
  CHECK_THROWS_AS(localize_dbscan(as_cloud({}), params), NoCluster);
  // sparse noise only: min_pts unreachable
  CHECK_THROWS_AS(localize_dbscan(as_cloud({{0, 0, 0}, {5, 0, 0}, {0, 7, 0}}), params), NoCluster);
  CHECK_THROWS_AS(localize_ransac(as_cloud({{1, 1, 1}, {1, 1, 1}}), params), DegenerateInput);
}

TEST_CASE("estimates stay inside the tau-inflated input box") {
  refimpl::TestRng rng(707);
  LocalizerParams params;
  for (int trial = 0; trial < 10; ++trial) {
    const auto pts = cylinder_samples({rng.uniform(3, 8), rng.uniform(-2, 2), rng.uniform(-1, 4)},
                                      Vec3{1, rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)}
                                          .normalized(),
                                      1.2, 0.12, 100, rng, 0.02);
    Vec3 lo{1e18, 1e18, 1e18}, hi{-1e18, -1e18, -1e18};
    for (const auto& p : pts) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    for (const auto method : {LocalizeMethod::Dbscan, LocalizeMethod::Ransac,
                              LocalizeMethod::DbscanRansac, LocalizeMethod::DbscanPca}) {
      const auto est = localize(method, as_cloud(pts), params);
      CHECK(est.center.x > lo.x - params.tau);
      CHECK(est.center.x < hi.x + params.tau);
      CHECK(est.center.y > lo.y - params.tau);
      CHECK(est.center.y < hi.y + params.tau);
      CHECK(est.center.z > lo.z - params.tau);
      CHECK(est.center.z < hi.z + params.tau);
      CHECK(std::abs(est.orientation.norm() - 1.0) < 1e-9);
    }
  }
}
