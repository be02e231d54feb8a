#include <gtest/gtest.h>

#include <cmath>

#include "spcv/kernels.hpp"
#include "spcv/rng.hpp"

using namespace spcv;
using namespace spcv::kernels;

namespace {

std::vector<Point> random_points(std::size_t n, std::uint64_t seed) {
  Rng r(seed);
  std::vector<Point> p(n);
  for (auto& q : p) q = {r.uniform(), r.uniform()};
  return p;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng r(seed);
  Matrix m(rows, cols);
  for (auto& v : m.values()) v = r.normal();
  return m;
}

}  // namespace

TEST(Kernels, AssignNearestSerialMatchesParallel) {
  const auto pts = random_points(2000, 1);
  const auto cen = random_points(7, 2);
  std::vector<int> a(pts.size(), -1), b(pts.size(), -1);
  EXPECT_EQ(assign_nearest_serial(pts, cen, a), assign_nearest_omp(pts, cen, b));
  EXPECT_EQ(a, b);
}

TEST(Kernels, AssignNearestLowestIndexOnTie) {
  const std::vector<Point> pts{{0.5, 0.0}};
  const std::vector<Point> cen{{1.0, 0.0}, {0.0, 0.0}};
  std::vector<int> l(1, -1);
  assign_nearest_serial(pts, cen, l);
  EXPECT_EQ(l[0], 0);
}

TEST(Kernels, CovarianceSerialMatchesParallel) {
  const auto pts = random_points(150, 3);
  std::vector<double> a(150 * 150), b(150 * 150);
  exponential_covariance_serial(pts, 0.3, 1.5, 0.2, a);
  exponential_covariance_omp(pts, 0.3, 1.5, 0.2, b);
  EXPECT_EQ(a, b);
  EXPECT_DOUBLE_EQ(a[0], 1.7);
  const double d = std::hypot(pts[0].x - pts[1].x, pts[0].y - pts[1].y);
  EXPECT_DOUBLE_EQ(a[1], 1.5 * std::exp(-d / 0.3));
}

TEST(Kernels, MinkowskiKnownValues) {
  const std::vector<double> a{0, 0}, b{3, 4};
  EXPECT_NEAR(minkowski(a, b, 1), 7.0, 1e-12);
  EXPECT_NEAR(minkowski(a, b, 2), 5.0, 1e-12);
  EXPECT_NEAR(minkowski(a, b, 100), 4.0 * std::pow(1 + std::pow(0.75, 100), 0.01), 1e-12);
  EXPECT_EQ(minkowski(a, a, 3), 0.0);
}

TEST(Kernels, DistanceMatricesSerialMatchesParallel) {
  const auto q = random_matrix(40, 4, 5), r = random_matrix(90, 4, 6);
  for (int order : {1, 2, 7}) {
    std::vector<double> a(40 * 90), b(40 * 90);
    minkowski_distances_serial(q, r, order, a);
    minkowski_distances_omp(q, r, order, b);
    EXPECT_EQ(a, b);
  }
  std::vector<double> a(40 * 90), b(40 * 90);
  squared_distances_serial(q, r, a);
  squared_distances_omp(q, r, b);
  EXPECT_EQ(a, b);
  double d = 0;
  for (std::size_t j = 0; j < 4; ++j) d += (q(3, j) - r(8, j)) * (q(3, j) - r(8, j));
  EXPECT_NEAR(a[3 * 90 + 8], d, 1e-12);
}
