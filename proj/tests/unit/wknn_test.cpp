#include <gtest/gtest.h>

#include <cmath>

#include "spcv/learners/wknn.hpp"

using namespace spcv;

namespace {

Matrix column(std::vector<double> v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

}  // namespace

TEST(Wknn, NearestSelfGivesOwnLabel) {
  const auto x = column({0, 1, 2, 5, 9});
  const std::vector<std::uint8_t> y{1, 1, 0, 0, 1};
  const auto m = fit_wknn(x, y, {1, 2, WknnKernel::rectangular});
  EXPECT_EQ(m->predict(x), (std::vector<double>{1, 1, 0, 0, 1}));
}

TEST(Wknn, HandCountedVote) {
  // Distances from 1.2: 1.2, 0.2, 0.8, 3.8, 7.8 -> the three nearest are
  // x = 1 (y 1), x = 2 (y 0) and x = 0 (y 1); rectangular weights are equal.
  const auto x = column({0, 1, 2, 5, 9});
  const std::vector<std::uint8_t> y{1, 1, 0, 0, 1};
  const auto m = fit_wknn(x, y, {3, 2, WknnKernel::rectangular});
  EXPECT_DOUBLE_EQ(m->predict(column({1.2}))[0], 2.0 / 3.0);
  // From 6: 6, 5, 4, 1, 3 -> x = 5 (0), x = 9 (1), x = 2 (0).
  EXPECT_DOUBLE_EQ(m->predict(column({6}))[0], 1.0 / 3.0);
}

TEST(Wknn, TriangularWeightsByHand) {
  // Standardisation scales all distances by the same factor, which cancels
  // in the (k+1)-th-neighbour normalisation. From 1.2 with k = 2: distances
  // 0.2 (y 1), 0.8 (y 0); the third neighbour is at 1.2.
  const auto x = column({0, 1, 2, 5, 9});
  const std::vector<std::uint8_t> y{1, 1, 0, 0, 1};
  const auto m = fit_wknn(x, y, {2, 2, WknnKernel::triangular});
  const double w1 = 1 - 0.2 / 1.2, w0 = 1 - 0.8 / 1.2;
  EXPECT_NEAR(m->predict(column({1.2}))[0], w1 / (w1 + w0), 1e-12);
}

TEST(Wknn, GaussianKernelRatio) {
  EXPECT_NEAR(kernel_weight(WknnKernel::gaussian, 0) / kernel_weight(WknnKernel::gaussian, 1), std::exp(0.5), 1e-12);
}

TEST(Wknn, KernelShapes) {
  for (auto k : {WknnKernel::rectangular, WknnKernel::triangular, WknnKernel::epanechnikov, WknnKernel::biweight,
                 WknnKernel::triweight, WknnKernel::cos, WknnKernel::gaussian}) {
    EXPECT_GT(kernel_weight(k, 0.0), 0.0) << to_string(k);
    EXPECT_GE(kernel_weight(k, 0.3), kernel_weight(k, 0.7)) << to_string(k);
    EXPECT_EQ(parse_wknn_kernel(to_string(k)), k);
  }
  EXPECT_GT(kernel_weight(WknnKernel::inv, 0.1), kernel_weight(WknnKernel::inv, 0.9));
  EXPECT_THROW(parse_wknn_kernel("parabolic"), Error);
}

TEST(Wknn, OptimalWeightsDecreaseAndSumToOne) {
  const auto w = optimal_kernel_weights(10, 3);
  ASSERT_EQ(w.size(), 10u);
  double s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_GE(w[i], 0.0);
    if (i) {
      EXPECT_LE(w[i], w[i - 1]);
    }
    s += w[i];
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Wknn, LargeKIsClampedWithWarning) {
  const auto x = column({0, 1, 2, 3});
  const std::vector<std::uint8_t> y{0, 1, 0, 1};
  const auto m = fit_wknn(x, y, {50, 2, WknnKernel::optimal});
  EXPECT_EQ(m->k(), 3u);
  EXPECT_FALSE(m->warnings().empty());
  for (double p : m->predict(x)) {
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(Wknn, HighMinkowskiOrderIsFinite) {
  Matrix x(6, 2);
  for (std::size_t i = 0; i < 6; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = static_cast<double>(i * i % 5);
  }
  const std::vector<std::uint8_t> y{0, 1, 0, 1, 1, 0};
  const auto m = fit_wknn(x, y, {3, 100, WknnKernel::epanechnikov});
  for (double p : m->predict(x)) EXPECT_TRUE(std::isfinite(p));
}
