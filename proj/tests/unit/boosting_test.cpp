#include <gtest/gtest.h>

#include <cmath>

#include "spcv/learners/boosting.hpp"
#include "spcv/rng.hpp"

using namespace spcv;

namespace {

struct Fixture {
  Matrix x;
  std::vector<std::uint8_t> y;
};

Fixture random_fixture(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng r(seed);
  Fixture f{Matrix(n, p), std::vector<std::uint8_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double eta = -0.5;
    for (std::size_t j = 0; j < p; ++j) {
      f.x(i, j) = r.normal();
      eta += (j + 1.0) / static_cast<double>(p) * f.x(i, j) * f.x(i, (j + 1) % p);
    }
    f.y[i] = r.uniform() < logistic(2 * eta);
  }
  f.y[0] = 0;
  f.y[1] = 1;
  return f;
}

}  // namespace

TEST(Boosting, SingleStumpMatchesNewtonStep) {
  // x = 1..8, y = 0 0 0 0 0 1 1 1. F0 = log(3/5); p = 3/8 everywhere.
  // Left leaf (x <= 5): sum g = -15/8, sum h = 75/64 -> step -1.6.
  // Right leaf: sum g = 15/8, sum h = 45/64 -> step 8/3.
  Matrix x(8, 1);
  std::vector<std::uint8_t> y(8);
  for (std::size_t i = 0; i < 8; ++i) {
    x(i, 0) = static_cast<double>(i + 1);
    y[i] = i >= 5;
  }
  BoostingOptions options;
  options.min_node_size = 1;
  const auto m = fit_brt(x, y, {1, 1.0, 1}, options);
  const double f0 = std::log(3.0 / 5.0);
  EXPECT_NEAR(m->initial_score(), f0, 1e-12);
  ASSERT_EQ(m->trees().size(), 1u);
  EXPECT_EQ(m->trees()[0].nodes.size(), 3u);
  const auto p = m->predict(x);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(p[i], logistic(f0 + (i >= 5 ? 8.0 / 3.0 : -1.6)), 1e-9);
  Matrix q(2, 1);
  q(0, 0) = 5.4;
  q(1, 0) = 5.6;
  const auto pq = m->predict(q);
  EXPECT_NEAR(pq[0], logistic(f0 - 1.6), 1e-9);
  EXPECT_NEAR(pq[1], logistic(f0 + 8.0 / 3.0), 1e-9);
}

TEST(Boosting, TinyShrinkagePredictsPrevalence) {
  const auto f = random_fixture(150, 3, 2);
  double prevalence = 0;
  for (auto v : f.y) prevalence += v;
  prevalence /= 150;
  for (std::size_t depth : {1, 4}) {
    const auto m = fit_brt(f.x, f.y, {200, 1e-6, depth});
    for (double p : m->predict(f.x)) EXPECT_NEAR(p, prevalence, 1e-3);
  }
}

TEST(Boosting, TrainingDevianceNonIncreasing) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto f = random_fixture(120, 3, seed);
    for (double shrinkage : {0.01, 0.1, 0.5, 1.0}) {
      for (std::size_t depth : {1, 3, 8}) {
        BoostingOptions options;
        options.track_deviance = true;
        const auto m = fit_brt(f.x, f.y, {60, shrinkage, depth}, options);
        const auto& d = m->deviance();
        ASSERT_EQ(d.size(), 61u);
        for (std::size_t s = 1; s < d.size(); ++s)
          EXPECT_LE(d[s], d[s - 1] * (1 + 1e-12)) << "seed " << seed << " shrinkage " << shrinkage << " depth "
                                                  << depth << " stage " << s;
      }
    }
  }
}

TEST(Boosting, DepthLimitAndMinNode) {
  const auto f = random_fixture(200, 3, 5);
  for (std::size_t depth : {1, 2, 5}) {
    const auto m = fit_brt(f.x, f.y, {20, 0.1, depth});
    for (const auto& t : m->trees()) {
      EXPECT_LE(t.nodes.size(), (std::size_t{2} << depth) - 1);
    }
  }
}

TEST(Boosting, FitPredictMatchesModel) {
  const auto f = random_fixture(180, 4, 3);
  const auto test = random_fixture(50, 4, 4);
  for (std::size_t depth : {1, 3, 12}) {
    const BoostingSetting s{150, 0.3, depth};
    EXPECT_EQ(fit_predict_brt(f.x, f.y, test.x, s), fit_brt(f.x, f.y, s)->predict(test.x));
  }
}

TEST(Boosting, ManyDistinctValuesUseBins) {
  // More distinct values than bins: still a valid fit that beats F0.
  const auto f = random_fixture(400, 2, 8);
  BoostingOptions options;
  options.track_deviance = true;
  options.max_bins = 8;
  const auto m = fit_brt(f.x, f.y, {50, 0.2, 3}, options);
  EXPECT_LT(m->deviance().back(), m->deviance().front());
}

TEST(Boosting, RejectsSingleClass) {
  Matrix x(5, 1, 1.0);
  EXPECT_THROW(fit_brt(x, std::vector<std::uint8_t>(5, 0), {}), Error);
}

TEST(Boosting, SettingFromParams) {
  const auto s = BoostingSetting::from(ParamSetting{{"n_tree", std::int64_t{300}},
                                                    {"shrinkage", 0.05},
                                                    {"interaction_depth", std::int64_t{4}}});
  EXPECT_EQ(s.n_tree, 300u);
  EXPECT_EQ(s.shrinkage, 0.05);
  EXPECT_EQ(s.interaction_depth, 4u);
}
