#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spcv/learners/learner.hpp"
#include "spcv/rng.hpp"

using namespace spcv;

namespace {

struct Fixture {
  Matrix x;
  std::vector<std::uint8_t> y;
};

Fixture random_fixture(std::size_t n, std::uint64_t seed) {
  Rng r(seed);
  Fixture f{Matrix(n, 3), std::vector<std::uint8_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 3; ++j) f.x(i, j) = r.normal();
    f.y[i] = f.x(i, 0) - 0.5 * f.x(i, 2) + r.normal() > 0.3;
  }
  f.y[0] = 0;
  f.y[1] = 1;
  return f;
}

std::vector<ParamSetting> sample_settings(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::wknn:
      return {{{"k", std::int64_t{5}}, {"distance", std::int64_t{1}}, {"kernel", std::string("triweight")}},
              {{"k", std::int64_t{40}}, {"distance", std::int64_t{3}}, {"kernel", std::string("optimal")}}};
    case LearnerKind::rf:
      return {{{"mtry", std::int64_t{1}}, {"num_trees", std::int64_t{30}}},
              {{"mtry", std::int64_t{3}}, {"num_trees", std::int64_t{12}}},
              {{"mtry", std::int64_t{1}}, {"num_trees", std::int64_t{10}}}};
    case LearnerKind::brt:
      return {{{"n_tree", std::int64_t{100}}, {"shrinkage", 0.7}, {"interaction_depth", std::int64_t{3}}},
              {{"n_tree", std::int64_t{150}}, {"shrinkage", 0.01}, {"interaction_depth", std::int64_t{1}}}};
    case LearnerKind::svm:
      return {{{"C", 0.5}, {"sigma", 2.0}}, {{"C", 64.0}, {"sigma", 0.01}}};
    case LearnerKind::glm:
      return {ParamSetting{}};
  }
  return {};
}

}  // namespace

TEST(Learners, Defaults) {
  EXPECT_TRUE(default_setting(LearnerKind::glm, 5).empty());
  EXPECT_EQ(default_setting(LearnerKind::svm, 5), (ParamSetting{{"C", 1.0}, {"sigma", 1.0}}));
  const auto rf = default_setting(LearnerKind::rf, 21);
  EXPECT_EQ(rf.integer("mtry"), 4);
  EXPECT_EQ(rf.integer("num_trees"), 500);
  const auto wknn = default_setting(LearnerKind::wknn, 3);
  EXPECT_EQ(wknn.integer("k"), 7);
  EXPECT_EQ(wknn.integer("distance"), 2);
  EXPECT_EQ(wknn.text("kernel"), "optimal");
  const auto brt = default_setting(LearnerKind::brt, 3);
  EXPECT_EQ(brt.integer("n_tree"), 100);
  EXPECT_EQ(brt.real("shrinkage"), 0.1);
  EXPECT_EQ(brt.integer("interaction_depth"), 1);
}

TEST(Learners, Names) {
  for (auto k : kAllLearners) EXPECT_EQ(parse_learner(to_string(k)), k);
  EXPECT_EQ(parse_learner("SVM"), LearnerKind::svm);
  EXPECT_THROW(parse_learner("gam"), Error);
}

TEST(Learners, FitPredictManyMatchesIndividualFits) {
  const auto f = random_fixture(90, 1);
  const auto test = random_fixture(35, 2);
  for (auto kind : kAllLearners) {
    const auto settings = sample_settings(kind);
    const auto many = fit_predict_many(kind, f.x, f.y, test.x, settings, 17);
    ASSERT_EQ(many.size(), settings.size());
    for (std::size_t i = 0; i < settings.size(); ++i)
      EXPECT_EQ(many[i], fit(kind, f.x, f.y, settings[i], 17)->predict(test.x)) << to_string(kind) << " " << i;
  }
}

TEST(Learners, DeterministicAndWellFormed) {
  const auto f = random_fixture(80, 3);
  for (auto kind : kAllLearners) {
    const auto s = default_setting(kind, 3);
    const auto a = fit(kind, f.x, f.y, s, 5)->predict(f.x);
    EXPECT_EQ(a, fit(kind, f.x, f.y, s, 5)->predict(f.x)) << to_string(kind);
    for (double v : a) {
      EXPECT_TRUE(std::isfinite(v));
      if (kind != LearnerKind::svm) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(Learners, RowOrderInvarianceForSetLearners) {
  const auto f = random_fixture(70, 4);
  std::vector<RowIndex> perm(70);
  std::iota(perm.begin(), perm.end(), 0);
  Rng r(3);
  r.shuffle(perm.begin(), perm.end());
  const Matrix xp = f.x.select_rows(perm);
  std::vector<std::uint8_t> yp;
  for (auto i : perm) yp.push_back(f.y[i]);
  for (auto kind : {LearnerKind::glm, LearnerKind::wknn, LearnerKind::svm}) {
    const auto s = default_setting(kind, 3);
    const auto a = fit(kind, f.x, f.y, s, 1)->predict(f.x);
    const auto b = fit(kind, xp, yp, s, 1)->predict(f.x);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6) << to_string(kind);
  }
}

TEST(Learners, PredictChecksWidth) {
  const auto f = random_fixture(40, 5);
  for (auto kind : kAllLearners) {
    const auto m = fit(kind, f.x, f.y, default_setting(kind, 3), 1);
    EXPECT_THROW(m->predict(Matrix(2, 4)), Error) << to_string(kind);
  }
}

TEST(Learners, StandardizerUnitScaleForConstantColumn) {
  Matrix x(3, 2);
  x(0, 0) = 1;
  x(1, 0) = 2;
  x(2, 0) = 3;
  for (std::size_t i = 0; i < 3; ++i) x(i, 1) = 7;
  const auto s = Standardizer::fit(x);
  EXPECT_DOUBLE_EQ(s.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(s.scale[0], 1.0);
  EXPECT_DOUBLE_EQ(s.scale[1], 1.0);
  EXPECT_DOUBLE_EQ(s.apply(x)(2, 1), 0.0);
}

TEST(Params, JsonRoundTrip) {
  const ParamSetting s{{"k", std::int64_t{12}}, {"kernel", std::string("cos")}, {"shrinkage", 0.125}};
  EXPECT_EQ(s.to_json(), R"({"k":12,"kernel":"cos","shrinkage":0.125})");
  EXPECT_EQ(ParamSetting::from_json(s.to_json()), s);
  EXPECT_EQ(ParamSetting().to_json(), "{}");
  EXPECT_THROW(s.integer("missing"), Error);
}
