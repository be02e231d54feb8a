#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "spcv/experiment.hpp"
#include "spcv/rng.hpp"
#include "spcv/synth.hpp"

using namespace spcv;

namespace {

Dataset synthetic(std::size_t n, std::uint64_t seed) {
  FieldSpec s;
  s.n = n;
  s.seed = seed;
  return make_classification(s);
}

Dataset permuted(const Dataset& d, std::uint64_t seed) {
  auto labels = d.labels();
  Rng r(seed);
  r.shuffle(labels.begin(), labels.end());
  return d.with_labels(labels);
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.repetitions = 2;
  c.budgets = {0, 3};
  c.learners = {LearnerKind::glm, LearnerKind::wknn, LearnerKind::svm};
  c.setups = {CvSetup::parse("spatial/spatial"), CvSetup::parse("non-spatial/non-spatial"),
              CvSetup::parse("spatial/none")};
  return c;
}

bool same_outcome(const Record& a, const Record& b) {
  return a.learner == b.learner && a.budget == b.budget && a.repetition == b.repetition && a.fold == b.fold &&
         a.auroc == b.auroc && a.chosen_params_json == b.chosen_params_json && a.n_test == b.n_test &&
         a.n_pos_test == b.n_pos_test && a.status == b.status;
}

}  // namespace

TEST(CvSetup, NamesRoundTrip) {
  for (const char* name : {"spatial/spatial", "spatial/non-spatial", "non-spatial/non-spatial", "spatial/none",
                           "non-spatial/none"})
    EXPECT_EQ(CvSetup::parse(name).name(), name);
  EXPECT_THROW(CvSetup::parse("spatial"), Error);
  EXPECT_THROW(CvSetup::parse("grid/none"), Error);
}

TEST(Experiment, BudgetsOnlyForTuningSetups) {
  EXPECT_EQ(budgets_for(CvSetup::parse("spatial/none"), {0, 50, 10}), (std::vector<std::size_t>{0}));
  EXPECT_EQ(budgets_for(CvSetup::parse("spatial/spatial"), {50, 0, 10, 50}), (std::vector<std::size_t>{0, 10, 50}));
}

TEST(Experiment, GlmWithoutTuning) {
  ExperimentConfig c;
  c.repetitions = 2;
  const auto r = run_nested_cv(synthetic(300, 42), LearnerKind::glm, CvSetup::parse("spatial/none"), 0, c);
  ASSERT_EQ(r.records.size(), 10u);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.chosen_params_json, "{}");
    EXPECT_EQ(rec.setup, "spatial/none");
  }
}

TEST(Experiment, PermutedLabelsGiveChanceAuroc) {
  const auto d = permuted(synthetic(300, 5), 1);
  ExperimentConfig c;
  c.repetitions = 10;
  for (auto kind : {LearnerKind::glm, LearnerKind::wknn}) {
    const auto r = run_nested_cv(d, kind, CvSetup::parse("spatial/none"), 0, c);
    EXPECT_NEAR(*cell_mean(r.records, "spatial/none", kind, 0), 0.5, 0.05) << to_string(kind);
  }
}

TEST(Experiment, BudgetZeroEqualsNoTuning) {
  const auto d = synthetic(200, 3);
  ExperimentConfig c;
  c.repetitions = 2;
  for (auto kind : kAllLearners) {
    const auto a = run_nested_cv(d, kind, CvSetup::parse("spatial/spatial"), 0, c);
    const auto b = run_nested_cv(d, kind, CvSetup::parse("spatial/none"), 0, c);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_TRUE(same_outcome(a.records[i], b.records[i]));
  }
}

TEST(Experiment, RecordCountsLeakageAndOrder) {
  const auto c = small_config();
  const auto r = run_experiment(synthetic(150, 8), c);
  // spatial/spatial and non-spatial/non-spatial: 2 budgets; spatial/none: 1.
  EXPECT_EQ(r.records.size(), (2 + 2 + 1) * 3 * c.repetitions * c.k_outer);
  EXPECT_EQ(r.leakage_violations, 0u);
  EXPECT_GT(r.leakage_checks, 0u);
  auto sorted = r.records;
  sort_records(sorted);
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_TRUE(same_outcome(sorted[i], r.records[i]));
  for (const auto& rec : r.records) EXPECT_NE(rec.status, RecordStatus::failed) << rec.message;
}

TEST(Experiment, DeterministicAcrossWorkerCounts) {
  const auto d = synthetic(150, 9);
  auto c = small_config();
  const auto a = run_experiment(d, c);
  c.jobs = 3;
  const auto b = run_experiment(d, c);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].setup, b.records[i].setup);
    EXPECT_TRUE(same_outcome(a.records[i], b.records[i]));
  }
  EXPECT_EQ(a.leakage_checks, b.leakage_checks);
}

TEST(Experiment, SharedCacheDoesNotChangeResults) {
  const auto d = synthetic(150, 10);
  auto c = small_config();
  c.learners = {LearnerKind::wknn};
  TrialCache cache;
  const auto first = run_experiment(d, c, &cache);
  c.budgets = {0, 3, 6};
  const auto cached = run_experiment(d, c, &cache);
  const auto fresh = run_experiment(d, c);
  ASSERT_EQ(cached.records.size(), fresh.records.size());
  for (std::size_t i = 0; i < fresh.records.size(); ++i) EXPECT_TRUE(same_outcome(cached.records[i], fresh.records[i]));
  EXPECT_EQ(cached.leakage_violations, 0u);
}

TEST(Experiment, SingleClassTestFoldIsMissing) {
  // 40 positives in one corner, negatives elsewhere: some spatial test folds
  // hold a single class.
  FeatureSchema schema;
  schema.columns = {ColumnSpec::numeric("v")};
  Rng r(2);
  Matrix x(200, 1);
  std::vector<Point> coords(200);
  std::vector<std::uint8_t> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    coords[i] = {r.uniform(), r.uniform()};
    x(i, 0) = r.normal();
    y[i] = coords[i].x < 0.3 && coords[i].y < 0.3 ? (i % 3 != 0) : (i % 17 == 0);
  }
  const Dataset d(schema, x, coords, y);
  ExperimentConfig c;
  c.repetitions = 3;
  const auto res = run_nested_cv(d, LearnerKind::glm, CvSetup::parse("spatial/none"), 0, c);
  EXPECT_EQ(res.records.size(), 15u);
  std::size_t missing = 0;
  for (const auto& rec : res.records) {
    if (rec.n_pos_test == 0 || rec.n_pos_test == rec.n_test) {
      EXPECT_EQ(rec.status, RecordStatus::missing);
      EXPECT_FALSE(rec.auroc.has_value());
      ++missing;
    } else {
      EXPECT_EQ(rec.status, RecordStatus::ok);
    }
  }
  EXPECT_GT(missing, 0u);
  EXPECT_TRUE(cell_mean(res.records, "spatial/none", LearnerKind::glm, 0).has_value());
}

TEST(Optimism, IdenticalInputsGiveZero) {
  const auto o = optimism_from_means(0.8, 0.8);
  EXPECT_EQ(o.absolute, 0.0);
  EXPECT_EQ(o.relative_to_nonspatial, 0.0);
  EXPECT_EQ(o.relative_to_spatial, 0.0);
}

TEST(Optimism, BothBaselines) {
  const auto o = optimism_from_means(0.912, 0.699);
  EXPECT_NEAR(o.absolute, 0.213, 1e-12);
  EXPECT_NEAR(o.relative_to_nonspatial, 23.36, 0.01);
  EXPECT_NEAR(o.relative_to_spatial, 30.47, 0.01);
}

TEST(Optimism, FromRecords) {
  std::vector<Record> recs;
  for (std::size_t f = 0; f < 2; ++f) {
    Record a;
    a.setup = "non-spatial/non-spatial";
    a.learner = LearnerKind::rf;
    a.fold = f;
    a.auroc = 0.9;
    recs.push_back(a);
    a.setup = "spatial/spatial";
    a.auroc = f ? 0.6 : 0.8;
    recs.push_back(a);
  }
  const auto o = optimism(recs, LearnerKind::rf, 0);
  EXPECT_NEAR(o.absolute, 0.2, 1e-12);
  EXPECT_THROW(optimism(recs, LearnerKind::svm, 0), Error);
}

TEST(TuningCurve, SortedSingleRepetitionAndInsufficient) {
  std::vector<Record> recs;
  for (std::size_t b : {50, 0, 10}) {
    for (std::size_t f = 0; f < 2; ++f) {
      Record r;
      r.setup = "spatial/spatial";
      r.learner = LearnerKind::svm;
      r.budget = b;
      r.fold = f;
      r.auroc = 0.5 + static_cast<double>(b) / 200 + static_cast<double>(f) / 100;
      recs.push_back(r);
    }
  }
  const auto curve = tuning_curve(recs, LearnerKind::svm, "spatial/spatial");
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_EQ(curve[0].budget, 0u);
  EXPECT_EQ(curve[2].budget, 50u);
  for (const auto& p : curve) EXPECT_EQ(p.iqr, 0.0);
  EXPECT_NEAR(curve[2].mean, 0.755, 1e-12);
  std::erase_if(recs, [](const Record& r) { return r.budget != 10; });
  EXPECT_THROW(tuning_curve(recs, LearnerKind::svm, "spatial/spatial"), Error);
}

TEST(TuningCurve, RandomForestBarelyMoves) {
  const auto d = synthetic(200, 12);
  ExperimentConfig c;
  c.repetitions = 2;
  c.budgets = {0, 5};
  c.learners = {LearnerKind::rf};
  c.setups = {CvSetup::parse("spatial/spatial")};
  const auto r = run_experiment(d, c);
  const auto curve = tuning_curve(r.records, LearnerKind::rf, "spatial/spatial");
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_LT(std::abs(curve[1].mean - curve[0].mean), 0.05);
}

TEST(Experiment, ConfigValidation) {
  ExperimentConfig c;
  EXPECT_THROW(c.validate(), Error);  // no setups
  c.setups = {CvSetup::parse("spatial/none")};
  EXPECT_NO_THROW(c.validate());
  c.k_outer = 1;
  EXPECT_THROW(c.validate(), Error);
}
