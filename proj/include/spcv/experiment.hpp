#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spcv/dataset.hpp"
#include "spcv/learners/learner.hpp"
#include "spcv/partition.hpp"
#include "spcv/tuner.hpp"

namespace spcv {

/// Outer partitioning plus the inner (tuning) partitioning; no tuning when
/// `tuning` is empty.
struct CvSetup {
  PartitionStrategy outer = PartitionStrategy::random;
  std::optional<PartitionStrategy> tuning;

  /// "outer/tuning" with parts "spatial", "non-spatial" and "none".
  std::string name() const;
  static CvSetup parse(const std::string& text);

  friend bool operator==(const CvSetup&, const CvSetup&) = default;
};

struct ExperimentConfig {
  std::size_t k_outer = 5;
  std::size_t k_inner = 5;
  std::size_t repetitions = 100;
  std::vector<std::size_t> budgets{0};
  std::vector<LearnerKind> learners{kAllLearners.begin(), kAllLearners.end()};
  std::vector<CvSetup> setups;
  std::uint64_t master_seed = 1;
  /// Worker threads; 1 runs serially on the calling thread.
  std::size_t jobs = 1;
  /// Check every row the tuner reads against the outer test fold.
  bool monitor_leakage = true;

  void validate() const;
};

enum class RecordStatus { ok, missing, failed };
std::string to_string(RecordStatus status);
RecordStatus parse_record_status(const std::string& text);

/// One outer fold of one (setup, learner, budget) cell.
struct Record {
  std::string setup;
  LearnerKind learner = LearnerKind::glm;
  std::size_t budget = 0;
  std::size_t repetition = 0;
  std::size_t fold = 0;
  std::optional<double> auroc;
  std::string chosen_params_json = "{}";
  std::size_t n_test = 0;
  std::size_t n_pos_test = 0;
  RecordStatus status = RecordStatus::ok;
  double wall_ms = 0.0;
  std::string message;       // failure reason; not serialised
  std::size_t leakage = 0;   // tuner reads of outer-test rows; not serialised
};

struct ExperimentResult {
  std::vector<Record> records;  // canonical order, see sort_records
  std::size_t leakage_checks = 0;
  std::size_t leakage_violations = 0;
};

/// Sorts by (setup, learner, budget, repetition, fold).
void sort_records(std::vector<Record>& records);

/// Budgets used for a setup: all configured budgets when it tunes, only 0
/// otherwise.
std::vector<std::size_t> budgets_for(const CvSetup& setup, const std::vector<std::size_t>& budgets);

/// Runs every (setup, learner, budget) cell of `config`. Outer partitions
/// depend only on (master seed, outer strategy, repetition) and are shared
/// by all cells. `cache` may carry tuning trials over from an earlier run
/// with the same data, master seed and k_inner.
ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& config, TrialCache* cache = nullptr);

/// A single cell.
ExperimentResult run_nested_cv(const Dataset& data, LearnerKind kind, const CvSetup& setup, std::size_t budget,
                               ExperimentConfig config);

/// Overall mean AUROC (mean of repetition means) of one cell.
std::optional<double> cell_mean(const std::vector<Record>& records, const std::string& setup, LearnerKind learner,
                                std::size_t budget);

struct Optimism {
  double nonspatial = 0.0;
  double spatial = 0.0;
  double absolute = 0.0;              // nonspatial - spatial
  double relative_to_nonspatial = 0.0;  // percent
  double relative_to_spatial = 0.0;     // percent
};

Optimism optimism_from_means(double nonspatial, double spatial);

/// Compares two setups' cells for one learner and budget. Throws when a
/// cell is absent or has no scored fold.
Optimism optimism(const std::vector<Record>& records, LearnerKind learner, std::size_t budget,
                  const std::string& nonspatial_setup = "non-spatial/non-spatial",
                  const std::string& spatial_setup = "spatial/spatial");

struct CurvePoint {
  std::size_t budget = 0;
  double mean = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  std::size_t repetitions = 0;
};

/// One row per budget, ascending. Throws Error("insufficient budgets") when
/// fewer than two budgets are present.
std::vector<CurvePoint> tuning_curve(const std::vector<Record>& records, LearnerKind learner,
                                     const std::string& setup);

/// Repetition means of one cell, ordered by repetition.
std::vector<double> repetition_means(const std::vector<Record>& records, const std::string& setup,
                                     LearnerKind learner, std::size_t budget);

}  // namespace spcv
