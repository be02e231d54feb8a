#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "spcv/common.hpp"
#include "spcv/learners/learner.hpp"
#include "spcv/partition.hpp"

namespace spcv {

enum class ParamType { integer, real, log2_real, categorical };

/// One searchable hyperparameter. Integers cover [lo, hi], reals (lo, hi],
/// log2-reals [lo, hi] uniformly in the exponent.
struct ParamSpec {
  std::string name;
  ParamType type = ParamType::real;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::string> levels;  // categorical only
};

struct ParamSpace {
  std::vector<ParamSpec> params;

  /// Throws on unordered or non-finite bounds, non-positive log2 bounds, or
  /// an empty level list.
  void validate() const;
  bool empty() const noexcept { return params.empty(); }
};

/// The random-search space of a learner. Throws for GLM, which has no
/// hyperparameters.
ParamSpace table1_space(LearnerKind kind);

/// Setting number `index` of the random-search stream for `seed`. Each
/// setting is drawn from its own stream, so the first b settings of a
/// larger budget equal the settings of budget b.
ParamSetting sample_setting(const ParamSpace& space, std::uint64_t seed, std::size_t index);

std::vector<ParamSetting> sample_random(const ParamSpace& space, std::size_t budget, std::uint64_t seed);

struct Trial {
  ParamSetting setting;
  std::optional<double> mean_auroc;  // over the scored inner folds
  std::vector<std::optional<double>> fold_aurocs;
};

struct TuneResult {
  ParamSetting best;
  std::optional<double> best_mean;
  std::vector<Trial> trials;
  std::size_t budget = 0;
};

/// Already evaluated trials keyed by tuning seed. Because every trial is a
/// pure function of (data, seed, index), a larger budget can extend the
/// trials of a smaller one. Thread-safe.
class TrialCache {
 public:
  std::vector<Trial> lookup(std::uint64_t key) const;
  void store(std::uint64_t key, std::vector<Trial> trials);

 private:
  mutable std::mutex mutex_;
  std::map<std::uint64_t, std::vector<Trial>> entries_;
};

struct TuneOptions {
  PartitionStrategy strategy = PartitionStrategy::random;
  std::size_t budget = 0;
  std::size_t k_inner = 5;
  std::uint64_t seed = 0;
  /// Receives the caller's row ids (see TuneData::row_ids) of every row the
  /// tuner reads.
  std::function<void(std::span<const RowIndex>)> on_rows_read;
  TrialCache* cache = nullptr;  // must only be shared between calls on the same data
};

/// Training data of one tuning problem.
struct TuneData {
  const Matrix& x;
  std::span<const std::uint8_t> y;
  std::span<const Point> coords;
  /// Identifier of each row reported to on_rows_read; defaults to 0..n-1.
  std::span<const RowIndex> row_ids = {};
};

/// Random search scored by inner k-fold cross-validation. Budget 0 (and any
/// GLM request) returns the default setting without trials.
TuneResult tune(LearnerKind kind, const TuneData& data, const TuneOptions& options);

/// `trial,param_json,mean_auroc,fold_aurocs`; fold AUROCs are
/// semicolon-separated with NA for unscored folds.
void write_trials_csv(std::ostream& out, const TuneResult& result);

}  // namespace spcv
