#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "spcv/common.hpp"

namespace spcv {

struct FoldScore {
  std::optional<double> auroc;  // absent when the fold holds a single class
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

/// Area under the ROC curve as the Mann-Whitney statistic with midranks for
/// tied scores. Throws on NaN scores or length mismatch.
FoldScore auroc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct RepFoldScore {
  std::size_t repetition = 0;
  std::size_t fold = 0;
  std::optional<double> auroc;
};

struct Aggregate {
  std::map<std::size_t, double> repetition_means;  // repetitions with >= 1 scored fold
  double overall = 0.0;                            // mean of repetition means
  std::size_t missing_folds = 0;
  std::vector<std::size_t> excluded_repetitions;
  Warnings warnings;

  bool has_overall() const noexcept { return !repetition_means.empty(); }
};

/// Repetition mean = mean of the repetition's scored folds; overall = mean
/// of repetition means.
Aggregate aggregate(std::span<const RepFoldScore> scores);

}  // namespace spcv
