#pragma once

#include <memory>

#include "spcv/learners/learner.hpp"

namespace spcv {

struct BoostingSetting {
  std::size_t n_tree = 100;
  double shrinkage = 0.1;
  std::size_t interaction_depth = 1;

  static BoostingSetting from(const ParamSetting& setting);
};

struct BoostingOptions {
  /// Smallest number of rows allowed in a child node.
  std::size_t min_node_size = 10;
  /// Split candidates per feature: boundaries between at most this many
  /// equal-count bins of the distinct training values (exact below it).
  std::size_t max_bins = 32;
  /// Record the training deviance after every stage.
  bool track_deviance = false;
};

/// Least-squares regression tree; leaves hold shrunken Newton steps.
struct RegressionTree {
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  std::vector<Node> nodes;

  double eval(std::span<const double> row) const;
};

/// Gradient boosting on the binomial deviance.
class BoostingModel final : public FittedModel {
 public:
  double initial_score() const noexcept { return f0_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
  /// deviance()[m] is the training deviance after m stages (index 0 is F_0).
  const std::vector<double>& deviance() const noexcept { return deviance_; }
  /// Linear predictor F_M(x).
  std::vector<double> link(const Matrix& x) const;

  friend std::unique_ptr<BoostingModel> fit_brt(const Matrix& x, std::span<const std::uint8_t> y,
                                                const BoostingSetting& setting, const BoostingOptions& options);

 protected:
  std::vector<double> score(const Matrix& x) const override;

 private:
  explicit BoostingModel(std::size_t width) : FittedModel(width) {}

  double f0_ = 0.0;
  std::vector<RegressionTree> trees_;
  std::vector<double> deviance_;
};

/// Requires both classes in `y`. The fit is deterministic (no subsampling).
std::unique_ptr<BoostingModel> fit_brt(const Matrix& x, std::span<const std::uint8_t> y,
                                       const BoostingSetting& setting, const BoostingOptions& options = {});

/// Trains and scores `test` without keeping the ensemble; matches
/// fit_brt(...)->predict(test).
std::vector<double> fit_predict_brt(const Matrix& x, std::span<const std::uint8_t> y, const Matrix& test,
                                    const BoostingSetting& setting, const BoostingOptions& options = {});

}  // namespace spcv
