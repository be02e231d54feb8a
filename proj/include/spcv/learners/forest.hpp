#pragma once

#include <memory>

#include "spcv/learners/learner.hpp"

namespace spcv {

/// Binary classification tree. Leaves store the in-node share of class 1.
struct ClassificationTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double positive_share = 0.0;
  };
  std::vector<Node> nodes;

  const Node& leaf_for(std::span<const double> row) const;
  /// Majority vote of the leaf: 1, 0, or 0.5 on an exact tie.
  double vote(std::span<const double> row) const;
};

struct ForestOptions {
  bool bootstrap = true;
  std::size_t min_node_size = 1;
};

/// Random forest of Gini CART trees grown to purity. Tree t draws its
/// bootstrap sample and split candidates from a stream seeded by
/// (seed, t) alone, so a forest of N trees is a prefix of any larger forest
/// grown with the same seed.
class ForestModel final : public FittedModel {
 public:
  const std::vector<ClassificationTree>& trees() const noexcept { return trees_; }
  std::size_t mtry() const noexcept { return mtry_; }

  friend class ForestBuilder;
  friend std::unique_ptr<ForestModel> fit_rf(const Matrix&, std::span<const std::uint8_t>, std::size_t, std::size_t,
                                             std::uint64_t, const ForestOptions&);

 protected:
  std::vector<double> score(const Matrix& x) const override;

 private:
  explicit ForestModel(std::size_t width) : FittedModel(width) {}
  std::vector<ClassificationTree> trees_;
  std::size_t mtry_ = 0;
};

/// Presorts the training data once and grows any number of trees from it.
class ForestBuilder {
 public:
  ForestBuilder(const Matrix& x, std::span<const std::uint8_t> y, ForestOptions options = {});

  ClassificationTree grow(std::size_t mtry, std::uint64_t tree_seed) const;

  std::unique_ptr<ForestModel> fit(std::size_t mtry, std::size_t num_trees, std::uint64_t seed) const;

  /// Vote shares on `test` after the first counts[i] trees, for every i.
  /// `counts` need not be sorted.
  std::vector<std::vector<double>> vote_curve(const Matrix& test, std::size_t mtry, std::span<const std::size_t> counts,
                                              std::uint64_t seed) const;

  std::size_t features() const noexcept { return p_; }

 private:
  std::size_t n_ = 0, p_ = 0;
  std::vector<double> columns_;    // column-major copy of x
  std::vector<std::uint32_t> order_;  // per feature, rows sorted by value
  std::vector<std::uint8_t> y_;
  ForestOptions options_;
};

std::uint64_t tree_seed(std::uint64_t forest_seed, std::size_t tree);

/// mtry is clamped into [1, p] with a warning.
std::unique_ptr<ForestModel> fit_rf(const Matrix& x, std::span<const std::uint8_t> y, std::size_t mtry,
                                    std::size_t num_trees, std::uint64_t seed, const ForestOptions& options = {});

}  // namespace spcv
