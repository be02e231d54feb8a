#pragma once

#include <memory>

#include "spcv/learners/learner.hpp"

namespace spcv {

struct GlmOptions {
  int max_iterations = 25;
  double tolerance = 1e-8;  // relative deviance change
  double ridge = 1e-8;      // added to the normal-equations diagonal
  double separation_threshold = 15.0;
};

/// Logistic regression fitted by iteratively reweighted least squares.
class GlmModel final : public FittedModel {
 public:
  /// Intercept first, then one coefficient per input column.
  const std::vector<double>& coefficients() const noexcept { return beta_; }
  bool converged() const noexcept { return converged_; }
  bool quasi_separation() const noexcept { return quasi_separation_; }
  int iterations() const noexcept { return iterations_; }
  double deviance() const noexcept { return deviance_; }

  friend std::unique_ptr<GlmModel> fit_glm(const Matrix& x, std::span<const std::uint8_t> y, const GlmOptions& options);

 protected:
  std::vector<double> score(const Matrix& x) const override;

 private:
  explicit GlmModel(std::size_t width) : FittedModel(width) {}

  std::vector<double> beta_;
  bool converged_ = false;
  bool quasi_separation_ = false;
  int iterations_ = 0;
  double deviance_ = 0.0;
};

/// Requires both classes in `y`.
std::unique_ptr<GlmModel> fit_glm(const Matrix& x, std::span<const std::uint8_t> y, const GlmOptions& options = {});

/// -2 log-likelihood of a logistic model with linear predictor `eta`.
double binomial_deviance(std::span<const double> eta, std::span<const std::uint8_t> y);

}  // namespace spcv
