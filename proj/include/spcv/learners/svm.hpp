#pragma once

#include <memory>

#include "spcv/learners/learner.hpp"

namespace spcv {

struct SvmSetting {
  double cost = 1.0;   // C
  double sigma = 1.0;  // RBF inverse width: k(x, x') = exp(-sigma * |x - x'|^2)

  static SvmSetting from(const ParamSetting& setting);
};

struct SvmOptions {
  double tolerance = 1e-3;  // maximal KKT violation at termination
  /// Iteration cap; 0 means 10 passes of n pair updates each (10 * n * n).
  std::size_t max_iterations = 0;
};

/// Solution of the C-SVC dual
///   min 1/2 a'Qa - e'a  s.t.  0 <= a_i <= C,  y'a = 0,  Q_ij = y_i y_j K_ij
/// with labels mapped to y in {-1, +1}.
struct SvmSolution {
  std::vector<double> alpha;
  double rho = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// SMO with second-order working-set selection on a precomputed kernel
/// matrix (row-major n x n).
SvmSolution solve_svm_dual(std::span<const double> kernel, std::span<const std::uint8_t> labels, double cost,
                           const SvmOptions& options = {});

/// Soft-margin RBF support vector classifier on standardised features.
/// Scores are raw decision values.
class SvmModel final : public FittedModel {
 public:
  const SvmSolution& solution() const noexcept { return solution_; }
  /// Dual feasibility residual |sum_i alpha_i y_i|.
  double equality_residual() const;

  friend std::unique_ptr<SvmModel> fit_svm(const Matrix& x, std::span<const std::uint8_t> y,
                                           const SvmSetting& setting, const SvmOptions& options);

 protected:
  std::vector<double> score(const Matrix& x) const override;

 private:
  explicit SvmModel(std::size_t width) : FittedModel(width) {}

  Standardizer standardizer_;
  Matrix support_;                    // standardised support vectors
  std::vector<double> coefficients_;  // alpha_i * y_i for the support vectors
  std::vector<std::uint8_t> labels_;
  double sigma_ = 1.0;
  SvmSolution solution_;
};

/// Requires both classes in `y`.
std::unique_ptr<SvmModel> fit_svm(const Matrix& x, std::span<const std::uint8_t> y, const SvmSetting& setting,
                                  const SvmOptions& options = {});

/// One decision-value vector per setting; the pairwise distances are
/// computed once and shared.
std::vector<std::vector<double>> fit_predict_svm_many(const Matrix& x, std::span<const std::uint8_t> y,
                                                      const Matrix& test, std::span<const SvmSetting> settings,
                                                      const SvmOptions& options = {});

}  // namespace spcv
