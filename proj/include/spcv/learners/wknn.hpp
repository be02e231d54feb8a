#pragma once

#include <memory>
#include <string>

#include "spcv/learners/learner.hpp"

namespace spcv {

enum class WknnKernel { rectangular, triangular, epanechnikov, biweight, triweight, cos, inv, gaussian, optimal };

std::string to_string(WknnKernel kernel);
WknnKernel parse_wknn_kernel(const std::string& text);

/// Weight of a neighbour at normalised distance d in [0, 1] (all kernels
/// except `optimal`, whose weights depend on rank, not distance).
double kernel_weight(WknnKernel kernel, double d);

/// Rank-based weights of the `optimal` kernel for k neighbours in a space of
/// `dims` dimensions, clipped at zero; element i belongs to the (i+1)-th
/// nearest neighbour.
std::vector<double> optimal_kernel_weights(std::size_t k, std::size_t dims);

struct WknnSetting {
  std::size_t k = 7;
  int distance = 2;  // Minkowski order
  WknnKernel kernel = WknnKernel::optimal;

  static WknnSetting from(const ParamSetting& setting);
};

/// Weighted k-nearest-neighbour classifier on standardised features.
///
/// For a query, the k+1 nearest training rows are found; distances of the
/// first k are divided by the (k+1)-th (floored at 1e-6) and turned into
/// kernel weights. The score is the weighted share of positive neighbours.
class WknnModel final : public FittedModel {
 public:
  std::size_t k() const noexcept { return k_; }

  /// Also counts queries whose weights were all zero and therefore fell
  /// back to equal weights.
  std::vector<double> predict_counting(const Matrix& x, std::size_t& fallbacks) const;

  friend std::unique_ptr<WknnModel> fit_wknn(const Matrix& x, std::span<const std::uint8_t> y, const WknnSetting& s);

 protected:
  std::vector<double> score(const Matrix& x) const override;

 private:
  explicit WknnModel(std::size_t width) : FittedModel(width) {}

  Standardizer standardizer_;
  Matrix train_;
  std::vector<std::uint8_t> labels_;
  WknnSetting setting_;
  std::size_t k_ = 0;
  std::vector<double> rank_weights_;
};

/// k is clamped to n_train - 1 (minimum 1) with a warning.
std::unique_ptr<WknnModel> fit_wknn(const Matrix& x, std::span<const std::uint8_t> y, const WknnSetting& setting);

}  // namespace spcv
