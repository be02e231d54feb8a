#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spcv/common.hpp"
#include "spcv/learners/param.hpp"

namespace spcv {

enum class LearnerKind { glm, wknn, rf, brt, svm };

inline constexpr std::array<LearnerKind, 5> kAllLearners = {LearnerKind::glm, LearnerKind::wknn, LearnerKind::rf,
                                                            LearnerKind::brt, LearnerKind::svm};

std::string to_string(LearnerKind kind);
LearnerKind parse_learner(const std::string& text);

/// A trained classifier. Scores are probabilities of class 1 for GLM, WKNN,
/// RF and BRT and raw decision values for SVM; higher always means "more
/// likely positive".
class FittedModel {
 public:
  virtual ~FittedModel() = default;

  /// Throws if `x` does not have the training width.
  std::vector<double> predict(const Matrix& x) const;

  std::size_t input_width() const noexcept { return width_; }
  const Warnings& warnings() const noexcept { return warnings_; }

 protected:
  explicit FittedModel(std::size_t width) : width_(width) {}
  virtual std::vector<double> score(const Matrix& x) const = 0;

  std::size_t width_ = 0;
  Warnings warnings_;
};

/// Settings used when no tuning is performed. `features` is the design
/// matrix width (RF uses floor(sqrt(features)) for mtry).
ParamSetting default_setting(LearnerKind kind, std::size_t features);

std::unique_ptr<FittedModel> fit(LearnerKind kind, const Matrix& x, std::span<const std::uint8_t> y,
                                 const ParamSetting& setting, std::uint64_t seed);

/// Fits one model per setting on (x, y) and scores `test`. Gives the same
/// scores as calling fit() and predict() for each setting with this seed;
/// learners override it to share work between settings.
std::vector<std::vector<double>> fit_predict_many(LearnerKind kind, const Matrix& x, std::span<const std::uint8_t> y,
                                                  const Matrix& test, std::span<const ParamSetting> settings,
                                                  std::uint64_t seed);

/// Column means and standard deviations of a training matrix; constant
/// columns get a unit scale.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

/// Training rows sorted lexicographically by feature values, then label.
/// Learners whose fit should not depend on row order solve on this order.
std::vector<RowIndex> canonical_row_order(const Matrix& x, std::span<const std::uint8_t> y);

inline double logistic(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

}  // namespace spcv
