#pragma once

#include <cstdint>
#include <vector>

#include "spcv/dataset.hpp"
#include "spcv/kernels.hpp"

namespace spcv {

/// Parameters of a synthetic spatially autocorrelated classification problem.
struct FieldSpec {
  std::size_t n = 600;
  double width = 1.0;
  double height = 1.0;
  double range = 0.3;   // correlation length of the latent fields
  double sill = 1.0;    // marginal variance of the latent fields
  double nugget = 0.0;  // variance of the iid component
  std::size_t n_informative = 3;
  std::size_t n_noise = 0;
  double intercept = -1.1;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Points iid uniform on [0, width] x [0, height].
std::vector<Point> sample_coordinates(const FieldSpec& spec);

/// Samples zero-mean Gaussian fields with exponential covariance at a fixed
/// set of sites. The covariance is factorised once; each draw costs one
/// triangular matrix-vector product. Sites sharing a coordinate always
/// receive the same value.
class GaussianFieldSampler {
 public:
  GaussianFieldSampler(std::span<const Point> coords, double range, double sill, double nugget,
                       kernels::Exec exec = kernels::Exec::serial);

  std::vector<double> draw(std::uint64_t seed) const;

  /// Diagonal jitter that made the factorisation succeed.
  double jitter() const noexcept { return jitter_; }

 private:
  std::vector<std::size_t> site_of_;  // point -> unique site
  std::size_t sites_ = 0;
  std::vector<double> lower_;  // row-major Cholesky factor of the site covariance
  double jitter_ = 0.0;
};

/// One field draw; n must not exceed 3000.
std::vector<double> gaussian_random_field(std::span<const Point> coords, double range, double sill, double nugget,
                                          std::uint64_t seed);

/// Builds a dataset whose label follows logistic(intercept + sum of the
/// informative fields). Feature columns are `f1..fK` (the fields) followed by
/// `noise1..noiseM` (iid standard normal). Throws if the labels come out
/// single-class.
Dataset make_classification(const FieldSpec& spec, kernels::Exec exec = kernels::Exec::serial);

}  // namespace spcv
