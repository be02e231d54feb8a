#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference
// implementation and an OpenMP implementation that must agree with it
// exactly; `Exec` selects between them. Code already running inside the
// experiment worker pool calls the serial variants.

#include <span>

#include "spcv/common.hpp"

namespace spcv::kernels {

enum class Exec { serial, parallel };

/// True when the library was built with OpenMP.
bool openmp_enabled() noexcept;

/// Labels each point with the index of its nearest centroid (squared
/// Euclidean distance, lowest index on ties). Returns the number of labels
/// that changed.
std::size_t assign_nearest_serial(std::span<const Point> points, std::span<const Point> centroids, std::span<int> labels);
std::size_t assign_nearest_omp(std::span<const Point> points, std::span<const Point> centroids, std::span<int> labels);
std::size_t assign_nearest(std::span<const Point> points, std::span<const Point> centroids, std::span<int> labels,
                           Exec exec);

/// Fills the row-major n x n matrix sill*exp(-d/range) + nugget*[d == 0].
void exponential_covariance_serial(std::span<const Point> coords, double range, double sill, double nugget,
                                   std::span<double> out);
void exponential_covariance_omp(std::span<const Point> coords, double range, double sill, double nugget,
                                std::span<double> out);
void exponential_covariance(std::span<const Point> coords, double range, double sill, double nugget,
                            std::span<double> out, Exec exec);

/// Minkowski distance of integer order between two vectors. Evaluated as
/// m * (sum (|d_i|/m)^order)^(1/order) with m = max |d_i| so large orders
/// do not overflow.
double minkowski(std::span<const double> a, std::span<const double> b, int order) noexcept;

/// out(i, j) = minkowski(queries.row(i), reference.row(j), order), row-major.
void minkowski_distances_serial(const Matrix& queries, const Matrix& reference, int order, std::span<double> out);
void minkowski_distances_omp(const Matrix& queries, const Matrix& reference, int order, std::span<double> out);
void minkowski_distances(const Matrix& queries, const Matrix& reference, int order, std::span<double> out, Exec exec);

/// out(i, j) = ||a.row(i) - b.row(j)||^2, row-major.
void squared_distances_serial(const Matrix& a, const Matrix& b, std::span<double> out);
void squared_distances_omp(const Matrix& a, const Matrix& b, std::span<double> out);
void squared_distances(const Matrix& a, const Matrix& b, std::span<double> out, Exec exec);

}  // namespace spcv::kernels
