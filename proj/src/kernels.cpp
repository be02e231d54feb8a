#include "spcv/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spcv::kernels {

namespace {

inline double sq_dist(const Point& a, const Point& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline int nearest(const Point& p, std::span<const Point> centroids) {
  int best = 0;
  double best_d = sq_dist(p, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = sq_dist(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

inline double covariance(const Point& a, const Point& b, double range, double sill, double nugget) {
  const double d = std::sqrt(sq_dist(a, b));
  return sill * std::exp(-d / range) + (d == 0.0 ? nugget : 0.0);
}

inline double ipow(double x, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

inline double sq_euclid(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

}  // namespace

bool openmp_enabled() noexcept {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

// ---------------------------------------------------------------------------

std::size_t assign_nearest_serial(std::span<const Point> points, std::span<const Point> centroids, std::span<int> labels) {
  std::size_t changed = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int c = nearest(points[i], centroids);
    if (labels[i] != c) {
      labels[i] = c;
      ++changed;
    }
  }
  return changed;
}

std::size_t assign_nearest_omp(std::span<const Point> points, std::span<const Point> centroids, std::span<int> labels) {
  std::size_t changed = 0;
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for reduction(+ : changed) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const int c = nearest(points[static_cast<std::size_t>(i)], centroids);
    if (labels[static_cast<std::size_t>(i)] != c) {
      labels[static_cast<std::size_t>(i)] = c;
      ++changed;
    }
  }
  return changed;
}

std::size_t assign_nearest(std::span<const Point> points, std::span<const Point> centroids, std::span<int> labels,
                           Exec exec) {
  return exec == Exec::parallel ? assign_nearest_omp(points, centroids, labels)
                                : assign_nearest_serial(points, centroids, labels);
}

// ---------------------------------------------------------------------------

void exponential_covariance_serial(std::span<const Point> coords, double range, double sill, double nugget,
                                   std::span<double> out) {
  const auto n = coords.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double c = covariance(coords[i], coords[j], range, sill, nugget);
      out[i * n + j] = c;
      out[j * n + i] = c;
    }
  }
}

void exponential_covariance_omp(std::span<const Point> coords, double range, double sill, double nugget,
                                std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(coords.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j <= ui; ++j) {
      const double c = covariance(coords[ui], coords[j], range, sill, nugget);
      out[ui * coords.size() + j] = c;
      out[j * coords.size() + ui] = c;
    }
  }
}

void exponential_covariance(std::span<const Point> coords, double range, double sill, double nugget,
                            std::span<double> out, Exec exec) {
  if (exec == Exec::parallel)
    exponential_covariance_omp(coords, range, sill, nugget, out);
  else
    exponential_covariance_serial(coords, range, sill, nugget, out);
}

// ---------------------------------------------------------------------------

double minkowski(std::span<const double> a, std::span<const double> b, int order) noexcept {
  if (order == 2) return std::sqrt(sq_euclid(a, b));
  if (order == 1) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return s;
  }
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += ipow(std::abs(a[k] - b[k]) / m, order);
  return m * std::pow(s, 1.0 / order);
}

void minkowski_distances_serial(const Matrix& queries, const Matrix& reference, int order, std::span<double> out) {
  const auto nr = reference.rows();
  for (std::size_t i = 0; i < queries.rows(); ++i)
    for (std::size_t j = 0; j < nr; ++j) out[i * nr + j] = minkowski(queries.row(i), reference.row(j), order);
}

void minkowski_distances_omp(const Matrix& queries, const Matrix& reference, int order, std::span<double> out) {
  const auto nr = reference.rows();
  const auto nq = static_cast<std::ptrdiff_t>(queries.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < nq; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < nr; ++j) out[ui * nr + j] = minkowski(queries.row(ui), reference.row(j), order);
  }
}

void minkowski_distances(const Matrix& queries, const Matrix& reference, int order, std::span<double> out, Exec exec) {
  if (exec == Exec::parallel)
    minkowski_distances_omp(queries, reference, order, out);
  else
    minkowski_distances_serial(queries, reference, order, out);
}

// ---------------------------------------------------------------------------

void squared_distances_serial(const Matrix& a, const Matrix& b, std::span<double> out) {
  const auto nb = b.rows();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < nb; ++j) out[i * nb + j] = sq_euclid(a.row(i), b.row(j));
}

void squared_distances_omp(const Matrix& a, const Matrix& b, std::span<double> out) {
  const auto nb = b.rows();
  const auto na = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < na; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < nb; ++j) out[ui * nb + j] = sq_euclid(a.row(ui), b.row(j));
  }
}

void squared_distances(const Matrix& a, const Matrix& b, std::span<double> out, Exec exec) {
  if (exec == Exec::parallel)
    squared_distances_omp(a, b, out);
  else
    squared_distances_serial(a, b, out);
}

}  // namespace spcv::kernels
