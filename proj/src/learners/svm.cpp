#include "spcv/learners/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spcv/kernels.hpp"

namespace spcv {

SvmSetting SvmSetting::from(const ParamSetting& setting) {
  SvmSetting s;
  if (setting.contains("C")) s.cost = setting.real("C");
  if (setting.contains("sigma")) s.sigma = setting.real("sigma");
  return s;
}

namespace {

constexpr double kTau = 1e-12;

void check_inputs(const Matrix& x, std::span<const std::uint8_t> y, const SvmSetting& s) {
  if (x.rows() == 0) throw Error("svm: no training rows");
  if (y.size() != x.rows()) throw Error("svm: x and y differ in length");
  if (!(s.cost > 0.0) || !std::isfinite(s.cost)) throw Error("svm: C must be positive");
  if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) throw Error("svm: sigma must be positive");
  std::size_t pos = 0;
  for (auto v : y) pos += v;
  if (pos == 0 || pos == y.size()) throw Error("svm: training labels contain a single class");
}

std::vector<double> rbf(std::span<const double> sq, double sigma) {
  std::vector<double> k(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) k[i] = std::exp(-sigma * sq[i]);
  return k;
}

// Decision values for queries given query-to-train squared distances.
std::vector<double> decide(std::span<const double> sq, std::size_t n_train, std::span<const std::uint8_t> y,
                           const SvmSolution& sol, double sigma) {
  const std::size_t m = n_train ? sq.size() / n_train : 0;
  std::vector<double> out(m, -sol.rho);
  for (std::size_t q = 0; q < m; ++q) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_train; ++i) {
      if (sol.alpha[i] == 0.0) continue;
      s += (sol.alpha[i] * (y[i] ? 1.0 : -1.0)) * std::exp(-sigma * sq[q * n_train + i]);
    }
    out[q] += s;
  }
  return out;
}

}  // namespace

SvmSolution solve_svm_dual(std::span<const double> kernel, std::span<const std::uint8_t> labels, double cost,
                           const SvmOptions& options) {
  const std::size_t n = labels.size();
  if (kernel.size() != n * n) throw Error("svm: kernel matrix has the wrong size");
  std::vector<double> y(n), alpha(n, 0.0), grad(n, -1.0);
  for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] ? 1.0 : -1.0;
  auto K = [&](std::size_t i, std::size_t j) { return kernel[i * n + j]; };
  auto is_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < cost) || (y[t] < 0 && alpha[t] > 0); };
  auto is_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < cost); };

  const std::size_t cap = options.max_iterations ? options.max_iterations : 10 * n * n;
  SvmSolution sol;
  while (true) {
    // i: maximal violator from the "up" set.
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t)
      if (is_up(t) && -y[t] * grad[t] >= gmax) {
        if (-y[t] * grad[t] > gmax || i == n) i = t;
        gmax = std::max(gmax, -y[t] * grad[t]);
      }
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (!is_low(t)) continue;
      const double v = -y[t] * grad[t];
      gmin = std::min(gmin, v);
      if (i == n) continue;
      const double b = gmax - v;
      if (b > 0) {
        double a = K(i, i) + K(t, t) - 2.0 * K(i, t);
        if (a <= 0) a = kTau;
        const double score = -(b * b) / a;
        if (score < best) {
          best = score;
          j = t;
        }
      }
    }
    if (i == n || j == n || gmax - gmin < options.tolerance) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= cap) break;
    ++sol.iterations;

    const double old_i = alpha[i], old_j = alpha[j];
    double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
    if (quad <= 0) quad = kTau;
    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > cost) {
          alpha[i] = cost;
          alpha[j] = cost - diff;
        }
      } else if (alpha[j] > cost) {
        alpha[j] = cost;
        alpha[i] = cost + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > cost) {
        if (alpha[i] > cost) {
          alpha[i] = cost;
          alpha[j] = sum - cost;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > cost) {
        if (alpha[j] > cost) {
          alpha[j] = cost;
          alpha[i] = sum - cost;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (y[i] * K(t, i) * di + y[j] * K(t, j) * dj);
  }

  // rho: average over free vectors, else the midpoint of the feasible range.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= cost) {
      if (y[t] < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  sol.rho = n_free ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (grad[t] - 1.0);
  sol.objective = obj / 2.0;
  sol.alpha = std::move(alpha);
  return sol;
}

double SvmModel::equality_residual() const {
  double s = 0.0;
  for (std::size_t i = 0; i < labels_.size(); ++i) s += solution_.alpha[i] * (labels_[i] ? 1.0 : -1.0);
  return std::abs(s);
}

std::vector<double> SvmModel::score(const Matrix& x) const {
  const Matrix z = standardizer_.apply(x);
  std::vector<double> sq(z.rows() * support_.rows());
  kernels::squared_distances(z, support_, sq, kernels::Exec::serial);
  std::vector<double> out(z.rows(), -solution_.rho);
  const std::size_t m = support_.rows();
  for (std::size_t q = 0; q < z.rows(); ++q) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += coefficients_[i] * std::exp(-sigma_ * sq[q * m + i]);
    out[q] += s;
  }
  return out;
}

std::unique_ptr<SvmModel> fit_svm(const Matrix& x_in, std::span<const std::uint8_t> y_in, const SvmSetting& setting,
                                  const SvmOptions& options) {
  check_inputs(x_in, y_in, setting);
  // The solver stops at a KKT tolerance, so its iterate depends on row order;
  // a canonical order makes the fit a function of the training set.
  const auto order = canonical_row_order(x_in, y_in);
  const Matrix x = x_in.select_rows(order);
  std::vector<std::uint8_t> y;
  y.reserve(order.size());
  for (auto i : order) y.push_back(y_in[i]);
  auto model = std::unique_ptr<SvmModel>(new SvmModel(x.cols()));
  model->standardizer_ = Standardizer::fit(x);
  const Matrix z = model->standardizer_.apply(x);
  std::vector<double> sq(z.rows() * z.rows());
  kernels::squared_distances(z, z, sq, kernels::Exec::serial);
  model->solution_ = solve_svm_dual(rbf(sq, setting.sigma), y, setting.cost, options);
  model->sigma_ = setting.sigma;
  model->labels_.assign(y_in.begin(), y_in.end());
  Matrix support(0, z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const double a = model->solution_.alpha[i];
    if (a == 0.0) continue;
    support.append_row(z.row(i));
    model->coefficients_.push_back(a * (y[i] ? 1.0 : -1.0));
  }
  model->support_ = std::move(support);
  // Report the dual coefficients in the caller's row order.
  std::vector<double> alpha(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) alpha[order[i]] = model->solution_.alpha[i];
  model->solution_.alpha = std::move(alpha);
  if (!model->solution_.converged)
    model->warnings_.push_back("svm: iteration cap reached before the KKT tolerance was met");
  return model;
}

std::vector<std::vector<double>> fit_predict_svm_many(const Matrix& x_in, std::span<const std::uint8_t> y_in,
                                                      const Matrix& test, std::span<const SvmSetting> settings,
                                                      const SvmOptions& options) {
  if (test.cols() != x_in.cols()) throw Error("svm: query width differs from training width");
  for (const auto& s : settings) check_inputs(x_in, y_in, s);
  const auto order = canonical_row_order(x_in, y_in);
  const Matrix x = x_in.select_rows(order);
  std::vector<std::uint8_t> y;
  y.reserve(order.size());
  for (auto i : order) y.push_back(y_in[i]);
  const Standardizer st = Standardizer::fit(x);
  const Matrix z = st.apply(x), zt = st.apply(test);
  std::vector<double> sq(z.rows() * z.rows()), sq_test(zt.rows() * z.rows());
  kernels::squared_distances(z, z, sq, kernels::Exec::serial);
  kernels::squared_distances(zt, z, sq_test, kernels::Exec::serial);
  std::vector<std::vector<double>> out;
  out.reserve(settings.size());
  for (const auto& s : settings) {
    const auto sol = solve_svm_dual(rbf(sq, s.sigma), y, s.cost, options);
    out.push_back(decide(sq_test, z.rows(), y, sol, s.sigma));
  }
  return out;
}

}  // namespace spcv
