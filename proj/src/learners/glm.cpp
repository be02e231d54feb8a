#include "spcv/learners/glm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>

namespace spcv {

namespace {

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

}  // namespace

double binomial_deviance(std::span<const double> eta, std::span<const std::uint8_t> y) {
  double dev = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) dev += y[i] ? softplus(-eta[i]) : softplus(eta[i]);
  return 2.0 * dev;
}

std::vector<double> GlmModel::score(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double eta = beta_[0];
    for (std::size_t j = 0; j < x.cols(); ++j) eta += beta_[j + 1] * x(i, j);
    out[i] = logistic(eta);
  }
  return out;
}

std::unique_ptr<GlmModel> fit_glm(const Matrix& x, std::span<const std::uint8_t> y, const GlmOptions& options) {
  const auto n = x.rows();
  const auto p = x.cols();
  if (n != y.size()) throw Error("glm: x and y differ in length");
  const auto pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), std::uint8_t{1}));
  if (pos == 0 || pos == n) throw Error("glm: both classes are required");

  const auto d = static_cast<Eigen::Index>(p + 1);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), d);
  for (std::size_t i = 0; i < n; ++i) {
    design(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (std::size_t j = 0; j < p; ++j) design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = x(i, j);
  }
  Eigen::VectorXd yv(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) yv[static_cast<Eigen::Index>(i)] = y[i];

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  const double prevalence = static_cast<double>(pos) / static_cast<double>(n);
  beta[0] = std::log(prevalence / (1.0 - prevalence));

  std::vector<double> eta(n);
  auto linear_predictor = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd e = design * b;
    for (std::size_t i = 0; i < n; ++i) eta[i] = e[static_cast<Eigen::Index>(i)];
  };
  linear_predictor(beta);
  double dev = binomial_deviance(eta, y);

  auto irls_step = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(n)), z(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double mu = logistic(eta[i]);
      const double var = std::max(mu * (1.0 - mu), 1e-12);
      w[ii] = var;
      z[ii] = eta[i] + (yv[ii] - mu) / var;
    }
    Eigen::MatrixXd a = design.transpose() * w.asDiagonal() * design;
    a.diagonal().array() += options.ridge;
    const Eigen::VectorXd rhs = design.transpose() * (w.asDiagonal() * z);
    Eigen::VectorXd next = a.ldlt().solve(rhs);
    if (!next.allFinite()) next = b;
    return next;
  };

  auto model = std::unique_ptr<GlmModel>(new GlmModel(p));
  for (int it = 1; it <= options.max_iterations; ++it) {
    beta = irls_step(beta);
    linear_predictor(beta);
    const double next_dev = binomial_deviance(eta, y);
    model->iterations_ = it;
    const bool done = std::abs(next_dev - dev) / (std::abs(next_dev) + 0.1) < options.tolerance;
    dev = next_dev;
    if (done) {
      model->converged_ = true;
      // One more Newton step costs little and tightens the score equations.
      const Eigen::VectorXd polished = irls_step(beta);
      linear_predictor(polished);
      const double polished_dev = binomial_deviance(eta, y);
      if (polished_dev <= dev) {
        beta = polished;
        dev = polished_dev;
      } else {
        linear_predictor(beta);
      }
      break;
    }
  }

  model->beta_.assign(beta.data(), beta.data() + beta.size());
  model->deviance_ = dev;
  if (!model->converged_)
    model->warnings_.push_back("glm: IRLS did not converge in " + std::to_string(options.max_iterations) + " iterations");
  {
    // Coefficients on the standardised scale. Checked after convergence too:
    // on separable data the deviance tends to 0 and the relative criterion is
    // met while the coefficients are still diverging.
    for (std::size_t j = 0; j < p; ++j) {
      double mean = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) sq += (x(i, j) - mean) * (x(i, j) - mean);
      const double sd = std::sqrt(sq / static_cast<double>(n));
      if (std::abs(model->beta_[j + 1] * sd) > options.separation_threshold) model->quasi_separation_ = true;
    }
    if (model->quasi_separation_) model->warnings_.push_back("glm: quasi-complete separation detected");
  }
  return model;
}

}  // namespace spcv
