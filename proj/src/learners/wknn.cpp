#include "spcv/learners/wknn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "spcv/kernels.hpp"

namespace spcv {

namespace {

constexpr double kMinMaxDist = 1e-6;

struct KernelName {
  WknnKernel kernel;
  const char* name;
};

constexpr KernelName kKernelNames[] = {
    {WknnKernel::rectangular, "rectangular"}, {WknnKernel::triangular, "triangular"},
    {WknnKernel::epanechnikov, "epanechnikov"}, {WknnKernel::biweight, "biweight"},
    {WknnKernel::triweight, "triweight"},     {WknnKernel::cos, "cos"},
    {WknnKernel::inv, "inv"},                 {WknnKernel::gaussian, "gaussian"},
    {WknnKernel::optimal, "optimal"},
};

}  // namespace

std::string to_string(WknnKernel kernel) {
  for (const auto& k : kKernelNames)
    if (k.kernel == kernel) return k.name;
  return "?";
}

WknnKernel parse_wknn_kernel(const std::string& text) {
  for (const auto& k : kKernelNames)
    if (text == k.name) return k.kernel;
  throw Error("unknown WKNN kernel '" + text + "'");
}

double kernel_weight(WknnKernel kernel, double d) {
  const double a = std::abs(d);
  switch (kernel) {
    case WknnKernel::rectangular:
      return 1.0;
    case WknnKernel::triangular:
      return 1.0 - a;
    case WknnKernel::epanechnikov:
      return 0.75 * (1.0 - d * d);
    case WknnKernel::biweight:
      return 15.0 / 16.0 * std::pow(1.0 - d * d, 2);
    case WknnKernel::triweight:
      return 35.0 / 32.0 * std::pow(1.0 - d * d, 3);
    case WknnKernel::cos:
      return std::numbers::pi / 4.0 * std::cos(std::numbers::pi * d / 2.0);
    case WknnKernel::inv:
      return 1.0 / (a + 1e-12);
    case WknnKernel::gaussian:
      return std::exp(-d * d / 2.0);
    case WknnKernel::optimal:
      break;
  }
  throw Error("kernel_weight: the optimal kernel is rank based");
}

std::vector<double> optimal_kernel_weights(std::size_t k, std::size_t dims) {
  const double p = static_cast<double>(std::max<std::size_t>(dims, 1));
  const double kk = static_cast<double>(k);
  const double e = 1.0 + 2.0 / p;
  std::vector<double> w(k);
  for (std::size_t i = 1; i <= k; ++i) {
    const double ii = static_cast<double>(i);
    const double v = 1.0 + p / 2.0 - p / (2.0 * std::pow(kk, 2.0 / p)) * (std::pow(ii, e) - std::pow(ii - 1.0, e));
    w[i - 1] = std::max(v, 0.0) / kk;
  }
  return w;
}

WknnSetting WknnSetting::from(const ParamSetting& setting) {
  WknnSetting s;
  if (setting.contains("k")) {
    const auto k = setting.integer("k");
    if (k < 1) throw Error("wknn: k must be >= 1");
    s.k = static_cast<std::size_t>(k);
  }
  if (setting.contains("distance")) {
    const auto d = setting.integer("distance");
    if (d < 1) throw Error("wknn: distance must be >= 1");
    s.distance = static_cast<int>(d);
  }
  if (setting.contains("kernel")) s.kernel = parse_wknn_kernel(setting.text("kernel"));
  return s;
}

std::unique_ptr<WknnModel> fit_wknn(const Matrix& x, std::span<const std::uint8_t> y, const WknnSetting& setting) {
  if (x.rows() == 0) throw Error("wknn: no training rows");
  if (x.rows() != y.size()) throw Error("wknn: x and y differ in length");
  auto model = std::unique_ptr<WknnModel>(new WknnModel(x.cols()));
  model->setting_ = setting;
  // Canonical order: equidistant neighbours are then chosen independently of
  // the order the rows arrived in.
  const auto order = canonical_row_order(x, y);
  const Matrix sorted = x.select_rows(order);
  model->standardizer_ = Standardizer::fit(sorted);
  model->train_ = model->standardizer_.apply(sorted);
  for (auto i : order) model->labels_.push_back(y[i]);
  const std::size_t limit = std::max<std::size_t>(x.rows() - 1, 1);
  model->k_ = std::max<std::size_t>(setting.k, 1);
  if (model->k_ > limit) {
    model->warnings_.push_back("wknn: k = " + std::to_string(setting.k) + " clamped to " + std::to_string(limit));
    model->k_ = limit;
  }
  if (setting.kernel == WknnKernel::optimal) model->rank_weights_ = optimal_kernel_weights(model->k_, x.cols());
  return model;
}

std::vector<double> WknnModel::predict_counting(const Matrix& x, std::size_t& fallbacks) const {
  if (x.cols() != width_) throw Error("wknn: query width differs from training width");
  const Matrix q = standardizer_.apply(x);
  const auto n = train_.rows();
  const auto k = k_;
  const auto wanted = std::min(k + 1, n);

  std::vector<double> out(q.rows());
  std::vector<double> dist(n);
  std::vector<std::size_t> idx(n);
  std::vector<double> w(k);
  for (std::size_t r = 0; r < q.rows(); ++r) {
    for (std::size_t j = 0; j < n; ++j) dist[j] = kernels::minkowski(q.row(r), train_.row(j), setting_.distance);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto closer = [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(wanted), idx.end(), closer);

    const double maxdist = std::max(wanted > k ? dist[idx[k]] : dist[idx[wanted - 1]], kMinMaxDist);
    double wsum = 0.0, wpos = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      w[i] = setting_.kernel == WknnKernel::optimal ? rank_weights_[i]
                                                    : kernel_weight(setting_.kernel, dist[idx[i]] / maxdist);
      wsum += w[i];
      wpos += w[i] * labels_[idx[i]];
    }
    if (!(wsum > 0.0)) {
      ++fallbacks;
      wsum = static_cast<double>(k);
      wpos = 0.0;
      for (std::size_t i = 0; i < k; ++i) wpos += labels_[idx[i]];
    }
    out[r] = wpos / wsum;
  }
  return out;
}

std::vector<double> WknnModel::score(const Matrix& x) const {
  std::size_t fallbacks = 0;
  return predict_counting(x, fallbacks);
}

}  // namespace spcv
