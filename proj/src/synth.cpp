#include "spcv/synth.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <map>

#include "spcv/rng.hpp"

namespace spcv {

namespace {

constexpr std::size_t kMaxDenseSites = 3000;
constexpr double kBaseJitter = 1e-10;
constexpr int kJitterEscalations = 5;

}  // namespace

void FieldSpec::validate() const {
  if (!(range > 0)) throw Error("field spec: range must be > 0");
  if (!(sill >= 0)) throw Error("field spec: sill must be >= 0");
  if (!(nugget >= 0)) throw Error("field spec: nugget must be >= 0");
  if (n < 10) throw Error("field spec: n must be >= 10");
  if (n_informative + n_noise < 1) throw Error("field spec: need at least one predictor");
  if (!(width > 0) || !(height > 0)) throw Error("field spec: extent must be positive");
  if (!std::isfinite(intercept)) throw Error("field spec: intercept must be finite");
}

std::vector<Point> sample_coordinates(const FieldSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, {hash_text("coordinates")}));
  std::vector<Point> pts(spec.n);
  for (auto& p : pts) {
    p.x = rng.uniform() * spec.width;
    p.y = rng.uniform() * spec.height;
  }
  return pts;
}

GaussianFieldSampler::GaussianFieldSampler(std::span<const Point> coords, double range, double sill, double nugget,
                                           kernels::Exec exec) {
  if (!(range > 0) || sill < 0 || nugget < 0) throw Error("gaussian field: invalid covariance parameters");

  std::map<std::pair<double, double>, std::size_t> index;
  std::vector<Point> sites;
  site_of_.reserve(coords.size());
  for (const auto& p : coords) {
    auto [it, inserted] = index.try_emplace({p.x, p.y}, sites.size());
    if (inserted) sites.push_back(p);
    site_of_.push_back(it->second);
  }
  sites_ = sites.size();
  if (sites_ > kMaxDenseSites)
    throw Error("gaussian field: " + std::to_string(sites_) + " sites exceed the dense limit of 3000");

  std::vector<double> cov(sites_ * sites_);
  kernels::exponential_covariance(sites, range, sill, nugget, cov, exec);
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> c(cov.data(), static_cast<Eigen::Index>(sites_), static_cast<Eigen::Index>(sites_));

  double jitter = kBaseJitter;
  for (int attempt = 0; attempt <= kJitterEscalations; ++attempt, jitter *= 10) {
    Eigen::MatrixXd a = c;
    a.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      RowMajor l = llt.matrixL();
      lower_.assign(l.data(), l.data() + l.size());
      jitter_ = jitter;
      return;
    }
  }
  throw Error("gaussian field: covariance factorisation failed after jitter escalation");
}

std::vector<double> GaussianFieldSampler::draw(std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<double> z(sites_);
  for (auto& v : z) v = rng.normal();
  std::vector<double> site_values(sites_, 0.0);
  for (std::size_t i = 0; i < sites_; ++i) {
    const double* row = lower_.data() + i * sites_;
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += row[j] * z[j];
    site_values[i] = s;
  }
  std::vector<double> out(site_of_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = site_values[site_of_[i]];
  return out;
}

std::vector<double> gaussian_random_field(std::span<const Point> coords, double range, double sill, double nugget,
                                          std::uint64_t seed) {
  return GaussianFieldSampler(coords, range, sill, nugget).draw(seed);
}

Dataset make_classification(const FieldSpec& spec, kernels::Exec exec) {
  spec.validate();
  const auto coords = sample_coordinates(spec);
  const auto n = spec.n;
  const auto p = spec.n_informative + spec.n_noise;

  FeatureSchema schema;
  Matrix features(n, p);
  std::vector<double> eta(n, spec.intercept);

  if (spec.n_informative > 0) {
    const GaussianFieldSampler sampler(coords, spec.range, spec.sill, spec.nugget, exec);
    for (std::size_t j = 0; j < spec.n_informative; ++j) {
      const auto field = sampler.draw(derive_seed(spec.seed, {hash_text("field"), j}));
      for (std::size_t i = 0; i < n; ++i) {
        features(i, j) = field[i];
        eta[i] += field[i];
      }
      schema.columns.push_back(ColumnSpec::numeric("f" + std::to_string(j + 1)));
    }
  }

  Rng label_rng(derive_seed(spec.seed, {hash_text("labels")}));
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double prob = 1.0 / (1.0 + std::exp(-eta[i]));
    labels[i] = label_rng.uniform() < prob ? 1 : 0;
  }

  Rng noise_rng(derive_seed(spec.seed, {hash_text("noise")}));
  for (std::size_t j = 0; j < spec.n_noise; ++j) {
    for (std::size_t i = 0; i < n; ++i) features(i, spec.n_informative + j) = noise_rng.normal();
    schema.columns.push_back(ColumnSpec::numeric("noise" + std::to_string(j + 1)));
  }

  Dataset data(std::move(schema), std::move(features), coords, std::move(labels));
  if (!data.has_both_classes())
    throw Error("synthetic labels are single-class (prevalence " +
                std::to_string(static_cast<double>(data.positives()) / static_cast<double>(n)) +
                "); move the intercept towards 0");
  return data;
}

}  // namespace spcv
