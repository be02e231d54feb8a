#include "spcv/learners/learner.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "spcv/learners/boosting.hpp"
#include "spcv/learners/forest.hpp"
#include "spcv/learners/glm.hpp"
#include "spcv/learners/svm.hpp"
#include "spcv/learners/wknn.hpp"

namespace spcv {

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::glm:
      return "glm";
    case LearnerKind::wknn:
      return "wknn";
    case LearnerKind::rf:
      return "rf";
    case LearnerKind::brt:
      return "brt";
    case LearnerKind::svm:
      return "svm";
  }
  return "?";
}

LearnerKind parse_learner(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto kind : kAllLearners)
    if (to_string(kind) == t) return kind;
  throw Error("unknown learner '" + text + "' (expected glm, wknn, rf, brt or svm)");
}

std::vector<double> FittedModel::predict(const Matrix& x) const {
  if (x.cols() != width_)
    throw Error("predict: query has " + std::to_string(x.cols()) + " columns, model was trained on " +
                std::to_string(width_));
  return score(x);
}

ParamSetting default_setting(LearnerKind kind, std::size_t features) {
  switch (kind) {
    case LearnerKind::glm:
      return {};
    case LearnerKind::wknn:
      return {{"k", std::int64_t{7}}, {"distance", std::int64_t{2}}, {"kernel", std::string("optimal")}};
    case LearnerKind::rf: {
      std::int64_t mtry = 1;
      while (static_cast<std::size_t>((mtry + 1) * (mtry + 1)) <= features) ++mtry;
      return {{"mtry", mtry}, {"num_trees", std::int64_t{500}}};
    }
    case LearnerKind::brt:
      return {{"n_tree", std::int64_t{100}}, {"shrinkage", 0.1}, {"interaction_depth", std::int64_t{1}}};
    case LearnerKind::svm:
      return {{"C", 1.0}, {"sigma", 1.0}};
  }
  return {};
}

namespace {

std::size_t positive_count(const ParamSetting& s, const std::string& name, std::size_t fallback) {
  if (!s.contains(name)) return fallback;
  const auto v = s.integer(name);
  if (v < 1) throw Error(name + " must be >= 1");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::unique_ptr<FittedModel> fit(LearnerKind kind, const Matrix& x, std::span<const std::uint8_t> y,
                                 const ParamSetting& setting, std::uint64_t seed) {
  switch (kind) {
    case LearnerKind::glm:
      return fit_glm(x, y);
    case LearnerKind::wknn:
      return fit_wknn(x, y, WknnSetting::from(setting));
    case LearnerKind::rf: {
      const auto def = default_setting(kind, x.cols());
      return fit_rf(x, y, positive_count(setting, "mtry", static_cast<std::size_t>(def.integer("mtry"))),
                    positive_count(setting, "num_trees", 500), seed);
    }
    case LearnerKind::brt:
      return fit_brt(x, y, BoostingSetting::from(setting));
    case LearnerKind::svm:
      return fit_svm(x, y, SvmSetting::from(setting));
  }
  throw Error("fit: unknown learner");
}

std::vector<std::vector<double>> fit_predict_many(LearnerKind kind, const Matrix& x, std::span<const std::uint8_t> y,
                                                  const Matrix& test, std::span<const ParamSetting> settings,
                                                  std::uint64_t seed) {
  std::vector<std::vector<double>> out(settings.size());
  if (settings.empty()) return out;
  switch (kind) {
    case LearnerKind::rf: {
      // Forests sharing mtry are prefixes of the largest one.
      if (x.rows() != y.size()) throw Error("random forest: x and y differ in length");
      const ForestBuilder builder(x, y);
      const auto def = static_cast<std::size_t>(default_setting(kind, x.cols()).integer("mtry"));
      std::map<std::size_t, std::vector<std::size_t>> by_mtry;
      for (std::size_t i = 0; i < settings.size(); ++i)
        by_mtry[std::clamp<std::size_t>(positive_count(settings[i], "mtry", def), 1, x.cols())].push_back(i);
      for (const auto& [mtry, members] : by_mtry) {
        std::vector<std::size_t> counts;
        for (auto i : members) counts.push_back(positive_count(settings[i], "num_trees", 500));
        auto curves = builder.vote_curve(test, mtry, counts, seed);
        for (std::size_t m = 0; m < members.size(); ++m) out[members[m]] = std::move(curves[m]);
      }
      return out;
    }
    case LearnerKind::svm: {
      std::vector<SvmSetting> s;
      for (const auto& setting : settings) s.push_back(SvmSetting::from(setting));
      return fit_predict_svm_many(x, y, test, s);
    }
    case LearnerKind::brt:
      for (std::size_t i = 0; i < settings.size(); ++i)
        out[i] = fit_predict_brt(x, y, test, BoostingSetting::from(settings[i]));
      return out;
    default:
      for (std::size_t i = 0; i < settings.size(); ++i) out[i] = fit(kind, x, y, settings[i], seed)->predict(test);
      return out;
  }
}

std::vector<RowIndex> canonical_row_order(const Matrix& x, std::span<const std::uint8_t> y) {
  std::vector<RowIndex> order(x.rows());
  std::iota(order.begin(), order.end(), RowIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](RowIndex a, RowIndex b) {
    for (std::size_t c = 0; c < x.cols(); ++c)
      if (x(a, c) != x(b, c)) return x(a, c) < x(b, c);
    return y[a] < y[b];
  });
  return order;
}

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const std::size_t n = x.rows(), p = x.cols();
  s.mean.assign(p, 0.0);
  s.scale.assign(p, 1.0);
  if (n == 0) return s;
  for (std::size_t c = 0; c < p; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += x(r, c);
    const double m = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += (x(r, c) - m) * (x(r, c) - m);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    s.mean[c] = m;
    s.scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) throw Error("standardise: column count differs from the training data");
  Matrix z(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) z(r, c) = (x(r, c) - mean[c]) / scale[c];
  return z;
}

}  // namespace spcv
