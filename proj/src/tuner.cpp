#include "spcv/tuner.hpp"

#include <cmath>
#include <numeric>

#include "spcv/metrics.hpp"
#include "spcv/rng.hpp"

namespace spcv {

void ParamSpace::validate() const {
  for (const auto& p : params) {
    if (p.type == ParamType::categorical) {
      if (p.levels.empty()) throw Error("parameter '" + p.name + "' has no levels");
      continue;
    }
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || p.lo > p.hi)
      throw Error("parameter '" + p.name + "' has invalid bounds");
    if (p.type == ParamType::log2_real && p.lo <= 0.0)
      throw Error("parameter '" + p.name + "' needs positive bounds on the log2 scale");
  }
}

ParamSpace table1_space(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::glm:
      throw Error("glm has no hyperparameters to tune");
    case LearnerKind::brt:
      return {{{"n_tree", ParamType::integer, 100, 10000, {}},
               {"shrinkage", ParamType::real, 1e-4, 1.5, {}},
               {"interaction_depth", ParamType::integer, 1, 40, {}}}};
    case LearnerKind::rf:
      return {{{"mtry", ParamType::integer, 1, 11, {}}, {"num_trees", ParamType::integer, 10, 10000, {}}}};
    case LearnerKind::svm:
      return {{{"C", ParamType::log2_real, std::ldexp(1.0, -12), std::ldexp(1.0, 15), {}},
               {"sigma", ParamType::log2_real, std::ldexp(1.0, -15), std::ldexp(1.0, 6), {}}}};
    case LearnerKind::wknn:
      return {{{"k", ParamType::integer, 10, 400, {}},
               {"distance", ParamType::integer, 1, 100, {}},
               {"kernel",
                ParamType::categorical,
                0,
                0,
                {"rectangular", "triangular", "epanechnikov", "biweight", "triweight", "cos", "inv", "gaussian",
                 "optimal"}}}};
  }
  throw Error("unknown learner");
}

ParamSetting sample_setting(const ParamSpace& space, std::uint64_t seed, std::size_t index) {
  Rng rng(derive_seed(seed, {hash_text("trial"), index}));
  ParamSetting s;
  for (const auto& p : space.params) {
    switch (p.type) {
      case ParamType::integer:
        s.set(p.name, rng.integer(static_cast<std::int64_t>(std::ceil(p.lo)), static_cast<std::int64_t>(p.hi)));
        break;
      case ParamType::real:
        s.set(p.name, p.lo + (p.hi - p.lo) * rng.uniform_open_closed());
        break;
      case ParamType::log2_real: {
        const double a = std::log2(p.lo), b = std::log2(p.hi);
        s.set(p.name, std::exp2(a + (b - a) * rng.uniform()));
        break;
      }
      case ParamType::categorical:
        s.set(p.name, p.levels[rng.below(p.levels.size())]);
        break;
    }
  }
  return s;
}

std::vector<ParamSetting> sample_random(const ParamSpace& space, std::size_t budget, std::uint64_t seed) {
  space.validate();
  std::vector<ParamSetting> out;
  out.reserve(budget);
  for (std::size_t i = 0; i < budget; ++i) out.push_back(sample_setting(space, seed, i));
  return out;
}

std::vector<Trial> TrialCache::lookup(std::uint64_t key) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  return it == entries_.end() ? std::vector<Trial>{} : it->second;
}

void TrialCache::store(std::uint64_t key, std::vector<Trial> trials) {
  std::lock_guard lock(mutex_);
  auto& slot = entries_[key];
  if (trials.size() > slot.size()) slot = std::move(trials);
}

namespace {

struct InnerFold {
  Matrix x_train, x_test;
  std::vector<std::uint8_t> y_train, y_test;
  bool usable = false;  // training rows hold both classes
};

}  // namespace

TuneResult tune(LearnerKind kind, const TuneData& data, const TuneOptions& options) {
  const std::size_t n = data.x.rows();
  if (data.y.size() != n || data.coords.size() != n) throw Error("tune: data columns differ in length");
  if (!data.row_ids.empty() && data.row_ids.size() != n) throw Error("tune: row_ids has the wrong length");

  TuneResult result;
  result.budget = options.budget;
  result.best = default_setting(kind, data.x.cols());
  if (options.budget == 0 || kind == LearnerKind::glm) return result;

  std::size_t pos = 0;
  for (auto v : data.y) pos += v;
  if (pos == 0 || pos == n) throw Error("tune: training data contains a single class");

  const ParamSpace space = table1_space(kind);
  std::vector<Trial> trials;
  if (options.cache) trials = options.cache->lookup(options.seed);
  if (trials.size() > options.budget) trials.resize(options.budget);

  if (trials.size() < options.budget) {
    const std::size_t first = trials.size();
    std::vector<ParamSetting> pending;
    for (std::size_t i = first; i < options.budget; ++i) pending.push_back(sample_setting(space, options.seed, i));

    const PartitionSpec spec{options.k_inner, 1, options.strategy, derive_seed(options.seed, {hash_text("inner")})};
    const FoldAssignment folds = make_folds(data.coords, spec);
    std::vector<std::vector<std::optional<double>>> scores(pending.size());
    std::vector<RowIndex> ids;
    for (std::size_t f = 0; f < options.k_inner; ++f) {
      const FoldSplit split = fold_split(folds, 0, static_cast<int>(f));
      if (options.on_rows_read) {
        ids.clear();
        for (auto r : split.train) ids.push_back(data.row_ids.empty() ? r : data.row_ids[r]);
        for (auto r : split.test) ids.push_back(data.row_ids.empty() ? r : data.row_ids[r]);
        options.on_rows_read(ids);
      }
      InnerFold fold;
      fold.x_train = data.x.select_rows(split.train);
      fold.x_test = data.x.select_rows(split.test);
      for (auto r : split.train) fold.y_train.push_back(data.y[r]);
      for (auto r : split.test) fold.y_test.push_back(data.y[r]);
      std::size_t tp = 0;
      for (auto v : fold.y_train) tp += v;
      fold.usable = tp > 0 && tp < fold.y_train.size() && !fold.x_test.empty();
      std::size_t sp = 0;
      for (auto v : fold.y_test) sp += v;
      const bool scorable = sp > 0 && sp < fold.y_test.size();
      if (!fold.usable || !scorable) {
        for (auto& s : scores) s.push_back(std::nullopt);
        continue;
      }

      const std::uint64_t fit_seed = derive_seed(options.seed, {hash_text("fit"), f});
      std::vector<std::vector<double>> preds;
      try {
        preds = fit_predict_many(kind, fold.x_train, fold.y_train, fold.x_test, pending, fit_seed);
      } catch (const Error&) {
        // Isolate the failing settings.
        preds.assign(pending.size(), {});
        for (std::size_t t = 0; t < pending.size(); ++t) {
          try {
            preds[t] = fit(kind, fold.x_train, fold.y_train, pending[t], fit_seed)->predict(fold.x_test);
          } catch (const Error&) {
          }
        }
      }
      for (std::size_t t = 0; t < pending.size(); ++t) {
        std::optional<double> a;
        if (!preds[t].empty()) {
          bool finite = true;
          for (double v : preds[t]) finite = finite && std::isfinite(v);
          if (finite) a = auroc(preds[t], fold.y_test).auroc;
        }
        scores[t].push_back(a);
      }
    }
    for (std::size_t t = 0; t < pending.size(); ++t) {
      Trial trial{std::move(pending[t]), std::nullopt, std::move(scores[t])};
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& a : trial.fold_aurocs)
        if (a) {
          sum += *a;
          ++count;
        }
      if (count) trial.mean_auroc = sum / static_cast<double>(count);
      trials.push_back(std::move(trial));
    }
    if (options.cache) options.cache->store(options.seed, trials);
  } else if (options.on_rows_read) {
    // Cached trials were computed from the same rows.
    std::vector<RowIndex> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = data.row_ids.empty() ? i : data.row_ids[i];
    options.on_rows_read(ids);
  }

  for (const auto& t : trials)
    if (t.mean_auroc && (!result.best_mean || *t.mean_auroc > *result.best_mean)) {
      result.best_mean = t.mean_auroc;
      result.best = t.setting;
    }
  if (!result.best_mean)
    throw Error("tune: no trial could be scored (every inner fold was single-class or failed); use larger folds");
  result.trials = std::move(trials);
  return result;
}

void write_trials_csv(std::ostream& out, const TuneResult& result) {
  out << "trial,param_json,mean_auroc,fold_aurocs\n";
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  char buf[64];
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const auto& t = result.trials[i];
    out << i << ',' << quote(t.setting.to_json()) << ',';
    if (t.mean_auroc) {
      std::snprintf(buf, sizeof buf, "%.17g", *t.mean_auroc);
      out << buf;
    } else {
      out << "NA";
    }
    out << ',';
    for (std::size_t f = 0; f < t.fold_aurocs.size(); ++f) {
      if (f) out << ';';
      if (t.fold_aurocs[f]) {
        std::snprintf(buf, sizeof buf, "%.17g", *t.fold_aurocs[f]);
        out << buf;
      } else {
        out << "NA";
      }
    }
    out << '\n';
  }
}

}  // namespace spcv
