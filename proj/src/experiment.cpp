#include "spcv/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <tuple>

#include "spcv/metrics.hpp"
#include "spcv/rng.hpp"
#include "spcv/tuner.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spcv {

namespace {

std::string strategy_word(PartitionStrategy s) {
  return s == PartitionStrategy::spatial_kmeans ? "spatial" : "non-spatial";
}

PartitionStrategy parse_word(const std::string& w, const std::string& whole) {
  if (w == "spatial") return PartitionStrategy::spatial_kmeans;
  if (w == "non-spatial" || w == "nonspatial" || w == "random") return PartitionStrategy::random;
  throw Error("bad CV setup '" + whole + "': expected spatial or non-spatial, got '" + w + "'");
}

}  // namespace

std::string CvSetup::name() const {
  return strategy_word(outer) + "/" + (tuning ? strategy_word(*tuning) : std::string("none"));
}

CvSetup CvSetup::parse(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw Error("bad CV setup '" + text + "': expected outer/tuning");
  CvSetup s;
  s.outer = parse_word(text.substr(0, slash), text);
  const std::string inner = text.substr(slash + 1);
  if (inner != "none") s.tuning = parse_word(inner, text);
  return s;
}

void ExperimentConfig::validate() const {
  if (k_outer < 2) throw Error("k_outer must be >= 2");
  if (k_inner < 2) throw Error("k_inner must be >= 2");
  if (repetitions < 1) throw Error("repetitions must be >= 1");
  if (budgets.empty()) throw Error("at least one budget is required");
  if (learners.empty()) throw Error("at least one learner is required");
  if (setups.empty()) throw Error("at least one CV setup is required");
  if (jobs < 1) throw Error("jobs must be >= 1");
}

std::string to_string(RecordStatus status) {
  switch (status) {
    case RecordStatus::ok:
      return "ok";
    case RecordStatus::missing:
      return "missing";
    case RecordStatus::failed:
      return "failed";
  }
  return "?";
}

RecordStatus parse_record_status(const std::string& text) {
  if (text == "ok") return RecordStatus::ok;
  if (text == "missing") return RecordStatus::missing;
  if (text == "failed") return RecordStatus::failed;
  throw Error("unknown record status '" + text + "'");
}

void sort_records(std::vector<Record>& records) {
  std::stable_sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
    return std::tuple(a.setup, to_string(a.learner), a.budget, a.repetition, a.fold) <
           std::tuple(b.setup, to_string(b.learner), b.budget, b.repetition, b.fold);
  });
}

std::vector<std::size_t> budgets_for(const CvSetup& setup, const std::vector<std::size_t>& budgets) {
  if (!setup.tuning) return {0};
  std::set<std::size_t> unique(budgets.begin(), budgets.end());
  return {unique.begin(), unique.end()};
}

ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& config, TrialCache* shared_cache) {
  config.validate();
  if (!data.has_both_classes()) throw Error("experiment: the dataset contains a single class");
  const DesignMatrix design = one_hot(data);
  const std::size_t n = data.size();

  std::map<PartitionStrategy, FoldAssignment> outer;
  for (const auto& setup : config.setups)
    if (!outer.count(setup.outer)) {
      const PartitionSpec spec{config.k_outer, config.repetitions, setup.outer,
                               derive_seed(config.master_seed, {hash_text("outer"), hash_text(to_string(setup.outer))})};
      outer.emplace(setup.outer, make_folds(data.coords(), spec));
    }

  struct Cell {
    CvSetup setup;
    LearnerKind learner;
    std::size_t budget;
  };
  std::vector<Cell> cells;
  for (const auto& setup : config.setups)
    for (auto learner : config.learners)
      for (auto budget : budgets_for(setup, config.budgets)) cells.push_back({setup, learner, budget});
  // Smaller budgets first so larger ones can extend their cached trials.
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.budget < b.budget; });

  const std::size_t per_cell = config.repetitions * config.k_outer;
  std::vector<Record> records(cells.size() * per_cell);
  std::vector<std::size_t> checks(records.size(), 0);
  TrialCache local_cache;
  TrialCache& cache = shared_cache ? *shared_cache : local_cache;

  auto run_unit = [&](std::size_t u) {
    const Cell& cell = cells[u / per_cell];
    const std::size_t rep = (u % per_cell) / config.k_outer;
    const std::size_t fold = u % config.k_outer;
    Record& rec = records[u];
    rec.setup = cell.setup.name();
    rec.learner = cell.learner;
    rec.budget = cell.budget;
    rec.repetition = rep;
    rec.fold = fold;
    rec.chosen_params_json = default_setting(cell.learner, design.x.cols()).to_json();
    const auto start = std::chrono::steady_clock::now();

    const FoldSplit split = fold_split(outer.at(cell.setup.outer), rep, static_cast<int>(fold));
    rec.n_test = split.test.size();
    std::vector<std::uint8_t> y_test;
    for (auto r : split.test) y_test.push_back(data.labels()[r]);
    for (auto v : y_test) rec.n_pos_test += v;

    try {
      if (rec.n_pos_test == 0 || rec.n_pos_test == rec.n_test) {
        rec.status = RecordStatus::missing;
      } else {
        const Matrix x_train = design.x.select_rows(split.train);
        std::vector<std::uint8_t> y_train;
        std::vector<Point> c_train;
        for (auto r : split.train) {
          y_train.push_back(data.labels()[r]);
          c_train.push_back(data.coords()[r]);
        }
        std::size_t pos = 0;
        for (auto v : y_train) pos += v;
        if (pos == 0 || pos == y_train.size()) throw Error("outer training rows hold a single class");

        const auto learner_hash = hash_text(to_string(cell.learner));
        ParamSetting chosen = default_setting(cell.learner, design.x.cols());
        if (cell.setup.tuning && cell.budget > 0 && cell.learner != LearnerKind::glm) {
          std::vector<std::uint8_t> in_test;
          if (config.monitor_leakage) {
            in_test.assign(n, 0);
            for (auto r : split.test) in_test[r] = 1;
          }
          TuneOptions options;
          options.strategy = *cell.setup.tuning;
          options.budget = cell.budget;
          options.k_inner = config.k_inner;
          options.seed = derive_seed(config.master_seed, {hash_text("tune"), learner_hash,
                                                          hash_text(cell.setup.name()), rep, fold});
          options.cache = &cache;
          if (config.monitor_leakage)
            options.on_rows_read = [&](std::span<const RowIndex> ids) {
              checks[u] += ids.size();
              for (auto id : ids)
                if (id >= n || in_test[id]) ++rec.leakage;
            };
          chosen = tune(cell.learner, TuneData{x_train, y_train, c_train, split.train}, options).best;
        }
        rec.chosen_params_json = chosen.to_json();

        const auto fit_seed = derive_seed(config.master_seed, {hash_text("fit"), learner_hash,
                                                               hash_text(to_string(cell.setup.outer)), rep, fold});
        const auto model = fit(cell.learner, x_train, y_train, chosen, fit_seed);
        const auto scores = model->predict(design.x.select_rows(split.test));
        rec.auroc = auroc(scores, y_test).auroc;
        rec.status = RecordStatus::ok;
      }
    } catch (const std::exception& e) {
      rec.status = RecordStatus::failed;
      rec.auroc.reset();
      rec.message = e.what();
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };

  const auto units = static_cast<std::ptrdiff_t>(records.size());
#ifdef _OPENMP
  if (config.jobs > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(config.jobs))
    for (std::ptrdiff_t u = 0; u < units; ++u) run_unit(static_cast<std::size_t>(u));
  } else {
    for (std::ptrdiff_t u = 0; u < units; ++u) run_unit(static_cast<std::size_t>(u));
  }
#else
  for (std::ptrdiff_t u = 0; u < units; ++u) run_unit(static_cast<std::size_t>(u));
#endif

  ExperimentResult result;
  for (std::size_t u = 0; u < records.size(); ++u) {
    result.leakage_checks += checks[u];
    result.leakage_violations += records[u].leakage;
  }
  result.records = std::move(records);
  sort_records(result.records);
  return result;
}

ExperimentResult run_nested_cv(const Dataset& data, LearnerKind kind, const CvSetup& setup, std::size_t budget,
                               ExperimentConfig config) {
  if (!setup.tuning && budget != 0) throw Error("a setup without tuning requires budget 0");
  config.learners = {kind};
  config.setups = {setup};
  config.budgets = {budget};
  return run_experiment(data, config);
}

namespace {

std::vector<RepFoldScore> cell_scores(const std::vector<Record>& records, const std::string& setup,
                                      LearnerKind learner, std::size_t budget) {
  std::vector<RepFoldScore> scores;
  for (const auto& r : records)
    if (r.setup == setup && r.learner == learner && r.budget == budget)
      scores.push_back({r.repetition, r.fold, r.auroc});
  return scores;
}

}  // namespace

std::optional<double> cell_mean(const std::vector<Record>& records, const std::string& setup, LearnerKind learner,
                                std::size_t budget) {
  const auto scores = cell_scores(records, setup, learner, budget);
  if (scores.empty()) return std::nullopt;
  const auto agg = aggregate(scores);
  if (!agg.has_overall()) return std::nullopt;
  return agg.overall;
}

std::vector<double> repetition_means(const std::vector<Record>& records, const std::string& setup,
                                     LearnerKind learner, std::size_t budget) {
  const auto scores = cell_scores(records, setup, learner, budget);
  std::vector<double> out;
  if (scores.empty()) return out;
  for (const auto& [rep, mean] : aggregate(scores).repetition_means) out.push_back(mean);
  return out;
}

Optimism optimism_from_means(double nonspatial, double spatial) {
  Optimism o;
  o.nonspatial = nonspatial;
  o.spatial = spatial;
  o.absolute = nonspatial - spatial;
  o.relative_to_nonspatial = nonspatial != 0.0 ? o.absolute / nonspatial * 100.0 : 0.0;
  o.relative_to_spatial = spatial != 0.0 ? o.absolute / spatial * 100.0 : 0.0;
  return o;
}

Optimism optimism(const std::vector<Record>& records, LearnerKind learner, std::size_t budget,
                  const std::string& nonspatial_setup, const std::string& spatial_setup) {
  const auto ns = cell_mean(records, nonspatial_setup, learner, budget);
  const auto sp = cell_mean(records, spatial_setup, learner, budget);
  const std::string what = to_string(learner) + " at budget " + std::to_string(budget);
  if (!ns) throw Error("optimism: no scored results for " + nonspatial_setup + ", " + what);
  if (!sp) throw Error("optimism: no scored results for " + spatial_setup + ", " + what);
  return optimism_from_means(*ns, *sp);
}

std::vector<CurvePoint> tuning_curve(const std::vector<Record>& records, LearnerKind learner,
                                     const std::string& setup) {
  std::set<std::size_t> budgets;
  for (const auto& r : records)
    if (r.setup == setup && r.learner == learner) budgets.insert(r.budget);
  if (budgets.size() < 2) throw Error("insufficient budgets");
  std::vector<CurvePoint> out;
  for (auto b : budgets) {
    auto means = repetition_means(records, setup, learner, b);
    if (means.empty()) continue;
    CurvePoint p;
    p.budget = b;
    for (double m : means) p.mean += m;
    p.mean /= static_cast<double>(means.size());
    std::sort(means.begin(), means.end());
    p.q1 = quantile_sorted(means, 0.25);
    p.q3 = quantile_sorted(means, 0.75);
    p.iqr = p.q3 - p.q1;
    p.repetitions = means.size();
    out.push_back(p);
  }
  return out;
}

}  // namespace spcv
