// spcv: synthetic data, partitions, nested spatial/non-spatial CV runs and
// plot-ready reports.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "spcv/config.hpp"
#include "spcv/dataset.hpp"
#include "spcv/experiment.hpp"
#include "spcv/partition.hpp"
#include "spcv/report.hpp"
#include "spcv/results_io.hpp"
#include "spcv/synth.hpp"

namespace fs = std::filesystem;
using namespace spcv;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

fs::path schema_path_for(const fs::path& csv) {
  auto p = csv;
  return p.replace_extension(".schema");
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

int cmd_synth(const FieldSpec& spec, const fs::path& out) {
  const Dataset data = make_classification(spec);
  ensure_parent(out);
  write_csv(out, data);
  write_schema(schema_path_for(out), data.schema());
  std::printf("n=%zu prevalence=%.4f\n", data.size(),
              static_cast<double>(data.positives()) / static_cast<double>(data.size()));
  std::printf("wrote %s and %s\n", out.string().c_str(), schema_path_for(out).string().c_str());
  return 0;
}

int cmd_partition(const fs::path& data_path, fs::path schema, const std::string& strategy, std::size_t k,
                  std::size_t reps, std::uint64_t seed, const fs::path& out, fs::path centroids) {
  if (schema.empty()) schema = schema_path_for(data_path);
  const auto loaded = load_csv(data_path, load_schema(schema));
  if (loaded.dropped_rows) std::fprintf(stderr, "dropped %zu rows with missing cells\n", loaded.dropped_rows);
  const auto& data = loaded.data;
  if (k > data.size()) throw Error("k = " + std::to_string(k) + " exceeds the number of rows");
  const PartitionSpec spec{k, reps, parse_partition_strategy(strategy), seed};
  const auto folds = make_folds(data.coords(), spec);
  ensure_parent(out);
  write_folds_csv(out, folds);
  std::printf("wrote %s (%zu rows x %zu repetitions, k=%zu)\n", out.string().c_str(), data.size(), reps, k);
  if (spec.strategy == PartitionStrategy::spatial_kmeans) {
    if (centroids.empty()) {
      centroids = out;
      centroids.replace_filename(out.stem().string() + "_centroids.csv");
    }
    write_centroids_csv(centroids, folds);
    std::printf("wrote %s\n", centroids.string().c_str());
  }
  return 0;
}

int cmd_run(const fs::path& config_path, std::size_t jobs, const fs::path& out_override,
            std::optional<std::uint64_t> seed) {
  RunConfig cfg = load_run_config(config_path);
  if (jobs) cfg.experiment.jobs = jobs;
  if (!out_override.empty()) cfg.output = out_override;
  if (seed) cfg.experiment.master_seed = *seed;
  std::size_t dropped = 0;
  const Dataset data = load_run_dataset(cfg, &dropped);
  if (dropped) std::fprintf(stderr, "dropped %zu rows with missing cells\n", dropped);

  const auto result = run_experiment(data, cfg.experiment);
  fs::create_directories(cfg.output);
  write_results_csv(cfg.output / "results.csv", result.records);
  write_text(cfg.output / "summary.json", summary_json(result.records));
  std::ostringstream curve;
  write_curve_csv(curve, result.records);
  write_text(cfg.output / "tuning_curve.csv", curve.str());

  std::cout << format_matrix(result.records);
  if (cfg.experiment.monitor_leakage)
    std::printf("leakage monitor: %zu row reads checked, %zu violations\n", result.leakage_checks,
                result.leakage_violations);

  std::map<std::tuple<std::string, std::string, std::size_t>, std::pair<std::size_t, std::string>> cells;
  for (const auto& r : result.records) {
    auto& c = cells[{r.setup, to_string(r.learner), r.budget}];
    if (r.status == RecordStatus::ok) ++c.first;
    if (r.status == RecordStatus::failed && c.second.empty()) c.second = r.message;
  }
  int status = result.leakage_violations ? 1 : 0;
  for (const auto& [key, c] : cells)
    if (c.first == 0) {
      const auto& [s, l, b] = key;
      std::fprintf(stderr, "error: no successful fold for %s / %s / budget %zu%s%s\n", s.c_str(), l.c_str(), b,
                   c.second.empty() ? "" : ": ", c.second.c_str());
      status = 1;
    }
  std::printf("wrote %s\n", cfg.output.string().c_str());
  return status;
}

int cmd_report(const fs::path& results, fs::path out) {
  const auto records = read_results_csv(results);
  if (out.empty()) out = results.parent_path().empty() ? fs::path(".") : results.parent_path();
  fs::create_directories(out);

  std::ostringstream curve;
  write_curve_csv(curve, records);
  if (curve.str().find('\n') + 1 == curve.str().size()) {
    std::printf("tuning curve: insufficient budgets (need at least two per learner and setup)\n");
  } else {
    write_text(out / "tuning_curve.csv", curve.str());
    std::printf("wrote %s\n", (out / "tuning_curve.csv").string().c_str());
  }
  std::ostringstream box, opt;
  write_boxplot_csv(box, records);
  write_text(out / "boxplot.csv", box.str());
  write_optimism_csv(opt, records);
  write_text(out / "optimism.csv", opt.str());
  std::printf("wrote %s\nwrote %s\n", (out / "boxplot.csv").string().c_str(), (out / "optimism.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial vs. non-spatial cross-validation toolkit"};
  app.require_subcommand(1);

  FieldSpec spec;
  std::string extent = "1";
  fs::path synth_out = "synthetic.csv";
  auto* synth = app.add_subcommand("synth", "Generate a spatially autocorrelated classification dataset");
  synth->add_option("--n", spec.n, "Number of points")->capture_default_str();
  synth->add_option("--extent", extent, "Extent W or W,H")->capture_default_str();
  synth->add_option("--range", spec.range, "Correlation length of the fields")->capture_default_str();
  synth->add_option("--sill", spec.sill, "Field variance")->capture_default_str();
  synth->add_option("--nugget", spec.nugget, "Independent noise variance of the fields")->capture_default_str();
  synth->add_option("--informative", spec.n_informative, "Autocorrelated predictors")->capture_default_str();
  synth->add_option("--noise", spec.n_noise, "Independent noise predictors")->capture_default_str();
  synth->add_option("--intercept", spec.intercept, "Linear-predictor intercept")->capture_default_str();
  synth->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
  synth->add_option("--out", synth_out, "Output CSV (schema written next to it)")->capture_default_str();

  fs::path part_data, part_schema, part_out = "folds.csv", part_centroids;
  std::string strategy = "random";
  std::size_t part_k = 5, part_reps = 1;
  std::uint64_t part_seed = 1;
  auto* part = app.add_subcommand("partition", "Write fold assignments for a dataset");
  part->add_option("--data", part_data, "Dataset CSV")->required();
  part->add_option("--schema", part_schema, "Schema file (default: <data>.schema)");
  part->add_option("--strategy", strategy, "random or spatial")->capture_default_str();
  part->add_option("--k", part_k, "Number of folds")->capture_default_str();
  part->add_option("--reps", part_reps, "Repetitions")->capture_default_str();
  part->add_option("--seed", part_seed, "Random seed")->capture_default_str();
  part->add_option("--out", part_out, "Fold CSV")->capture_default_str();
  part->add_option("--centroids", part_centroids, "Centroid CSV for the spatial strategy");

  fs::path run_config, run_out;
  std::size_t run_jobs = 0;
  std::optional<std::uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "Run the nested cross-validation grid of a config file");
  run->add_option("config,--config", run_config, "Run config file")->required();
  run->add_option("--jobs", run_jobs, "Worker threads (default: config value)");
  run->add_option("--out", run_out, "Output directory (default: config value)");
  run->add_option("--seed", run_seed, "Override the master seed");

  fs::path rep_results, rep_out;
  std::optional<std::uint64_t> rep_seed;
  auto* report = app.add_subcommand("report", "Derive plot tables from a results CSV");
  report->add_option("results,--results", rep_results, "results.csv")->required();
  report->add_option("--out", rep_out, "Output directory (default: next to the results)");
  report->add_option("--seed", rep_seed, "Accepted for uniformity; reports are not random");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*synth) {
      std::tie(spec.width, spec.height) = parse_extent(extent);
      return cmd_synth(spec, synth_out);
    }
    if (*part)
      return cmd_partition(part_data, part_schema, strategy, part_k, part_reps, part_seed, part_out, part_centroids);
    if (*run) return cmd_run(run_config, run_jobs, run_out, run_seed);
    if (*report) return cmd_report(rep_results, rep_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
