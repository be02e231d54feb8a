#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "spcv/dataset.hpp"
#include "spcv/experiment.hpp"
#include "spcv/synth.hpp"

namespace spcv {

/// Everything `spcv run` needs: a data source (CSV + schema, or a synthetic
/// field spec), the experiment grid and an output directory.
struct RunConfig {
  std::optional<FieldSpec> synth;
  std::filesystem::path dataset;
  std::filesystem::path schema;
  ExperimentConfig experiment;
  std::filesystem::path output = "results";
};

/// Relative paths are resolved against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::string& origin,
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Generates or loads the configured data. Rows with missing cells are
/// dropped; their count is returned through `dropped`.
Dataset load_run_dataset(const RunConfig& config, std::size_t* dropped = nullptr);

/// Parses "W" or "W,H".
std::pair<double, double> parse_extent(const std::string& text);

}  // namespace spcv
