#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spcv/common.hpp"

namespace spcv {

enum class ColumnKind { numeric, categorical };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> levels;  // categorical only, in declared order

  static ColumnSpec numeric(std::string name) { return {std::move(name), ColumnKind::numeric, {}}; }
  static ColumnSpec categorical(std::string name, std::vector<std::string> levels) {
    return {std::move(name), ColumnKind::categorical, std::move(levels)};
  }
};

/// Feature columns, coordinate columns and the binary label column.
struct FeatureSchema {
  std::vector<ColumnSpec> columns;
  std::string x_column = "x";
  std::string y_column = "y";
  std::string label_column = "label";

  /// Throws Error on duplicate names, a coordinate/label column listed as a
  /// feature, or a categorical column with fewer than two levels.
  void validate() const;

  std::optional<std::size_t> find(const std::string& name) const;
};

/// Immutable tabular data with planar coordinates and a 0/1 label.
/// Categorical cells hold their level index as a double.
class Dataset {
 public:
  Dataset() = default;
  Dataset(FeatureSchema schema, Matrix features, std::vector<Point> coords, std::vector<std::uint8_t> labels);

  const FeatureSchema& schema() const noexcept { return schema_; }
  const Matrix& features() const noexcept { return features_; }
  const std::vector<Point>& coords() const noexcept { return coords_; }
  const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t feature_count() const noexcept { return schema_.columns.size(); }

  std::size_t positives() const noexcept;
  bool has_both_classes() const noexcept;

  Dataset subset(std::span<const RowIndex> rows) const;
  Dataset with_labels(std::vector<std::uint8_t> labels) const;

 private:
  FeatureSchema schema_;
  Matrix features_;
  std::vector<Point> coords_;
  std::vector<std::uint8_t> labels_;
};

struct LoadResult {
  Dataset data;
  std::size_t dropped_rows = 0;  // rows with at least one empty cell
};

/// Reads a comma-separated file with a header row. Empty cells mark
/// missing values; such rows are dropped and counted.
LoadResult load_csv(const std::filesystem::path& path, const FeatureSchema& schema);

/// Writes `x,y,<features...>,label` with round-trip precision.
void write_csv(const std::filesystem::path& path, const Dataset& data);

/// Schema files: see docs/config.md for the grammar.
FeatureSchema load_schema(const std::filesystem::path& path);
FeatureSchema parse_schema(const std::string& text);
void write_schema(const std::filesystem::path& path, const FeatureSchema& schema);
std::string format_schema(const FeatureSchema& schema);

// ---------------------------------------------------------------------------
// Descriptive summaries

struct NumericSummary {
  std::string name;
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0, iqr = 0;
  std::size_t na_count = 0;
};

struct LevelCount {
  std::string column;
  std::string level;
  std::size_t count = 0;
  double percent = 0;
};

struct SummaryTable {
  std::vector<NumericSummary> numeric;
  std::vector<LevelCount> categorical;  // includes the label as a two-level column
};

/// Quantile by linear interpolation between closest ranks, h = (n-1)q.
/// `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double q);

NumericSummary summarize_column(std::string name, std::span<const double> values);

SummaryTable summarize(const Dataset& data);

// ---------------------------------------------------------------------------
// Design matrix

struct DesignMatrix {
  Matrix x;
  std::vector<std::string> columns;
  Warnings warnings;
};

/// Reference (treatment) coding: a categorical column with L declared levels
/// becomes L-1 indicators, the first declared level being the reference.
/// Indicators for levels are only emitted when the data contains at least
/// two observed levels for that column; otherwise the column contributes no
/// indicators and a warning is recorded.
DesignMatrix one_hot(const Dataset& data);

}  // namespace spcv
