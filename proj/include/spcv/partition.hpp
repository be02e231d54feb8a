#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spcv/common.hpp"
#include "spcv/kernels.hpp"

namespace spcv {

enum class PartitionStrategy { random, spatial_kmeans };

std::string to_string(PartitionStrategy s);
PartitionStrategy parse_partition_strategy(const std::string& text);

struct PartitionSpec {
  std::size_t k = 5;
  std::size_t repetitions = 1;
  PartitionStrategy strategy = PartitionStrategy::random;
  std::uint64_t seed = 0;
};

/// Per repetition, one fold index in [0, k) for every row.
struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::vector<int>> folds;
  /// Spatial strategy only: per repetition, the k cluster centroids.
  std::vector<std::vector<Point>> centroids;

  std::size_t repetitions() const noexcept { return folds.size(); }
  std::size_t rows() const noexcept { return folds.empty() ? 0 : folds.front().size(); }
};

struct FoldSplit {
  std::vector<RowIndex> train;
  std::vector<RowIndex> test;
};

FoldAssignment random_kfold(std::size_t n, const PartitionSpec& spec);

struct KMeansResult {
  std::vector<int> labels;
  std::vector<Point> centroids;
  std::size_t iterations = 0;
  std::size_t attempts = 0;
};

/// Optional override of the initial centroids for a given attempt; returning
/// nullopt falls back to k-means++. Used by tests to force degenerate starts.
using CentroidInitializer = std::function<std::optional<std::vector<Point>>(std::size_t attempt)>;

struct KMeansOptions {
  std::size_t max_iterations = 100;
  std::size_t max_attempts = 10;
  // Independent k-means++ starts; the lowest within-cluster sum of squares wins.
  std::size_t restarts = 25;
  double relative_tolerance = 1e-9;  // times the larger side of the bounding box
  CentroidInitializer initializer;
  kernels::Exec exec = kernels::Exec::serial;
};

/// Lloyd's algorithm with k-means++ seeding and a single-point transfer
/// refinement, restarted from several seeds. Labels are exactly the nearest-centroid (lowest index on ties)
/// labels with respect to the returned centroids, and no cluster is empty.
KMeansResult kmeans(std::span<const Point> points, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

/// One k-means clustering of the coordinates per repetition; fold = cluster.
FoldAssignment spatial_kfold(std::span<const Point> coords, const PartitionSpec& spec, const KMeansOptions& options = {});

/// Dispatches on spec.strategy.
FoldAssignment make_folds(std::span<const Point> coords, const PartitionSpec& spec,
                          kernels::Exec exec = kernels::Exec::serial);

FoldSplit fold_split(const FoldAssignment& assignment, std::size_t repetition, int fold);

/// `row_id,repetition,fold`
void write_folds_csv(const std::filesystem::path& path, const FoldAssignment& assignment);
/// `repetition,fold,centroid_x,centroid_y`
void write_centroids_csv(const std::filesystem::path& path, const FoldAssignment& assignment);

}  // namespace spcv
