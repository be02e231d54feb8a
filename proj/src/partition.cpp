#include "spcv/partition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "spcv/rng.hpp"

namespace spcv {

namespace {

double sq_dist(const Point& a, const Point& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<Point> kmeanspp(std::span<const Point> pts, std::size_t k, Rng& rng) {
  std::vector<Point> centroids;
  centroids.reserve(k);
  centroids.push_back(pts[rng.below(pts.size())]);
  std::vector<double> d2(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) d2[i] = sq_dist(pts[i], centroids[0]);
  while (centroids.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      pick = pts.size() - 1;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (d2[i] <= 0.0) continue;
        if (u < d2[i]) {
          pick = i;
          break;
        }
        u -= d2[i];
      }
      // Guard against rounding landing on an already chosen point.
      while (d2[pick] <= 0.0) pick = (pick + pts.size() - 1) % pts.size();
    } else {
      pick = rng.below(pts.size());
    }
    centroids.push_back(pts[pick]);
    for (std::size_t i = 0; i < pts.size(); ++i) d2[i] = std::min(d2[i], sq_dist(pts[i], centroids.back()));
  }
  return centroids;
}

struct ClusterStats {
  std::vector<double> sx, sy;
  std::vector<std::size_t> count;
};

ClusterStats accumulate(std::span<const Point> pts, std::span<const int> labels, std::size_t k) {
  ClusterStats s{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0), std::vector<std::size_t>(k, 0)};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    s.sx[c] += pts[i].x;
    s.sy[c] += pts[i].y;
    ++s.count[c];
  }
  return s;
}

// Hartigan-style transfers: move a point to another cluster whenever that
// lowers the within-cluster sum of squares once both centroids are updated.
// Returns true if any point moved.
bool transfer_pass(std::span<const Point> pts, std::span<int> labels, std::vector<Point>& centroids) {
  const auto k = centroids.size();
  auto stats = accumulate(pts, labels, k);
  bool moved = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto a = static_cast<std::size_t>(labels[i]);
    if (stats.count[a] < 2) continue;
    const double na = static_cast<double>(stats.count[a]);
    const Point ca{stats.sx[a] / na, stats.sy[a] / na};
    const double remove_gain = na / (na - 1.0) * sq_dist(pts[i], ca);
    std::size_t best = a;
    double best_cost = remove_gain;
    for (std::size_t b = 0; b < k; ++b) {
      if (b == a || stats.count[b] == 0) continue;
      const double nb = static_cast<double>(stats.count[b]);
      const Point cb{stats.sx[b] / nb, stats.sy[b] / nb};
      const double add_cost = nb / (nb + 1.0) * sq_dist(pts[i], cb);
      // Relative margin keeps rounding noise from cycling points.
      if (add_cost < best_cost * (1.0 - 1e-12)) {
        best_cost = add_cost;
        best = b;
      }
    }
    if (best != a) {
      stats.sx[a] -= pts[i].x;
      stats.sy[a] -= pts[i].y;
      --stats.count[a];
      stats.sx[best] += pts[i].x;
      stats.sy[best] += pts[i].y;
      ++stats.count[best];
      labels[i] = static_cast<int>(best);
      moved = true;
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    const double nc = static_cast<double>(stats.count[c]);
    if (stats.count[c] > 0) centroids[c] = {stats.sx[c] / nc, stats.sy[c] / nc};
  }
  return moved;
}

}  // namespace

std::string to_string(PartitionStrategy s) { return s == PartitionStrategy::random ? "random" : "spatial"; }

PartitionStrategy parse_partition_strategy(const std::string& text) {
  if (text == "random" || text == "non-spatial") return PartitionStrategy::random;
  if (text == "spatial" || text == "spatial_kmeans" || text == "kmeans") return PartitionStrategy::spatial_kmeans;
  throw Error("unknown partition strategy '" + text + "' (expected random or spatial)");
}

FoldAssignment random_kfold(std::size_t n, const PartitionSpec& spec) {
  if (spec.k < 2) throw Error("k-fold: k must be >= 2");
  if (spec.k > n) throw Error("k-fold: k = " + std::to_string(spec.k) + " exceeds n = " + std::to_string(n));
  if (spec.repetitions < 1) throw Error("k-fold: repetitions must be >= 1");
  FoldAssignment out;
  out.k = spec.k;
  for (std::size_t r = 0; r < spec.repetitions; ++r) {
    std::vector<int> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<int>(i % spec.k);
    Rng rng(derive_seed(spec.seed, {hash_text("random_kfold"), r}));
    rng.shuffle(f.begin(), f.end());
    out.folds.push_back(std::move(f));
  }
  return out;
}

KMeansResult kmeans(std::span<const Point> points, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
  const auto n = points.size();
  if (k < 1 || k > n) throw Error("k-means: need 1 <= k <= n");
  for (const auto& p : points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error("k-means: non-finite coordinate");

  std::set<std::pair<double, double>> distinct;
  for (const auto& p : points) distinct.emplace(p.x, p.y);
  if (distinct.size() < k)
    throw Error("k-means: only " + std::to_string(distinct.size()) + " distinct coordinates for k = " +
                std::to_string(k) + " (" + std::to_string(n - distinct.size()) + " duplicates)");

  double minx = points[0].x, maxx = minx, miny = points[0].y, maxy = miny;
  for (const auto& p : points) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  const double tol = options.relative_tolerance * std::max(maxx - minx, maxy - miny);

  auto wcss = [&](const KMeansResult& r) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += sq_dist(points[i], r.centroids[static_cast<std::size_t>(r.labels[i])]);
    return total;
  };

  std::optional<KMeansResult> best;
  double best_wcss = 0.0;
  std::size_t total_attempts = 0;
  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  for (std::size_t restart = 0; restart < restarts; ++restart) {
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    ++total_attempts;
    Rng rng(restart == 0 ? derive_seed(seed, {hash_text("kmeans"), attempt})
                         : derive_seed(seed, {hash_text("kmeans"), attempt, hash_text("restart"), restart}));
    std::optional<std::vector<Point>> init;
    if (options.initializer) init = options.initializer(attempt);
    std::vector<Point> centroids = init ? std::move(*init) : kmeanspp(points, k, rng);
    if (centroids.size() != k) throw Error("k-means: initializer returned the wrong number of centroids");

    std::vector<int> labels(n, -1);
    std::size_t iter = 0;
    auto lloyd = [&] {
      for (; iter < options.max_iterations; ++iter) {
        kernels::assign_nearest(points, centroids, labels, options.exec);
        const auto stats = accumulate(points, labels, k);
        double move = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
          if (stats.count[c] == 0) continue;  // empty clusters keep their centroid
          const double nc = static_cast<double>(stats.count[c]);
          const Point next{stats.sx[c] / nc, stats.sy[c] / nc};
          move = std::max(move, std::sqrt(sq_dist(next, centroids[c])));
          centroids[c] = next;
        }
        if (move < tol) {
          ++iter;
          break;
        }
      }
      kernels::assign_nearest(points, centroids, labels, options.exec);
    };

    lloyd();
    auto has_empty = [&] {
      const auto stats = accumulate(points, labels, k);
      return std::any_of(stats.count.begin(), stats.count.end(), [](auto c) { return c == 0; });
    };
    if (has_empty()) continue;

    // Transfer refinement followed by Lloyd until neither changes anything.
    for (int round = 0; round < 100; ++round) {
      if (!transfer_pass(points, labels, centroids)) break;
      const auto before = labels;
      iter = 0;
      lloyd();
      if (has_empty()) break;
      if (labels == before) break;
    }
    if (has_empty()) continue;
    KMeansResult r{std::move(labels), std::move(centroids), iter, 0};
    const double w = wcss(r);
    if (!best || w < best_wcss) {
      best = std::move(r);
      best_wcss = w;
    }
    break;
  }
  }
  if (!best) throw Error("k-means: empty cluster after " + std::to_string(options.max_attempts) + " attempts");
  best->attempts = total_attempts;
  return std::move(*best);
}

FoldAssignment spatial_kfold(std::span<const Point> coords, const PartitionSpec& spec, const KMeansOptions& options) {
  if (spec.k < 2) throw Error("spatial k-fold: k must be >= 2");
  if (spec.k > coords.size())
    throw Error("spatial k-fold: k = " + std::to_string(spec.k) + " exceeds n = " + std::to_string(coords.size()));
  if (spec.repetitions < 1) throw Error("spatial k-fold: repetitions must be >= 1");
  FoldAssignment out;
  out.k = spec.k;
  for (std::size_t r = 0; r < spec.repetitions; ++r) {
    auto res = kmeans(coords, spec.k, derive_seed(spec.seed, {hash_text("spatial_kfold"), r}), options);
    out.folds.push_back(std::move(res.labels));
    out.centroids.push_back(std::move(res.centroids));
  }
  return out;
}

FoldAssignment make_folds(std::span<const Point> coords, const PartitionSpec& spec, kernels::Exec exec) {
  if (spec.strategy == PartitionStrategy::random) return random_kfold(coords.size(), spec);
  KMeansOptions opt;
  opt.exec = exec;
  return spatial_kfold(coords, spec, opt);
}

FoldSplit fold_split(const FoldAssignment& assignment, std::size_t repetition, int fold) {
  if (repetition >= assignment.repetitions()) throw Error("fold_split: repetition out of range");
  if (fold < 0 || static_cast<std::size_t>(fold) >= assignment.k) throw Error("fold_split: fold out of range");
  FoldSplit s;
  const auto& f = assignment.folds[repetition];
  for (std::size_t i = 0; i < f.size(); ++i) (f[i] == fold ? s.test : s.train).push_back(i);
  return s;
}

void write_folds_csv(const std::filesystem::path& path, const FoldAssignment& assignment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "row_id,repetition,fold\n";
  for (std::size_t r = 0; r < assignment.repetitions(); ++r)
    for (std::size_t i = 0; i < assignment.folds[r].size(); ++i) out << i << ',' << r << ',' << assignment.folds[r][i] << '\n';
}

void write_centroids_csv(const std::filesystem::path& path, const FoldAssignment& assignment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "repetition,fold,centroid_x,centroid_y\n";
  for (std::size_t r = 0; r < assignment.centroids.size(); ++r)
    for (std::size_t c = 0; c < assignment.centroids[r].size(); ++c)
      out << r << ',' << c << ',' << fmt(assignment.centroids[r][c].x) << ',' << fmt(assignment.centroids[r][c].y) << '\n';
}

}  // namespace spcv
