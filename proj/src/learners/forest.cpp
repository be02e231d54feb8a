#include "spcv/learners/forest.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "spcv/rng.hpp"

namespace spcv {

namespace {

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

}  // namespace

const ClassificationTree::Node& ClassificationTree::leaf_for(std::span<const double> row) const {
  const Node* node = &nodes[0];
  while (node->feature >= 0)
    node = &nodes[static_cast<std::size_t>(row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                                                         : node->right)];
  return *node;
}

double ClassificationTree::vote(std::span<const double> row) const {
  const double share = leaf_for(row).positive_share;
  return share > 0.5 ? 1.0 : (share < 0.5 ? 0.0 : 0.5);
}

std::uint64_t tree_seed(std::uint64_t forest_seed, std::size_t tree) {
  return derive_seed(forest_seed, {hash_text("tree"), tree});
}

ForestBuilder::ForestBuilder(const Matrix& x, std::span<const std::uint8_t> y, ForestOptions options)
    : n_(x.rows()), p_(x.cols()), columns_(x.rows() * x.cols()), order_(x.rows() * x.cols()), y_(y.begin(), y.end()),
      options_(options) {
  if (n_ == 0) throw Error("random forest: no training rows");
  if (y.size() != n_) throw Error("random forest: x and y differ in length");
  if (p_ == 0) throw Error("random forest: no feature columns");
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t f = 0; f < p_; ++f) columns_[f * n_ + i] = x(i, f);
  for (std::size_t f = 0; f < p_; ++f) {
    auto first = order_.begin() + static_cast<std::ptrdiff_t>(f * n_);
    std::iota(first, first + static_cast<std::ptrdiff_t>(n_), 0u);
    const double* col = columns_.data() + f * n_;
    std::stable_sort(first, first + static_cast<std::ptrdiff_t>(n_),
                     [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
  }
}

ClassificationTree ForestBuilder::grow(std::size_t mtry, std::uint64_t seed) const {
  mtry = std::clamp<std::size_t>(mtry, 1, p_);
  Rng rng(seed);

  std::vector<std::uint32_t> weight(n_, 0);
  if (options_.bootstrap) {
    for (std::size_t i = 0; i < n_; ++i) ++weight[rng.below(n_)];
  } else {
    std::fill(weight.begin(), weight.end(), 1u);
  }

  std::size_t m = 0;
  for (auto w : weight) m += w > 0;
  std::vector<std::uint32_t> sorted(p_ * m);
  for (std::size_t f = 0; f < p_; ++f) {
    std::size_t k = 0;
    const auto* ord = order_.data() + f * n_;
    auto* out = sorted.data() + f * m;
    for (std::size_t i = 0; i < n_; ++i)
      if (weight[ord[i]] > 0) out[k++] = ord[i];
  }

  struct Pending {
    int node;
    std::size_t begin, end;
    double w, w1;
  };
  ClassificationTree tree;
  tree.nodes.emplace_back();
  double total = 0.0, total1 = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    total += weight[i];
    total1 += static_cast<double>(weight[i]) * y_[i];
  }
  std::vector<Pending> stack{{0, 0, m, total, total1}};
  std::vector<std::size_t> features(p_);
  std::iota(features.begin(), features.end(), std::size_t{0});
  std::vector<std::uint8_t> goes_left(n_, 0);
  std::vector<std::uint32_t> scratch(m);

  while (!stack.empty()) {
    const Pending cur = stack.back();
    stack.pop_back();
    auto& node = tree.nodes[static_cast<std::size_t>(cur.node)];
    node.positive_share = cur.w1 / cur.w;
    if (cur.w1 == 0.0 || cur.w1 == cur.w || cur.w <= static_cast<double>(options_.min_node_size) ||
        cur.end - cur.begin < 2)
      continue;

    // Split score (w1L^2 + w0L^2)/wL + (w1R^2 + w0R^2)/wR, i.e. the Gini
    // decrease up to constants. Weights are integer bootstrap counts, so
    // candidates are compared exactly as fractions num/den.
    using Wide = __int128;
    Wide best_num = -1, best_den = 1;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::int64_t best_wl = 0, best_w1l = 0;
    const auto total_w = static_cast<std::int64_t>(cur.w), total_w1 = static_cast<std::int64_t>(cur.w1);
    for (std::size_t c = 0; c < mtry; ++c) {
      const std::size_t pick = c + rng.below(p_ - c);
      std::swap(features[c], features[pick]);
      const std::size_t f = features[c];
      const auto* seg = sorted.data() + f * m;
      const double* col = columns_.data() + f * n_;
      std::int64_t wl = 0, w1l = 0;
      for (std::size_t i = cur.begin; i + 1 < cur.end; ++i) {
        const auto r = seg[i];
        wl += weight[r];
        w1l += y_[r] ? weight[r] : 0;
        const double v = col[r], vn = col[seg[i + 1]];
        if (v == vn) continue;
        const std::int64_t wr = total_w - wl, w1r = total_w1 - w1l;
        const std::int64_t w0l = wl - w1l, w0r = wr - w1r;
        const Wide a = static_cast<Wide>(w1l) * w1l + static_cast<Wide>(w0l) * w0l;
        const Wide b = static_cast<Wide>(w1r) * w1r + static_cast<Wide>(w0r) * w0r;
        const Wide num = a * wr + b * wl;
        const Wide den = static_cast<Wide>(wl) * wr;
        const Wide lhs = num * best_den, rhs = best_num * den;
        if (best_feature < 0 || lhs > rhs || (lhs == rhs && static_cast<int>(f) < best_feature)) {
          best_num = num;
          best_den = den;
          best_feature = static_cast<int>(f);
          best_threshold = midpoint(v, vn);
          best_wl = wl;
          best_w1l = w1l;
        }
      }
    }
    if (best_feature < 0) continue;

    const double* col = columns_.data() + static_cast<std::size_t>(best_feature) * n_;
    const auto* seg0 = sorted.data();
    std::size_t left_count = 0;
    for (std::size_t i = cur.begin; i < cur.end; ++i) {
      const auto r = seg0[i];
      goes_left[r] = col[r] <= best_threshold;
      left_count += goes_left[r];
    }
    for (std::size_t f = 0; f < p_; ++f) {
      auto* seg = sorted.data() + f * m;
      std::size_t l = cur.begin, r = 0;
      for (std::size_t i = cur.begin; i < cur.end; ++i) {
        if (goes_left[seg[i]])
          seg[l++] = seg[i];
        else
          scratch[r++] = seg[i];
      }
      std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(r), seg + l);
    }

    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& parent = tree.nodes[static_cast<std::size_t>(cur.node)];
    parent.feature = best_feature;
    parent.threshold = best_threshold;
    parent.left = left;
    parent.right = left + 1;
    const std::size_t mid = cur.begin + left_count;
    stack.push_back({left + 1, mid, cur.end, cur.w - static_cast<double>(best_wl), cur.w1 - static_cast<double>(best_w1l)});
    stack.push_back({left, cur.begin, mid, static_cast<double>(best_wl), static_cast<double>(best_w1l)});
  }
  return tree;
}

std::unique_ptr<ForestModel> ForestBuilder::fit(std::size_t mtry, std::size_t num_trees, std::uint64_t seed) const {
  auto model = std::unique_ptr<ForestModel>(new ForestModel(p_));
  model->mtry_ = std::clamp<std::size_t>(mtry, 1, p_);
  model->trees_.reserve(num_trees);
  for (std::size_t t = 0; t < num_trees; ++t) model->trees_.push_back(grow(model->mtry_, tree_seed(seed, t)));
  return model;
}

std::vector<std::vector<double>> ForestBuilder::vote_curve(const Matrix& test, std::size_t mtry,
                                                           std::span<const std::size_t> counts,
                                                           std::uint64_t seed) const {
  if (test.cols() != p_) throw Error("random forest: query width differs from training width");
  std::vector<std::vector<double>> out(counts.size());
  if (counts.empty()) return out;
  const std::size_t max_trees = *std::max_element(counts.begin(), counts.end());
  std::vector<double> votes(test.rows(), 0.0);
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return counts[a] < counts[b]; });
  std::size_t next = 0;
  auto emit = [&](std::size_t grown) {
    while (next < order.size() && counts[order[next]] == grown) {
      auto& v = out[order[next]];
      v.resize(test.rows());
      for (std::size_t i = 0; i < test.rows(); ++i) v[i] = grown ? votes[i] / static_cast<double>(grown) : 0.5;
      ++next;
    }
  };
  emit(0);
  for (std::size_t t = 0; t < max_trees; ++t) {
    const auto tree = grow(mtry, tree_seed(seed, t));
    for (std::size_t i = 0; i < test.rows(); ++i) votes[i] += tree.vote(test.row(i));
    emit(t + 1);
  }
  return out;
}

std::vector<double> ForestModel::score(const Matrix& x) const {
  std::vector<double> out(x.rows(), 0.0);
  if (trees_.empty()) return std::vector<double>(x.rows(), 0.5);
  for (const auto& t : trees_)
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] += t.vote(x.row(i));
  for (auto& v : out) v /= static_cast<double>(trees_.size());
  return out;
}

std::unique_ptr<ForestModel> fit_rf(const Matrix& x, std::span<const std::uint8_t> y, std::size_t mtry,
                                    std::size_t num_trees, std::uint64_t seed, const ForestOptions& options) {
  if (num_trees < 1) throw Error("random forest: num_trees must be >= 1");
  const ForestBuilder builder(x, y, options);
  Warnings warnings;
  if (mtry < 1 || mtry > x.cols()) {
    const auto clamped = std::clamp<std::size_t>(mtry, 1, x.cols());
    warnings.push_back("random forest: mtry = " + std::to_string(mtry) + " clamped to " + std::to_string(clamped));
    mtry = clamped;
  }
  auto model = builder.fit(mtry, num_trees, seed);
  model->warnings_ = std::move(warnings);
  return model;
}

}  // namespace spcv
