#include "spcv/learners/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spcv/learners/glm.hpp"

namespace spcv {

BoostingSetting BoostingSetting::from(const ParamSetting& setting) {
  BoostingSetting s;
  if (setting.contains("n_tree")) s.n_tree = static_cast<std::size_t>(setting.integer("n_tree"));
  if (setting.contains("shrinkage")) s.shrinkage = setting.real("shrinkage");
  if (setting.contains("interaction_depth"))
    s.interaction_depth = static_cast<std::size_t>(setting.integer("interaction_depth"));
  return s;
}

double RegressionTree::eval(std::span<const double> row) const {
  const Node* node = &nodes[0];
  while (node->feature >= 0)
    node = &nodes[static_cast<std::size_t>(row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                                                         : node->right)];
  return node->value;
}

namespace {

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

// Grows stage trees on a fixed training matrix. Every feature is cut into
// at most `max_bins` bins of (nearly) equal numbers of distinct training
// values; a feature with few distinct values gets one bin per value, which
// makes the split search exact. Splits are searched over bin boundaries with
// per-node gradient histograms; a child's histogram is either built from its
// rows (smaller child) or obtained by subtraction (larger child).
class StageGrower {
 public:
  StageGrower(const Matrix& x, std::size_t max_depth, std::size_t min_node_size, std::size_t max_bins)
      : n_(x.rows()), p_(x.cols()), max_depth_(max_depth), min_node_(std::max<std::size_t>(min_node_size, 1)),
        bins_(n_ * p_), offset_(p_ + 1, 0), rows_(n_), inverse_(n_ + 1, 0.0) {
    for (std::size_t k = 1; k <= n_; ++k) inverse_[k] = 1.0 / static_cast<double>(k);
    max_bins = std::clamp<std::size_t>(max_bins, 2, 65535);
    std::vector<double> distinct;
    for (std::size_t f = 0; f < p_; ++f) {
      distinct.clear();
      for (std::size_t i = 0; i < n_; ++i) distinct.push_back(x(i, f));
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      const std::size_t d = distinct.size();
      const std::size_t nb = std::min(d, max_bins);
      // Bin k holds distinct ranks [start(k), start(k + 1)).
      auto start = [&](std::size_t k) { return k * d / nb; };
      std::vector<double> upper(nb);
      for (std::size_t k = 0; k < nb; ++k) upper[k] = distinct[start(k + 1) - 1];
      offset_[f + 1] = offset_[f] + nb;
      for (std::size_t k = 0; k + 1 < nb; ++k) thresholds_.push_back(midpoint(upper[k], distinct[start(k + 1)]));
      thresholds_.push_back(upper[nb - 1]);
      for (std::size_t i = 0; i < n_; ++i) {
        const auto it = std::lower_bound(upper.begin(), upper.end(), x(i, f));
        bins_[i * p_ + f] = static_cast<std::uint16_t>(it - upper.begin());
      }
    }
    hist_size_ = offset_[p_];
  }

  // Fits one stage to gradients g and hessians h, adds shrinkage * leaf
  // values to `f`, and returns the tree.
  RegressionTree grow(const std::vector<double>& g, const std::vector<double>& h, double shrinkage,
                      std::vector<double>& f) {
    RegressionTree tree;
    tree.nodes.reserve(64);
    tree.nodes.emplace_back();
    std::iota(rows_.begin(), rows_.end(), 0u);
    const double* gp = g.data();

    double sum_g = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      sum_g += gp[i];
      sum_sq += gp[i] * gp[i];
    }
    stack_.clear();
    Pending root{0, 0, n_, 0, sum_g, sum_sq, -1};
    if (splittable(root)) {
      root.hist = acquire();
      build(root.hist, 0, n_, gp);
    }
    stack_.push_back(root);

    while (!stack_.empty()) {
      const Pending cur = stack_.back();
      stack_.pop_back();
      const std::size_t count = cur.end - cur.begin;

      Split best;
      if (cur.hist >= 0) {
        best = search(cur, count);
        if (best.feature >= 0 && !(best.gain > 1e-14 * cur.sum_sq)) best.feature = -1;
      }

      if (best.feature < 0) {
        if (cur.hist >= 0) release(cur.hist);
        double sg = 0.0, sh = 0.0;
        for (std::size_t i = cur.begin; i < cur.end; ++i) {
          sg += gp[rows_[i]];
          sh += h[rows_[i]];
        }
        const double value = sh > 1e-300 ? shrinkage * sg / sh : 0.0;
        tree.nodes[static_cast<std::size_t>(cur.node)].value = value;
        for (std::size_t i = cur.begin; i < cur.end; ++i) f[rows_[i]] += value;
        continue;
      }

      // Partition rows: left = bin <= best.bin on best.feature.
      const std::size_t fidx = static_cast<std::size_t>(best.feature);
      std::size_t lo = cur.begin, hi = cur.end;
      while (lo < hi) {
        if (bins_[rows_[lo] * p_ + fidx] <= best.bin)
          ++lo;
        else
          std::swap(rows_[lo], rows_[--hi]);
      }
      const std::size_t mid = lo;

      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[static_cast<std::size_t>(cur.node)];
      node.feature = best.feature;
      node.threshold = thresholds_[offset_[fidx] + best.bin];
      node.left = left;
      node.right = left + 1;

      Pending lp{left, cur.begin, mid, cur.depth + 1, best.left_g, 0.0, -1};
      Pending rp{left + 1, mid, cur.end, cur.depth + 1, cur.sum_g - best.left_g, 0.0, -1};
      const bool left_small = mid - cur.begin <= cur.end - mid;
      Pending& small = left_small ? lp : rp;
      Pending& large = left_small ? rp : lp;
      double small_sq = 0.0;
      for (std::size_t i = small.begin; i < small.end; ++i) small_sq += gp[rows_[i]] * gp[rows_[i]];
      small.sum_sq = small_sq;
      large.sum_sq = std::max(cur.sum_sq - small_sq, 0.0);
      const bool need_small = splittable(small), need_large = splittable(large);
      if (need_small || need_large) {
        const int sh = acquire();
        build(sh, small.begin, small.end, gp);
        if (need_large) {
          subtract(cur.hist, sh);
          large.hist = cur.hist;
        } else {
          release(cur.hist);
        }
        if (need_small)
          small.hist = sh;
        else
          release(sh);
      } else {
        release(cur.hist);
      }
      stack_.push_back(rp);
      stack_.push_back(lp);
    }
    return tree;
  }

 private:
  struct Pending {
    int node;
    std::size_t begin, end, depth;
    double sum_g, sum_sq;
    int hist;  // histogram slot, -1 when the node cannot split
  };
  struct Split {
    int feature = -1;
    std::uint16_t bin = 0;
    double gain = 0.0;
    double left_g = 0.0;
  };

  bool splittable(const Pending& p) const {
    return p_ > 0 && p.depth < max_depth_ && p.end - p.begin >= 2 * min_node_;
  }

  int acquire() {
    if (!free_.empty()) {
      const int id = free_.back();
      free_.pop_back();
      return id;
    }
    hist_g_.resize(hist_g_.size() + hist_size_);
    hist_n_.resize(hist_n_.size() + hist_size_);
    return static_cast<int>(hist_g_.size() / hist_size_) - 1;
  }
  void release(int id) { free_.push_back(id); }

  void build(int id, std::size_t begin, std::size_t end, const double* gp) {
    double* hg = hist_g_.data() + static_cast<std::size_t>(id) * hist_size_;
    std::uint32_t* hn = hist_n_.data() + static_cast<std::size_t>(id) * hist_size_;
    std::fill(hg, hg + hist_size_, 0.0);
    std::fill(hn, hn + hist_size_, 0u);
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = rows_[i];
      const std::uint16_t* b = bins_.data() + static_cast<std::size_t>(r) * p_;
      for (std::size_t f = 0; f < p_; ++f) {
        hg[offset_[f] + b[f]] += gp[r];
        ++hn[offset_[f] + b[f]];
      }
    }
  }

  void subtract(int target, int other) {
    double* tg = hist_g_.data() + static_cast<std::size_t>(target) * hist_size_;
    std::uint32_t* tn = hist_n_.data() + static_cast<std::size_t>(target) * hist_size_;
    const double* og = hist_g_.data() + static_cast<std::size_t>(other) * hist_size_;
    const std::uint32_t* on = hist_n_.data() + static_cast<std::size_t>(other) * hist_size_;
    for (std::size_t k = 0; k < hist_size_; ++k) {
      tg[k] -= og[k];
      tn[k] -= on[k];
    }
  }

  // Best boundary over all features; ties keep the lowest feature and bin.
  Split search(const Pending& cur, std::size_t count) const {
    Split best;
    const double* hg = hist_g_.data() + static_cast<std::size_t>(cur.hist) * hist_size_;
    const std::uint32_t* hn = hist_n_.data() + static_cast<std::size_t>(cur.hist) * hist_size_;
    const double parent = cur.sum_g * cur.sum_g * inverse_[count];
    for (std::size_t f = 0; f < p_; ++f) {
      const std::size_t nb = offset_[f + 1] - offset_[f];
      double gl = 0.0;
      std::size_t nl = 0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        const auto c = hn[offset_[f] + b];
        if (c == 0) continue;
        nl += c;
        gl += hg[offset_[f] + b];
        if (nl < min_node_) continue;
        const std::size_t nr = count - nl;
        if (nr < min_node_) break;
        const double gr = cur.sum_g - gl;
        const double gain = gl * gl * inverse_[nl] + gr * gr * inverse_[nr] - parent;
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          best.bin = static_cast<std::uint16_t>(b);
          best.left_g = gl;
        }
      }
    }
    return best;
  }

  std::size_t n_, p_, max_depth_, min_node_;
  std::vector<std::uint16_t> bins_;   // row-major n x p bin indices
  std::vector<std::size_t> offset_;   // first histogram slot of each feature
  std::vector<double> thresholds_;    // per bin: split value between it and the next bin
  std::size_t hist_size_ = 0;
  std::vector<std::uint32_t> rows_;
  std::vector<double> inverse_;
  std::vector<Pending> stack_;
  std::vector<double> hist_g_;
  std::vector<std::uint32_t> hist_n_;
  std::vector<int> free_;
};

void check_inputs(const Matrix& x, std::span<const std::uint8_t> y, const BoostingSetting& s) {
  if (x.rows() == 0) throw Error("boosting: no training rows");
  if (y.size() != x.rows()) throw Error("boosting: x and y differ in length");
  if (s.n_tree < 1) throw Error("boosting: n_tree must be >= 1");
  if (!(s.shrinkage > 0.0) || !std::isfinite(s.shrinkage)) throw Error("boosting: shrinkage must be positive");
  if (s.interaction_depth < 1) throw Error("boosting: interaction_depth must be >= 1");
  std::size_t pos = 0;
  for (auto v : y) pos += v;
  if (pos == 0 || pos == y.size()) throw Error("boosting: training labels contain a single class");
}

double initial_link(std::span<const std::uint8_t> y) {
  double pos = 0.0;
  for (auto v : y) pos += v;
  const double p = pos / static_cast<double>(y.size());
  return std::log(p / (1.0 - p));
}

// Shared training loop; `on_tree` receives every finished stage.
template <typename OnTree>
double boost(const Matrix& x, std::span<const std::uint8_t> y, const BoostingSetting& s,
             const BoostingOptions& options, std::vector<double>* deviance, OnTree&& on_tree) {
  check_inputs(x, y, s);
  const std::size_t n = x.rows();
  const double f0 = initial_link(y);
  std::vector<double> f(n, f0), g(n), h(n);
  StageGrower grower(x, s.interaction_depth, options.min_node_size, options.max_bins);
  if (deviance) {
    deviance->clear();
    deviance->push_back(binomial_deviance(f, y));
  }
  for (std::size_t m = 0; m < s.n_tree; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = logistic(f[i]);
      g[i] = static_cast<double>(y[i]) - p;
      h[i] = p * (1.0 - p);
    }
    on_tree(grower.grow(g, h, s.shrinkage, f));
    if (deviance) deviance->push_back(binomial_deviance(f, y));
  }
  return f0;
}

}  // namespace

std::vector<double> BoostingModel::link(const Matrix& x) const {
  if (x.cols() != width_) throw Error("boosting: query width differs from training width");
  std::vector<double> out(x.rows(), f0_);
  for (const auto& t : trees_)
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] += t.eval(x.row(i));
  return out;
}

std::vector<double> BoostingModel::score(const Matrix& x) const {
  auto out = link(x);
  for (auto& v : out) v = logistic(v);
  return out;
}

std::unique_ptr<BoostingModel> fit_brt(const Matrix& x, std::span<const std::uint8_t> y,
                                       const BoostingSetting& setting, const BoostingOptions& options) {
  auto model = std::unique_ptr<BoostingModel>(new BoostingModel(x.cols()));
  model->trees_.reserve(setting.n_tree);
  model->f0_ = boost(x, y, setting, options, options.track_deviance ? &model->deviance_ : nullptr,
                     [&](RegressionTree&& t) { model->trees_.push_back(std::move(t)); });
  return model;
}

std::vector<double> fit_predict_brt(const Matrix& x, std::span<const std::uint8_t> y, const Matrix& test,
                                    const BoostingSetting& setting, const BoostingOptions& options) {
  if (test.cols() != x.cols()) throw Error("boosting: query width differs from training width");
  check_inputs(x, y, setting);
  // Same summation order as BoostingModel::link.
  std::vector<double> f(test.rows(), initial_link(y));
  boost(x, y, setting, options, nullptr, [&](RegressionTree&& t) {
    for (std::size_t i = 0; i < test.rows(); ++i) f[i] += t.eval(test.row(i));
  });
  for (auto& v : f) v = logistic(v);
  return f;
}

}  // namespace spcv
