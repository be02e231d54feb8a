#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace oracle {

double pairwise_auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j])
        wins += 1.0;
      else if (scores[i] == scores[j])
        wins += 0.5;
    }
  }
  return wins / pairs;
}

double wcss(std::span<const spcv::Point> points, std::span<const int> labels) {
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    double sx = 0, sy = 0;
    int m = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (labels[i] == c) {
        sx += points[i].x;
        sy += points[i].y;
        ++m;
      }
    if (!m) continue;
    sx /= m;
    sy /= m;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (labels[i] == c) total += (points[i].x - sx) * (points[i].x - sx) + (points[i].y - sy) * (points[i].y - sy);
  }
  return total;
}

double best_two_cluster_wcss(std::span<const spcv::Point> points) {
  const std::size_t n = points.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> labels(n);
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) labels[i] = (mask >> i) & 1;
    best = std::min(best, wcss(points, labels));
  }
  return best;
}

CartOracle::CartOracle(const spcv::Matrix& x, std::span<const std::uint8_t> y) {
  std::vector<std::size_t> rows(x.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  build(x, y, rows);
}

int CartOracle::build(const spcv::Matrix& x, std::span<const std::uint8_t> y, std::vector<std::size_t> rows) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  long pos = 0;
  for (auto r : rows) pos += y[r];
  const long n = static_cast<long>(rows.size());
  nodes_[id].vote = 2 * pos > n ? 1.0 : (2 * pos < n ? 0.0 : 0.5);
  if (pos == 0 || pos == n) return id;

  // Impurity n_L * gini_L + n_R * gini_R = n - [(aL)/nL + (aR)/nR] with
  // a = n1^2 + n0^2; compare the bracket exactly as a fraction.
  bool found = false;
  __int128 best_num = 0, best_den = 1;
  int best_f = -1;
  double best_t = 0;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::set<double> values;
    for (auto r : rows) values.insert(x(r, f));
    std::vector<double> v(values.begin(), values.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      double t = (v[i] + v[i + 1]) / 2.0;
      if (!(t < v[i + 1])) t = v[i];
      long nl = 0, pl = 0;
      for (auto r : rows)
        if (x(r, f) <= t) {
          ++nl;
          pl += y[r];
        }
      const long nr = n - nl, pr = pos - pl;
      const __int128 al = static_cast<__int128>(pl) * pl + static_cast<__int128>(nl - pl) * (nl - pl);
      const __int128 ar = static_cast<__int128>(pr) * pr + static_cast<__int128>(nr - pr) * (nr - pr);
      const __int128 num = al * nr + ar * nl, den = static_cast<__int128>(nl) * nr;
      if (!found || num * best_den > best_num * den) {
        found = true;
        best_num = num;
        best_den = den;
        best_f = static_cast<int>(f);
        best_t = t;
      }
    }
  }
  if (!found) return id;
  std::vector<std::size_t> left, right;
  for (auto r : rows) (x(r, static_cast<std::size_t>(best_f)) <= best_t ? left : right).push_back(r);
  nodes_[id].feature = best_f;
  nodes_[id].threshold = best_t;
  const int l = build(x, y, left);
  const int r = build(x, y, right);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

double CartOracle::vote(std::span<const double> row) const {
  int id = 0;
  while (nodes_[id].feature >= 0)
    id = row[static_cast<std::size_t>(nodes_[id].feature)] <= nodes_[id].threshold ? nodes_[id].left : nodes_[id].right;
  return nodes_[id].vote;
}

namespace {

// Euclidean projection onto {0 <= a <= C, y'a = 0} by bisection on the
// multiplier of the equality constraint.
std::vector<double> project(const std::vector<double>& v, const std::vector<double>& y, double cost) {
  auto at = [&](double lambda, std::vector<double>& out) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out[i] = std::clamp(v[i] - lambda * y[i], 0.0, cost);
      s += out[i] * y[i];
    }
    return s;
  };
  std::vector<double> out(v.size());
  double lo = -1.0, hi = 1.0;
  while (at(lo, out) < 0) lo *= 2;
  while (at(hi, out) > 0) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    if (at(mid, out) > 0)
      lo = mid;
    else
      hi = mid;
  }
  at((lo + hi) / 2, out);
  return out;
}

}  // namespace

double svm_dual_reference(std::span<const double> kernel, std::span<const std::uint8_t> labels, double cost,
                          std::vector<double>* alpha_out, int iterations) {
  const std::size_t n = labels.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] ? 1.0 : -1.0;
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q[i * n + j] = y[i] * y[j] * kernel[i * n + j];
  // Lipschitz constant bound: max row sum of |Q|.
  double lip = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::abs(q[i * n + j]);
    lip = std::max(lip, s);
  }
  auto objective = [&](const std::vector<double>& a) {
    double o = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double qa = 0.0;
      for (std::size_t j = 0; j < n; ++j) qa += q[i * n + j] * a[j];
      o += 0.5 * a[i] * qa - a[i];
    }
    return o;
  };
  std::vector<double> a(n, 0.0), prev = a, z = a, g(n), step(n);
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double qa = 0.0;
      for (std::size_t j = 0; j < n; ++j) qa += q[i * n + j] * z[j];
      g[i] = qa - 1.0;
      step[i] = z[i] - g[i] / lip;
    }
    prev = a;
    a = project(step, y, cost);
    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    for (std::size_t i = 0; i < n; ++i) z[i] = a[i] + (t - 1.0) / t_next * (a[i] - prev[i]);
    t = t_next;
  }
  if (alpha_out) *alpha_out = a;
  return objective(a);
}

namespace {

double deviance(const spcv::Matrix& x, std::span<const std::uint8_t> y, std::span<const double> coef) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double eta = coef[0];
    for (std::size_t c = 0; c < x.cols(); ++c) eta += coef[c + 1] * x(i, c);
    // -2 log L with a stable log(1 + exp(.)).
    const double l1p = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
    d += 2.0 * (l1p - (y[i] ? eta : 0.0));
  }
  return d;
}

}  // namespace

std::vector<double> deviance_gradient_fd(const spcv::Matrix& x, std::span<const std::uint8_t> y,
                                         std::span<const double> coef, double h) {
  std::vector<double> c(coef.begin(), coef.end()), g(coef.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double orig = c[k];
    c[k] = orig + h;
    const double up = deviance(x, y, c);
    c[k] = orig - h;
    const double down = deviance(x, y, c);
    c[k] = orig;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

std::vector<double> deviance_gradient(const spcv::Matrix& x, std::span<const std::uint8_t> y,
                                      std::span<const double> coef) {
  std::vector<double> g(coef.size(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double eta = coef[0];
    for (std::size_t c = 0; c < x.cols(); ++c) eta += coef[c + 1] * x(i, c);
    const double p = 1.0 / (1.0 + std::exp(-eta));
    const double r = -2.0 * (static_cast<double>(y[i]) - p);
    g[0] += r;
    for (std::size_t c = 0; c < x.cols(); ++c) g[c + 1] += r * x(i, c);
  }
  return g;
}

}  // namespace oracle
