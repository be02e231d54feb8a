#include "spcv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spcv {

FoldScore auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw Error("auroc: scores and labels differ in length");
  if (scores.empty()) throw Error("auroc: empty input");
  FoldScore out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw Error("auroc: NaN score at position " + std::to_string(i));
    (labels[i] ? out.n_pos : out.n_neg) += 1;
  }
  if (out.n_pos == 0 || out.n_neg == 0) return out;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  // Sum of (1-based) midranks over positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t pos_in_tie = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      pos_in_tie += labels[order[j]];
      ++j;
    }
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    rank_sum += midrank * static_cast<double>(pos_in_tie);
    i = j;
  }
  const double np = static_cast<double>(out.n_pos);
  const double nn = static_cast<double>(out.n_neg);
  out.auroc = (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
  return out;
}

Aggregate aggregate(std::span<const RepFoldScore> scores) {
  if (scores.empty()) throw Error("aggregate: no fold scores");
  // Running means: m += (x - m) / k is exact when every value is equal.
  std::map<std::size_t, std::pair<double, std::size_t>> sums;
  std::map<std::size_t, bool> seen;
  Aggregate out;
  for (const auto& s : scores) {
    seen[s.repetition] = true;
    if (s.auroc) {
      auto& [mean, count] = sums[s.repetition];
      ++count;
      mean += (*s.auroc - mean) / static_cast<double>(count);
    } else {
      ++out.missing_folds;
    }
  }
  for (const auto& [rep, _] : seen) {
    auto it = sums.find(rep);
    if (it == sums.end()) {
      out.excluded_repetitions.push_back(rep);
      out.warnings.push_back("repetition " + std::to_string(rep) + " has no scored folds and is excluded");
      continue;
    }
    out.repetition_means[rep] = it->second.first;
  }
  if (!out.repetition_means.empty()) {
    double overall = 0.0;
    std::size_t count = 0;
    for (const auto& [rep, mean] : out.repetition_means) overall += (mean - overall) / static_cast<double>(++count);
    out.overall = overall;
  }
  return out;
}

}  // namespace spcv
