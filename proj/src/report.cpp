#include "spcv/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "spcv/dataset.hpp"
#include "spcv/results_io.hpp"

namespace spcv {

namespace {

using CellKey = std::tuple<std::string, std::string, std::size_t>;  // setup, learner, budget

std::set<CellKey> cell_keys(const std::vector<Record>& records) {
  std::set<CellKey> keys;
  for (const auto& r : records) keys.insert({r.setup, to_string(r.learner), r.budget});
  return keys;
}

}  // namespace

void write_boxplot_csv(std::ostream& out, const std::vector<Record>& records) {
  out << "setup,learner,budget,min,q1,median,q3,max,repetitions\n";
  for (const auto& [setup, learner, budget] : cell_keys(records)) {
    auto means = repetition_means(records, setup, parse_learner(learner), budget);
    if (means.empty()) continue;
    std::sort(means.begin(), means.end());
    out << setup << ',' << learner << ',' << budget << ',' << format_double(means.front()) << ','
        << format_double(quantile_sorted(means, 0.25)) << ',' << format_double(quantile_sorted(means, 0.5)) << ','
        << format_double(quantile_sorted(means, 0.75)) << ',' << format_double(means.back()) << ','
        << means.size() << '\n';
  }
}

void write_optimism_csv(std::ostream& out, const std::vector<Record>& records) {
  out << "learner,budget,nonspatial_setup,spatial_setup,auroc_nonspatial,auroc_spatial,absolute,"
         "relative_to_nonspatial_pct,relative_to_spatial_pct\n";
  const std::pair<std::string, std::string> pairs[] = {{"non-spatial/non-spatial", "spatial/spatial"},
                                                       {"non-spatial/none", "spatial/none"}};
  std::set<std::pair<std::string, std::size_t>> learner_budgets;
  for (const auto& r : records) learner_budgets.insert({to_string(r.learner), r.budget});
  for (const auto& [learner, budget] : learner_budgets)
    for (const auto& [ns, sp] : pairs) {
      const auto a = cell_mean(records, ns, parse_learner(learner), budget);
      const auto b = cell_mean(records, sp, parse_learner(learner), budget);
      if (!a || !b) continue;
      const auto o = optimism_from_means(*a, *b);
      out << learner << ',' << budget << ',' << ns << ',' << sp << ',' << format_double(o.nonspatial) << ','
          << format_double(o.spatial) << ',' << format_double(o.absolute) << ','
          << format_double(o.relative_to_nonspatial) << ',' << format_double(o.relative_to_spatial) << '\n';
    }
}

std::string format_matrix(const std::vector<Record>& records) {
  std::set<std::size_t> budgets;
  std::set<std::string> setups;
  std::vector<LearnerKind> learners;
  for (const auto& r : records) {
    budgets.insert(r.budget);
    setups.insert(r.setup);
    if (std::find(learners.begin(), learners.end(), r.learner) == learners.end()) learners.push_back(r.learner);
  }
  std::sort(learners.begin(), learners.end());
  std::ostringstream out;
  char buf[64];
  for (auto b : budgets) {
    out << "budget " << b << '\n';
    std::snprintf(buf, sizeof buf, "  %-26s", "setup");
    out << buf;
    for (auto l : learners) {
      std::snprintf(buf, sizeof buf, "%8s", to_string(l).c_str());
      out << buf;
    }
    out << '\n';
    for (const auto& s : setups) {
      bool any = false;
      std::ostringstream row;
      std::snprintf(buf, sizeof buf, "  %-26s", s.c_str());
      row << buf;
      for (auto l : learners) {
        const auto m = cell_mean(records, s, l, b);
        if (m) {
          std::snprintf(buf, sizeof buf, "%8.3f", *m);
          any = true;
        } else {
          std::snprintf(buf, sizeof buf, "%8s", "-");
        }
        row << buf;
      }
      if (any) out << row.str() << '\n';
    }
  }
  return out.str();
}

}  // namespace spcv
