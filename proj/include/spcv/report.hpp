#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spcv/experiment.hpp"

namespace spcv {

/// `setup,learner,budget,min,q1,median,q3,max,repetitions` over repetition
/// means.
void write_boxplot_csv(std::ostream& out, const std::vector<Record>& records);

/// `learner,budget,nonspatial_setup,spatial_setup,auroc_nonspatial,auroc_spatial,absolute,relative_to_nonspatial_pct,relative_to_spatial_pct`
/// comparing non-spatial/non-spatial with spatial/spatial at every budget
/// both cover, and non-spatial/none with spatial/none.
void write_optimism_csv(std::ostream& out, const std::vector<Record>& records);

/// Human-readable setup x learner table of overall means, one block per
/// budget.
std::string format_matrix(const std::vector<Record>& records);

}  // namespace spcv
