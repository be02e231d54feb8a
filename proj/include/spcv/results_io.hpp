#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "spcv/experiment.hpp"

namespace spcv {

inline constexpr const char* kResultsHeader =
    "setup,learner,budget,repetition,fold,auroc,chosen_params_json,n_test,n_pos_test,status,wall_ms";

/// Records are written in canonical order; a missing AUROC is an empty
/// field.
void write_results_csv(std::ostream& out, std::vector<Record> records);
void write_results_csv(const std::filesystem::path& path, const std::vector<Record>& records);

/// Throws Error naming the offending line on malformed input.
std::vector<Record> read_results_csv(std::istream& in, const std::string& origin = "results");
std::vector<Record> read_results_csv(const std::filesystem::path& path);

/// Canonical text without the timing column, for comparing runs.
std::string canonical_results(std::vector<Record> records);

/// Setup x learner matrix of overall mean AUROC per budget, plus per-cell
/// fold counts.
std::string summary_json(const std::vector<Record>& records);

/// `learner,setup,budget,mean_auroc,q1,q3,iqr,repetitions` for every
/// (learner, setup) with at least two budgets.
void write_curve_csv(std::ostream& out, const std::vector<Record>& records);

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

/// Shortest round-trip text of a double.
std::string format_double(double v);

}  // namespace spcv
