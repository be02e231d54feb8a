#include "spcv/results_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace spcv {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void write_row(std::ostream& out, const Record& r, bool with_time) {
  out << r.setup << ',' << to_string(r.learner) << ',' << r.budget << ',' << r.repetition << ',' << r.fold << ','
      << (r.auroc ? format_double(*r.auroc) : std::string()) << ',' << quote(r.chosen_params_json) << ','
      << r.n_test << ',' << r.n_pos_test << ',' << to_string(r.status);
  if (with_time) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    out << ',' << buf;
  }
  out << '\n';
}

template <typename T>
T parse_number(const std::string& field, const std::string& what, const std::string& where) {
  T v{};
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (field.empty() || res.ec != std::errc() || res.ptr != end)
    throw Error(where + ": invalid " + what + " '" + field + "'");
  return v;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw Error("unterminated quoted field");
  out.push_back(std::move(cur));
  return out;
}

void write_results_csv(std::ostream& out, std::vector<Record> records) {
  sort_records(records);
  out << kResultsHeader << '\n';
  for (const auto& r : records) write_row(out, r, true);
}

void write_results_csv(const std::filesystem::path& path, const std::vector<Record>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_results_csv(out, records);
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<Record> read_results_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw Error(origin + ": empty results file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw Error(origin + ":1: unexpected header '" + line + "'");
  std::vector<Record> records;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    const std::string where = origin + ":" + std::to_string(number);
    std::vector<std::string> f;
    try {
      f = split_csv_line(line);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    if (f.size() != 11) throw Error(where + ": expected 11 fields, found " + std::to_string(f.size()));
    Record r;
    r.setup = CvSetup::parse(f[0]).name();
    try {
      r.learner = parse_learner(f[1]);
      r.status = parse_record_status(f[9]);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    r.budget = parse_number<std::size_t>(f[2], "budget", where);
    r.repetition = parse_number<std::size_t>(f[3], "repetition", where);
    r.fold = parse_number<std::size_t>(f[4], "fold", where);
    if (!f[5].empty()) {
      const double a = parse_number<double>(f[5], "auroc", where);
      if (!(a >= 0.0 && a <= 1.0)) throw Error(where + ": auroc outside [0, 1]");
      r.auroc = a;
    }
    if (r.status == RecordStatus::ok && !r.auroc) throw Error(where + ": status ok without an auroc");
    r.chosen_params_json = f[6];
    try {
      (void)ParamSetting::from_json(f[6]);
    } catch (const std::exception& e) {
      throw Error(where + ": invalid chosen_params_json: " + e.what());
    }
    r.n_test = parse_number<std::size_t>(f[7], "n_test", where);
    r.n_pos_test = parse_number<std::size_t>(f[8], "n_pos_test", where);
    r.wall_ms = parse_number<double>(f[10], "wall_ms", where);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<Record> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return read_results_csv(in, path.string());
}

std::string canonical_results(std::vector<Record> records) {
  sort_records(records);
  std::ostringstream out;
  for (const auto& r : records) write_row(out, r, false);
  return out.str();
}

std::string summary_json(const std::vector<Record>& records) {
  using json = nlohmann::ordered_json;
  std::set<std::size_t> budgets;
  std::set<std::string> setups;
  std::set<std::string> learners;
  for (const auto& r : records) {
    budgets.insert(r.budget);
    setups.insert(r.setup);
    learners.insert(to_string(r.learner));
  }
  json doc;
  json matrix = json::object();
  for (auto b : budgets) {
    json block = json::object();
    for (const auto& s : setups) {
      json row = json::object();
      for (const auto& l : learners) {
        const auto m = cell_mean(records, s, parse_learner(l), b);
        if (m) row[l] = *m;
      }
      if (!row.empty()) block[s] = row;
    }
    matrix[std::to_string(b)] = block;
  }
  doc["overall_mean_auroc"] = matrix;
  json cells = json::array();
  std::map<std::tuple<std::string, std::string, std::size_t>, std::array<std::size_t, 3>> counts;
  for (const auto& r : records) ++counts[{r.setup, to_string(r.learner), r.budget}][static_cast<int>(r.status)];
  for (const auto& [key, c] : counts) {
    const auto& [s, l, b] = key;
    json cell = {{"setup", s}, {"learner", l}, {"budget", b}, {"ok", c[0]}, {"missing", c[1]}, {"failed", c[2]}};
    const auto m = cell_mean(records, s, parse_learner(l), b);
    cell["overall_mean_auroc"] = m ? json(*m) : json(nullptr);
    cells.push_back(cell);
  }
  doc["cells"] = cells;
  return doc.dump(2) + "\n";
}

void write_curve_csv(std::ostream& out, const std::vector<Record>& records) {
  out << "learner,setup,budget,mean_auroc,q1,q3,iqr,repetitions\n";
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& r : records) keys.insert({to_string(r.learner), r.setup});
  for (const auto& [learner, setup] : keys) {
    std::vector<CurvePoint> curve;
    try {
      curve = tuning_curve(records, parse_learner(learner), setup);
    } catch (const Error&) {
      continue;
    }
    for (const auto& p : curve)
      out << learner << ',' << setup << ',' << p.budget << ',' << format_double(p.mean) << ','
          << format_double(p.q1) << ',' << format_double(p.q3) << ',' << format_double(p.iqr) << ','
          << p.repetitions << '\n';
  }
}

}  // namespace spcv
