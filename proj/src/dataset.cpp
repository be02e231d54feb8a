#include "spcv/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace spcv {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Splits one CSV record. Double-quoted fields may contain commas; a doubled
// quote inside quotes is a literal quote.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::optional<double> parse_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

// ---------------------------------------------------------------------------

void FeatureSchema::validate() const {
  std::set<std::string> seen;
  for (const auto& c : columns) {
    if (c.name.empty()) throw Error("schema: empty column name");
    if (!seen.insert(c.name).second) throw Error("schema: duplicate column '" + c.name + "'");
    if (c.name == x_column || c.name == y_column || c.name == label_column)
      throw Error("schema: column '" + c.name + "' is a coordinate or label column and cannot be a feature");
    if (c.kind == ColumnKind::categorical) {
      if (c.levels.size() < 2) throw Error("schema: categorical column '" + c.name + "' needs at least 2 levels");
      std::set<std::string> lv(c.levels.begin(), c.levels.end());
      if (lv.size() != c.levels.size()) throw Error("schema: duplicate level in column '" + c.name + "'");
    }
  }
  if (x_column.empty() || y_column.empty() || label_column.empty())
    throw Error("schema: coordinate and label columns must be named");
  if (x_column == y_column || x_column == label_column || y_column == label_column)
    throw Error("schema: coordinate and label columns must be distinct");
}

std::optional<std::size_t> FeatureSchema::find(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

Dataset::Dataset(FeatureSchema schema, Matrix features, std::vector<Point> coords, std::vector<std::uint8_t> labels)
    : schema_(std::move(schema)), features_(std::move(features)), coords_(std::move(coords)), labels_(std::move(labels)) {
  schema_.validate();
  const auto n = labels_.size();
  if (coords_.size() != n || features_.rows() != n) throw Error("dataset: row counts disagree");
  if (n > 0 && features_.cols() != schema_.columns.size()) throw Error("dataset: feature width does not match schema");
  for (auto l : labels_)
    if (l > 1) throw Error("dataset: labels must be 0 or 1");
  for (std::size_t j = 0; j < schema_.columns.size(); ++j) {
    const auto& col = schema_.columns[j];
    for (std::size_t i = 0; i < n; ++i) {
      const double v = features_(i, j);
      if (!std::isfinite(v)) throw Error("dataset: non-finite value in column '" + col.name + "'");
      if (col.kind == ColumnKind::categorical &&
          (v < 0 || v != std::floor(v) || v >= static_cast<double>(col.levels.size())))
        throw Error("dataset: level index out of range in column '" + col.name + "'");
    }
  }
}

std::size_t Dataset::positives() const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

bool Dataset::has_both_classes() const noexcept {
  const auto p = positives();
  return p > 0 && p < labels_.size();
}

Dataset Dataset::subset(std::span<const RowIndex> rows) const {
  std::vector<Point> c;
  std::vector<std::uint8_t> l;
  c.reserve(rows.size());
  l.reserve(rows.size());
  for (auto r : rows) {
    c.push_back(coords_[r]);
    l.push_back(labels_[r]);
  }
  Matrix f = features_.select_rows(rows);
  if (rows.empty()) f = Matrix(0, schema_.columns.size());
  return Dataset(schema_, std::move(f), std::move(c), std::move(l));
}

Dataset Dataset::with_labels(std::vector<std::uint8_t> labels) const {
  return Dataset(schema_, features_, coords_, std::move(labels));
}

// ---------------------------------------------------------------------------

LoadResult load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw Error("'" + path.string() + "' is empty");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  const auto header = split_record(line);
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < header.size(); ++i) pos.emplace(header[i], i);

  auto locate = [&](const std::string& name) {
    auto it = pos.find(name);
    if (it == pos.end()) throw Error("'" + path.string() + "': missing header column '" + name + "'");
    return it->second;
  };
  const auto xi = locate(schema.x_column);
  const auto yi = locate(schema.y_column);
  const auto li = locate(schema.label_column);
  std::vector<std::size_t> fi;
  for (const auto& c : schema.columns) fi.push_back(locate(c.name));

  Matrix features(0, schema.columns.size());
  std::vector<Point> coords;
  std::vector<std::uint8_t> labels;
  std::size_t dropped = 0;
  std::size_t line_no = 1;
  std::vector<double> row(schema.columns.size());

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_record(line);
    if (cells.size() != header.size())
      throw Error("'" + path.string() + "' line " + std::to_string(line_no) + ": expected " +
                  std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));

    const bool missing = cells[xi].empty() || cells[yi].empty() || cells[li].empty() ||
                         std::any_of(fi.begin(), fi.end(), [&](auto i) { return cells[i].empty(); });
    if (missing) {
      ++dropped;
      continue;
    }

    auto number = [&](std::size_t cell, const std::string& column) {
      auto v = parse_number(cells[cell]);
      if (!v)
        throw Error("'" + path.string() + "' line " + std::to_string(line_no) + ", column '" + column +
                    "': not a number: '" + cells[cell] + "'");
      return *v;
    };

    for (std::size_t j = 0; j < schema.columns.size(); ++j) {
      const auto& col = schema.columns[j];
      const auto& text = cells[fi[j]];
      if (col.kind == ColumnKind::numeric) {
        row[j] = number(fi[j], col.name);
      } else {
        auto it = std::find(col.levels.begin(), col.levels.end(), text);
        if (it == col.levels.end())
          throw Error("'" + path.string() + "' line " + std::to_string(line_no) + ", column '" + col.name +
                      "': unknown level '" + text + "'");
        row[j] = static_cast<double>(it - col.levels.begin());
      }
    }
    const double label = number(li, schema.label_column);
    if (label != 0.0 && label != 1.0)
      throw Error("'" + path.string() + "' line " + std::to_string(line_no) + ": label must be 0 or 1");

    features.append_row(row);
    coords.push_back({number(xi, schema.x_column), number(yi, schema.y_column)});
    labels.push_back(static_cast<std::uint8_t>(label));
  }
  return {Dataset(schema, std::move(features), std::move(coords), std::move(labels)), dropped};
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  const auto& s = data.schema();
  out << s.x_column << ',' << s.y_column;
  for (const auto& c : s.columns) out << ',' << c.name;
  out << ',' << s.label_column << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << format_double(data.coords()[i].x) << ',' << format_double(data.coords()[i].y);
    for (std::size_t j = 0; j < s.columns.size(); ++j) {
      const double v = data.features()(i, j);
      out << ',';
      if (s.columns[j].kind == ColumnKind::categorical)
        out << s.columns[j].levels[static_cast<std::size_t>(v)];
      else
        out << format_double(v);
    }
    out << ',' << static_cast<int>(data.labels()[i]) << '\n';
  }
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

NumericSummary summarize_column(std::string name, std::span<const double> values) {
  NumericSummary s;
  s.name = std::move(name);
  std::vector<double> v;
  v.reserve(values.size());
  for (double x : values) {
    if (std::isnan(x))
      ++s.na_count;
    else
      v.push_back(x);
  }
  s.n = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  s.q1 = quantile_sorted(v, 0.25);
  s.median = quantile_sorted(v, 0.5);
  s.q3 = quantile_sorted(v, 0.75);
  s.iqr = s.q3 - s.q1;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

SummaryTable summarize(const Dataset& data) {
  if (data.size() == 0) throw Error("summarize: empty dataset");
  SummaryTable t;
  const auto& schema = data.schema();
  const double n = static_cast<double>(data.size());
  std::vector<double> col(data.size());
  for (std::size_t j = 0; j < schema.columns.size(); ++j) {
    for (std::size_t i = 0; i < data.size(); ++i) col[i] = data.features()(i, j);
    const auto& c = schema.columns[j];
    if (c.kind == ColumnKind::numeric) {
      t.numeric.push_back(summarize_column(c.name, col));
    } else {
      std::vector<std::size_t> counts(c.levels.size(), 0);
      for (double v : col) ++counts[static_cast<std::size_t>(v)];
      for (std::size_t l = 0; l < c.levels.size(); ++l)
        t.categorical.push_back({c.name, c.levels[l], counts[l], 100.0 * static_cast<double>(counts[l]) / n});
    }
  }
  const auto pos = data.positives();
  t.categorical.push_back({schema.label_column, "0", data.size() - pos, 100.0 * static_cast<double>(data.size() - pos) / n});
  t.categorical.push_back({schema.label_column, "1", pos, 100.0 * static_cast<double>(pos) / n});
  return t;
}

// ---------------------------------------------------------------------------

DesignMatrix one_hot(const Dataset& data) {
  const auto& schema = data.schema();
  if (schema.columns.empty()) throw Error("one_hot: schema has no feature columns");

  struct Source {
    std::size_t column;
    int level;  // -1 for numeric pass-through
  };
  std::vector<Source> sources;
  DesignMatrix out;
  for (std::size_t j = 0; j < schema.columns.size(); ++j) {
    const auto& c = schema.columns[j];
    if (c.kind == ColumnKind::numeric) {
      sources.push_back({j, -1});
      out.columns.push_back(c.name);
      continue;
    }
    std::set<int> observed;
    for (std::size_t i = 0; i < data.size(); ++i) observed.insert(static_cast<int>(data.features()(i, j)));
    if (observed.size() < 2) {
      out.warnings.push_back("one_hot: column '" + c.name + "' has a single observed level; no indicators emitted");
      continue;
    }
    for (std::size_t l = 1; l < c.levels.size(); ++l) {
      sources.push_back({j, static_cast<int>(l)});
      out.columns.push_back(c.name + "=" + c.levels[l]);
    }
  }

  out.x = Matrix(data.size(), sources.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const double v = data.features()(i, sources[k].column);
      out.x(i, k) = sources[k].level < 0 ? v : (static_cast<int>(v) == sources[k].level ? 1.0 : 0.0);
    }
  }
  return out;
}

}  // namespace spcv
