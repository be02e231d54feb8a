#include <fstream>
#include <sstream>

#include "spcv/dataset.hpp"
#include "spcv/keyvalue.hpp"

namespace spcv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<KeyValue> parse_key_values(const std::string& text, const std::string& origin) {
  std::vector<KeyValue> out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error(origin + ":" + std::to_string(no) + ": expected 'key = value'");
    KeyValue kv{trim(t.substr(0, eq)), trim(t.substr(eq + 1)), no};
    if (kv.key.empty()) throw Error(origin + ":" + std::to_string(no) + ": empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

FeatureSchema parse_schema(const std::string& text) {
  FeatureSchema s;
  bool have_coords = false, have_label = false;
  for (const auto& kv : parse_key_values(text, "schema")) {
    const auto where = "schema:" + std::to_string(kv.line) + ": ";
    if (kv.key == "coords") {
      auto parts = split_list(kv.value);
      if (parts.size() != 2) throw Error(where + "coords needs two column names");
      s.x_column = parts[0];
      s.y_column = parts[1];
      have_coords = true;
    } else if (kv.key == "label") {
      s.label_column = kv.value;
      have_label = true;
    } else if (kv.key == "numeric") {
      s.columns.push_back(ColumnSpec::numeric(kv.value));
    } else if (kv.key == "categorical") {
      const auto colon = kv.value.find(':');
      if (colon == std::string::npos) throw Error(where + "categorical needs 'name: level, level, ...'");
      s.columns.push_back(ColumnSpec::categorical(trim(kv.value.substr(0, colon)), split_list(kv.value.substr(colon + 1))));
    } else {
      throw Error(where + "unknown key '" + kv.key + "'");
    }
  }
  if (!have_coords) throw Error("schema: missing 'coords'");
  if (!have_label) throw Error("schema: missing 'label'");
  s.validate();
  return s;
}

FeatureSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open schema '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_schema(ss.str());
}

std::string format_schema(const FeatureSchema& schema) {
  std::ostringstream out;
  out << "coords = " << schema.x_column << ", " << schema.y_column << '\n';
  out << "label = " << schema.label_column << '\n';
  for (const auto& c : schema.columns) {
    if (c.kind == ColumnKind::numeric) {
      out << "numeric = " << c.name << '\n';
    } else {
      out << "categorical = " << c.name << ':';
      for (std::size_t i = 0; i < c.levels.size(); ++i) out << (i ? ", " : " ") << c.levels[i];
      out << '\n';
    }
  }
  return out.str();
}

void write_schema(const std::filesystem::path& path, const FeatureSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << format_schema(schema);
}

}  // namespace spcv
