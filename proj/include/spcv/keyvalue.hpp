#pragma once

#include <string>
#include <vector>

namespace spcv {

/// One `key = value` line of a flat config file.
struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Parses the flat grammar shared by schema and run-config files:
/// blank lines and lines starting with `#` are ignored; every other line is
/// `key = value` with surrounding whitespace trimmed. Keys may repeat.
std::vector<KeyValue> parse_key_values(const std::string& text, const std::string& origin);

/// Splits on commas and trims each element; empty input yields no elements.
std::vector<std::string> split_list(const std::string& text);

}  // namespace spcv
