#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

namespace spcv {

using ParamValue = std::variant<std::int64_t, double, std::string>;

/// Named hyperparameter values of one learner configuration. Keys are kept
/// sorted so serialisation is canonical.
class ParamSetting {
 public:
  ParamSetting() = default;
  ParamSetting(std::initializer_list<std::pair<const std::string, ParamValue>> init) : values_(init) {}

  void set(const std::string& name, ParamValue value) { values_[name] = std::move(value); }
  bool contains(const std::string& name) const { return values_.count(name) > 0; }
  bool empty() const noexcept { return values_.empty(); }
  std::size_t size() const noexcept { return values_.size(); }

  std::int64_t integer(const std::string& name) const;
  double real(const std::string& name) const;  // integers widen
  const std::string& text(const std::string& name) const;

  const std::map<std::string, ParamValue>& values() const noexcept { return values_; }

  /// Compact JSON object with sorted keys, e.g. {"C":1.0,"sigma":1.0}.
  std::string to_json() const;
  static ParamSetting from_json(const std::string& json);

  friend bool operator==(const ParamSetting&, const ParamSetting&) = default;

 private:
  const ParamValue& at(const std::string& name) const;
  std::map<std::string, ParamValue> values_;
};

}  // namespace spcv
