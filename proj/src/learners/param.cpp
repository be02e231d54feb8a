#include "spcv/learners/param.hpp"

#include <cmath>
#include <json.hpp>

#include "spcv/common.hpp"

namespace spcv {

const ParamValue& ParamSetting::at(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw Error("missing hyperparameter '" + name + "'");
  return it->second;
}

std::int64_t ParamSetting::integer(const std::string& name) const {
  const auto& v = at(name);
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (auto* d = std::get_if<double>(&v); d && *d == std::floor(*d)) return static_cast<std::int64_t>(*d);
  throw Error("hyperparameter '" + name + "' is not an integer");
}

double ParamSetting::real(const std::string& name) const {
  const auto& v = at(name);
  if (auto* d = std::get_if<double>(&v)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw Error("hyperparameter '" + name + "' is not numeric");
}

const std::string& ParamSetting::text(const std::string& name) const {
  const auto& v = at(name);
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  throw Error("hyperparameter '" + name + "' is not categorical");
}

std::string ParamSetting::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : values_) std::visit([&](const auto& x) { j[k] = x; }, v);
  return j.dump();
}

ParamSetting ParamSetting::from_json(const std::string& json) {
  ParamSetting s;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad parameter JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("parameter JSON must be an object");
  for (const auto& [k, v] : j.items()) {
    if (v.is_number_integer())
      s.set(k, v.get<std::int64_t>());
    else if (v.is_number())
      s.set(k, v.get<double>());
    else if (v.is_string())
      s.set(k, v.get<std::string>());
    else
      throw Error("parameter '" + k + "' has an unsupported JSON type");
  }
  return s;
}

}  // namespace spcv
