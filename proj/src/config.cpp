#include "spcv/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "spcv/keyvalue.hpp"

namespace spcv {

namespace {

template <typename T>
T number(const std::string& text, const std::string& where) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) throw Error(where + "invalid number '" + text + "'");
  return v;
}

bool boolean(const std::string& text, const std::string& where) {
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw Error(where + "expected true or false, got '" + text + "'");
}

}  // namespace

std::pair<double, double> parse_extent(const std::string& text) {
  const auto parts = split_list(text);
  if (parts.size() != 1 && parts.size() != 2) throw Error("extent must be W or W,H");
  const double w = number<double>(parts[0], "extent: ");
  const double h = parts.size() == 2 ? number<double>(parts[1], "extent: ") : w;
  return {w, h};
}

RunConfig parse_run_config(const std::string& text, const std::string& origin, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  auto& ex = cfg.experiment;
  ex.budgets.clear();
  ex.learners.clear();
  ex.setups.clear();
  FieldSpec spec;
  bool any_synth = false, have_output = false;
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };

  for (const auto& kv : parse_key_values(text, origin)) {
    const std::string where = origin + ":" + std::to_string(kv.line) + ": ";
    const auto& k = kv.key;
    const auto& v = kv.value;
    try {
      if (k.rfind("synth.", 0) == 0) {
        any_synth = true;
        const auto field = k.substr(6);
        if (field == "n")
          spec.n = number<std::size_t>(v, where);
        else if (field == "extent")
          std::tie(spec.width, spec.height) = parse_extent(v);
        else if (field == "range")
          spec.range = number<double>(v, where);
        else if (field == "sill")
          spec.sill = number<double>(v, where);
        else if (field == "nugget")
          spec.nugget = number<double>(v, where);
        else if (field == "informative")
          spec.n_informative = number<std::size_t>(v, where);
        else if (field == "noise")
          spec.n_noise = number<std::size_t>(v, where);
        else if (field == "intercept")
          spec.intercept = number<double>(v, where);
        else if (field == "seed")
          spec.seed = number<std::uint64_t>(v, where);
        else
          throw Error("unknown key '" + k + "'");
      } else if (k == "dataset") {
        cfg.dataset = resolve(v);
      } else if (k == "schema") {
        cfg.schema = resolve(v);
      } else if (k == "output") {
        cfg.output = resolve(v);
        have_output = true;
      } else if (k == "repetitions") {
        ex.repetitions = number<std::size_t>(v, where);
      } else if (k == "k_outer") {
        ex.k_outer = number<std::size_t>(v, where);
      } else if (k == "k_inner") {
        ex.k_inner = number<std::size_t>(v, where);
      } else if (k == "budget" || k == "budgets") {
        for (const auto& b : split_list(v)) ex.budgets.push_back(number<std::size_t>(b, where));
      } else if (k == "learner" || k == "learners") {
        for (const auto& l : split_list(v)) ex.learners.push_back(parse_learner(l));
      } else if (k == "setup" || k == "setups") {
        for (const auto& s : split_list(v)) ex.setups.push_back(CvSetup::parse(s));
      } else if (k == "seed") {
        ex.master_seed = number<std::uint64_t>(v, where);
      } else if (k == "jobs") {
        ex.jobs = number<std::size_t>(v, where);
      } else if (k == "leakage_monitor") {
        ex.monitor_leakage = boolean(v, where);
      } else {
        throw Error("unknown key '" + k + "'");
      }
    } catch (const Error& e) {
      const std::string msg = e.what();
      throw Error(msg.rfind(where, 0) == 0 ? msg : where + msg);
    }
  }

  if (any_synth == !cfg.dataset.empty())
    throw Error(origin + ": specify either a dataset path or synth.* keys, not " +
                (any_synth ? "both" : "neither"));
  if (!cfg.dataset.empty() && cfg.schema.empty()) throw Error(origin + ": 'dataset' requires 'schema'");
  if (any_synth) {
    spec.validate();
    cfg.synth = spec;
  }
  if (ex.budgets.empty()) ex.budgets = {0};
  if (ex.learners.empty()) ex.learners.assign(kAllLearners.begin(), kAllLearners.end());
  if (ex.setups.empty()) throw Error(origin + ": at least one 'setup' is required");
  if (!have_output) cfg.output = resolve("results");
  ex.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path.string(), path.parent_path());
}

Dataset load_run_dataset(const RunConfig& config, std::size_t* dropped) {
  if (dropped) *dropped = 0;
  if (config.synth) return make_classification(*config.synth);
  auto loaded = load_csv(config.dataset, load_schema(config.schema));
  if (dropped) *dropped = loaded.dropped_rows;
  return std::move(loaded.data);
}

}  // namespace spcv
