#pragma once

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "goldband/harness.hpp"
#include "goldband/strategies.hpp"

namespace goldband {

/// Raised for malformed or out-of-range configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& known,
                                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
T get_as(const nlohmann::json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad or missing value for '" + std::string(key) + "' in " + where);
  }
}

inline ArmParams arm_from_json(const nlohmann::json& j) {
  try {
    if (j.is_array() && j.size() == 2) return ArmParams(j[0].get<double>(), j[1].get<double>());
    reject_unknown_keys(j, {"reliability", "preference"}, "arm");
    return ArmParams(get_as<double>(j, "reliability", "arm"),
                     get_as<double>(j, "preference", "arm"));
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("arm must be {\"reliability\": p, \"preference\": q} or [p, q]");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace detail

inline nlohmann::json arms_to_json(const std::vector<ArmParams>& arms) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& a : arms)
    out.push_back({{"reliability", a.reliability()}, {"preference", a.preference()}});
  return out;
}

inline std::vector<ArmParams> arms_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("arms must be a JSON array");
  std::vector<ArmParams> arms;
  for (const auto& a : j) arms.push_back(detail::arm_from_json(a));
  return arms;
}

inline std::vector<ArmParams> load_arms_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open arms file '" + path + "'");
  try {
    return arms_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("arms file '" + path + "': " + e.what());
  }
}

inline nlohmann::json strategy_to_json(const StrategyConfig& s) {
  nlohmann::json j = {{"kind", std::string(to_string(s.kind))},
                      {"alpha", s.alpha},
                      {"gamma", s.gamma},
                      {"c", s.c},
                      {"d", s.d},
                      {"explore_fraction", s.explore_fraction},
                      {"mode", std::string(to_string(s.mode))}};
  if (s.exploration_per_arm) j["exploration_per_arm"] = *s.exploration_per_arm;
  if (!s.label.empty()) j["label"] = s.label;
  return j;
}

inline StrategyConfig strategy_from_json(const nlohmann::json& j) {
  const std::string where = "strategy";
  detail::reject_unknown_keys(j, {"kind", "alpha", "gamma", "c", "d", "explore_fraction",
                                  "exploration_per_arm", "mode", "label"},
                              where);
  StrategyConfig s;
  try {
    s.kind = parse_strategy_kind(detail::get_as<std::string>(j, "kind", where));
    if (j.contains("mode")) s.mode = parse_selection_mode(detail::get_as<std::string>(j, "mode", where));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("alpha")) s.alpha = detail::get_as<double>(j, "alpha", where);
  if (j.contains("gamma")) s.gamma = detail::get_as<double>(j, "gamma", where);
  if (j.contains("c")) s.c = detail::get_as<double>(j, "c", where);
  if (j.contains("d")) s.d = detail::get_as<double>(j, "d", where);
  if (j.contains("explore_fraction"))
    s.explore_fraction = detail::get_as<double>(j, "explore_fraction", where);
  if (j.contains("exploration_per_arm"))
    s.exploration_per_arm = detail::get_as<std::uint64_t>(j, "exploration_per_arm", where);
  if (j.contains("label")) s.label = detail::get_as<std::string>(j, "label", where);
  return s;
}

/// JSON document whose keys are the ExperimentSpec field names.
inline nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  if (!spec.arms.empty()) j["arms"] = arms_to_json(spec.arms);
  if (spec.setting) j["setting"] = *spec.setting;
  if (spec.x) j["x"] = *spec.x;
  if (spec.y) j["y"] = *spec.y;
  j["strategies"] = nlohmann::json::array();
  for (const auto& s : spec.strategies) j["strategies"].push_back(strategy_to_json(s));
  j["trials"] = spec.trials;
  j["horizon"] = spec.horizon;
  j["beta"] = spec.beta;
  j["master_seed"] = spec.master_seed;
  j["checkpoint_stride"] = spec.checkpoint_stride;
  j["calibration_in_ybar"] = spec.calibration_in_ybar;
  return j;
}

/// Inverse of spec_to_json. Unknown keys are errors; absent keys keep their
/// defaults. Does not validate cross-field constraints.
inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
  const std::string where = "config";
  detail::reject_unknown_keys(j, {"arms", "setting", "x", "y", "strategies", "trials", "horizon",
                                  "beta", "master_seed", "checkpoint_stride",
                                  "calibration_in_ybar"},
                              where);
  ExperimentSpec spec;
  if (j.contains("arms")) spec.arms = arms_from_json(j["arms"]);
  if (j.contains("setting")) spec.setting = detail::get_as<int>(j, "setting", where);
  if (j.contains("x")) spec.x = detail::get_as<double>(j, "x", where);
  if (j.contains("y")) spec.y = detail::get_as<double>(j, "y", where);
  if (j.contains("strategies")) {
    if (!j["strategies"].is_array()) throw ConfigError("strategies must be a JSON array");
    for (const auto& s : j["strategies"]) spec.strategies.push_back(strategy_from_json(s));
  }
  if (j.contains("trials")) spec.trials = detail::get_as<std::uint64_t>(j, "trials", where);
  if (j.contains("horizon")) spec.horizon = detail::get_as<std::uint64_t>(j, "horizon", where);
  if (j.contains("beta")) spec.beta = detail::get_as<double>(j, "beta", where);
  if (j.contains("master_seed"))
    spec.master_seed = detail::get_as<std::uint64_t>(j, "master_seed", where);
  if (j.contains("checkpoint_stride"))
    spec.checkpoint_stride = detail::get_as<std::uint64_t>(j, "checkpoint_stride", where);
  if (j.contains("calibration_in_ybar"))
    spec.calibration_in_ybar = detail::get_as<bool>(j, "calibration_in_ybar", where);
  return spec;
}

inline ExperimentSpec load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return spec_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

}  // namespace goldband
