#include "curres/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace curres {

using nlohmann::json;

namespace {

enum class Type { number, integer, boolean, text, number_list, object, optional_number };
enum class Rule { none, positive, non_negative, unit_open, at_least_two };

struct Field {
  std::string name;
  Type type;
  json fallback;
  Rule rule = Rule::none;
};

const json kLinearHalf = {{"kind", "linear"}, {"mass", 0.5}};
const json kUniformHalf = {{"kind", "uniform"}, {"value", 0.5}};

struct Schema {
  std::vector<Field> fields;
  json thresholds;
  bool lattice = false;
  double default_eps = 0.0;
};

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> table = {
      {"kernels",
       {{{"grid_m", Type::integer, 1000, Rule::at_least_two},
         {"cross_times", Type::number_list, {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 0.5, 1.0, 3.0, 10.0}, Rule::positive},
         {"semigroup_times", Type::number_list, {1e-3, 1e-2, 0.1}, Rule::positive},
         {"truncation_edge", Type::number, 0.5, Rule::unit_open},
         {"resolvent_R", Type::number, 0.5, Rule::positive},
         {"resolvent_r", Type::number_list, {0.0, 0.25, 0.45}, Rule::non_negative},
         {"resolvent_T", Type::number, 20.0, Rule::positive},
         {"resolvent_dt", Type::number, 0.01, Rule::positive}},
        {{"row_sum", 1e-8}, {"symmetry", 1e-10}, {"series_agreement", 1e-8}, {"semigroup", 1e-6}, {"resolvent", 1e-3}}}},
      {"stationary",
       {{{"j", Type::number, 1.0, Rule::positive},
         {"R", Type::number, 0.5, Rule::unit_open},
         {"delta", Type::number, 1e-3, Rule::positive},
         {"grid_m", Type::integer, 400, Rule::at_least_two},
         {"tail_tol", Type::number, 1e-9, Rule::positive},
         {"deltas", Type::number_list, {1e-2, 3e-3, 1e-3}, Rule::positive},
         {"monotone_R", Type::number_list, {0.3, 0.5, 0.7}, Rule::unit_open},
         {"A", Type::optional_number, 1.0, Rule::positive},
         {"manifold_masses", Type::number_list, {0.25, 1.0, 2.0}, Rule::positive}},
        {{"residual", 1e-7}, {"mass_balance", 1e-6}, {"final_error", 0.05}, {"layer_final_error", 0.08},
         {"edge_value", 0.1}}}},
      {"converge",
       {{{"j", Type::number, 1.0, Rule::positive},
         {"grid_m", Type::integer, 400, Rule::at_least_two},
         {"mass", Type::number, 0.5, Rule::positive},
         {"squeeze_t", Type::number, 0.5, Rule::positive},
         {"squeeze_levels", Type::integer, 8, Rule::positive},
         {"manifold_masses", Type::number_list, {0.25, 1.0, 2.0}, Rule::positive},
         {"manifold_t", Type::number, 1.0, Rule::positive},
         {"manifold_tol", Type::number, 0.01, Rule::positive},
         {"times", Type::number_list, {0.5, 1.0, 2.0, 4.0}, Rule::positive},
         {"tol", Type::number, 1e-3, Rule::positive}},
        {{"squeeze_ratio", 0.7}, {"sandwich", 1e-10}, {"manifold_distance", 0.01}, {"final_distance", 0.02}}}},
      {"hydro",
       {{{"j", Type::number, 1.0, Rule::positive},
         {"profile", Type::object, kLinearHalf},
         {"horizon", Type::number, 0.5, Rule::positive},
         {"replicas", Type::integer, 20, Rule::positive},
         {"samples", Type::integer, 4, Rule::positive},
         {"event_log", Type::integer, 1000, Rule::non_negative}},
        {{"mean_gap", 0.05}},
        true,
        1.0 / 200}},
      {"subcritical",
       {{{"j", Type::number, 1.0, Rule::positive},
         {"mass", Type::number, 1.0, Rule::positive},
         {"t", Type::number, 1.0, Rule::positive},
         {"replicas", Type::integer, 20, Rule::positive}},
        {{"mean_gap", 0.07}},
        true,
        1.0 / 50}},
      {"critical",
       {{{"j", Type::number, 1.0, Rule::positive},
         {"mass", Type::number, 1.0, Rule::positive},
         {"t", Type::number, 1.0, Rule::positive},
         {"replicas", Type::integer, 200, Rule::positive},
         {"source", Type::text, "simulator"},
         {"variance_rate", Type::optional_number, nullptr, Rule::positive}},
        {{"ks", 0.1}},
        true,
        1.0 / 50}},
      {"couple",
       {{{"j", Type::number, 1.0, Rule::positive},
         {"profile", Type::object, kLinearHalf},
         {"profile_y", Type::object, kUniformHalf},
         {"times", Type::number_list, {0.5, 1.0, 2.0}, Rule::positive},
         {"replicas", Type::integer, 100, Rule::positive}},
        {{"decay_ratio", 0.8}},
        true,
        1.0 / 100}},
      {"masswalk",
       {{{"j", Type::number, 1.0, Rule::positive},
         {"mass", Type::number, 1.0, Rule::positive},
         {"horizon", Type::number, 1.0, Rule::positive},
         {"replicas", Type::integer, 500, Rule::positive},
         {"calibration", Type::boolean, true},
         {"calibration_samples", Type::integer, 200, Rule::positive},
         {"calibration_rounds", Type::integer, 40000, Rule::positive},
         {"jump_trials", Type::integer, 10000, Rule::positive},
         {"tight_eps", Type::number, 1e-3, Rule::positive},
         {"tight_delta", Type::number, 0.1, Rule::positive},
         {"tight_T", Type::number, 1.0, Rule::positive},
         {"tight_margin", Type::number, 0.1, Rule::non_negative},
         {"tight_replicas", Type::integer, 200, Rule::positive}},
        {{"two_sample", 0.08}, {"calibration_frequency", 0.95}, {"jump_pvalue", 0.01}},
        true,
        1.0 / 50}},
  };
  return table;
}

std::string describe(const json& v) {
  std::string s = v.dump();
  return s.size() > 40 ? s.substr(0, 37) + "..." : s;
}

bool check_rule(double v, Rule rule, std::string& why) {
  switch (rule) {
    case Rule::none: return true;
    case Rule::positive: why = "must be positive"; return v > 0.0;
    case Rule::non_negative: why = "must be non-negative"; return v >= 0.0;
    case Rule::unit_open: why = "must lie in (0, 1]"; return v > 0.0 && v <= 1.0;
    case Rule::at_least_two: why = "must be >= 2"; return v >= 2.0;
  }
  return true;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, schema] : schemas()) out.push_back(name);
    return out;
  }();
  return names;
}

int minimum_replicas(const std::string& experiment) {
  if (experiment == "critical" || experiment == "masswalk") return 100;
  if (experiment == "couple") return 20;
  if (experiment == "hydro" || experiment == "subcritical") return 5;
  return 0;
}

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : ValidationError([&] {
        std::string msg = "invalid configuration";
        for (const auto& d : diagnostics) msg += "\n  " + d;
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

double ExperimentConfig::number(const std::string& key) const { return raw(key).get<double>(); }
int ExperimentConfig::integer(const std::string& key) const { return raw(key).get<int>(); }
bool ExperimentConfig::flag(const std::string& key) const { return raw(key).get<bool>(); }
std::string ExperimentConfig::text(const std::string& key) const { return raw(key).get<std::string>(); }
std::vector<double> ExperimentConfig::numbers(const std::string& key) const { return raw(key).get<std::vector<double>>(); }
bool ExperimentConfig::has(const std::string& key) const { return values_.contains(key) && !values_[key].is_null(); }

const json& ExperimentConfig::raw(const std::string& key) const {
  if (!values_.contains(key)) throw ValidationError("configuration has no field '" + key + "'");
  return values_[key];
}

double ExperimentConfig::threshold(const std::string& key) const {
  const auto& t = raw("thresholds");
  if (!t.contains(key)) throw ValidationError("configuration has no threshold '" + key + "'");
  return t[key].get<double>();
}

void ExperimentConfig::set_seed(std::uint64_t seed) {
  seed_ = seed;
  seed_defaulted_ = false;
  values_["seed"] = seed;
}

ExperimentConfig validate_config(const json& raw, const std::string& experiment) {
  std::vector<std::string> errors;
  if (!raw.is_object()) throw ConfigError({"<root>: configuration must be a JSON object"});

  std::string name = experiment;
  if (raw.contains("experiment")) {
    if (!raw["experiment"].is_string()) {
      errors.push_back("experiment: must be a string");
    } else if (!name.empty() && raw["experiment"].get<std::string>() != name) {
      errors.push_back("experiment: config names '" + raw["experiment"].get<std::string>() +
                       "' but '" + name + "' was requested");
    } else {
      name = raw["experiment"].get<std::string>();
    }
  }
  const auto it = schemas().find(name);
  if (it == schemas().end()) {
    std::string known;
    for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
    errors.push_back("experiment: unknown experiment '" + name + "' (expected one of " + known + ")");
    throw ConfigError(errors);
  }
  const Schema& schema = it->second;

  ExperimentConfig cfg;
  cfg.experiment_ = name;
  cfg.values_ = json::object();
  cfg.values_["experiment"] = name;

  std::vector<std::string> allowed = {"experiment", "seed", "thresholds", "output"};
  if (schema.lattice) {
    allowed.push_back("eps");
    allowed.push_back("inverse_eps");
  }
  for (const auto& f : schema.fields) allowed.push_back(f.name);
  for (const auto& [key, value] : raw.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      errors.push_back(key + ": unknown field for experiment '" + name + "'");
    }
  }

  if (raw.contains("seed")) {
    const json& seed = raw["seed"];
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      errors.push_back("seed: must be a non-negative integer");
    } else {
      cfg.seed_ = seed.get<std::uint64_t>();
      cfg.seed_defaulted_ = false;
    }
  } else {
    cfg.notes_.push_back("seed not given; default seed 0 used");
  }
  cfg.values_["seed"] = cfg.seed_;
  cfg.values_["seed_defaulted"] = cfg.seed_defaulted_;

  if (schema.lattice) {
    int inverse = 0;
    if (raw.contains("inverse_eps")) {
      if (!raw["inverse_eps"].is_number_integer() || raw["inverse_eps"].get<long>() < 2) {
        errors.push_back("inverse_eps: must be an integer >= 2");
      } else {
        inverse = raw["inverse_eps"].get<int>();
      }
      if (raw.contains("eps")) errors.push_back("eps: give either eps or inverse_eps, not both");
    } else {
      const json eps_json = raw.contains("eps") ? raw["eps"] : json(schema.default_eps);
      if (!eps_json.is_number() || !(eps_json.get<double>() > 0.0)) {
        errors.push_back("eps: must be a positive number");
      } else {
        const double inv = 1.0 / eps_json.get<double>();
        const double rounded = std::round(inv);
        if (std::abs(inv - rounded) > 1e-9 * rounded) {
          std::ostringstream msg;
          msg << "eps: 1/eps = " << inv << " is not an integer";
          errors.push_back(msg.str());
        } else if (rounded < 2) {
          errors.push_back("eps: 1/eps must be >= 2");
        } else {
          inverse = static_cast<int>(rounded);
        }
      }
    }
    cfg.values_["inverse_eps"] = inverse;
    cfg.values_["eps"] = inverse > 0 ? 1.0 / inverse : 0.0;
  }

  for (const auto& f : schema.fields) {
    const bool given = raw.contains(f.name);
    const json value = given ? raw[f.name] : f.fallback;
    std::string why;
    switch (f.type) {
      case Type::number:
      case Type::integer:
        if (!value.is_number() || (f.type == Type::integer && !value.is_number_integer())) {
          errors.push_back(f.name + (f.type == Type::integer ? ": must be an integer" : ": must be a number"));
        } else if (!check_rule(value.get<double>(), f.rule, why)) {
          errors.push_back(f.name + ": " + why + " (got " + describe(value) + ")");
        }
        break;
      case Type::optional_number:
        if (!value.is_null()) {
          if (!value.is_number()) {
            errors.push_back(f.name + ": must be a number or null");
          } else if (!check_rule(value.get<double>(), f.rule, why)) {
            errors.push_back(f.name + ": " + why + " (got " + describe(value) + ")");
          }
        }
        break;
      case Type::boolean:
        if (!value.is_boolean()) errors.push_back(f.name + ": must be true or false");
        break;
      case Type::text:
        if (!value.is_string()) errors.push_back(f.name + ": must be a string");
        break;
      case Type::object:
        if (!value.is_object()) errors.push_back(f.name + ": must be an object");
        break;
      case Type::number_list:
        if (!value.is_array() || value.empty()) {
          errors.push_back(f.name + ": must be a non-empty array of numbers");
        } else {
          for (std::size_t k = 0; k < value.size(); ++k) {
            if (!value[k].is_number()) {
              errors.push_back(f.name + "[" + std::to_string(k) + "]: must be a number");
            } else if (!check_rule(value[k].get<double>(), f.rule, why)) {
              errors.push_back(f.name + "[" + std::to_string(k) + "]: " + why);
            }
          }
        }
        break;
    }
    cfg.values_[f.name] = value;
  }

  json thresholds = schema.thresholds;
  if (raw.contains("thresholds")) {
    if (!raw["thresholds"].is_object()) {
      errors.push_back("thresholds: must be an object");
    } else {
      for (const auto& [key, value] : raw["thresholds"].items()) {
        if (!thresholds.contains(key)) {
          errors.push_back("thresholds." + key + ": unknown threshold");
        } else if (!value.is_number() || !(value.get<double>() > 0.0)) {
          errors.push_back("thresholds." + key + ": must be a positive number");
        } else {
          thresholds[key] = value;
        }
      }
    }
  }
  cfg.values_["thresholds"] = thresholds;
  if (raw.contains("output")) {
    if (!raw["output"].is_string()) errors.push_back("output: must be a string");
    cfg.values_["output"] = raw["output"];
  }

  if (errors.empty()) {
    if (cfg.values_.contains("replicas")) {
      const int minimum = minimum_replicas(name);
      if (cfg.values_["replicas"].get<int>() < minimum) {
        errors.push_back("replicas: experiment '" + name + "' needs at least " + std::to_string(minimum) +
                         " replicas");
      }
    }
    if (name == "stationary") {
      const auto deltas = cfg.values_["deltas"].get<std::vector<double>>();
      double finest = std::min(*std::min_element(deltas.begin(), deltas.end()), cfg.values_["delta"].get<double>());
      const int m = cfg.values_["grid_m"].get<int>();
      if (std::sqrt(finest) < 2.0 / m) {
        const int refined = static_cast<int>(std::ceil(2.0 / std::sqrt(finest)));
        cfg.notes_.push_back("warning: sqrt(delta) = " + std::to_string(std::sqrt(finest)) +
                             " is below 2/m; grid_m refined from " + std::to_string(m) + " to " +
                             std::to_string(refined));
        cfg.values_["grid_m"] = refined;
      }
    }
    if (name == "critical") {
      const auto source = cfg.values_["source"].get<std::string>();
      if (source != "simulator" && source != "walk") errors.push_back("source: must be 'simulator' or 'walk'");
    }
    for (const char* key : {"profile", "profile_y"}) {
      if (!cfg.values_.contains(key)) continue;
      const auto& p = cfg.values_[key];
      if (!p.contains("kind") || !p["kind"].is_string()) {
        errors.push_back(std::string(key) + ".kind: missing profile kind");
      }
    }
  }
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

}  // namespace curres
