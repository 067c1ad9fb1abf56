#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "curres/errors.hpp"

namespace curres {

/// Experiments known to the runner.
const std::vector<std::string>& experiment_names();

/// Invalid configuration; diagnostics() holds one "field: message" line per violation.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

/// Validated experiment configuration with every default filled in.
class ExperimentConfig {
 public:
  const std::string& experiment() const noexcept { return experiment_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool seed_defaulted() const noexcept { return seed_defaulted_; }
  const std::vector<std::string>& notes() const noexcept { return notes_; }

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  bool has(const std::string& key) const;
  const nlohmann::json& raw(const std::string& key) const;
  double threshold(const std::string& key) const;

  /// 1/eps for lattice experiments.
  int inverse_eps() const { return integer("inverse_eps"); }

  /// Resolved configuration, as echoed into the manifest.
  const nlohmann::json& resolved() const noexcept { return values_; }

  void set_seed(std::uint64_t seed);

 private:
  friend ExperimentConfig validate_config(const nlohmann::json&, const std::string&);
  std::string experiment_;
  std::uint64_t seed_ = 0;
  bool seed_defaulted_ = true;
  nlohmann::json values_;
  std::vector<std::string> notes_;
};

/// Validates raw JSON; the experiment comes from the "experiment" field or
/// from `experiment` when given (they must agree if both are present).
ExperimentConfig validate_config(const nlohmann::json& raw, const std::string& experiment = "");

/// Minimum replica count accepted for each statistical experiment.
int minimum_replicas(const std::string& experiment);

}  // namespace curres
