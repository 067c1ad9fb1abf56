#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "curres/config.hpp"
#include "curres/io.hpp"

namespace curres {

/// One PASS/FAIL comparison. criterion is the acceptance criterion number it
/// feeds, or 0 for module properties. Informational checks never fail a run.
struct Check {
  std::string name;
  int criterion = 0;
  double value = 0.0;
  double threshold = 0.0;
  /// "<=", ">=", "<", ">" or "==".
  std::string relation = "<=";
  bool pass = false;
  bool informational = false;
  std::string detail;
};

Check make_check(std::string name, int criterion, double value, std::string relation, double threshold,
                 std::string detail = "");
Check make_flag(std::string name, int criterion, bool ok, std::string detail = "");
Check make_info(std::string name, double value, std::string detail = "");

struct ExperimentResult {
  std::string experiment;
  std::vector<Check> checks;
  std::vector<CsvTable> tables;
  /// File stem -> JSON report.
  std::vector<std::pair<std::string, nlohmann::json>> reports;
  std::vector<std::string> notes;

  bool passed() const;
  /// Checks feeding one acceptance criterion.
  std::vector<Check> for_criterion(int criterion) const;
};

/// Worker count from CURRES_WORKERS (default: hardware concurrency, at least 1).
int worker_count();

/// Calls body(k) for k in [0, n) on a pool; each index is processed exactly
/// once and results are written by index, so output order never depends on
/// scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers = 0);

ExperimentResult run_kernels(const ExperimentConfig& cfg);
ExperimentResult run_stationary(const ExperimentConfig& cfg);
ExperimentResult run_converge(const ExperimentConfig& cfg);
ExperimentResult run_hydro(const ExperimentConfig& cfg);
ExperimentResult run_subcritical(const ExperimentConfig& cfg);
ExperimentResult run_critical(const ExperimentConfig& cfg);
ExperimentResult run_couple(const ExperimentConfig& cfg);
ExperimentResult run_masswalk(const ExperimentConfig& cfg);

/// Dispatches on cfg.experiment().
ExperimentResult run_named(const ExperimentConfig& cfg);

}  // namespace curres
