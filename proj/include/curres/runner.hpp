#pragma once

#include <string>
#include <vector>

#include "curres/config.hpp"
#include "curres/experiments.hpp"

namespace curres {

/// Library version echoed into manifests.
inline constexpr const char* kVersion = "1.0.0";

struct RunOutcome {
  /// 0 when every non-informational check passed, 1 otherwise.
  int exit_code = 1;
  ExperimentResult result;
  std::vector<std::string> files;
  double wall_seconds = 0.0;
  /// Set when the run stopped on a numerical non-convergence.
  std::string error;
};

/// Summary rows: name, criterion, value, relation, threshold, verdict, detail.
CsvTable summary_table(const ExperimentResult& result);

/// Runs the experiment and writes <table>.csv, <report>.json, summary.csv and
/// manifest.json into out_dir. Only the manifest carries timestamps, so
/// reruns with the same configuration produce byte-identical CSVs.
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace curres
