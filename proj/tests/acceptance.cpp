// Runs every experiment at its default configuration and prints one
// PASS/FAIL line per acceptance criterion. Exit code 0 iff all pass.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "curres/config.hpp"
#include "curres/runner.hpp"

using namespace curres;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  std::vector<std::string> experiments;
  double budget_seconds;
  std::string title;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunOutcome run(const std::string& name, const fs::path& dir) {
  const ExperimentConfig cfg = validate_config(nlohmann::json{{"experiment", name}, {"seed", 0}});
  return run_experiment(cfg, dir.string());
}

std::string describe(const Check& c) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s=%.6g %s %.6g", c.name.c_str(), c.value, c.relation.c_str(), c.threshold);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  const std::vector<Criterion> criteria = {
      {1, {"kernels"}, 60, "kernel suite"},
      {2, {"stationary"}, 300, "stationary fixed point"},
      {3, {"stationary"}, 600, "linear limit"},
      {4, {"converge"}, 300, "barrier squeeze"},
      {5, {"converge"}, 300, "stationarity of the manifold"},
      {6, {"converge"}, 600, "convergence to the manifold"},
      {7, {"hydro"}, 600, "hydrodynamic Monte Carlo"},
      {8, {"couple"}, 600, "coupling decay"},
      {9, {"masswalk"}, 600, "mass law"},
      {10, {"critical", "subcritical"}, 1800, "super-hydrodynamic marginal"},
  };

  std::map<std::string, RunOutcome> outcomes;
  for (const auto& name : experiment_names()) {
    std::fprintf(stderr, "running %s ...\n", name.c_str());
    outcomes[name] = run(name, out / name);
    std::fprintf(stderr, "  %s done in %.1f s\n", name.c_str(), outcomes[name].wall_seconds);
  }

  int failures = 0;
  for (const auto& c : criteria) {
    bool pass = true;
    double seconds = 0.0;
    std::string detail;
    for (const auto& name : c.experiments) {
      const RunOutcome& o = outcomes.at(name);
      seconds += o.wall_seconds;
      if (!o.error.empty()) {
        pass = false;
        detail += " " + name + " error: " + o.error + ";";
      }
      for (const auto& check : o.result.for_criterion(c.id)) {
        if (check.informational) continue;
        pass = pass && check.pass;
        detail += std::string(" ") + (check.pass ? "" : "[FAIL] ") + describe(check) + ";";
      }
    }
    const bool in_budget = seconds <= c.budget_seconds;
    pass = pass && in_budget;
    failures += !pass;
    std::printf("CRITERION %d: %s  %s (%.1f s of %.0f s budget)%s\n", c.id, pass ? "PASS" : "FAIL", c.title.c_str(),
                seconds, c.budget_seconds, detail.c_str());
  }

  // Criterion 11: rerun with the same seed and a different worker count; every CSV must match byte for byte.
  {
    const int first_workers = worker_count();
    const int rerun_workers = first_workers == 1 ? 4 : 1;
    const char* saved = std::getenv("CURRES_WORKERS");
    const std::string restore = saved ? saved : "";
    setenv("CURRES_WORKERS", std::to_string(rerun_workers).c_str(), 1);
    bool identical = true;
    std::string detail;
    for (const std::string name : {"couple", "hydro", "kernels"}) {
      const RunOutcome again = run(name, out / (name + "_rerun"));
      for (const auto& f : again.files) {
        if (f.size() < 4 || f.substr(f.size() - 4) != ".csv") continue;
        const bool same = slurp(out / name / f) == slurp(out / (name + "_rerun") / f);
        identical = identical && same;
        if (!same) detail += " differs: " + name + "/" + f + ";";
      }
    }
    if (saved) {
      setenv("CURRES_WORKERS", restore.c_str(), 1);
    } else {
      unsetenv("CURRES_WORKERS");
    }
    failures += !identical;
    std::printf("CRITERION 11: %s  determinism (couple, hydro, kernels rerun with %d workers vs %d)%s\n",
                identical ? "PASS" : "FAIL", rerun_workers, first_workers, detail.c_str());
  }

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
