#include "curres/runner.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "curres/errors.hpp"

namespace curres {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

json versions() {
  return {{"curres", kVersion},
          {"compiler", __VERSION__},
          {"cxx_standard", __cplusplus},
          {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                        std::to_string(BOOST_VERSION % 100)},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

json check_json(const Check& c) {
  return {{"name", c.name},           {"criterion", c.criterion}, {"value", c.value},
          {"relation", c.relation},   {"threshold", c.threshold}, {"pass", c.pass},
          {"informational", c.informational}, {"detail", c.detail}};
}

}  // namespace

CsvTable summary_table(const ExperimentResult& result) {
  CsvTable t{"summary", "value and threshold in the units of each check",
             {"check", "criterion", "value", "relation", "threshold", "verdict", "detail"}, {}};
  for (const auto& c : result.checks) {
    const std::string verdict = c.informational ? "INFO" : (c.pass ? "PASS" : "FAIL");
    t.add({c.name, static_cast<std::int64_t>(c.criterion), c.value, c.relation,
           c.informational ? Cell(std::string("")) : Cell(c.threshold), verdict, c.detail});
  }
  return t;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  RunOutcome outcome;
  const std::string started = utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  double residual = NAN;
  try {
    outcome.result = run_named(cfg);
  } catch (const ConvergenceError& e) {
    outcome.error = e.what();
    residual = e.residual();
    outcome.result.experiment = cfg.experiment();
  }
  outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json files = json::array();
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file((std::filesystem::path(out_dir) / name).string(), content);
    outcome.files.push_back(name);
    files.push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  };
  for (const auto& table : outcome.result.tables) emit(table.name + ".csv", table.render());
  for (const auto& [stem, report] : outcome.result.reports) emit(stem + ".json", report.dump(2) + "\n");
  emit("summary.csv", summary_table(outcome.result).render());

  outcome.exit_code = outcome.error.empty() && outcome.result.passed() ? 0 : 1;
  json checks = json::array();
  for (const auto& c : outcome.result.checks) checks.push_back(check_json(c));
  std::vector<std::string> notes = cfg.notes();
  notes.insert(notes.end(), outcome.result.notes.begin(), outcome.result.notes.end());
  json manifest = {{"experiment", cfg.experiment()},
                   {"config", cfg.resolved()},
                   {"seed", cfg.seed()},
                   {"seed_defaulted", cfg.seed_defaulted()},
                   {"notes", notes},
                   {"versions", versions()},
                   {"workers", worker_count()},
                   {"started_utc", started},
                   {"wall_clock_seconds", outcome.wall_seconds},
                   {"verdict", outcome.exit_code == 0 ? "PASS" : "FAIL"},
                   {"checks", checks},
                   {"files", files}};
  if (!outcome.error.empty()) manifest["error"] = {{"message", outcome.error}, {"residual", residual}};
  write_file((std::filesystem::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  return outcome;
}

}  // namespace curres
