#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "curres/config.hpp"
#include "curres/io.hpp"
#include "curres/runner.hpp"

namespace {

constexpr int kUsage = 2;

nlohmann::json load_json(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw curres::ConfigError({"--config: cannot open '" + path + "'"});
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw curres::ConfigError({"--config: " + std::string(e.what())});
  }
}

void print_diagnostics(const curres::ConfigError& e) {
  std::cerr << "invalid configuration:\n";
  for (const auto& d : e.diagnostics()) std::cerr << "  " << d << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle system with current reservoirs: experiment runner"};
  app.require_subcommand(1);

  std::string experiment, config_path, out_dir;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "run an experiment and write CSV/JSON artifacts");
  run->add_option("experiment", experiment, "experiment name")
      ->required()
      ->check(CLI::IsMember(curres::experiment_names()));
  run->add_option("--config", config_path, "JSON configuration (defaults apply when omitted)");
  auto* seed_opt = run->add_option("--seed", seed, "master seed (overrides the config)");
  run->add_option("--out", out_dir, "output directory (default out/<experiment>)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a configuration and print it with defaults filled");
  validate->add_option("--config", validate_path, "JSON configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*validate) {
      const auto cfg = curres::validate_config(load_json(validate_path));
      for (const auto& note : cfg.notes()) std::cerr << "note: " << note << "\n";
      std::cout << cfg.resolved().dump(2) << "\n";
      return 0;
    }

    auto cfg = curres::validate_config(load_json(config_path), experiment);
    if (*seed_opt) cfg.set_seed(seed);
    if (out_dir.empty()) out_dir = cfg.has("output") ? cfg.text("output") : "out/" + experiment;
    for (const auto& note : cfg.notes()) std::cerr << "note: " << note << "\n";

    const auto outcome = curres::run_experiment(cfg, out_dir);
    for (const auto& c : outcome.result.checks) {
      const char* verdict = c.informational ? "INFO" : (c.pass ? "PASS" : "FAIL");
      std::cout << verdict << "  " << c.name << "  " << curres::format_number(c.value);
      if (!c.informational) std::cout << " " << c.relation << " " << curres::format_number(c.threshold);
      if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
      std::cout << "\n";
    }
    if (!outcome.error.empty()) std::cerr << "error: " << outcome.error << "\n";
    std::cout << (outcome.exit_code == 0 ? "PASS" : "FAIL") << "  " << experiment << " in "
              << curres::format_number(outcome.wall_seconds) << " s, artifacts in " << out_dir << "\n";
    return outcome.exit_code;
  } catch (const curres::ConfigError& e) {
    print_diagnostics(e);
    return kUsage;
  } catch (const curres::ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
