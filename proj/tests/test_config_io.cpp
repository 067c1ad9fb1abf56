#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "curres/config.hpp"
#include "curres/experiments.hpp"
#include "curres/io.hpp"
#include "curres/runner.hpp"

using namespace curres;
using nlohmann::json;

namespace {

std::vector<std::string> diagnostics_of(const json& raw) {
  try {
    validate_config(raw);
  } catch (const ConfigError& e) {
    return e.diagnostics();
  }
  return {};
}

bool mentions(const std::vector<std::string>& lines, const std::string& needle) {
  for (const auto& l : lines) {
    if (l.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("a missing seed defaults to 0 with a note") {
  const ExperimentConfig cfg = validate_config(json{{"experiment", "kernels"}});
  CHECK(cfg.seed() == 0);
  CHECK(cfg.seed_defaulted());
  CHECK(mentions(cfg.notes(), "default seed 0"));
  const ExperimentConfig seeded = validate_config(json{{"experiment", "kernels"}, {"seed", 9}});
  CHECK(seeded.seed() == 9);
  CHECK_FALSE(seeded.seed_defaulted());
}

TEST_CASE("eps must have an integer reciprocal") {
  const auto d = diagnostics_of(json{{"experiment", "hydro"}, {"seed", 1}, {"eps", 0.003}});
  REQUIRE_FALSE(d.empty());
  CHECK(mentions(d, "eps: 1/eps"));
  const ExperimentConfig ok = validate_config(json{{"experiment", "hydro"}, {"seed", 1}, {"eps", 0.02}});
  CHECK(ok.inverse_eps() == 50);
  const ExperimentConfig inv = validate_config(json{{"experiment", "hydro"}, {"seed", 1}, {"inverse_eps", 40}});
  CHECK(inv.number("eps") == doctest::Approx(0.025));
}

TEST_CASE("unknown fields and experiments are reported by path") {
  CHECK(mentions(diagnostics_of(json{{"experiment", "couple"}, {"replicaz", 50}}), "replicaz: unknown field"));
  CHECK(mentions(diagnostics_of(json{{"experiment", "nope"}}), "experiment: unknown experiment"));
  CHECK(mentions(diagnostics_of(json{{"experiment", "kernels"}, {"thresholds", {{"bogus", 1.0}}}}),
                 "thresholds.bogus"));
  CHECK(mentions(diagnostics_of(json{{"experiment", "kernels"}, {"grid_m", "many"}}), "grid_m: must be"));
  CHECK_THROWS_AS(validate_config(json{{"experiment", "kernels"}}, "hydro"), ConfigError);
}

TEST_CASE("all violations are reported together") {
  const auto d = diagnostics_of(json{{"experiment", "hydro"}, {"eps", 0.003}, {"extra", 1}, {"seed", -1}});
  CHECK(d.size() >= 3);
}

TEST_CASE("replica counts below the minimum are rejected") {
  for (const char* name : {"critical", "masswalk", "couple", "hydro", "subcritical"}) {
    const int minimum = minimum_replicas(name);
    CHECK(minimum >= 5);
    CHECK(mentions(diagnostics_of(json{{"experiment", name}, {"replicas", minimum - 1}}), "replicas:"));
    CHECK_NOTHROW(validate_config(json{{"experiment", name}, {"replicas", minimum}}));
  }
  CHECK(minimum_replicas("critical") == 100);
}

TEST_CASE("stationary grids are refined when sqrt(delta) is below 2/m") {
  const ExperimentConfig cfg =
      validate_config(json{{"experiment", "stationary"}, {"seed", 0}, {"grid_m", 50}, {"deltas", {1e-2, 1e-4}}});
  CHECK(cfg.integer("grid_m") == 200);
  CHECK(mentions(cfg.notes(), "warning"));
}

TEST_CASE("threshold overrides and defaults") {
  const ExperimentConfig cfg = validate_config(json{{"experiment", "kernels"}, {"thresholds", {{"semigroup", 1e-4}}}});
  CHECK(cfg.threshold("semigroup") == doctest::Approx(1e-4));
  CHECK(cfg.threshold("row_sum") == doctest::Approx(1e-8));
  CHECK(mentions(diagnostics_of(json{{"experiment", "kernels"}, {"thresholds", {{"row_sum", -1}}}}),
                 "thresholds.row_sum"));
}

TEST_CASE("critical source is restricted") {
  CHECK(mentions(diagnostics_of(json{{"experiment", "critical"}, {"source", "oracle"}}), "source:"));
  CHECK(validate_config(json{{"experiment", "critical"}, {"source", "walk"}}).text("source") == "walk");
}

TEST_CASE("CSV rendering") {
  CsvTable t{"t", "x: site", {"a", "b", "c"}, {}};
  t.add({1.5, std::int64_t{3}, std::string("ok")});
  t.add({0.0, std::int64_t{-2}, std::string("")});
  CHECK(t.render() == "# x: site\na,b,c\n1.5,3,ok\n0,-2,\n");
  CHECK_THROWS_AS(t.add({1.0}), ShapeError);
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(1e-20) == "1e-20");
}

TEST_CASE("measure JSON round trip") {
  const MeasureU u(Grid(4), 0.25, {1.0, 2.0, 0.0, 0.5});
  const MeasureU v = measure_from_json(measure_to_json(u));
  CHECK(v.atom == u.atom);
  CHECK(v.density == u.density);
  CHECK_THROWS_AS(measure_from_json(json{{"atom", 0.0}}), ValidationError);
  CHECK_THROWS_AS(measure_from_json(json{{"cells", {1.0, -1.0}}}), ValidationError);
}

TEST_CASE("sha256 oracle") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("profiles from JSON") {
  const ProfileSpec lin = profile_from_json(json{{"kind", "linear"}, {"mass", 0.5}}, 1.0);
  CHECK(lin.total_mass() == doctest::Approx(0.5).epsilon(1e-9));
  const ProfileSpec uni = profile_from_json(json{{"kind", "uniform"}, {"value", 2.0}});
  CHECK(uni.total_mass() == doctest::Approx(2.0));
  const ProfileSpec tab = profile_from_json(json{{"kind", "table"}, {"points", {{0.0, 1.0}, {1.0, 1.0}}}});
  CHECK(tab.total_mass() == doctest::Approx(1.0));
  CHECK_THROWS(profile_from_json(json{{"kind", "spiral"}}));
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t k) { hits[k]++; }, 7);
  for (const auto& h : hits) CHECK(h.load() == 1);
  parallel_for(0, [&](std::size_t) { FAIL("no indices"); }, 3);
}

TEST_CASE("runner output is byte-identical across worker counts") {
  const json raw = {{"experiment", "couple"}, {"seed", 3},        {"eps", 0.05},
                    {"replicas", 20},         {"times", {0.5, 1}}};
  const ExperimentConfig cfg = validate_config(raw);
  const auto base = std::filesystem::temp_directory_path() / "curres_runner_test";
  std::filesystem::remove_all(base);
  const char* saved = std::getenv("CURRES_WORKERS");
  const std::string restore = saved ? saved : "";
  setenv("CURRES_WORKERS", "1", 1);
  const RunOutcome one = run_experiment(cfg, (base / "w1").string());
  setenv("CURRES_WORKERS", "4", 1);
  const RunOutcome four = run_experiment(cfg, (base / "w4").string());
  if (saved) {
    setenv("CURRES_WORKERS", restore.c_str(), 1);
  } else {
    unsetenv("CURRES_WORKERS");
  }
  REQUIRE(one.files == four.files);
  CHECK(std::find(one.files.begin(), one.files.end(), "summary.csv") != one.files.end());
  for (const auto& f : one.files) {
    CHECK_MESSAGE(slurp(base / "w1" / f) == slurp(base / "w4" / f), f);
  }
  const json manifest = json::parse(slurp(base / "w1" / "manifest.json"));
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["workers"] == 1);
  CHECK(manifest["config"]["replicas"] == 20);
  for (const auto& entry : manifest["files"]) {
    const std::string content = slurp(base / "w1" / entry["file"].get<std::string>());
    CHECK(entry["sha256"] == sha256_hex(content));
    CHECK(entry["bytes"] == content.size());
  }
  std::filesystem::remove_all(base);
}
