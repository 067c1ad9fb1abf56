#include <cmath>

#include "doctest.h"

#include "curres/errors.hpp"
#include "curres/mass.hpp"

using namespace curres;

TEST_CASE("folded normal cdf oracles") {
  CHECK(folded_normal_cdf(1.0, 0.0, 1.0) == doctest::Approx(0.682689492137).epsilon(1e-10));
  CHECK(folded_normal_cdf(2.0, 0.0, 4.0) == doctest::Approx(0.682689492137).epsilon(1e-10));
  CHECK(folded_normal_cdf(50.0, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(folded_normal_cdf(-0.1, 1.0, 1.0) == 0.0);
  CHECK(folded_normal_cdf(0.0, 1.0, 1.0) == 0.0);
  // Far from the origin the fold is invisible: cdf at m equals 1/2.
  CHECK(folded_normal_cdf(30.0, 30.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(folded_normal_cdf(1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("mass walk step from zero lands on 0 or 1 with probability one half") {
  Rng rng(3, 0);
  int up = 0;
  int suppressed = 0;
  const int trials = 40000;
  for (int k = 0; k < trials; ++k) {
    const MassStep s = mass_walk_step(0, 0.1, 1.0, rng);
    REQUIRE((s.n == 0 || s.n == 1));
    REQUIRE(s.waiting_time > 0.0);
    up += s.n == 1;
    suppressed += s.suppressed;
    REQUIRE(s.suppressed == (s.n == 0));
  }
  CHECK(up + suppressed == trials);
  CHECK(std::abs(up / static_cast<double>(trials) - 0.5) < 4.0 * 0.5 / std::sqrt(trials));
}

TEST_CASE("mass walk waiting times have mean 1/(2 j eps)") {
  Rng rng(4, 0);
  double sum = 0.0;
  const int trials = 40000;
  for (int k = 0; k < trials; ++k) sum += mass_walk_step(5, 0.05, 2.0, rng).waiting_time;
  const double mean = 1.0 / (2.0 * 2.0 * 0.05);
  CHECK(std::abs(sum / trials - mean) < 4.0 * mean / std::sqrt(trials));
}

TEST_CASE("zero current never moves the count") {
  Rng rng(5, 0);
  CHECK(mass_walk_run(17, 0.01, 0.0, 1e9, rng) == 17);
  CHECK(std::isinf(mass_walk_step(3, 0.01, 0.0, rng).waiting_time));
  CHECK_THROWS_AS(mass_walk_step(-1, 0.01, 1.0, rng), DomainError);
  CHECK_THROWS_AS(mass_walk_step(1, 0.0, 1.0, rng), DomainError);
}

TEST_CASE("away from zero the count is a martingale") {
  Rng rng(6, 0);
  const double eps = 0.01;
  const std::int64_t n0 = 1000;
  const double T = 2000.0;  // about 40 jumps, far from the origin
  const int trials = 20000;
  double sum = 0.0;
  for (int k = 0; k < trials; ++k) sum += static_cast<double>(mass_walk_run(n0, eps, 1.0, T, rng) - n0);
  const double sd = std::sqrt(2.0 * eps * T);
  CHECK(std::abs(sum / trials) < 4.0 * sd / std::sqrt(trials));
}

TEST_CASE("mass walk paths are sampled at sorted times") {
  Rng rng(7, 0);
  const std::vector<double> times{0.0, 10.0, 20.0};
  const MassPath p = mass_walk_path(4, 0.5, 1.0, times, rng);
  REQUIRE(p.values.size() == 3);
  CHECK(p.values[0] == 4);
  CHECK(p.scaled()[0] == doctest::Approx(2.0));
  const std::vector<double> unsorted{1.0, 0.5};
  CHECK_THROWS_AS(mass_walk_path(4, 0.5, 1.0, unsorted, rng), DomainError);
}

TEST_CASE("one-sample KS oracles") {
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_one_sample({0.5}, uniform) == doctest::Approx(0.5));
  CHECK(ks_one_sample({0.25, 0.75}, uniform) == doctest::Approx(0.25));
  // Empirical steps 1/3, 2/3, 1 at 0.1, 0.2, 0.9: the largest gap is 2/3 - 0.2 at 0.2.
  CHECK(ks_one_sample({0.1, 0.2, 0.9}, uniform) == doctest::Approx(2.0 / 3.0 - 0.2));
  // Ties make a single jump of size 2/2 at 0.5.
  CHECK(ks_one_sample({0.5, 0.5}, uniform) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_one_sample({}, uniform), InsufficientData);
}

TEST_CASE("two-sample KS oracles") {
  CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_two_sample({1, 2}, {3, 4}) == doctest::Approx(1.0));
  CHECK(ks_two_sample({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
  // Ties across samples are processed together.
  CHECK(ks_two_sample({1, 1, 2}, {1, 2, 2}) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(ks_two_sample({}, {1}), InsufficientData);
}

TEST_CASE("KS p-value and critical value") {
  CHECK(ks_critical_5pct(100.0) == doctest::Approx(0.136));
  // The asymptotic Kolmogorov tail at 1.36 is close to 5%.
  CHECK(ks_pvalue(1.36 / std::sqrt(1e10), 1e10) == doctest::Approx(0.0494).epsilon(0.01));
  CHECK(ks_pvalue(0.0, 100.0) == 1.0);
  CHECK(ks_pvalue(1.0, 100.0) < 1e-12);
}

TEST_CASE("supercritical mass test: minimum sample size and zero variance") {
  std::vector<double> few(50, 1.0);
  CHECK_THROWS_AS(supercritical_mass_test(few, 1.0, 1.0, 1.0), InsufficientData);
  std::vector<double> many(100, 1.0);
  const KsReport r = supercritical_mass_test(many, 1.0, 1.0, 0.0);
  CHECK(r.skipped);
  CHECK(r.pass);
  CHECK_FALSE(r.notice.empty());
  CHECK(r.critical_5pct == doctest::Approx(0.136));
}

TEST_CASE("rescaled mass walk matches the reflected Gaussian law with variance 2 j t") {
  const double eps = 1.0 / 50.0;
  const double j = 1.0;
  const double t = 1.0;
  std::vector<double> samples;
  for (std::uint64_t r = 0; r < 400; ++r) {
    Rng rng(11, r);
    samples.push_back(eps * static_cast<double>(mass_walk_run(50, eps, j, t / (eps * eps * eps), rng)));
  }
  const KsReport rep = supercritical_mass_test(samples, 1.0, 2.0 * j, t);
  CHECK(rep.statistic <= rep.critical_5pct);
  CHECK(rep.pass);
  // The same samples are far from the law with variance j t.
  const KsReport other = supercritical_mass_test(samples, 1.0, j, t);
  CHECK(other.statistic > rep.statistic);
}

TEST_CASE("tightness checks") {
  const std::vector<double> init{1.0, 1.0, 1.0, 1.0};
  const std::vector<double> fin{1.05, 0.95, 1.0, 1.5};
  const TightnessReport h = tightness_check(init, fin, Regime::hydrodynamic, 0.1);
  CHECK(h.fraction == doctest::Approx(0.75));
  CHECK(h.bound == doctest::Approx(0.9));
  CHECK_FALSE(h.pass);
  const TightnessReport s = tightness_check({}, fin, Regime::super, 0.3, 1.2);
  CHECK(s.fraction == doctest::Approx(0.25));
  CHECK(s.pass);
  CHECK_THROWS_AS(tightness_check(init, {}, Regime::super, 0.1, 1.0), InsufficientData);
  CHECK_THROWS_AS(tightness_check(init, fin, Regime::super, 1.5, 1.0), DomainError);
  const std::vector<double> short_init{1.0};
  CHECK_THROWS_AS(tightness_check(short_init, fin, Regime::hydrodynamic, 0.1), ShapeError);
}
