#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"

#include "curres/errors.hpp"
#include "curres/lattice.hpp"
#include "curres/manifold.hpp"

using namespace curres;

namespace {

ParticleConfig with_sites(int last, std::initializer_list<int> sites) {
  ParticleConfig cfg(last);
  for (int x : sites) cfg.add(x);
  return cfg;
}

std::vector<std::int64_t> cumulative(const ParticleConfig& cfg) {
  std::vector<std::int64_t> out(cfg.num_sites());
  std::partial_sum(cfg.counts().begin(), cfg.counts().end(), out.begin());
  return out;
}

}  // namespace

TEST_CASE("lattice params accept only integer 1/eps") {
  CHECK(LatticeParams::from_eps(0.01, 1.0).inverse_eps() == 100);
  CHECK_THROWS_AS(LatticeParams::from_eps(0.003, 1.0), DomainError);
  CHECK_THROWS_AS(LatticeParams(1, 1.0), DomainError);
  CHECK_THROWS_AS(LatticeParams(10, 0.0), DomainError);
}

TEST_CASE("rightmost occupied site") {
  CHECK_FALSE(rightmost_occupied(ParticleConfig(10)).has_value());
  CHECK(rightmost_occupied(with_sites(10, {3, 7})) == 7);
  CHECK(rightmost_occupied(with_sites(10, {0})) == 0);
}

TEST_CASE("suffix counts") {
  const auto cfg = with_sites(10, {2, 5, 5, 9});
  CHECK(suffix_count(cfg, 0) == cfg.total());
  CHECK(suffix_count(with_sites(10, {2, 5}), 3) == 1);
  CHECK(suffix_count(ParticleConfig(10), 4) == 0);
  CHECK_THROWS_AS(suffix_count(cfg, 11), RangeError);
  CHECK_THROWS_AS(suffix_count(cfg, -1), RangeError);
}

TEST_CASE("empirical averages") {
  std::vector<std::int64_t> twos(11, 2);
  const auto flat = ParticleConfig::from_counts(twos);
  CHECK(empirical_average(flat, 3, 5) == doctest::Approx(2.0));
  std::vector<std::int64_t> ramp(11);
  std::iota(ramp.begin(), ramp.end(), 0);
  const auto up = ParticleConfig::from_counts(ramp);
  CHECK(empirical_average(up, 0, 4) == doctest::Approx(1.5));
  CHECK(empirical_average(up, 6, 1) == doctest::Approx(6.0));
  CHECK_THROWS_AS(empirical_average(up, 8, 4), RangeError);
  CHECK_THROWS_AS(empirical_average(up, 0, 0), RangeError);
}

TEST_CASE("particle approximation of a flat profile") {
  const LatticeParams p(4, 1.0);
  const auto cfg = build_initial_config(p, ProfileSpec::uniform(1.0));
  CHECK(cumulative(cfg) == std::vector<std::int64_t>{1, 2, 3, 4, 4});
  CHECK(cfg.count(4) == 0);
  CHECK(cfg.total() == 4);
  CHECK(build_initial_config(p, ProfileSpec::uniform(0.0)).empty());
}

TEST_CASE("particle approximation follows the ceiling rule") {
  const LatticeParams p(50, 1.0);
  const auto spec = ProfileSpec::linear(0.7, 1.0);
  const LinearProfile exact(0.7, 1.0);
  const auto cfg = build_initial_config(p, spec);
  const auto cum = cumulative(cfg);
  for (int x = 0; x < p.last_site(); ++x) {
    CHECK(cum[x] == static_cast<std::int64_t>(std::ceil(50.0 * exact.cumulative((x + 1) / 50.0) - 1e-9)));
  }
  CHECK(cfg.count(p.last_site()) == 0);
}

TEST_CASE("linear profiles give admissible configurations") {
  for (int inv : {100, 400, 1000}) {
    for (double M : {0.25, 0.5, 1.0, 2.0}) {
      const LatticeParams p(inv, 1.0);
      const auto spec = ProfileSpec::linear(M, 1.0);
      const auto cfg = build_initial_config(p, spec);
      CAPTURE(inv);
      CAPTURE(M);
      CHECK(check_admissibility(cfg, p, spec).ok);
      CHECK(std::abs(mass_density(cfg, p) - M) <= p.eps() + 1e-12);
    }
  }
}

TEST_CASE("mass density") {
  CHECK(mass_density(ParticleConfig(100), LatticeParams(100, 1.0)) == 0.0);
  ParticleConfig cfg(100);
  cfg.add(10, 50);
  CHECK(mass_density(cfg, LatticeParams(100, 1.0)) == doctest::Approx(0.5));
}

TEST_CASE("negative densities are rejected") {
  ProfileSpec spec;
  spec.density = [](double r) { return 0.5 - r; };
  CHECK_THROWS_AS(build_initial_config(LatticeParams(20, 1.0), spec), ValidationError);
  CHECK_THROWS_AS(ProfileSpec::table({{0.0, 1.0}, {1.0, -0.5}}), ValidationError);
}

TEST_CASE("table profiles interpolate linearly") {
  const auto spec = ProfileSpec::table({{0.0, 2.0}, {0.5, 0.0}, {1.0, 0.0}});
  CHECK(spec.density(0.25) == doctest::Approx(1.0));
  CHECK(spec.total_mass() == doctest::Approx(0.5).epsilon(1e-10));
  REQUIRE(spec.edge.has_value());
  CHECK(*spec.edge == doctest::Approx(0.5));
}

TEST_CASE("N-particle approximation of the manifold") {
  const LatticeParams p(100, 1.0);
  const auto cfg = build_initial_config(p, 37, 5.0);
  CHECK(cfg.total() == 37);
  CHECK_THROWS_AS(build_initial_config(p, 600, 5.0), ValidationError);
}

TEST_CASE("suffix index agrees with naive sums under random updates") {
  std::mt19937_64 gen(11);
  ParticleConfig cfg(40);
  std::vector<std::int64_t> naive(41, 0);
  for (int step = 0; step < 4000; ++step) {
    const int x = static_cast<int>(gen() % 41);
    if (gen() % 3 == 0 && naive[x] > 0) {
      cfg.remove(x);
      --naive[x];
    } else if (gen() % 2 == 0 && naive[x] > 0) {
      const int to = static_cast<int>(gen() % 41);
      cfg.move(x, to);
      --naive[x];
      ++naive[to];
    } else {
      cfg.add(x);
      ++naive[x];
    }
    const int q = static_cast<int>(gen() % 41);
    REQUIRE(cfg.suffix_count(q) == std::accumulate(naive.begin() + q, naive.end(), std::int64_t{0}));
    REQUIRE(cfg.total() == std::accumulate(naive.begin(), naive.end(), std::int64_t{0}));
  }
}

TEST_CASE("rightmost site is empty exactly when the configuration is") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    ParticleConfig cfg(30);
    const int n = static_cast<int>(gen() % 5);
    for (int k = 0; k < n; ++k) cfg.add(static_cast<int>(gen() % 31));
    const auto r = cfg.rightmost_occupied();
    REQUIRE(r.has_value() == !cfg.empty());
    if (r) {
      CHECK(cfg.count(*r) > 0);
      for (int y = *r + 1; y <= 30; ++y) CHECK(cfg.count(y) == 0);
    }
  }
}

TEST_CASE("site_of lists particles by site") {
  const auto cfg = with_sites(10, {1, 4, 4, 8});
  CHECK(cfg.site_of(0) == 1);
  CHECK(cfg.site_of(1) == 4);
  CHECK(cfg.site_of(2) == 4);
  CHECK(cfg.site_of(3) == 8);
  CHECK_THROWS_AS(cfg.site_of(4), RangeError);
}

TEST_CASE("particle approximation is monotone in the particle number") {
  const LatticeParams p(200, 1.0);
  std::vector<std::int64_t> previous(p.num_sites(), 0);
  for (std::int64_t n = 0; n <= 400; n += 7) {
    const auto cum = cumulative(build_initial_config(p, n, 3.0));
    for (int x = 0; x <= p.last_site(); ++x) REQUIRE(previous[x] <= cum[x]);
    previous = cum;
  }
}
