#include <cmath>
#include <vector>

#include "doctest.h"

#include "curres/errors.hpp"
#include "curres/manifold.hpp"
#include "curres/sim.hpp"

using namespace curres;

namespace {

ParticleConfig with_sites(int last, std::initializer_list<int> sites) {
  ParticleConfig cfg(last);
  for (int x : sites) cfg.add(x);
  return cfg;
}

}  // namespace

TEST_CASE("event rates") {
  const LatticeParams p(10, 2.0);
  SimState interior(p, with_sites(10, {4, 4, 7}), 1);
  CHECK(interior.hop_rate() == doctest::Approx(3.0));
  CHECK(interior.birth_rate() == doctest::Approx(0.2));
  CHECK(interior.death_rate() == doctest::Approx(0.2));
  SimState edges(p, with_sites(10, {0, 10, 5}), 1);
  CHECK(edges.hop_rate() == doctest::Approx(2.0));
  SimState empty(p, ParticleConfig(10), 1);
  CHECK(empty.death_rate() == 0.0);
  CHECK(empty.total_rate() == doctest::Approx(0.2));
}

TEST_CASE("a lone interior particle hops either way with probability one half") {
  const LatticeParams p(10, 1.0);
  SimState state(p, with_sites(10, {5}), 17);
  int right = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const auto ev = apply_event(state, EventType::hop);
    REQUIRE(std::abs(ev.to - ev.from) == 1);
    if (ev.to > ev.from) ++right;
    state.config().move(ev.to, 5);
  }
  CHECK(std::abs(right - n / 2) <= 3.0 * std::sqrt(n / 4.0));
}

TEST_CASE("boundary particles only hop inward") {
  const LatticeParams p(6, 1.0);
  SimState state(p, with_sites(6, {0, 6}), 3);
  for (int k = 0; k < 2000; ++k) {
    const auto before = state.config();
    const auto ev = apply_event(state, EventType::hop);
    REQUIRE(((ev.from == 0 && ev.to == 1) || (ev.from == 6 && ev.to == 5)));
    state.config() = before;
  }
}

TEST_CASE("empty configuration can only gain a particle at the origin") {
  const LatticeParams p(10, 1.0);
  SimState state(p, ParticleConfig(10), 8);
  const auto ev = step(state);
  CHECK(ev.type == EventType::birth);
  CHECK(state.config().count(0) == 1);
  CHECK(state.config().total() == 1);
  CHECK(state.clock() > 0.0);
}

TEST_CASE("deaths remove a particle from the rightmost site") {
  const LatticeParams p(10, 1.0);
  SimState state(p, with_sites(10, {2, 9}), 8);
  const auto ev = apply_event(state, EventType::death);
  CHECK(ev.from == 9);
  CHECK(state.config().count(9) == 0);
  CHECK(state.config().count(2) == 1);
}

TEST_CASE("runs are deterministic and keep their books") {
  const LatticeParams p(40, 1.0);
  const auto init = build_initial_config(p, ProfileSpec::linear(0.5, 1.0));
  std::vector<EventRecord> a, b;
  SimState s1(p, init, 99, 4), s2(p, init, 99, 4);
  const std::vector<double> times{100.0, 500.0};
  const auto snaps1 = run_until(s1, 1000.0, times, &a);
  const auto snaps2 = run_until(s2, 1000.0, times, &b);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    REQUIRE(a[k].time == b[k].time);
    REQUIRE(a[k].type == b[k].type);
    REQUIRE(a[k].from == b[k].from);
    REQUIRE(a[k].to == b[k].to);
  }
  CHECK(snaps1.size() == 3);
  CHECK(snaps1.front().time == 0.0);
  CHECK(s1.config() == s2.config());
  CHECK(s1.clock() == 1000.0);
  const auto& c = s1.counters();
  CHECK(c.births - c.deaths == s1.config().total() - init.total());
  CHECK(c.births + c.deaths + c.jumps == static_cast<std::int64_t>(a.size()));
  double last = 0.0;
  for (const auto& ev : a) {
    REQUIRE(ev.time >= last);
    last = ev.time;
    if (ev.from >= 0) REQUIRE(ev.from <= 40);
    if (ev.to >= 0) REQUIRE(ev.to <= 40);
  }
}

TEST_CASE("zero horizon yields the initial snapshot only") {
  const LatticeParams p(20, 1.0);
  SimState state(p, with_sites(20, {3, 4}), 1);
  const auto snaps = run_until(state, 0.0);
  REQUIRE(snaps.size() == 1);
  CHECK(snaps[0].total == 2);
  CHECK(state.counters().jumps == 0);
}

TEST_CASE("birth and death frequencies match their rates") {
  const LatticeParams p(20, 1.0);
  SimState state(p, with_sites(20, {10}), 23);
  double nonempty = 0.0;
  while (state.clock() < 4e5) {
    const bool occupied = !state.config().empty();
    const double before = state.clock();
    step(state);
    if (occupied) nonempty += state.clock() - before;
  }
  const double rate = p.eps() * p.current();
  const double births = static_cast<double>(state.counters().births);
  const double deaths = static_cast<double>(state.counters().deaths);
  CHECK(std::abs(births - rate * state.clock()) <= 3.0 * std::sqrt(rate * state.clock()));
  CHECK(std::abs(deaths - rate * nonempty) <= 3.0 * std::sqrt(rate * nonempty));
}

TEST_CASE("snapshots") {
  ParticleConfig sparse_cfg(100);
  sparse_cfg.add(3, 2);
  sparse_cfg.add(70);
  const auto s = take_snapshot(sparse_cfg, 1.5);
  CHECK(s.sparse);
  CHECK(s.to_config(100) == sparse_cfg);
  std::vector<std::int64_t> dense(11, 1);
  const auto d = take_snapshot(ParticleConfig::from_counts(dense), 0.0);
  CHECK_FALSE(d.sparse);
  CHECK(d.to_config(10) == ParticleConfig::from_counts(dense));
  CHECK_THROWS_AS(d.to_config(12), ShapeError);
}

TEST_CASE("hydrodynamic gap") {
  for (int inv : {50, 200}) {
    const LatticeParams p(inv, 1.0);
    const LinearProfile rho(0.5, 1.0);
    const auto cfg = build_initial_config(p, ProfileSpec::linear(0.5, 1.0));
    CHECK(hydrodynamic_gap(cfg, p, [&](double r) { return rho.suffix(r); }) <= p.eps() * (1.0 + 1e-9));
    CHECK(hydrodynamic_gap(take_snapshot(cfg, 0.0), p, [&](double r) { return rho.suffix(r); }) ==
          hydrodynamic_gap(cfg, p, [&](double r) { return rho.suffix(r); }));
  }
  const LatticeParams p(30, 1.0);
  CHECK(hydrodynamic_gap(ParticleConfig(30), p, [](double) { return 0.0; }) == 0.0);
  CHECK(hydrodynamic_gap(ParticleConfig(30), p, MeasureU(Grid(10))) == 0.0);
  CHECK_THROWS_AS(hydrodynamic_gap(ParticleConfig(20), p, [](double) { return 0.0; }), ShapeError);
}
