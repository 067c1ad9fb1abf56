#include <cmath>
#include <vector>

#include "doctest.h"

#include "curres/barriers.hpp"
#include "curres/errors.hpp"
#include "curres/stationary.hpp"

using namespace curres;

TEST_CASE("stationary spec validation") {
  CHECK_THROWS_AS(StationarySpec::with_edge(1.5, 1e-3, 1.0).validate(), DomainError);
  CHECK_THROWS_AS(StationarySpec::with_edge(0.5, 0.0, 1.0).validate(), DomainError);
  CHECK_THROWS_AS(StationarySpec::edge_layer(-1.0, 1e-3, 1.0).validate(), DomainError);
  CHECK(StationarySpec::edge_layer(2.0, 1e-3, 1.0).edge() == doctest::Approx(0.998));
}

TEST_CASE("grid choice resolves sqrt(delta) and aligns the edge") {
  const Grid g = choose_grid(StationarySpec::edge_layer(1.0, 3e-3, 1.0), 400);
  CHECK(g.cells() >= 400);
  CHECK(g.node_index(0.997) >= 1);
  CHECK(choose_grid(StationarySpec::with_edge(0.5, 1e-6, 1.0), 400).cells() >= 2000);
}

TEST_CASE("stationary series is the fixed point") {
  const auto spec = StationarySpec::with_edge(0.5, 1e-3, 1.0);
  const auto res = stationary_series(spec, Grid(400));
  CHECK(fixed_point_residual(spec, res) < 10.0 * spec.tail_tol);
  CHECK(mass_balance_defect(spec, res) < 10.0 * spec.tail_tol);
  CHECK(res.support_cells == 200);
  CHECK_FALSE(res.edge_snapped);
  CHECK(res.escape_ratio < 1.0);
  for (int i = 0; i < 400; ++i) {
    REQUIRE(res.density[i] >= 0.0);
    if (i >= res.support_cells) REQUIRE(res.density[i] == 0.0);
  }

  // One lower-barrier step leaves j*delta*D0 + rho in place.
  const MeasureU u(res.grid, spec.j * spec.delta, res.density);
  const auto next = barrier_step_minus(u, spec.delta, spec.j, KernelCache::neumann(res.grid, spec.delta));
  double worst = std::abs(next.atom - u.atom);
  for (int i = 0; i < 400; ++i) worst = std::max(worst, std::abs(next.density[i] - u.density[i]));
  CHECK(worst <= 10.0 * spec.tail_tol);
}

TEST_CASE("stationary profile grows with the edge") {
  const Grid g(400);
  const auto small = stationary_series(StationarySpec::with_edge(0.4, 3e-3, 1.0), g);
  const auto large = stationary_series(StationarySpec::with_edge(0.6, 3e-3, 1.0), g);
  for (int i = 0; i < 160; ++i) REQUIRE(small.density[i] <= large.density[i]);
}

TEST_CASE("series gives up when the iteration budget is too small") {
  const auto spec = StationarySpec::with_edge(0.5, 1e-3, 1.0);
  CHECK_THROWS_AS(stationary_series(spec, Grid(400), 10), ConvergenceError);
}

TEST_CASE("limit profiles") {
  const auto edge = StationarySpec::with_edge(0.5, 1e-3, 1.0);
  CHECK(limit_profile(edge, 0.25) == doctest::Approx(0.5));
  CHECK(limit_profile(edge, 0.75) == 0.0);
  const auto layer = StationarySpec::edge_layer(1.0, 1e-3, 1.0);
  CHECK(limit_profile(layer, 0.0) == doctest::Approx(3.0));
  CHECK(limit_profile(layer, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("delta ladder approaches the linear limit") {
  const auto rows = linear_limit_check(StationarySpec::with_edge(0.5, 1e-3, 1.0), {3e-3, 1e-3});
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].sup_error < rows[0].sup_error);
  CHECK(rows[1].sup_error <= 0.05);
  CHECK(rows[0].margin == doctest::Approx(5.0 * std::sqrt(3e-3)));
  // Apex 2jR; edge-layer apex tends to 2j + j/A.
  CHECK(rows[1].apex == doctest::Approx(1.0).epsilon(0.01));
  const auto layer = linear_limit_check(StationarySpec::edge_layer(1.0, 1e-2, 1.0), {1e-2, 3e-3});
  CHECK(layer[1].apex > layer[0].apex);
  CHECK(std::abs(layer[1].apex - 3.0) < std::abs(layer[0].apex - 3.0));
  CHECK(std::abs(layer[1].edge_value - 1.0) < 0.1);
}

TEST_CASE("manifold consistency") {
  ManifoldOptions fast;
  fast.deltas = {3e-3, 1e-3};
  const auto quarter = manifold_consistency(0.25, 1.0, fast);
  CHECK(quarter.ok);
  CHECK(std::string(quarter.mode) == "edge");
  CHECK(quarter.R == doctest::Approx(0.5));
  const auto unit = manifold_consistency(1.0, 1.0, fast);
  CHECK(unit.ok);
  CHECK(std::string(unit.mode) == "continuity");
  ManifoldOptions closed = fast;
  closed.deltas = {1e-1};
  const auto two = manifold_consistency(2.0, 1.0, closed);
  CHECK(std::string(two.mode) == "edge_layer");
  CHECK(two.A == doctest::Approx(1.0));
  CHECK(two.analytic_error < 1e-12);
}
