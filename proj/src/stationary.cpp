#include "curres/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "curres/errors.hpp"
#include "curres/manifold.hpp"

namespace curres {

StationarySpec StationarySpec::with_edge(double R, double delta, double j, double tail_tol) {
  StationarySpec spec;
  spec.R = R;
  spec.delta = delta;
  spec.j = j;
  spec.tail_tol = tail_tol;
  spec.validate();
  return spec;
}

StationarySpec StationarySpec::edge_layer(double A, double delta, double j, double tail_tol) {
  StationarySpec spec;
  spec.A = A;
  spec.delta = delta;
  spec.j = j;
  spec.tail_tol = tail_tol;
  spec.R = spec.edge();
  spec.validate();
  return spec;
}

void StationarySpec::validate() const {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (!(j > 0.0)) throw DomainError("current must be positive");
  if (!(tail_tol > 0.0)) throw DomainError("tail tolerance must be positive");
  if (A && !(*A > 0.0)) throw DomainError("edge-layer coefficient must be positive");
  const double R = edge();
  if (!(R > 0.0 && R <= 1.0)) throw DomainError("edge must lie in (0, 1]");
}

Grid choose_grid(const StationarySpec& spec, int m_min) {
  spec.validate();
  const int resolve = static_cast<int>(std::ceil(2.0 / std::sqrt(spec.delta)));
  const int m_req = std::max({m_min, resolve, 2});
  for (int m = m_req; m <= 20 * m_req; ++m) {
    if (Grid(m).node_index(spec.edge()) >= 1) return Grid(m);
  }
  return Grid(m_req);
}

StationaryResult stationary_series(const StationarySpec& spec, const Grid& grid, long max_iterations) {
  spec.validate();
  StationaryResult res;
  res.grid = grid;
  int s = grid.node_index(spec.edge());
  if (s < 1) {
    s = std::max(1, static_cast<int>(std::lround(spec.edge() * grid.cells())));
    res.edge_snapped = true;
  }
  res.support_cells = s;
  res.edge = grid.node(s);

  const KernelCache g0 = KernelCache::truncated(grid, spec.delta, res.edge);
  const int m = grid.cells();
  const double h = grid.width();
  std::vector<double> v(g0.origin_column().begin(), g0.origin_column().end());
  std::vector<double> next(m, 0.0);
  std::vector<double> acc = v;
  double mass_prev = 0.0;
  for (int i = 0; i < s; ++i) mass_prev += v[i] * h;

  bool converged = false;
  for (long it = 1; it <= max_iterations; ++it) {
    g0.apply_into(v, 0.0, next);
    double mass = 0.0;
    double sup = 0.0;
    for (int i = 0; i < s; ++i) {
      acc[i] += next[i];
      mass += next[i] * h;
      sup = std::max(sup, next[i]);
    }
    const double q = mass_prev > 0.0 ? mass / mass_prev : 0.0;
    res.iterations = it;
    res.escape_ratio = q;
    res.tail_estimate = q < 1.0 ? spec.j * spec.delta * sup * q / (1.0 - q) : INFINITY;
    if (res.tail_estimate < spec.tail_tol) {
      converged = true;
      break;
    }
    std::swap(v, next);
    mass_prev = mass;
  }
  if (!converged) {
    throw ConvergenceError("stationary series did not reach its tail tolerance", res.tail_estimate);
  }
  res.density.assign(m, 0.0);
  for (int i = 0; i < s; ++i) res.density[i] = spec.j * spec.delta * acc[i];
  return res;
}

StationaryResult stationary_series(const StationarySpec& spec) {
  return stationary_series(spec, choose_grid(spec));
}

double fixed_point_residual(const StationarySpec& spec, const StationaryResult& result) {
  const KernelCache g0 = KernelCache::truncated(result.grid, spec.delta, result.edge);
  const auto image = g0.apply(result.density, spec.j * spec.delta);
  double worst = 0.0;
  for (int i = 0; i < result.grid.cells(); ++i) worst = std::max(worst, std::abs(result.density[i] - image[i]));
  return worst;
}

double mass_balance_defect(const StationarySpec& spec, const StationaryResult& result) {
  const KernelCache G = KernelCache::neumann(result.grid, spec.delta);
  const auto image = G.apply(result.density, spec.j * spec.delta);
  double escaped = 0.0;
  for (int i = result.support_cells; i < result.grid.cells(); ++i) escaped += image[i] * result.grid.width();
  return std::abs(escaped - spec.j * spec.delta);
}

double edge_value(const StationaryResult& result) { return result.density[result.support_cells - 1]; }

double limit_profile(const StationarySpec& spec, double r) {
  if (spec.A) return 2.0 * spec.j * (1.0 - r) + spec.j / *spec.A;
  return r <= spec.R ? 2.0 * spec.j * (spec.R - r) : 0.0;
}

namespace {

LimitRow limit_row(StationarySpec spec, double delta, int m_min) {
  spec.delta = delta;
  if (spec.A) spec.R = spec.edge();
  const StationaryResult res = stationary_series(spec, choose_grid(spec, m_min));
  LimitRow row;
  row.delta = delta;
  row.edge = res.edge;
  row.cells = res.grid.cells();
  row.margin = 5.0 * std::sqrt(delta);
  row.apex = res.density[0];
  row.edge_value = edge_value(res);
  row.iterations = res.iterations;
  row.escape_ratio = res.escape_ratio;
  for (int i = 0; i < res.support_cells; ++i) {
    const double r = res.grid.midpoint(i);
    const double target = limit_profile(spec, r);
    row.r.push_back(r);
    row.rho.push_back(res.density[i]);
    row.target.push_back(target);
    if (r <= res.edge - row.margin) row.sup_error = std::max(row.sup_error, std::abs(res.density[i] - target));
  }
  return row;
}

}  // namespace

std::vector<LimitRow> linear_limit_check(const StationarySpec& base, const std::vector<double>& deltas, int m_min) {
  if (deltas.empty()) throw DomainError("delta ladder is empty");
  std::vector<std::future<LimitRow>> jobs;
  for (double delta : deltas) jobs.push_back(std::async(std::launch::async, limit_row, base, delta, m_min));
  std::vector<LimitRow> rows;
  for (auto& job : jobs) rows.push_back(job.get());
  return rows;
}

ManifoldReport manifold_consistency(double M, double j, const ManifoldOptions& options) {
  if (!(M > 0.0)) throw DomainError("manifold check needs M > 0");
  if (!(j > 0.0)) throw DomainError("current must be positive");
  if (options.deltas.empty()) throw DomainError("delta ladder is empty");
  const double finest = *std::min_element(options.deltas.begin(), options.deltas.end());
  const LinearProfile profile(M, j);
  ManifoldReport rep;

  auto analytic = [&](const StationarySpec& spec, double mass_of_limit) {
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double r = k / 1000.0;
      worst = std::max(worst, std::abs(limit_profile(spec, r) - profile.density(r)));
    }
    rep.analytic_error = std::max(rep.analytic_error, worst);
    rep.mass_error = std::max(rep.mass_error, std::abs(mass_of_limit - M));
  };

  if (std::abs(M - j) <= 1e-12 * j) {
    // Both parameterizations degenerate here; compare them just off the continuity point.
    rep.mode = "continuity";
    const double off = 1e-3 * j;
    const StationarySpec below = StationarySpec::with_edge(std::sqrt((M - off) / j), finest, j);
    StationarySpec above;
    above.A = j / off;
    above.j = j;
    above.delta = finest;
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double r = k / 1000.0;
      worst = std::max({worst, std::abs(limit_profile(below, r) - profile.density(r)),
                        std::abs(limit_profile(above, r) - profile.density(r))});
    }
    rep.R = below.R;
    rep.A = *above.A;
    rep.analytic_error = worst;
    rep.tolerance = options.edge_tolerance;
    rep.ok = worst <= rep.tolerance;
    return rep;
  }

  StationarySpec spec;
  spec.j = j;
  spec.delta = finest;
  if (M < j) {
    rep.mode = "edge";
    rep.R = std::sqrt(M / j);
    spec.R = rep.R;
    rep.tolerance = options.edge_tolerance;
    analytic(spec, j * rep.R * rep.R);
    rep.numerical = rep.R + 5.0 * std::sqrt(finest) <= 1.0 && rep.R > 5.0 * std::sqrt(finest);
  } else {
    rep.mode = "edge_layer";
    rep.A = j / (M - j);
    spec.A = rep.A;
    spec.R = spec.edge();
    rep.tolerance = options.layer_tolerance;
    analytic(spec, j + j / rep.A);
    rep.numerical = rep.A * finest <= std::sqrt(finest);
  }
  rep.ok = rep.analytic_error <= 1e-12 * std::max(1.0, M) && rep.mass_error <= 1e-12 * std::max(1.0, M);
  if (rep.numerical) {
    const auto rows = linear_limit_check(spec, options.deltas, options.m_min);
    const auto last = std::min_element(rows.begin(), rows.end(),
                                       [](const LimitRow& a, const LimitRow& b) { return a.delta < b.delta; });
    rep.sup_error = last->sup_error;
    rep.ok = rep.ok && rep.sup_error <= rep.tolerance;
  }
  return rep;
}

}  // namespace curres
