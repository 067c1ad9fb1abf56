#include "curres/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "curres/errors.hpp"
#include "curres/manifold.hpp"

namespace curres {

namespace {

void require_same_grid(const MeasureU& u, const MeasureU& v) {
  if (!(u.grid == v.grid)) throw ShapeError("measures live on different grids");
}

}  // namespace

double F_functional(const MeasureU& u, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("F is defined on [0, 1]");
  if (r == 0.0) return u.mass();
  const Grid& g = u.grid;
  const int c = g.cell_of(r);
  double sum = u.density[c] * (g.node(c + 1) - r);
  for (int k = c + 1; k < g.cells(); ++k) sum += u.density[k] * g.width();
  return std::max(sum, 0.0);
}

std::vector<double> suffix_table(const MeasureU& u) {
  const int m = u.grid.cells();
  std::vector<double> F(m + 2, 0.0);
  for (int i = m - 1; i >= 0; --i) F[i] = F[i + 1] + u.density[i] * u.grid.width();
  F[m + 1] = F[0];
  F[0] += u.atom;
  return F;
}

double order_violation(const MeasureU& u, const MeasureU& v) {
  require_same_grid(u, v);
  const auto Fu = suffix_table(u);
  const auto Fv = suffix_table(v);
  double worst = -INFINITY;
  for (std::size_t i = 0; i < Fu.size(); ++i) worst = std::max(worst, Fu[i] - Fv[i]);
  return worst;
}

bool partial_order_leq(const MeasureU& u, const MeasureU& v, double tol) {
  return order_violation(u, v) <= tol;
}

double sup_F_distance(const MeasureU& u, const MeasureU& v) {
  require_same_grid(u, v);
  const auto Fu = suffix_table(u);
  const auto Fv = suffix_table(v);
  double worst = 0.0;
  for (std::size_t i = 0; i < Fu.size(); ++i) worst = std::max(worst, std::abs(Fu[i] - Fv[i]));
  return worst;
}

namespace {

struct Cut {
  int cell;
  double remaining;  // mass left in the boundary cell
  double edge;
};

Cut locate_cut(const MeasureU& u, double delta, double j) {
  const double q = j * delta;
  const double available = u.density_mass();
  if (!(available > q)) throw MassTooSmall(available, q);
  const Grid& g = u.grid;
  double tail = 0.0;
  for (int c = g.cells() - 1; c >= 0; --c) {
    const double cell_mass = u.density[c] * g.width();
    if (tail + cell_mass >= q) {
      const double take = q - tail;
      const double edge = g.node(c + 1) - (u.density[c] > 0.0 ? take / u.density[c] : 0.0);
      return {c, cell_mass - take, std::max(edge, g.node(c))};
    }
    tail += cell_mass;
  }
  // Roundoff only: the whole density is within a few ulps of q.
  return {0, 0.0, 0.0};
}

}  // namespace

double cut_edge(const MeasureU& u, double delta, double j) { return locate_cut(u, delta, j).edge; }

MeasureU cut_and_paste(const MeasureU& u, double delta, double j) {
  const Cut cut = locate_cut(u, delta, j);
  MeasureU out = u;
  out.atom = u.atom + j * delta;
  out.density[cut.cell] = std::max(cut.remaining, 0.0) / u.grid.width();
  std::fill(out.density.begin() + cut.cell + 1, out.density.end(), 0.0);
  return out;
}

MeasureU barrier_step_minus(const MeasureU& u, double delta, double j, const KernelCache& cache) {
  MeasureU smoothed(u.grid, 0.0, apply_kernel(cache, u));
  return cut_and_paste(smoothed, delta, j);
}

MeasureU barrier_step_plus(const MeasureU& u, double delta, double j, const KernelCache& cache) {
  const MeasureU cut = cut_and_paste(u, delta, j);
  return MeasureU(u.grid, 0.0, apply_kernel(cache, cut));
}

BarrierPair::BarrierPair(const MeasureU& u0, double delta, double j)
    : lower_(u0), upper_(u0), delta_(delta), j_(j) {
  if (!(delta > 0.0)) throw DomainError("barrier step must be positive");
  if (!(j > 0.0)) throw DomainError("current must be positive");
}

void BarrierPair::advance(const KernelCache& cache) {
  if (!(cache.grid() == lower_.grid) || cache.kind() != KernelKind::neumann) {
    throw ShapeError("barriers need a Neumann kernel on the measure's grid");
  }
  lower_ = barrier_step_minus(lower_, delta_, j_, cache);
  upper_ = barrier_step_plus(upper_, delta_, j_, cache);
  ++steps_;
  worst_violation_ = std::max(worst_violation_, order_violation(lower_, upper_));
}

void BarrierPair::advance(const KernelCache& cache, int steps) {
  for (int s = 0; s < steps; ++s) advance(cache);
}

int first_admissible_level(const MeasureU& u0, double t, double j) {
  const double usable = std::min(u0.density_mass(), u0.mass());
  for (int n = 1; n <= 60; ++n) {
    // Strict margin: kernel roundoff must not push a borderline level out of U_delta.
    if (usable > j * std::ldexp(t, -n) * (1.0 + 1e-9)) return n;
  }
  throw MassTooSmall(usable, j * std::ldexp(t, -60));
}

namespace {

BarrierLevel run_level(const MeasureU& u0, double t, double j, int n) {
  const double delta = std::ldexp(t, -n);
  const KernelCache cache = KernelCache::neumann(u0.grid, delta);
  BarrierPair pair(u0, delta, j);
  pair.advance(cache, 1 << n);
  return {n, delta, pair.gap(), pair.worst_violation(), pair.lower(), pair.upper()};
}

}  // namespace

std::vector<BarrierLevel> barrier_ladder(const MeasureU& u0, double t, double j, int n_from, int n_to) {
  if (!(t > 0.0)) throw DomainError("barrier horizon must be positive");
  if (n_from < 1 || n_to < n_from || n_to > 30) throw DomainError("invalid refinement range");
  std::vector<std::future<BarrierLevel>> jobs;
  for (int n = n_from; n <= n_to; ++n) {
    jobs.push_back(std::async(std::launch::async, run_level, std::cref(u0), t, j, n));
  }
  std::vector<BarrierLevel> levels;
  for (auto& job : jobs) levels.push_back(job.get());
  return levels;
}

SeparatingResult separating_element(const MeasureU& u0, double t, double j, double tol,
                                    const SeparatingOptions& options) {
  if (!(t > 0.0)) throw DomainError("separating element needs t > 0");
  if (!(u0.mass() > 0.0)) throw DomainError("separating element needs positive mass");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");

  SeparatingResult result;
  const double h = u0.grid.width();
  for (int n = std::max(options.n_min, first_admissible_level(u0, t, j)); n <= options.n_max; ++n) {
    BarrierLevel level = run_level(u0, t, j, n);
    if (std::sqrt(level.delta) < 2.0 * h) {
      std::ostringstream msg;
      msg << "sqrt(delta) = " << std::sqrt(level.delta) << " is below two cell widths at n = " << n;
      result.warnings.push_back(msg.str());
    }
    result.n = n;
    result.delta = level.delta;
    result.gap = level.gap;
    const bool done = level.gap < tol;
    if (done) {
      MeasureU mid(u0.grid, 0.0, level.upper.density);
      for (int i = 0; i < u0.grid.cells(); ++i) {
        double low = level.lower.density[i];
        if (i == 0) low += level.lower.atom / h;
        mid.density[i] = 0.5 * (mid.density[i] + low);
      }
      result.density = std::move(mid);
    }
    if (options.keep_levels) result.levels.push_back(std::move(level));
    if (done) return result;
  }
  throw ConvergenceError("barrier gap did not fall below tolerance within n_max refinements",
                         result.gap);
}

MeasureU linear_profile(double M, double j, const Grid& grid) {
  const LinearProfile profile(M, j);
  MeasureU u(grid);
  for (int i = 0; i < grid.cells(); ++i) {
    u.density[i] = (profile.cumulative(grid.node(i + 1)) - profile.cumulative(grid.node(i))) / grid.width();
  }
  return u;
}

}  // namespace curres
