#include "curres/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <numeric>
#include <sstream>
#include <thread>

#include "curres/barriers.hpp"
#include "curres/coupling.hpp"
#include "curres/kernels.hpp"
#include "curres/lattice.hpp"
#include "curres/manifold.hpp"
#include "curres/mass.hpp"
#include "curres/sim.hpp"
#include "curres/stationary.hpp"

namespace curres {

using nlohmann::json;

namespace {

// Stream offsets keep the replica families of one experiment disjoint.
constexpr std::uint64_t kWalkStreams = 1'000'000;
constexpr std::uint64_t kCalibrationStreams = 2'000'000;
constexpr std::uint64_t kMarginalStreams = 3'000'000;
constexpr std::uint64_t kAuxStreams = 4'000'000;

bool compare(double value, const std::string& relation, double threshold) {
  if (std::isnan(value)) return false;
  if (relation == "<=") return value <= threshold;
  if (relation == ">=") return value >= threshold;
  if (relation == "<") return value < threshold;
  if (relation == ">") return value > threshold;
  if (relation == "==") return value == threshold;
  throw DomainError("unknown relation " + relation);
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + format_number(x);
  return s;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

LatticeParams lattice_params(const ExperimentConfig& cfg) { return LatticeParams(cfg.inverse_eps(), cfg.number("j")); }

json ks_json(const KsReport& r) {
  return {{"N", r.n},          {"statistic", r.statistic}, {"threshold", r.threshold}, {"critical_5pct", r.critical_5pct},
          {"p_value", r.p_value}, {"verdict", r.skipped ? "SKIPPED" : (r.pass ? "PASS" : "FAIL")},
          {"notice", r.notice}};
}

/// x with folded_normal_cdf(x, m, sigma2) = p.
double folded_normal_quantile(double p, double m, double sigma2) {
  double lo = 0.0;
  double hi = std::abs(m) + 40.0 * std::sqrt(sigma2);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (folded_normal_cdf(mid, m, sigma2) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Check make_check(std::string name, int criterion, double value, std::string relation, double threshold,
                 std::string detail) {
  Check c{std::move(name), criterion, value, threshold, std::move(relation), false, false, std::move(detail)};
  c.pass = compare(c.value, c.relation, c.threshold);
  return c;
}

Check make_flag(std::string name, int criterion, bool ok, std::string detail) {
  Check c{std::move(name), criterion, ok ? 1.0 : 0.0, 1.0, "==", ok, false, std::move(detail)};
  return c;
}

Check make_info(std::string name, double value, std::string detail) {
  Check c{std::move(name), 0, value, 0.0, "", true, true, std::move(detail)};
  return c;
}

bool ExperimentResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.informational || c.pass; });
}

std::vector<Check> ExperimentResult::for_criterion(int criterion) const {
  std::vector<Check> out;
  for (const auto& c : checks) {
    if (c.criterion == criterion && !c.informational) out.push_back(c);
  }
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("CURRES_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(std::min<long>(n, 1024));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers) {
  if (workers <= 0) workers = worker_count();
  const std::size_t pool = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (pool <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < pool; ++w) {
    jobs.push_back(std::async(std::launch::async, [&] {
      for (std::size_t k = next++; k < n; k = next++) body(k);
    }));
  }
  // get() rethrows the first worker exception after all workers finished.
  for (auto& job : jobs) job.wait();
  for (auto& job : jobs) job.get();
}

ExperimentResult run_kernels(const ExperimentConfig& cfg) {
  ExperimentResult out;
  out.experiment = "kernels";
  const Grid grid(cfg.integer("grid_m"));
  const double h = grid.width();
  const int m = grid.cells();

  // Image sum against cosine series on a 10 x 10 point grid.
  CsvTable cross{"kernels_series", "t: macroscopic time; max_difference: density per unit length",
                 {"t", "max_difference"}, {}};
  double cross_worst = 0.0;
  for (double t : cfg.numbers("cross_times")) {
    double worst = 0.0;
    for (int a = 0; a < 10; ++a) {
      for (int b = 0; b < 10; ++b) {
        const double r = a / 9.0;
        const double r2 = b / 9.0;
        worst = std::max(worst, std::abs(neumann_green_images(t, r, r2) - neumann_green_series(t, r, r2)));
      }
    }
    cross.add({t, worst});
    cross_worst = std::max(cross_worst, worst);
  }
  out.tables.push_back(std::move(cross));
  out.checks.push_back(make_check("image_vs_series", 1, cross_worst, "<=", cfg.threshold("series_agreement"),
                                  "max over t in {" + join_numbers(cfg.numbers("cross_times")) + "}"));

  // Smooth test input: cell averages of 1 + cos(pi r), plus an atom for the mass test.
  std::vector<double> smooth(m);
  for (int i = 0; i < m; ++i) {
    smooth[i] = 1.0 + (std::sin(M_PI * grid.node(i + 1)) - std::sin(M_PI * grid.node(i))) / (M_PI * h);
  }
  const MeasureU probe(grid, 0.3, smooth);

  CsvTable semi{"kernels_semigroup",
                "t: macroscopic time; errors: dimensionless (row sums, relative mass) or density (symmetry, semigroup)",
                {"t", "row_sum_error", "symmetry_error", "relative_mass_error", "semigroup_defect"},
                {}};
  double row_worst = 0.0, sym_worst = 0.0, mass_worst = 0.0, semi_worst = 0.0;
  for (double t : cfg.numbers("semigroup_times")) {
    auto single = std::async(std::launch::async, [&] { return KernelCache::neumann(grid, t); });
    const KernelCache twice = KernelCache::neumann(grid, 2.0 * t);
    const KernelCache K = single.get();
    double row_err = 0.0, sym_err = 0.0;
    for (const KernelCache* c : {&K, &twice}) {
      for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) {
          s += c->entry(i, k);
          if (k > i) sym_err = std::max(sym_err, std::abs(c->entry(i, k) - c->entry(k, i)));
        }
        row_err = std::max(row_err, std::abs(s - 1.0));
      }
    }
    const auto smoothed = apply_kernel(K, probe);
    const double mass_err = std::abs(MeasureU(grid, 0.0, smoothed).mass() - probe.mass()) / probe.mass();
    const auto a = K.apply(K.apply(smooth));
    const auto b = twice.apply(smooth);
    double defect = 0.0;
    for (int i = 0; i < m; ++i) defect = std::max(defect, std::abs(a[i] - b[i]));
    semi.add({t, row_err, sym_err, mass_err, defect});
    row_worst = std::max(row_worst, row_err);
    sym_worst = std::max(sym_worst, sym_err);
    mass_worst = std::max(mass_worst, mass_err);
    semi_worst = std::max(semi_worst, defect);
  }
  out.tables.push_back(std::move(semi));
  const std::string grid_note = "m = " + std::to_string(m) + " cells";
  out.checks.push_back(make_check("neumann_row_sum", 1, row_worst, "<=", cfg.threshold("row_sum"), grid_note));
  out.checks.push_back(make_check("neumann_mass_conservation", 1, mass_worst, "<=", cfg.threshold("row_sum"),
                                  "relative mass error of apply_kernel on 0.3*D0 + (1 + cos(pi r))"));
  out.checks.push_back(make_check("neumann_symmetry", 0, sym_worst, "<=", cfg.threshold("symmetry"), grid_note));
  out.checks.push_back(make_check("semigroup_defect", 1, semi_worst, "<=", cfg.threshold("semigroup"),
                                  "sup |K_t K_t f - K_2t f| for f = 1 + cos(pi r), " + grid_note));

  // Long-time uniformization of a unit atom.
  {
    const KernelCache K = KernelCache::neumann(grid, 100.0);
    const auto u = apply_kernel(K, MeasureU(grid, 1.0));
    double worst = 0.0;
    for (double v : u) worst = std::max(worst, std::abs(v - 1.0));
    out.checks.push_back(make_check("atom_uniformizes", 0, worst, "<=", 1e-8, "t = 100"));
  }

  // Truncated kernel: dominated by the Neumann kernel and loses mass.
  {
    const double R = cfg.number("truncation_edge");
    const double t = cfg.numbers("semigroup_times").front();
    const KernelCache full = KernelCache::neumann(grid, t);
    const KernelCache trunc = KernelCache::truncated(grid, t, R);
    double excess = -INFINITY;
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < m; ++k) excess = std::max(excess, trunc.entry(i, k) - full.entry(i, k));
    }
    std::vector<double> inside(m, 0.0);
    for (int i = 0; i < trunc.support_cells(); ++i) inside[i] = 1.0;
    const MeasureU u(grid, 0.0, inside);
    const double after = MeasureU(grid, 0.0, apply_kernel(trunc, u)).mass();
    out.checks.push_back(make_check("truncated_dominated", 0, excess, "<=", 0.0, "max truncated - neumann entry"));
    out.checks.push_back(make_check("truncated_escape", 0, after - u.mass(), "<", 0.0,
                                    "mass change of an input supported in [0, " + format_number(trunc.edge()) + "]"));
  }

  // Dirichlet boundary values.
  {
    const double R = cfg.number("resolvent_R");
    double worst = 0.0;
    for (double t : {1e-3, 0.05, 0.5, 2.0}) {
      for (double r2 : {-0.5 * R, 0.0, 0.3 * R}) {
        worst = std::max({worst, std::abs(dirichlet_green(t, R, r2, R)), std::abs(dirichlet_green(t, -R, r2, R))});
      }
    }
    out.checks.push_back(make_check("dirichlet_boundary", 0, worst, "<=", 1e-10, "G at r = +-R"));
  }

  CsvTable res{"kernels_resolvent", "R, r: length; value, target, error: time*density",
               {"R", "r", "value", "target", "error"}, {}};
  const double R = cfg.number("resolvent_R");
  double res_worst = 0.0;
  for (double r : cfg.numbers("resolvent_r")) {
    if (r > R) throw ValidationError("resolvent_r: point " + format_number(r) + " lies outside [-R, R]");
    const double value = dirichlet_resolvent_origin(R, r, cfg.number("resolvent_T"), cfg.number("resolvent_dt"));
    const double target = R - std::abs(r);
    res.add({R, r, value, target, std::abs(value - target)});
    res_worst = std::max(res_worst, std::abs(value - target));
  }
  out.tables.push_back(std::move(res));
  out.checks.push_back(make_check("dirichlet_resolvent", 1, res_worst, "<=", cfg.threshold("resolvent"),
                                  "max |v0(r) - (R - |r|)| over r in {" + join_numbers(cfg.numbers("resolvent_r")) +
                                      "}"));
  return out;
}

namespace {

void add_ladder(const std::string& mode, const std::vector<LimitRow>& rows, CsvTable& detail, CsvTable& summary,
                double common_end) {
  for (const auto& row : rows) {
    double common = 0.0;
    for (std::size_t i = 0; i < row.r.size(); ++i) {
      detail.add({mode, row.delta, row.r[i], row.rho[i], row.target[i], std::abs(row.rho[i] - row.target[i])});
      if (row.r[i] <= common_end) common = std::max(common, std::abs(row.rho[i] - row.target[i]));
    }
    summary.add({mode, row.delta, static_cast<std::int64_t>(row.cells), row.edge, row.margin, row.edge - row.margin,
                 row.sup_error, common_end, common, row.apex, row.edge_value,
                 static_cast<std::int64_t>(row.iterations), row.escape_ratio});
  }
}

/// Largest increase between consecutive rungs (ordered by decreasing delta).
double ladder_increase(std::vector<LimitRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const LimitRow& a, const LimitRow& b) { return a.delta > b.delta; });
  double worst = -INFINITY;
  for (std::size_t k = 1; k < rows.size(); ++k) worst = std::max(worst, rows[k].sup_error - rows[k - 1].sup_error);
  return worst;
}

const LimitRow& finest_row(const std::vector<LimitRow>& rows) {
  return *std::min_element(rows.begin(), rows.end(),
                           [](const LimitRow& a, const LimitRow& b) { return a.delta < b.delta; });
}

std::string ladder_errors(const std::vector<LimitRow>& rows) {
  std::vector<double> e;
  for (const auto& row : rows) e.push_back(row.sup_error);
  return "sup errors {" + join_numbers(e) + "}";
}

}  // namespace

ExperimentResult run_stationary(const ExperimentConfig& cfg) {
  ExperimentResult out;
  out.experiment = "stationary";
  const double j = cfg.number("j");
  const double tail = cfg.number("tail_tol");
  const int m = cfg.integer("grid_m");
  const auto spec = StationarySpec::with_edge(cfg.number("R"), cfg.number("delta"), j, tail);

  const StationaryResult base = stationary_series(spec, choose_grid(spec, m));
  const double residual = fixed_point_residual(spec, base);
  const double balance = mass_balance_defect(spec, base);
  CsvTable profile{"stationary_profile", "r: length; rho, target: density", {"r", "rho", "target"}, {}};
  for (int i = 0; i < base.grid.cells(); ++i) {
    const double r = base.grid.midpoint(i);
    profile.add({r, base.density[i], limit_profile(spec, r)});
  }
  out.tables.push_back(std::move(profile));
  const std::string where = "R = " + format_number(base.edge) + ", delta = " + format_number(spec.delta) +
                            ", m = " + std::to_string(base.grid.cells()) + ", " +
                            std::to_string(base.iterations) + " terms";
  out.checks.push_back(make_check("fixed_point_residual", 2, residual, "<=", cfg.threshold("residual"), where));
  out.checks.push_back(make_check("mass_balance_defect", 2, balance, "<=", cfg.threshold("mass_balance"), where));
  out.checks.push_back(make_check("tail_estimate", 0, base.tail_estimate, "<=", tail, where));

  // One lower-barrier step leaves j*delta*D0 + rho in place.
  {
    const KernelCache G = KernelCache::neumann(base.grid, spec.delta);
    const MeasureU u(base.grid, j * spec.delta, base.density);
    const MeasureU next = barrier_step_minus(u, spec.delta, j, G);
    double worst = std::abs(next.atom - u.atom);
    for (int i = 0; i < base.grid.cells(); ++i) worst = std::max(worst, std::abs(next.density[i] - u.density[i]));
    out.checks.push_back(make_check("barrier_step_fixed_point", 0, worst, "<=", 10.0 * tail, where));
  }
  {
    double outside = 0.0;
    double negative = 0.0;
    for (int i = 0; i < base.grid.cells(); ++i) {
      if (i >= base.support_cells) outside = std::max(outside, std::abs(base.density[i]));
      negative = std::min(negative, base.density[i]);
    }
    out.checks.push_back(make_check("series_support", 0, outside, "==", 0.0, "largest value beyond the edge"));
    out.checks.push_back(make_check("series_positivity", 0, negative, ">=", 0.0, "smallest value"));
  }

  // Monotonicity in R on a common grid.
  {
    auto radii = cfg.numbers("monotone_R");
    std::sort(radii.begin(), radii.end());
    const Grid grid(m);
    for (double R : radii) {
      if (grid.node_index(R) < 0) {
        throw ValidationError("monotone_R: " + format_number(R) + " is not a node of the " + std::to_string(m) +
                              "-cell grid");
      }
    }
    std::vector<std::future<StationaryResult>> jobs;
    for (double R : radii) {
      jobs.push_back(std::async(std::launch::async, [=] {
        return stationary_series(StationarySpec::with_edge(R, spec.delta, j, tail), grid);
      }));
    }
    std::vector<StationaryResult> results;
    for (auto& job : jobs) results.push_back(job.get());
    CsvTable mono{"stationary_monotone", "R: length; mass: mass; apex: density",
                  {"R", "mass", "apex", "iterations", "escape_ratio"}, {}};
    double worst = -INFINITY;
    for (std::size_t k = 0; k < results.size(); ++k) {
      const MeasureU u(grid, 0.0, results[k].density);
      mono.add({radii[k], u.mass(), results[k].density[0], static_cast<std::int64_t>(results[k].iterations),
                results[k].escape_ratio});
      if (k == 0) continue;
      for (int i = 0; i < grid.cells(); ++i) {
        worst = std::max(worst, results[k - 1].density[i] - results[k].density[i] -
                                    1e-12 * std::max(1.0, results[k].density[i]));
      }
    }
    out.tables.push_back(std::move(mono));
    out.checks.push_back(make_check("monotone_in_R", 2, std::max(worst, 0.0), "<=", 0.0,
                                    "largest pointwise decrease of rho when R grows over {" + join_numbers(radii) +
                                        "}"));
  }

  // delta -> 0 ladders.
  const auto deltas = cfg.numbers("deltas");
  CsvTable detail{"stationary_ladder", "delta: time; r: length; rho, target, error: density",
                  {"mode", "delta", "r", "rho", "target", "error"}, {}};
  CsvTable summary{"stationary_ladder_summary",
                   "delta: time; edge, margin, window_end, common_window_end: length; errors, apex, edge_value: density",
                   {"mode", "delta", "cells", "edge", "margin", "window_end", "sup_error", "common_window_end",
                    "common_window_error", "apex", "edge_value", "iterations", "escape_ratio"},
                   {}};
  const double finest = *std::min_element(deltas.begin(), deltas.end());

  const auto rows = linear_limit_check(spec, deltas, m);
  add_ladder("edge", rows, detail, summary, finest_row(rows).edge - finest_row(rows).margin);
  out.checks.push_back(make_check("ladder_decreasing", 3, ladder_increase(rows), "<=", 0.0,
                                  "largest increase of the sup error along delta {" + join_numbers(deltas) + "}, " +
                                      ladder_errors(rows)));
  out.checks.push_back(make_check("ladder_final_error", 3, finest_row(rows).sup_error, "<=",
                                  cfg.threshold("final_error"), "delta = " + format_number(finest)));
  {
    // Same ladder measured on the window of the finest rung, for comparison.
    std::vector<LimitRow> common = rows;
    for (auto& row : common) {
      row.sup_error = 0.0;
      for (std::size_t i = 0; i < row.r.size(); ++i) {
        if (row.r[i] <= spec.R - 5.0 * std::sqrt(finest)) {
          row.sup_error = std::max(row.sup_error, std::abs(row.rho[i] - row.target[i]));
        }
      }
    }
    out.checks.push_back(make_info("ladder_common_window_increase", ladder_increase(common),
                                   "on [0, " + format_number(spec.R - 5.0 * std::sqrt(finest)) + "], " +
                                       ladder_errors(common)));
  }

  if (cfg.has("A")) {
    const double A = cfg.number("A");
    const auto layer = StationarySpec::edge_layer(A, spec.delta, j, tail);
    const auto layer_rows = linear_limit_check(layer, deltas, m);
    add_ladder("edge_layer", layer_rows, detail, summary, finest_row(layer_rows).edge - finest_row(layer_rows).margin);
    const LimitRow& last = finest_row(layer_rows);
    out.checks.push_back(make_check("layer_final_error", 3, last.sup_error, "<=", cfg.threshold("layer_final_error"),
                                    "A = " + format_number(A) + ", delta = " + format_number(finest) + ", " +
                                        ladder_errors(layer_rows)));
    out.checks.push_back(make_check("layer_edge_value", 3, std::abs(last.edge_value - j / A), "<=",
                                    cfg.threshold("edge_value"),
                                    "rho(1 - A delta) = " + format_number(last.edge_value) + " vs j/A = " +
                                        format_number(j / A)));
    out.checks.push_back(make_info("layer_ladder_increase", ladder_increase(layer_rows), ladder_errors(layer_rows)));
  }
  out.tables.push_back(std::move(detail));
  out.tables.push_back(std::move(summary));

  // Stationary limits against the linear manifold.
  {
    ManifoldOptions options;
    options.deltas = deltas;
    options.edge_tolerance = cfg.threshold("final_error");
    options.layer_tolerance = cfg.threshold("layer_final_error");
    options.m_min = m;
    CsvTable table{"stationary_manifold", "M: mass; R, A: length; errors: density or mass",
                   {"M", "mode", "R", "A", "analytic_error", "mass_error", "numerical", "sup_error", "tolerance", "ok"},
                   {}};
    for (double M : cfg.numbers("manifold_masses")) {
      const ManifoldReport rep = manifold_consistency(M, j, options);
      table.add({M, std::string(rep.mode), rep.R, rep.A, rep.analytic_error, rep.mass_error,
                 static_cast<std::int64_t>(rep.numerical), rep.sup_error, rep.tolerance,
                 static_cast<std::int64_t>(rep.ok)});
      out.checks.push_back(make_flag("manifold_consistency_M" + format_number(M), 0, rep.ok,
                                     std::string(rep.mode) + (rep.numerical ? ", numerical ladder" : ", closed form") +
                                         ", sup error " + format_number(rep.sup_error)));
    }
    out.tables.push_back(std::move(table));
  }
  return out;
}

ExperimentResult run_converge(const ExperimentConfig& cfg) {
  ExperimentResult out;
  out.experiment = "converge";
  const double j = cfg.number("j");
  const Grid grid(cfg.integer("grid_m"));
  const double M0 = cfg.number("mass");
  const MeasureU u0(grid, 0.0, std::vector<double>(grid.cells(), M0));

  // Squeeze: the barrier gap along dyadic refinements of [0, t].
  {
    const double t = cfg.number("squeeze_t");
    const int top = cfg.integer("squeeze_levels");
    const int bottom = first_admissible_level(u0, t, j);
    if (bottom >= top) throw ValidationError("squeeze_levels: needs more than the first admissible level");
    const auto levels = barrier_ladder(u0, t, j, bottom, top);

    // Separating element from the finest pair: upper density averaged with
    // the lower density whose atom is spread over the first cell.
    const BarrierLevel& fine = levels.back();
    MeasureU sep(grid, 0.0, fine.upper.density);
    for (int i = 0; i < grid.cells(); ++i) {
      const double low = fine.lower.density[i] + (i == 0 ? fine.lower.atom / grid.width() : 0.0);
      sep.density[i] = 0.5 * (sep.density[i] + low);
    }

    CsvTable table{"converge_squeeze", "delta: time; gap, violations: mass",
                   {"n", "delta", "gap", "ratio", "step_violation", "lower_vs_separating", "separating_vs_upper"},
                   {}};
    double worst_ratio = 0.0;
    double worst_order = -INFINITY;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const auto& lv = levels[k];
      const double ratio = k == 0 ? NAN : lv.gap / levels[k - 1].gap;
      if (k > 0) worst_ratio = std::max(worst_ratio, ratio);
      const double below = order_violation(lv.lower, sep);
      const double above = order_violation(sep, lv.upper);
      worst_order = std::max({worst_order, lv.worst_violation, below, above});
      table.add({static_cast<std::int64_t>(lv.n), lv.delta, lv.gap, k == 0 ? Cell(std::string("")) : Cell(ratio),
                 lv.worst_violation, below, above});
    }
    out.tables.push_back(std::move(table));
    out.checks.push_back(make_check("squeeze_ratio", 4, worst_ratio, "<=", cfg.threshold("squeeze_ratio"),
                                    "largest gap(n+1)/gap(n) for n = " + std::to_string(bottom) + ".." +
                                        std::to_string(top) + ", delta = t/2^n"));
    out.checks.push_back(make_check("sandwich_order", 4, worst_order, "<=", cfg.threshold("sandwich"),
                                    "largest F violation of lower <= upper at every step and of "
                                    "lower_n <= separating <= upper_n"));
  }

  // Points of the linear manifold are stationary.
  {
    const double t = cfg.number("manifold_t");
    const double tol = cfg.number("manifold_tol");
    CsvTable table{"converge_manifold", "M: mass; t: time; distance, gap: mass", {"M", "t", "n", "gap", "distance"},
                   {}};
    double worst = 0.0;
    for (double M : cfg.numbers("manifold_masses")) {
      const MeasureU target = linear_profile(M, j, grid);
      const auto sep = separating_element(target, t, j, tol, {16, 1, false});
      const double d = sup_F_distance(sep.density, target);
      table.add({M, t, static_cast<std::int64_t>(sep.n), sep.gap, d});
      worst = std::max(worst, d);
      for (const auto& w : sep.warnings) out.notes.push_back("M = " + format_number(M) + ": " + w);
    }
    out.tables.push_back(std::move(table));
    out.checks.push_back(make_check("manifold_stationary", 5, worst, "<=", cfg.threshold("manifold_distance"),
                                    "sup-F distance of the separating element at t = " + format_number(t)));
  }

  // Relaxation from u0 to the manifold point of the same mass.
  {
    const double tol = cfg.number("tol");
    const MeasureU target = linear_profile(u0.mass(), j, grid);
    CsvTable table{"converge_relaxation", "t: time; delta: time; gap, distance: mass",
                   {"t", "n", "delta", "gap", "distance"}, {}};
    std::vector<double> dist;
    for (double t : cfg.numbers("times")) {
      // Start at the level whose barrier gap j*delta is already below tol.
      SeparatingOptions options{16, static_cast<int>(std::ceil(std::log2(j * t / tol) - 1e-12)), false};
      const auto sep = separating_element(u0, t, j, tol, options);
      const double d = sup_F_distance(sep.density, target);
      table.add({t, static_cast<std::int64_t>(sep.n), sep.delta, sep.gap, d});
      dist.push_back(d);
      for (const auto& w : sep.warnings) out.notes.push_back("t = " + format_number(t) + ": " + w);
    }
    out.tables.push_back(std::move(table));
    double increase = -INFINITY;
    for (std::size_t k = 1; k < dist.size(); ++k) increase = std::max(increase, dist[k] - dist[k - 1]);
    out.checks.push_back(make_check("relaxation_strictly_decreasing", 6, increase, "<", 0.0,
                                    "largest change between consecutive times, distances {" + join_numbers(dist) +
                                        "}"));
    out.checks.push_back(make_check("relaxation_final_distance", 6, dist.back(), "<=",
                                    cfg.threshold("final_distance"),
                                    "t = " + format_number(cfg.numbers("times").back())));
  }
  return out;
}

namespace {

struct HydroReplica {
  std::vector<Snapshot> snaps;
  std::vector<double> gaps;
  EventCounters counters;
  std::int64_t final_total = 0;
};

}  // namespace

ExperimentResult run_hydro(const ExperimentConfig& cfg) {
  ExperimentResult out;
  out.experiment = "hydro";
  const LatticeParams params = lattice_params(cfg);
  const double eps = params.eps();
  const double j = params.current();
  const ProfileSpec spec = profile_from_json(cfg.raw("profile"), j);
  const ParticleConfig init = build_initial_config(params, spec);
  const double M = spec.total_mass();
  const LinearProfile target(M, j);
  if (spec.kind != "linear") {
    out.notes.push_back("initial profile is not on the linear manifold; gaps are measured against rho^(M) with M = " +
                        format_number(M));
  }
  const auto F = [&](double r) { return target.suffix(r); };

  const auto adm = check_admissibility(init, params, spec);
  out.checks.push_back(make_flag("initial_admissible", 0, adm.ok,
                                 "window " + std::to_string(adm.window) + ", max deviation " +
                                     format_number(adm.max_deviation) + " vs bound " +
                                     format_number(adm.deviation_bound)));

  const double T = cfg.number("horizon") / (eps * eps);
  const int samples = cfg.integer("samples");
  std::vector<double> times;
  for (int k = 1; k <= samples; ++k) times.push_back(T * k / samples);
  const std::size_t replicas = static_cast<std::size_t>(cfg.integer("replicas"));
  const std::size_t log_limit = static_cast<std::size_t>(cfg.integer("event_log"));

  std::vector<HydroReplica> runs(replicas);
  std::vector<EventRecord> log;
  parallel_for(replicas, [&](std::size_t r) {
    SimState state(params, init, cfg.seed(), r);
    std::vector<EventRecord> local;
    auto& run = runs[r];
    run.snaps = run_until(state, T, times, r == 0 && log_limit > 0 ? &local : nullptr);
    for (const auto& s : run.snaps) run.gaps.push_back(hydrodynamic_gap(s, params, F));
    run.counters = state.counters();
    run.final_total = state.config().total();
    if (r == 0) {
      if (local.size() > log_limit) local.resize(log_limit);
      log = std::move(local);
    }
  });

  CsvTable gaps{"hydro_gaps", "time: microscopic; macro_time: eps^2 * time; gap, mass: macroscopic mass",
                {"replica", "time", "macro_time", "gap", "mass"}, {}};
  std::vector<double> final_gaps;
  std::vector<double> mean_by_time(times.size() + 1, 0.0);
  bool bookkeeping = true;
  std::int64_t births = 0;
  for (std::size_t r = 0; r < replicas; ++r) {
    const auto& run = runs[r];
    for (std::size_t k = 0; k < run.snaps.size(); ++k) {
      gaps.add({static_cast<std::int64_t>(r), run.snaps[k].time, run.snaps[k].time * eps * eps, run.gaps[k],
                eps * static_cast<double>(run.snaps[k].total)});
      mean_by_time[k] += run.gaps[k] / static_cast<double>(replicas);
    }
    final_gaps.push_back(run.gaps.back());
    bookkeeping = bookkeeping && run.counters.births - run.counters.deaths == run.final_total - init.total();
    births += run.counters.births;
  }
  out.tables.push_back(std::move(gaps));

  CsvTable snaps{"hydro_snapshots", "time: microscopic; x: site; count: particles", {"time", "x", "count"}, {}};
  for (const auto& s : runs.front().snaps) {
    const ParticleConfig c = s.to_config(params.last_site());
    for (int x = 0; x <= params.last_site(); ++x) {
      if (c.count(x) > 0) snaps.add({s.time, static_cast<std::int64_t>(x), c.count(x)});
    }
  }
  out.tables.push_back(std::move(snaps));
  CsvTable events{"hydro_events", "time: microscopic; site, to: lattice sites (-1 when absent)",
                  {"time", "event", "site", "to"}, {}};
  for (const auto& e : log) {
    events.add({e.time, std::string(event_name(e.type)), static_cast<std::int64_t>(e.from),
                static_cast<std::int64_t>(e.to)});
  }
  out.tables.push_back(std::move(events));

  const double initial_gap = runs.front().gaps.front();
  out.checks.push_back(make_check("initial_gap", 0, initial_gap, "<=", eps * (1.0 + 1e-9),
                                  "gap of the particle approximation at time 0"));
  out.checks.push_back(make_flag("birth_death_bookkeeping", 0, bookkeeping, "births - deaths = change of |xi|"));
  const double expected = eps * j * T * static_cast<double>(replicas);
  out.checks.push_back(make_check("birth_rate", 0, std::abs(static_cast<double>(births) - expected), "<=",
                                  3.0 * std::sqrt(expected),
                                  format_number(static_cast<double>(births)) + " births vs eps*j*T*replicas = " +
                                      format_number(expected)));
  out.checks.push_back(make_check("mean_gap_at_horizon", 7, mean_of(final_gaps), "<=", cfg.threshold("mean_gap"),
                                  "mean over " + std::to_string(replicas) + " replicas at time eps^-2 * " +
                                      format_number(cfg.number("horizon")) + ", eps = 1/" +
                                      std::to_string(params.inverse_eps())));
  out.checks.push_back(make_info("max_mean_gap_over_samples", max_of(mean_by_time),
                                 "largest replica-mean gap over the sampled times"));
  out.reports.emplace_back("hydro_report", json{{"replicas", replicas},
                                                {"eps", eps},
                                                {"mean_gap_at_horizon", mean_of(final_gaps)},
                                                {"mean_gap_by_sample", mean_by_time},
                                                {"threshold", cfg.threshold("mean_gap")}});
  return out;
}

ExperimentResult run_subcritical(const ExperimentConfig& cfg) {
  ExperimentResult out;
  out.experiment = "subcritical";
  const LatticeParams params = lattice_params(cfg);
  const double eps = params.eps();
  const double j = params.current();
  const ProfileSpec spec = ProfileSpec::uniform(cfg.number("mass"));
  const ParticleConfig init = build_initial_config(params, spec);
  const double m0 = eps * static_cast<double>(init.total());
  const LinearProfile target(m0, j);
  const auto F = [&](double r) { return target.suffix(r); };
  // t_eps = eps^(-1/2) t, observed at microscopic time eps^-2 t_eps.
  const double t_eps = cfg.number("t") / std::sqrt(eps);
  const double T = t_eps / (eps * eps);
  const std::size_t replicas = static_cast<std::size_t>(cfg.integer("replicas"));

  std::vector<double> gaps(replicas), drift(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    SimState state(params, init, cfg.seed(), r);
    advance_to(state, T);
    gaps[r] = hydrodynamic_gap(state.config(), params, F);
    drift[r] = std::abs(eps * static_cast<double>(state.config().total()) - m0);
  });
  CsvTable table{"subcritical_gaps", "gap, mass_change: macroscopic mass", {"replica", "gap", "mass_change"}, {}};
  for (std::size_t r = 0; r < replicas; ++r) table.add({static_cast<std::int64_t>(r), gaps[r], drift[r]});
  out.tables.push_back(std::move(table));
  out.checks.push_back(make_check("subcritical_mean_gap", 10, mean_of(gaps), "<=", cfg.threshold("mean_gap"),
                                  "uniform start of mass " + format_number(m0) + ", time eps^-2 t_eps = " +
                                      format_number(T) + ", " + std::to_string(replicas) + " replicas"));
  out.checks.push_back(make_info("mean_abs_mass_change", mean_of(drift),
                                 "E|eps|xi_T| - m0|; its diffusive scale is sqrt(2 j eps t_eps)"));
  out.reports.emplace_back("subcritical_report", json{{"replicas", replicas},
                                                      {"t_eps", t_eps},
                                                      {"micro_time", T},
                                                      {"mean_gap", mean_of(gaps)},
                                                      {"mean_abs_mass_change", mean_of(drift)},
                                                      {"threshold", cfg.threshold("mean_gap")}});
  return out;
}

ExperimentResult run_critical(const ExperimentConfig& cfg) {
  ExperimentResult out;
  out.experiment = "critical";
  const LatticeParams params = lattice_params(cfg);
  const double eps = params.eps();
  const double j = params.current();
  const double t = cfg.number("t");
  const ParticleConfig init = build_initial_config(params, ProfileSpec::linear(cfg.number("mass"), j));
  const double m0 = eps * static_cast<double>(init.total());
  const double T = t / (eps * eps * eps);
  const std::size_t replicas = static_cast<std::size_t>(cfg.integer("replicas"));
  const bool walk = cfg.text("source") == "walk";
  const double rate = cfg.has("variance_rate") ? cfg.number("variance_rate") : j;

  std::vector<double> samples(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    if (walk) {
      Rng rng(cfg.seed(), kWalkStreams + r);
      samples[r] = eps * static_cast<double>(mass_walk_run(init.total(), eps, j, T, rng));
    } else {
      SimState state(params, init, cfg.seed(), r);
      advance_to(state, T);
      samples[r] = eps * static_cast<double>(state.config().total());
    }
  });
  CsvTable table{"critical_samples", "value: eps * |xi| at microscopic time eps^-3 t", {"replica", "value"}, {}};
  for (std::size_t r = 0; r < replicas; ++r) table.add({static_cast<std::int64_t>(r), samples[r]});
  out.tables.push_back(std::move(table));

  const auto literal = supercritical_mass_test(samples, m0, rate, t, cfg.threshold("ks"),
                                               static_cast<std::size_t>(minimum_replicas("critical")));
  const auto walk_law = supercritical_mass_test(samples, m0, 2.0 * j, t, cfg.threshold("ks"),
                                                static_cast<std::size_t>(minimum_replicas("critical")));
  if (!literal.notice.empty()) out.notes.push_back(literal.notice);
  out.checks.push_back(make_check("critical_ks", 10, literal.statistic, "<=", cfg.threshold("ks"),
                                  "one-sample KS vs folded normal(m = " + format_number(m0) + ", variance " +
                                      format_number(rate) + " * t), " + std::to_string(replicas) + " replicas from the " +
                                      cfg.text("source")));
  out.checks.push_back(make_info("critical_ks_variance_2jt", walk_law.statistic,
                                 "same samples vs variance 2 j t, the variance of the mass walk"));
  out.reports.emplace_back("critical_ks", ks_json(literal));
  out.reports.emplace_back("critical_ks_variance_2jt", ks_json(walk_law));
  return out;
}

namespace {

struct CoupledReplica {
  std::vector<std::int64_t> D, L1, extra;
  double marginal = 0.0;
};

}  // namespace

ExperimentResult run_couple(const ExperimentConfig& cfg) {
  ExperimentResult out;
  out.experiment = "couple";
  const LatticeParams params = lattice_params(cfg);
  const double eps = params.eps();
  const double j = params.current();
  const ParticleConfig x0 = build_initial_config(params, profile_from_json(cfg.raw("profile"), j));
  const ParticleConfig y0 = build_initial_config(params, profile_from_json(cfg.raw("profile_y"), j));
  const std::size_t replicas = static_cast<std::size_t>(cfg.integer("replicas"));

  // Sampled at macroscopic time 0 and at each configured eps^2 t.
  std::vector<double> taus{0.0};
  for (double tau : cfg.numbers("times")) taus.push_back(tau);
  if (!std::is_sorted(taus.begin(), taus.end())) throw ValidationError("times: must be increasing");
  // The marginal comparison uses the site a quarter of the way in at the first positive time.
  const int probe = params.last_site() / 4;
  const double probe_time = taus[1] / (eps * eps);

  std::vector<CoupledReplica> runs(replicas);
  std::vector<double> independent(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    auto pair = LabeledPair::from_configs(params, x0, y0, cfg.seed(), r);
    auto& run = runs[r];
    for (double tau : taus) {
      coupled_advance_to(pair, tau / (eps * eps));
      run.D.push_back(discrepancy_count(pair));
      run.L1.push_back(l1_distance(pair));
      run.extra.push_back(pair.unmatched_extra());
      if (tau == taus[1]) run.marginal = eps * static_cast<double>(pair.x_config().suffix_count(probe));
    }
    SimState solo(params, x0, cfg.seed(), kMarginalStreams + r);
    advance_to(solo, probe_time);
    independent[r] = eps * static_cast<double>(solo.config().suffix_count(probe));
  });

  CsvTable samples{"couple_samples", "tau: eps^2 * microscopic time; counts: particles",
                   {"replica", "tau", "discrepancies", "l1_distance", "unmatched"}, {}};
  std::vector<double> meanD(taus.size(), 0.0), meanL1(taus.size(), 0.0);
  std::int64_t l1_violations = 0, corrected_violations = 0;
  bool monotone = true, extra_monotone = true;
  for (std::size_t r = 0; r < replicas; ++r) {
    const auto& run = runs[r];
    for (std::size_t k = 0; k < taus.size(); ++k) {
      samples.add({static_cast<std::int64_t>(r), taus[k], run.D[k], run.L1[k], run.extra[k]});
      meanD[k] += static_cast<double>(run.D[k]) / static_cast<double>(replicas);
      meanL1[k] += static_cast<double>(run.L1[k]) / static_cast<double>(replicas);
      if (run.L1[k] > run.D[k] + run.extra[k]) ++l1_violations;
      if (run.L1[k] > 2 * run.D[k] + run.extra[k]) ++corrected_violations;
      if (k > 0) {
        monotone = monotone && run.D[k] <= run.D[k - 1];
        extra_monotone = extra_monotone && run.extra[k] <= run.extra[k - 1];
      }
    }
  }
  out.tables.push_back(std::move(samples));

  // Decay factor per unit of eps^2 t between consecutive positive sample times.
  CsvTable means{"couple_means", "tau: eps^2 * microscopic time; means: particles",
                 {"tau", "mean_discrepancies", "mean_l1_distance", "decay_per_unit_tau"}, {}};
  double worst_ratio = 0.0;
  double worst_increase = -INFINITY;
  bool absorbed = false;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    Cell ratio = std::string("");
    if (k >= 2) {
      double q = 0.0;
      if (meanD[k - 1] > 0.0) {
        q = std::pow(meanD[k] / meanD[k - 1], 1.0 / (taus[k] - taus[k - 1]));
      } else {
        absorbed = true;
      }
      worst_ratio = std::max(worst_ratio, q);
      worst_increase = std::max(worst_increase, meanD[k] - meanD[k - 1]);
      ratio = q;
    }
    means.add({taus[k], meanD[k], meanL1[k], ratio});
  }
  out.tables.push_back(std::move(means));
  if (absorbed) out.notes.push_back("mean discrepancy reached 0; the decay factor after that point is recorded as 0");

  std::vector<double> positive(meanD.begin() + 1, meanD.end());
  out.checks.push_back(make_check("discrepancy_decreasing", 8, worst_increase, "<=", 0.0,
                                  "mean |D| at eps^2 t = {" + join_numbers(cfg.numbers("times")) + "}: {" +
                                      join_numbers(positive) + "}"));
  out.checks.push_back(make_check("discrepancy_decay_ratio", 8, worst_ratio, "<=", cfg.threshold("decay_ratio"),
                                  "largest (D_b/D_a)^(1/(b-a)) between consecutive times"));
  out.checks.push_back(make_check("l1_bound", 8, static_cast<double>(l1_violations), "<=", 0.0,
                                  "samples (replica, time) with L1 > |D| + m, including time 0"));
  out.checks.push_back(make_info("l1_bound_2D_plus_m_violations", static_cast<double>(corrected_violations),
                                 "samples with L1 > 2|D| + m"));
  out.checks.push_back(make_flag("discrepancy_non_increasing", 0, monotone, "per replica across sampled times"));
  out.checks.push_back(make_flag("unmatched_non_increasing", 0, extra_monotone, "|J \\ I| per replica"));
  std::vector<double> coupled;
  for (const auto& run : runs) coupled.push_back(run.marginal);
  const double stat = ks_two_sample(coupled, independent);
  const double n_eff = static_cast<double>(replicas) / 2.0;
  const double p = ks_pvalue(stat, n_eff);
  out.checks.push_back(make_check("marginal_law_pvalue", 0, p, ">=", 0.01,
                                  "two-sample KS " + format_number(stat) + " on eps*F_eps(" + std::to_string(probe) +
                                      ") at eps^2 t = " + format_number(taus[1]) + ", coupled x vs independent"));
  out.reports.emplace_back("couple_report", json{{"replicas", replicas},
                                                 {"taus", taus},
                                                 {"mean_discrepancies", meanD},
                                                 {"mean_l1_distance", meanL1},
                                                 {"l1_bound_violations", l1_violations},
                                                 {"marginal_ks", stat},
                                                 {"marginal_p_value", p}});
  return out;
}

ExperimentResult run_masswalk(const ExperimentConfig& cfg) {
  ExperimentResult out;
  out.experiment = "masswalk";
  const LatticeParams params = lattice_params(cfg);
  const double eps = params.eps();
  const double j = params.current();
  const ParticleConfig init = build_initial_config(params, ProfileSpec::linear(cfg.number("mass"), j));
  const std::int64_t n0 = init.total();
  const double T = cfg.number("horizon") / (eps * eps);
  const std::size_t replicas = static_cast<std::size_t>(cfg.integer("replicas"));

  std::vector<double> sim(replicas), walk(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    SimState state(params, init, cfg.seed(), r);
    advance_to(state, T);
    sim[r] = eps * static_cast<double>(state.config().total());
    Rng rng(cfg.seed(), kWalkStreams + r);
    walk[r] = eps * static_cast<double>(mass_walk_run(n0, eps, j, T, rng));
  });
  CsvTable table{"masswalk_samples", "values: eps * |xi| at microscopic time eps^-2 * horizon",
                 {"replica_id", "simulator", "walk"}, {}};
  for (std::size_t r = 0; r < replicas; ++r) table.add({static_cast<std::int64_t>(r), sim[r], walk[r]});
  out.tables.push_back(std::move(table));
  const double stat = ks_two_sample(sim, walk);
  const double p = ks_pvalue(stat, static_cast<double>(replicas) / 2.0);
  out.checks.push_back(make_check("simulator_vs_walk_ks", 9, stat, "<=", cfg.threshold("two_sample"),
                                  std::to_string(replicas) + " replicas each, p-value " + format_number(p)));
  out.reports.emplace_back("masswalk_ks", json{{"N", replicas},
                                               {"statistic", stat},
                                               {"threshold", cfg.threshold("two_sample")},
                                               {"p_value", p},
                                               {"verdict", stat <= cfg.threshold("two_sample") ? "PASS" : "FAIL"}});

  if (cfg.flag("calibration")) {
    // KS null calibration: samples drawn from the folded normal itself.
    const std::size_t rounds = static_cast<std::size_t>(cfg.integer("calibration_rounds"));
    const std::size_t n = static_cast<std::size_t>(cfg.integer("calibration_samples"));
    const double m = cfg.number("mass");
    const double sigma2 = j * cfg.number("horizon");
    std::vector<char> accepted(rounds);
    parallel_for(rounds, [&](std::size_t k) {
      Rng rng(cfg.seed(), kCalibrationStreams + k);
      std::vector<double> draws(n);
      for (auto& d : draws) d = std::abs(m + std::sqrt(sigma2) * rng.normal());
      const auto rep = supercritical_mass_test(draws, m, j, cfg.number("horizon"), std::nullopt, 1);
      accepted[k] = rep.pass;
    });
    const double freq =
        static_cast<double>(std::count(accepted.begin(), accepted.end(), 1)) / static_cast<double>(rounds);
    out.checks.push_back(make_check("ks_null_calibration", 0, freq, ">=", cfg.threshold("calibration_frequency"),
                                    "fraction of " + std::to_string(rounds) + " oracle samples of size " +
                                        std::to_string(n) + " below 1.36/sqrt(N)"));
    out.reports.emplace_back("masswalk_calibration", json{{"rounds", rounds},
                                                          {"N", n},
                                                          {"acceptance_frequency", freq},
                                                          {"threshold", cfg.threshold("calibration_frequency")}});
  }

  // Jumps from n > 0 are fair coin flips.
  {
    Rng rng(cfg.seed(), kAuxStreams);
    std::int64_t n = std::max<std::int64_t>(n0, 1);
    std::int64_t up = 0, down = 0;
    const std::int64_t trials = cfg.integer("jump_trials");
    while (up + down < trials) {
      const auto s = mass_walk_step(n, eps, j, rng);
      if (n > 0) (s.n > n ? up : down) += 1;
      n = s.n;
    }
    const double chi2 = std::pow(static_cast<double>(up - down), 2) / static_cast<double>(up + down);
    const double p = std::erfc(std::sqrt(chi2 / 2.0));
    out.checks.push_back(make_check("jump_fairness_pvalue", 0, p, ">=", cfg.threshold("jump_pvalue"),
                                    std::to_string(up) + " up, " + std::to_string(down) + " down"));
  }

  // Reflection: the count never goes negative and half the moves drawn at 0 are suppressed.
  {
    Rng rng(cfg.seed(), kAuxStreams + 1);
    std::int64_t n = 0, at_zero = 0, suppressed = 0, lowest = 0;
    for (int k = 0; k < 100000; ++k) {
      const auto s = mass_walk_step(n, eps, j, rng);
      if (n == 0) ++at_zero;
      if (s.suppressed) ++suppressed;
      n = s.n;
      lowest = std::min(lowest, n);
    }
    const double frac = static_cast<double>(suppressed) / static_cast<double>(at_zero);
    const double se = 0.5 / std::sqrt(static_cast<double>(at_zero));
    out.checks.push_back(make_check("walk_non_negative", 0, static_cast<double>(lowest), ">=", 0.0));
    out.checks.push_back(make_check("suppressed_fraction", 0, std::abs(frac - 0.5), "<=", 3.0 * se,
                                    std::to_string(suppressed) + " suppressed of " + std::to_string(at_zero) +
                                        " moves drawn at 0"));
  }

  // Tightness in both regimes.
  {
    const double delta = cfg.number("tight_delta");
    const double T_macro = cfg.number("tight_T");
    const std::size_t n_rep = static_cast<std::size_t>(cfg.integer("tight_replicas"));
    const double e_h = cfg.number("tight_eps");
    const double m = cfg.number("mass");
    const auto start_h = static_cast<std::int64_t>(std::ceil(m / e_h - 1e-9));
    std::vector<double> init_h(n_rep, e_h * static_cast<double>(start_h)), fin_h(n_rep);
    std::vector<double> init_s(n_rep, eps * static_cast<double>(n0)), fin_s(n_rep);
    parallel_for(n_rep, [&](std::size_t r) {
      Rng rng(cfg.seed(), kAuxStreams + 100 + r);
      fin_h[r] = e_h * static_cast<double>(mass_walk_run(start_h, e_h, j, T_macro / (e_h * e_h), rng));
      fin_s[r] = eps * static_cast<double>(mass_walk_run(n0, eps, j, T_macro / (eps * eps * eps), rng));
    });
    const auto hydro = tightness_check(init_h, fin_h, Regime::hydrodynamic, delta);
    // Level from the law the walk actually follows (variance 2 j T) plus a margin.
    const double level = folded_normal_quantile(1.0 - delta / 2.0, eps * static_cast<double>(n0), 2.0 * j * T_macro) +
                         cfg.number("tight_margin");
    const auto super = tightness_check(init_s, fin_s, Regime::super, delta, level);
    out.checks.push_back(make_flag("tightness_hydrodynamic", 0, hydro.pass,
                                   "P[|M_T - M_0| <= " + format_number(delta) + "] = " + format_number(hydro.fraction) +
                                       " at eps = " + format_number(e_h)));
    out.checks.push_back(make_flag("tightness_super", 0, super.pass,
                                   "P[M_T >= " + format_number(level) + "] = " + format_number(super.fraction)));
    Rng rng(cfg.seed(), kAuxStreams + 2);
    out.checks.push_back(make_check("zero_current_constant", 0,
                                    static_cast<double>(mass_walk_run(n0, eps, 0.0, 1e6, rng) - n0), "==", 0.0,
                                    "j = 0 keeps the count"));
  }
  return out;
}

ExperimentResult run_named(const ExperimentConfig& cfg) {
  const std::string& name = cfg.experiment();
  if (name == "kernels") return run_kernels(cfg);
  if (name == "stationary") return run_stationary(cfg);
  if (name == "converge") return run_converge(cfg);
  if (name == "hydro") return run_hydro(cfg);
  if (name == "subcritical") return run_subcritical(cfg);
  if (name == "critical") return run_critical(cfg);
  if (name == "couple") return run_couple(cfg);
  if (name == "masswalk") return run_masswalk(cfg);
  throw ValidationError("experiment: unknown experiment '" + name + "'");
}

}  // namespace curres
