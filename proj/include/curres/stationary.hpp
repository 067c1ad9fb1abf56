#pragma once

#include <optional>
#include <vector>

#include "curres/kernels.hpp"
#include "curres/measure.hpp"

namespace curres {

/// Stationary problem for the lower barrier: support [0, R] with either R
/// given directly or R = 1 - A*delta (edge-layer mode).
struct StationarySpec {
  double R = 0.5;
  double delta = 1e-3;
  double j = 1.0;
  std::optional<double> A;
  double tail_tol = 1e-9;

  static StationarySpec with_edge(double R, double delta, double j, double tail_tol = 1e-9);
  static StationarySpec edge_layer(double A, double delta, double j, double tail_tol = 1e-9);

  double edge() const noexcept { return A ? 1.0 - *A * delta : R; }
  void validate() const;
};

/// Smallest grid with at least m_min cells, resolving sqrt(delta), on which
/// the edge is a node; when none exists below 20*m_min the m_min grid is used
/// and the edge is snapped to its nearest node.
Grid choose_grid(const StationarySpec& spec, int m_min = 400);

struct StationaryResult {
  Grid grid;
  double edge = 0.0;
  bool edge_snapped = false;
  int support_cells = 0;
  std::vector<double> density;
  long iterations = 0;
  /// Mass ratio of the last two series terms.
  double escape_ratio = 0.0;
  double tail_estimate = 0.0;
};

/// rho = j*delta * sum_{n>=0} (g0)^{n+1}(0, .) for the truncated kernel g0.
StationaryResult stationary_series(const StationarySpec& spec, const Grid& grid,
                                   long max_iterations = 1'000'000);
StationaryResult stationary_series(const StationarySpec& spec);

/// sup |rho - (j*delta*g0(0,.) + g0 rho)|.
double fixed_point_residual(const StationarySpec& spec, const StationaryResult& result);

/// |mass of G(j*delta*D_0 + rho) beyond the edge - j*delta|.
double mass_balance_defect(const StationarySpec& spec, const StationaryResult& result);

/// Density value on the last support cell, the discrete stand-in for rho(R).
double edge_value(const StationaryResult& result);

struct LimitRow {
  double delta = 0.0;
  double edge = 0.0;
  int cells = 0;
  double margin = 0.0;
  double sup_error = 0.0;
  double apex = 0.0;
  double edge_value = 0.0;
  long iterations = 0;
  double escape_ratio = 0.0;
  std::vector<double> r;
  std::vector<double> rho;
  std::vector<double> target;
};

/// Target of the delta -> 0 limit: 2j(R - r), or 2j(1 - r) + j/A in edge-layer mode.
double limit_profile(const StationarySpec& spec, double r);

/// One row per delta (run concurrently) with the sup error against the
/// limit profile on [0, edge - 5*sqrt(delta)].
std::vector<LimitRow> linear_limit_check(const StationarySpec& base, const std::vector<double>& deltas,
                                         int m_min = 400);

struct ManifoldReport {
  bool ok = false;
  bool numerical = false;
  /// "edge", "edge_layer" or "continuity".
  const char* mode = "";
  double R = 0.0;
  double A = 0.0;
  double analytic_error = 0.0;
  double mass_error = 0.0;
  double sup_error = 0.0;
  double tolerance = 0.0;
};

struct ManifoldOptions {
  std::vector<double> deltas{1e-2, 3e-3, 1e-3};
  double edge_tolerance = 0.05;
  double layer_tolerance = 0.08;
  int m_min = 400;
};

/// Matches the stationary limit with the parameter implied by M (edge
/// R = sqrt(M/j) below j, layer A = j/(M - j) above) against the linear
/// profile of mass M. The numerical ladder is used when the boundary layer
/// fits inside [0, 1] at the finest delta; otherwise only the closed forms
/// are compared.
ManifoldReport manifold_consistency(double M, double j, const ManifoldOptions& options = {});

}  // namespace curres
