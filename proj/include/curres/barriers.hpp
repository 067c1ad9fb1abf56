#pragma once

#include <string>
#include <vector>

#include "curres/kernels.hpp"
#include "curres/measure.hpp"

namespace curres {

/// F(r; u) = mass of u on [r, 1]. The atom counts at r = 0 only.
double F_functional(const MeasureU& u, double r);

/// F at the grid nodes 0..m (atom included at node 0) followed by the
/// limit r -> 0+ (atom excluded); size m + 2.
std::vector<double> suffix_table(const MeasureU& u);

/// u <= v in the mass-transport order, checked at every node, at 0 and at 0+.
bool partial_order_leq(const MeasureU& u, const MeasureU& v, double tol = 1e-12);

/// Largest F(r; u) - F(r; v) over the order's test points (<= 0 iff u <= v).
double order_violation(const MeasureU& u, const MeasureU& v);

/// sup_r |F(r; u) - F(r; v)| over the same test points.
double sup_F_distance(const MeasureU& u, const MeasureU& v);

/// Point R with integral of the density over [R, 1] equal to j*delta.
double cut_edge(const MeasureU& u, double delta, double j);

/// Moves j*delta of mass from the right end of the density to the atom.
/// The partial boundary cell keeps its remaining mass spread over the cell.
MeasureU cut_and_paste(const MeasureU& u, double delta, double j);

/// Cut after smoothing: K(G u). The result has atom exactly j*delta.
MeasureU barrier_step_minus(const MeasureU& u, double delta, double j, const KernelCache& cache);
/// Smoothing after cut: G(K u). The result has no atom.
MeasureU barrier_step_plus(const MeasureU& u, double delta, double j, const KernelCache& cache);

/// Lower and upper barrier sequences started from the same measure.
class BarrierPair {
 public:
  BarrierPair(const MeasureU& u0, double delta, double j);

  void advance(const KernelCache& cache);
  void advance(const KernelCache& cache, int steps);

  const MeasureU& lower() const noexcept { return lower_; }
  const MeasureU& upper() const noexcept { return upper_; }
  double delta() const noexcept { return delta_; }
  int steps_done() const noexcept { return steps_; }
  /// Largest order violation seen after any step so far.
  double worst_violation() const noexcept { return worst_violation_; }
  double gap() const { return sup_F_distance(lower_, upper_); }

 private:
  MeasureU lower_;
  MeasureU upper_;
  double delta_;
  double j_;
  int steps_ = 0;
  double worst_violation_ = -1.0;
};

struct BarrierLevel {
  int n = 0;
  double delta = 0.0;
  double gap = 0.0;
  double worst_violation = 0.0;
  MeasureU lower;
  MeasureU upper;
};

/// Runs the barriers to time t with delta = t / 2^n for each n in
/// [n_from, n_to]; levels are independent and run concurrently.
std::vector<BarrierLevel> barrier_ladder(const MeasureU& u0, double t, double j, int n_from, int n_to);

struct SeparatingResult {
  MeasureU density;
  int n = 0;
  double delta = 0.0;
  double gap = 0.0;
  std::vector<BarrierLevel> levels;
  std::vector<std::string> warnings;
};

struct SeparatingOptions {
  int n_max = 16;
  /// First refinement tried (raised to the first admissible level).
  int n_min = 1;
  bool keep_levels = true;
};

/// Refines delta = t / 2^n until the barrier gap drops below tol and returns
/// the average of the upper density and the lower density with its atom
/// moved into the first cell.
SeparatingResult separating_element(const MeasureU& u0, double t, double j, double tol,
                                    const SeparatingOptions& options = {});

/// Cell averages of the stationary profile of mass M on a grid.
MeasureU linear_profile(double M, double j, const Grid& grid = Grid());

/// Smallest n >= 1 with density mass above j * t / 2^n.
int first_admissible_level(const MeasureU& u0, double t, double j);

}  // namespace curres
