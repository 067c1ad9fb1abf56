#pragma once

#include <span>
#include <vector>

#include "curres/measure.hpp"

namespace curres {

/// Neumann heat kernel on [0, 1] for the generator (1/2) d^2/dr^2.
/// Uses the image sum for t <= 0.5 and the cosine series above.
double neumann_green(double t, double r, double r2);
double neumann_green_images(double t, double r, double r2);
double neumann_green_series(double t, double r, double r2);

/// Heat kernel on [-R, R] killed at both ends.
double dirichlet_green(double t, double r, double r2, double R);

/// Integral of dirichlet_green(s, 0, r, R) over s in (0, T]. The stiff part
/// near s = 0 is integrated in closed form; dt caps the panel width.
double dirichlet_resolvent_origin(double R, double r, double T, double dt);

/// Mass of a centred Gaussian with variance sigma^2 on [a, b].
double gaussian_cell_integral(double a, double b, double sigma);

enum class KernelKind { neumann, truncated, dirichlet };

/// Cell-averaged action of a heat kernel over one time step on a grid.
///
/// entry(i, k) = (1/h) * integral over cell i x cell k of G_t. Truncated
/// and Dirichlet kinds live on the first support_cells() cells, i.e. on
/// [0, edge()], and vanish elsewhere. The Dirichlet kind reflects at 0 and
/// absorbs at edge().
class KernelCache {
 public:
  static KernelCache neumann(const Grid& grid, double t);
  static KernelCache truncated(const Grid& grid, double t, double R);
  static KernelCache dirichlet(const Grid& grid, double t, double R);

  KernelKind kind() const noexcept { return kind_; }
  const Grid& grid() const noexcept { return grid_; }
  double time() const noexcept { return t_; }
  double edge() const noexcept { return edge_; }
  int support_cells() const noexcept { return support_; }

  double entry(int i, int k) const { return matrix_[static_cast<std::size_t>(i) * grid_.cells() + k]; }
  std::span<const double> row(int i) const;
  /// Cell averages of G_t(0, .), the image of a unit atom at the origin.
  std::span<const double> origin_column() const noexcept { return origin_; }

  /// matrix * density + atom * origin_column.
  std::vector<double> apply(std::span<const double> density, double atom = 0.0) const;
  void apply_into(std::span<const double> density, double atom, std::span<double> out) const;

 private:
  KernelCache(const Grid& grid, KernelKind kind, double t, double edge, int support);

  Grid grid_;
  KernelKind kind_;
  double t_;
  double edge_;
  int support_;
  std::vector<double> matrix_;
  std::vector<double> origin_;
};

/// Smooths u = c*D_0 + rho into a plain grid density.
std::vector<double> apply_kernel(const KernelCache& cache, const MeasureU& u);

}  // namespace curres
