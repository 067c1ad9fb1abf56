#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "curres/errors.hpp"

namespace curres {

/// Uniform partition of [0, 1] into m cells; densities are cell averages.
class Grid {
 public:
  explicit Grid(int cells = 400) : cells_(cells) {
    if (cells < 2) throw DomainError("grid needs at least 2 cells");
  }

  int cells() const noexcept { return cells_; }
  double width() const noexcept { return 1.0 / cells_; }
  double node(int i) const noexcept { return static_cast<double>(i) / cells_; }
  double midpoint(int i) const noexcept { return (i + 0.5) / cells_; }

  /// Cell containing r; r = 1 maps to the last cell.
  int cell_of(double r) const noexcept {
    const int k = static_cast<int>(std::floor(r * cells_));
    return k < 0 ? 0 : (k >= cells_ ? cells_ - 1 : k);
  }

  /// Index i with node(i) == r to within 1e-9 cell widths, or -1.
  int node_index(double r) const noexcept {
    const double x = r * cells_;
    const double rounded = std::round(x);
    return std::abs(x - rounded) < 1e-9 ? static_cast<int>(rounded) : -1;
  }

  bool operator==(const Grid&) const = default;

 private:
  int cells_;
};

/// Macroscopic state c*D_0 + rho: an atom of mass c at the origin plus a
/// non-negative piecewise-constant density on the grid.
struct MeasureU {
  Grid grid;
  double atom = 0.0;
  std::vector<double> density;

  MeasureU() : density(grid.cells(), 0.0) {}
  explicit MeasureU(const Grid& g, double atom_mass = 0.0)
      : grid(g), atom(atom_mass), density(g.cells(), 0.0) {}
  MeasureU(const Grid& g, double atom_mass, std::vector<double> cells)
      : grid(g), atom(atom_mass), density(std::move(cells)) {
    if (static_cast<int>(density.size()) != g.cells()) {
      throw ShapeError("density size does not match grid");
    }
  }

  double density_mass() const noexcept {
    double s = 0.0;
    for (double v : density) s += v;
    return s * grid.width();
  }

  double mass() const noexcept { return atom + density_mass(); }

  /// Membership in U_delta: density mass strictly above j*delta.
  bool in_u_delta(double j, double delta) const noexcept { return density_mass() > j * delta; }
};

}  // namespace curres
