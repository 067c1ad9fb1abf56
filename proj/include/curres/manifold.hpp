#pragma once

#include <algorithm>
#include <cmath>

#include "curres/errors.hpp"

namespace curres {

/// Stationary profile rho^(M) with slope -2j and total mass M.
///
/// For M < j the profile is 2j(R - r) on [0, R] with edge R = sqrt(M/j) and
/// vanishes beyond; for M >= j it is c - 2jr on the whole of [0, 1] with
/// c = M + j >= 2j. The two branches agree at M = j.
class LinearProfile {
 public:
  LinearProfile(double mass, double j) : mass_(mass), j_(j) {
    if (!(mass >= 0.0) || !(j > 0.0)) {
      throw DomainError("linear profile needs mass >= 0 and j > 0");
    }
  }

  double mass() const noexcept { return mass_; }
  double current() const noexcept { return j_; }
  bool has_edge() const noexcept { return mass_ < j_; }

  /// Right end of the support (1 when the profile fills the interval).
  double edge() const noexcept { return has_edge() ? std::sqrt(mass_ / j_) : 1.0; }

  /// Value at r = 0 in the full-support branch, c = M + j.
  double intercept() const noexcept { return has_edge() ? 2.0 * j_ * edge() : mass_ + j_; }

  double density(double r) const noexcept {
    if (has_edge()) {
      const double R = edge();
      return r <= R ? 2.0 * j_ * (R - r) : 0.0;
    }
    return intercept() - 2.0 * j_ * r;
  }

  /// Integral of the density over [0, r].
  double cumulative(double r) const noexcept {
    r = std::clamp(r, 0.0, 1.0);
    if (has_edge()) {
      const double R = edge();
      const double x = std::min(r, R);
      return j_ * (2.0 * R * x - x * x);
    }
    return intercept() * r - j_ * r * r;
  }

  /// Suffix mass F(r) = integral over [r, 1].
  double suffix(double r) const noexcept { return mass_ - cumulative(r); }

 private:
  double mass_;
  double j_;
};

}  // namespace curres
