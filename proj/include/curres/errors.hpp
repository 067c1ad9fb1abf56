#pragma once

#include <stdexcept>
#include <string>

namespace curres {

/// Argument outside the mathematical domain of an operation (t <= 0, r outside the interval, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Lattice site or window outside [0, 1/eps].
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Inputs built on different grids.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed user input (negative density, bad config field, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The cut-and-paste map needs more than j*delta of density mass.
class MassTooSmall : public std::runtime_error {
 public:
  MassTooSmall(double density_mass, double required)
      : std::runtime_error("density mass " + std::to_string(density_mass) +
                           " does not exceed j*delta = " + std::to_string(required)),
        density_mass_(density_mass),
        required_(required) {}

  double density_mass() const noexcept { return density_mass_; }
  double required() const noexcept { return required_; }

 private:
  double density_mass_;
  double required_;
};

/// An iterative scheme stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Too few samples for a statistical test.
class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace curres
