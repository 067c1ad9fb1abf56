#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curres/fenwick.hpp"

namespace curres {

/// System size and reservoir current. Sites are 0..1/eps.
class LatticeParams {
 public:
  LatticeParams(int inverse_eps, double j);

  /// Accepts eps only when 1/eps is an integer to within 1e-9.
  static LatticeParams from_eps(double eps, double j);

  int inverse_eps() const noexcept { return inverse_eps_; }
  double eps() const noexcept { return 1.0 / inverse_eps_; }
  double current() const noexcept { return j_; }
  int last_site() const noexcept { return inverse_eps_; }
  int num_sites() const noexcept { return inverse_eps_ + 1; }

 private:
  int inverse_eps_;
  double j_;
};

/// Occupation numbers xi(x) on {0, ..., L} with an indexed structure for
/// suffix sums, rightmost-site and k-th particle queries in O(log L).
class ParticleConfig {
 public:
  explicit ParticleConfig(int last_site);
  static ParticleConfig from_counts(std::span<const std::int64_t> counts);

  int last_site() const noexcept { return static_cast<int>(counts_.size()) - 1; }
  int num_sites() const noexcept { return static_cast<int>(counts_.size()); }
  std::int64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  std::int64_t count(int x) const;
  std::span<const std::int64_t> counts() const noexcept { return counts_; }

  void add(int x, std::int64_t n = 1);
  void remove(int x);
  void move(int from, int to);

  /// F_eps(x) = number of particles at sites >= x.
  std::int64_t suffix_count(int x) const;
  /// Number of particles at sites <= x.
  std::int64_t prefix_count(int x) const;

  /// Largest occupied site; empty configurations have none.
  std::optional<int> rightmost_occupied() const noexcept;

  /// Site of the k-th particle (0-based) when particles are listed by site.
  int site_of(std::int64_t k) const;

  bool operator==(const ParticleConfig& other) const noexcept { return counts_ == other.counts_; }

 private:
  void check_site(int x) const;

  std::vector<std::int64_t> counts_;
  FenwickTree<std::int64_t> index_;
  std::int64_t total_ = 0;
};

std::optional<int> rightmost_occupied(const ParticleConfig& cfg);
std::int64_t suffix_count(const ParticleConfig& cfg, int x);

/// Mean occupation over the window {x, ..., x + ell - 1}.
double empirical_average(const ParticleConfig& cfg, int x, int ell);

/// eps * |xi|.
double mass_density(const ParticleConfig& cfg, const LatticeParams& params);

/// Initial macroscopic density on [0, 1].
struct ProfileSpec {
  std::string kind = "callable";
  std::function<double(double)> density;
  /// Closed-form integral over [0, r]; quadrature is used when absent.
  std::function<double(double)> cumulative;
  /// Right end of the support when the density vanishes on [edge, 1].
  std::optional<double> edge;

  double integral(double a, double b) const;
  double total_mass() const { return integral(0.0, 1.0); }

  static ProfileSpec uniform(double value);
  /// The stationary profile rho^(M) for current j.
  static ProfileSpec linear(double mass, double j);
  /// Piecewise-linear interpolation of (r, rho) pairs; flat extension outside.
  static ProfileSpec table(std::vector<std::pair<double, double>> points);
};

struct AdmissibilityExponents {
  double a = 0.25;
  double b = 0.75;
};

/// Particle approximation of a profile: cumulative counts are
/// ceil(eps^-1 * integral of rho over [0, eps(x+1)]) and the last site is empty.
ParticleConfig build_initial_config(const LatticeParams& params, const ProfileSpec& spec);

/// eta^(N, eps): the approximation of rho^(eps N), requiring N <= mass_cap / eps.
ParticleConfig build_initial_config(const LatticeParams& params, std::int64_t n_particles,
                                    double mass_cap);

struct AdmissibilityReport {
  int window = 0;
  double max_deviation = 0.0;
  double deviation_bound = 0.0;
  std::optional<double> edge_deviation;
  bool ok = false;
};

/// Checks the window-average and edge conditions an initial configuration must
/// satisfy relative to its macroscopic profile.
AdmissibilityReport check_admissibility(const ParticleConfig& cfg, const LatticeParams& params,
                                        const ProfileSpec& spec,
                                        const AdmissibilityExponents& exps = {});

}  // namespace curres
