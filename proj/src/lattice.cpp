#include "curres/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "curres/errors.hpp"
#include "curres/manifold.hpp"

namespace curres {

namespace {

// Cumulative masses that are integers up to quadrature noise must not round up.
constexpr double kCeilSlack = 1e-9;

}  // namespace

LatticeParams::LatticeParams(int inverse_eps, double j) : inverse_eps_(inverse_eps), j_(j) {
  if (inverse_eps < 2) throw DomainError("1/eps must be an integer >= 2");
  if (!(j > 0.0)) throw DomainError("reservoir current j must be positive");
}

LatticeParams LatticeParams::from_eps(double eps, double j) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double inv = 1.0 / eps;
  const double rounded = std::round(inv);
  if (std::abs(inv - rounded) > 1e-9 * rounded) {
    throw DomainError("1/eps = " + std::to_string(inv) + " is not an integer");
  }
  return LatticeParams(static_cast<int>(rounded), j);
}

ParticleConfig::ParticleConfig(int last_site) {
  if (last_site < 0) throw RangeError("negative lattice size");
  counts_.assign(last_site + 1, 0);
  index_ = FenwickTree<std::int64_t>(last_site + 1);
}

ParticleConfig ParticleConfig::from_counts(std::span<const std::int64_t> counts) {
  if (counts.empty()) throw RangeError("configuration needs at least one site");
  ParticleConfig cfg(static_cast<int>(counts.size()) - 1);
  for (int x = 0; x < static_cast<int>(counts.size()); ++x) {
    if (counts[x] < 0) throw ValidationError("negative occupation number");
    if (counts[x] > 0) cfg.add(x, counts[x]);
  }
  return cfg;
}

void ParticleConfig::check_site(int x) const {
  if (x < 0 || x > last_site()) {
    throw RangeError("site " + std::to_string(x) + " outside [0, " +
                     std::to_string(last_site()) + "]");
  }
}

std::int64_t ParticleConfig::count(int x) const {
  check_site(x);
  return counts_[x];
}

void ParticleConfig::add(int x, std::int64_t n) {
  check_site(x);
  if (counts_[x] + n < 0) throw ValidationError("occupation would become negative");
  counts_[x] += n;
  total_ += n;
  index_.add(x, n);
}

void ParticleConfig::remove(int x) {
  check_site(x);
  if (counts_[x] == 0) throw ValidationError("no particle to remove at site " + std::to_string(x));
  counts_[x] -= 1;
  total_ -= 1;
  index_.add(x, -1);
}

void ParticleConfig::move(int from, int to) {
  remove(from);
  add(to);
}

std::int64_t ParticleConfig::suffix_count(int x) const {
  check_site(x);
  return total_ - index_.prefix(x - 1);
}

std::int64_t ParticleConfig::prefix_count(int x) const {
  check_site(x);
  return index_.prefix(x);
}

std::optional<int> ParticleConfig::rightmost_occupied() const noexcept {
  if (total_ == 0) return std::nullopt;
  return index_.lower_bound(total_);
}

int ParticleConfig::site_of(std::int64_t k) const {
  if (k < 0 || k >= total_) throw RangeError("particle index out of range");
  return index_.lower_bound(k + 1);
}

std::optional<int> rightmost_occupied(const ParticleConfig& cfg) { return cfg.rightmost_occupied(); }

std::int64_t suffix_count(const ParticleConfig& cfg, int x) { return cfg.suffix_count(x); }

double empirical_average(const ParticleConfig& cfg, int x, int ell) {
  if (ell < 1) throw RangeError("window length must be >= 1");
  if (x < 0 || x + ell - 1 > cfg.last_site()) throw RangeError("window overruns the lattice");
  const std::int64_t sum = cfg.prefix_count(x + ell - 1) - (x > 0 ? cfg.prefix_count(x - 1) : 0);
  return static_cast<double>(sum) / ell;
}

double mass_density(const ParticleConfig& cfg, const LatticeParams& params) {
  return params.eps() * static_cast<double>(cfg.total());
}

double ProfileSpec::integral(double a, double b) const {
  a = std::clamp(a, 0.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  if (b <= a) return 0.0;
  if (cumulative) return cumulative(b) - cumulative(a);
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(density, a, b, 15, 1e-12,
                                                                        &error);
}

ProfileSpec ProfileSpec::uniform(double value) {
  if (!(value >= 0.0)) throw ValidationError("uniform density must be non-negative");
  ProfileSpec spec;
  spec.kind = "uniform";
  spec.density = [value](double) { return value; };
  spec.cumulative = [value](double r) { return value * std::clamp(r, 0.0, 1.0); };
  return spec;
}

ProfileSpec ProfileSpec::linear(double mass, double j) {
  const LinearProfile profile(mass, j);
  ProfileSpec spec;
  spec.kind = "linear";
  spec.density = [profile](double r) { return profile.density(r); };
  spec.cumulative = [profile](double r) { return profile.cumulative(r); };
  if (profile.has_edge() && mass > 0.0) spec.edge = profile.edge();
  return spec;
}

ProfileSpec ProfileSpec::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw ValidationError("table profile needs at least two points");
  std::sort(points.begin(), points.end());
  for (const auto& [r, rho] : points) {
    if (r < 0.0 || r > 1.0) throw ValidationError("table abscissa outside [0, 1]");
    if (!(rho >= 0.0)) throw ValidationError("negative density in table profile");
  }
  // Prefix integrals at the table nodes, with the flat extension left of the first node.
  std::vector<double> node_mass(points.size(), 0.0);
  node_mass[0] = points[0].first * points[0].second;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double w = points[i].first - points[i - 1].first;
    node_mass[i] = node_mass[i - 1] + 0.5 * w * (points[i].second + points[i - 1].second);
  }
  auto value = [points](double r) {
    if (r <= points.front().first) return points.front().second;
    if (r >= points.back().first) return points.back().second;
    auto it = std::upper_bound(points.begin(), points.end(), std::make_pair(r, -1.0));
    const auto& [r1, v1] = *it;
    const auto& [r0, v0] = *(it - 1);
    return r1 > r0 ? v0 + (v1 - v0) * (r - r0) / (r1 - r0) : v1;
  };
  auto cumulative = [points, node_mass, value](double r) {
    r = std::clamp(r, 0.0, 1.0);
    if (r <= points.front().first) return r * points.front().second;
    if (r >= points.back().first) {
      return node_mass.back() + (r - points.back().first) * points.back().second;
    }
    auto it = std::upper_bound(points.begin(), points.end(), std::make_pair(r, -1.0));
    const std::size_t i = static_cast<std::size_t>(it - points.begin()) - 1;
    return node_mass[i] + 0.5 * (r - points[i].first) * (points[i].second + value(r));
  };

  ProfileSpec spec;
  spec.kind = "table";
  spec.density = value;
  spec.cumulative = cumulative;
  if (points.back().second == 0.0 && points.back().first >= 1.0) {
    std::size_t i = points.size() - 1;
    while (i > 0 && points[i - 1].second == 0.0) --i;
    if (i > 0 && points[i].first > 0.0) spec.edge = points[i].first;
  }
  return spec;
}

ParticleConfig build_initial_config(const LatticeParams& params, const ProfileSpec& spec) {
  const int L = params.inverse_eps();
  if (spec.kind == "callable") {
    for (int s = 0; s <= 8 * L; ++s) {
      const double r = static_cast<double>(s) / (8 * L);
      if (!(spec.density(r) >= 0.0)) {
        throw ValidationError("negative density at r = " + std::to_string(r));
      }
    }
  }
  ParticleConfig cfg(L);
  std::int64_t previous = 0;
  for (int x = 0; x < L; ++x) {
    const double scaled = L * spec.integral(0.0, static_cast<double>(x + 1) / L);
    auto cumulative = static_cast<std::int64_t>(std::ceil(scaled - kCeilSlack));
    cumulative = std::max(cumulative, previous);
    if (cumulative > previous) cfg.add(x, cumulative - previous);
    previous = cumulative;
  }
  return cfg;
}

ParticleConfig build_initial_config(const LatticeParams& params, std::int64_t n_particles,
                                    double mass_cap) {
  if (n_particles < 0) throw ValidationError("particle count must be non-negative");
  if (static_cast<double>(n_particles) > mass_cap * params.inverse_eps() + 1e-9) {
    throw ValidationError("particle count exceeds mass cap / eps");
  }
  return build_initial_config(
      params, ProfileSpec::linear(params.eps() * static_cast<double>(n_particles),
                                  params.current()));
}

AdmissibilityReport check_admissibility(const ParticleConfig& cfg, const LatticeParams& params,
                                        const ProfileSpec& spec,
                                        const AdmissibilityExponents& exps) {
  const int L = params.inverse_eps();
  const double eps = params.eps();
  AdmissibilityReport report;
  report.window = std::max(1, static_cast<int>(std::floor(std::pow(static_cast<double>(L), exps.b))));
  report.deviation_bound = std::pow(eps, exps.a);
  const int ell = report.window;
  for (int x = 0; x + ell - 1 <= L; ++x) {
    const double micro = empirical_average(cfg, x, ell);
    const double macro = spec.integral(eps * x, eps * (x + ell)) / (eps * ell);
    report.max_deviation = std::max(report.max_deviation, std::abs(micro - macro));
  }
  report.ok = report.max_deviation <= report.deviation_bound;
  if (spec.edge) {
    const auto edge = cfg.rightmost_occupied();
    report.edge_deviation = edge ? std::abs(eps * *edge - *spec.edge) : *spec.edge;
    report.ok = report.ok && *report.edge_deviation <= report.deviation_bound;
  }
  return report;
}

}  // namespace curres
