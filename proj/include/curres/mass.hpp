#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curres/rng.hpp"

namespace curres {

/// Particle count |xi_t| at microscopic sample times.
struct MassPath {
  double eps = 0.0;
  double j = 0.0;
  std::vector<double> times;
  std::vector<std::int64_t> values;

  /// eps * |xi| at each sample.
  std::vector<double> scaled() const;
};

struct MassStep {
  std::int64_t n = 0;
  double waiting_time = 0.0;
  bool suppressed = false;
};

/// One jump of the count: after an exponential(2*j*eps) wait, +1 or -1 with
/// probability 1/2 each, the -1 move suppressed at 0. j = 0 never jumps.
MassStep mass_walk_step(std::int64_t n, double eps, double j, Rng& rng);

/// Count at time T starting from n0.
std::int64_t mass_walk_run(std::int64_t n0, double eps, double j, double T, Rng& rng);

/// Path sampled at the given sorted times.
MassPath mass_walk_path(std::int64_t n0, double eps, double j, std::span<const double> times, Rng& rng);

/// P[|m + sigma*Z| <= x] for reflected Brownian motion started at m.
double folded_normal_cdf(double x, double m, double sigma2);

double normal_cdf(double x);

/// sup |F_n - cdf| for the empirical distribution of samples.
double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);

/// sup |F_a - F_b| between two empirical distributions.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic Kolmogorov tail P[sqrt(n_eff) D > d*sqrt(n_eff)].
double ks_pvalue(double statistic, double n_eff);

/// 5% asymptotic critical value 1.36/sqrt(n_eff).
double ks_critical_5pct(double n_eff);

struct KsReport {
  std::size_t n = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  double critical_5pct = 0.0;
  double p_value = 1.0;
  bool pass = false;
  bool skipped = false;
  std::string notice;
};

/// One-sample KS of rescaled masses against the reflected-Gaussian law with
/// start m and variance sigma2_rate*t. The threshold defaults to the 5%
/// critical value; fewer than min_replicas samples is an error.
KsReport supercritical_mass_test(std::span<const double> samples, double m, double sigma2_rate, double t,
                                 std::optional<double> threshold = std::nullopt, std::size_t min_replicas = 100);

enum class Regime { hydrodynamic, super };

struct TightnessReport {
  Regime regime = Regime::hydrodynamic;
  std::size_t n = 0;
  double fraction = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Hydrodynamic: fraction of replicas with |M_t - M_0| <= delta must be >= 1 - delta.
/// Super: fraction with M_t >= level must be <= delta. Inputs are rescaled masses.
TightnessReport tightness_check(std::span<const double> initial, std::span<const double> final_values,
                                Regime regime, double delta, double level = 0.0);

}  // namespace curres
