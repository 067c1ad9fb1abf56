#include "curres/mass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curres/errors.hpp"

namespace curres {

std::vector<double> MassPath::scaled() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (auto v : values) out.push_back(eps * static_cast<double>(v));
  return out;
}

namespace {

void check_walk(std::int64_t n, double eps, double j) {
  if (n < 0) throw DomainError("particle count must be non-negative");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (!(j >= 0.0)) throw DomainError("current must be non-negative");
}

}  // namespace

MassStep mass_walk_step(std::int64_t n, double eps, double j, Rng& rng) {
  check_walk(n, eps, j);
  if (j == 0.0) return {n, INFINITY, false};
  MassStep s;
  s.waiting_time = rng.exponential(2.0 * j * eps);
  if (rng.coin()) {
    s.n = n + 1;
  } else if (n > 0) {
    s.n = n - 1;
  } else {
    s.n = 0;
    s.suppressed = true;
  }
  return s;
}

std::int64_t mass_walk_run(std::int64_t n0, double eps, double j, double T, Rng& rng) {
  check_walk(n0, eps, j);
  std::int64_t n = n0;
  double t = 0.0;
  while (true) {
    const MassStep s = mass_walk_step(n, eps, j, rng);
    t += s.waiting_time;
    if (t > T) return n;
    n = s.n;
  }
}

MassPath mass_walk_path(std::int64_t n0, double eps, double j, std::span<const double> times, Rng& rng) {
  if (!std::is_sorted(times.begin(), times.end())) throw DomainError("sample times must be sorted");
  MassPath path{eps, j, {}, {}};
  std::int64_t n = n0;
  double previous = 0.0;
  for (double t : times) {
    n = mass_walk_run(n, eps, j, t - previous, rng);
    previous = t;
    path.times.push_back(t);
    path.values.push_back(n);
  }
  return path;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double folded_normal_cdf(double x, double m, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("variance must be positive");
  if (x < 0.0) return 0.0;
  const double s = std::sqrt(sigma2);
  return std::clamp(normal_cdf((x - m) / s) - normal_cdf((-x - m) / s), 0.0, 1.0);
}

double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InsufficientData("KS statistic needs at least one sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    // Ties: the empirical CDF jumps once past the last copy of a value.
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    const double F = cdf(samples[i]);
    std::size_t first = i;
    while (first > 0 && samples[first - 1] == samples[i]) --first;
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - F), std::abs(F - static_cast<double>(first) / n)});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InsufficientData("KS statistic needs samples on both sides");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t k = 0;
  double d = 0.0;
  while (i < a.size() && k < b.size()) {
    const double v = std::min(a[i], b[k]);
    while (i < a.size() && a[i] == v) ++i;
    while (k < b.size() && b[k] == v) ++k;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(k) / nb));
  }
  return d;
}

double ks_pvalue(double statistic, double n_eff) {
  const double lambda = (std::sqrt(n_eff) + 0.12 + 0.11 / std::sqrt(n_eff)) * statistic;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double ks_critical_5pct(double n_eff) { return 1.36 / std::sqrt(n_eff); }

KsReport supercritical_mass_test(std::span<const double> samples, double m, double sigma2_rate, double t,
                                 std::optional<double> threshold, std::size_t min_replicas) {
  if (samples.size() < min_replicas) {
    throw InsufficientData("need at least " + std::to_string(min_replicas) + " replicas, got " +
                           std::to_string(samples.size()));
  }
  KsReport rep;
  rep.n = samples.size();
  const double n = static_cast<double>(rep.n);
  rep.critical_5pct = ks_critical_5pct(n);
  rep.threshold = threshold.value_or(rep.critical_5pct);
  if (!(t > 0.0) || !(sigma2_rate > 0.0)) {
    rep.skipped = true;
    rep.notice = "zero variance: the limit law is a point mass at m, KS comparison skipped";
    rep.pass = true;
    return rep;
  }
  const double sigma2 = sigma2_rate * t;
  rep.statistic = ks_one_sample({samples.begin(), samples.end()},
                                [&](double x) { return folded_normal_cdf(x, m, sigma2); });
  rep.p_value = ks_pvalue(rep.statistic, n);
  rep.pass = rep.statistic <= rep.threshold;
  return rep;
}

TightnessReport tightness_check(std::span<const double> initial, std::span<const double> final_values,
                                Regime regime, double delta, double level) {
  if (final_values.empty()) throw InsufficientData("tightness needs at least one replica");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  TightnessReport rep;
  rep.regime = regime;
  rep.n = final_values.size();
  std::size_t hits = 0;
  if (regime == Regime::hydrodynamic) {
    if (initial.size() != final_values.size()) throw ShapeError("initial and final samples differ in length");
    for (std::size_t k = 0; k < rep.n; ++k) hits += std::abs(final_values[k] - initial[k]) <= delta;
    rep.fraction = static_cast<double>(hits) / static_cast<double>(rep.n);
    rep.bound = 1.0 - delta;
    rep.pass = rep.fraction >= rep.bound;
  } else {
    for (double v : final_values) hits += v >= level;
    rep.fraction = static_cast<double>(hits) / static_cast<double>(rep.n);
    rep.bound = delta;
    rep.pass = rep.fraction <= rep.bound;
  }
  return rep;
}

}  // namespace curres
