#include "curres/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "curres/errors.hpp"

namespace curres {

namespace {

constexpr double kPi = std::numbers::pi;
// Gaussian tails beyond this many standard deviations are below 1e-49.
constexpr double kTailSigmas = 15.0;
constexpr double kImageSeriesSwitch = 0.5;

double std_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }
double std_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double gauss(double x, double sigma) { return std_pdf(x / sigma) / sigma; }

// Gaussian loss function: sigma*pdf(w/sigma) - w*P[Z*sigma > w], for w >= 0.
double loss(double w, double sigma) { return sigma * std_pdf(w / sigma) - w * std_sf(w / sigma); }

void check_time(double t) {
  if (!(t > 0.0)) throw DomainError("kernel time must be positive");
}

void check_unit(double r, const char* name) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError(std::string(name) + " outside [0, 1]");
}

// W(s) = integral over [0,h] x [sh, (s+1)h] of the free Gaussian, for |s| <= reach.
class CellOverlap {
 public:
  CellOverlap(double h, double sigma) : h_(h) {
    reach_ = static_cast<int>(std::ceil(kTailSigmas * sigma / h)) + 2;
    std::vector<double> T(reach_ + 2);
    for (int n = 0; n < static_cast<int>(T.size()); ++n) T[n] = loss(n * h, sigma);
    w_.resize(reach_ + 1);
    for (int s = 0; s <= reach_; ++s) {
      w_[s] = (s == 0 ? h : 0.0) + T[std::abs(1 - s)] - 2.0 * T[s] + T[s + 1];
    }
  }

  int reach() const { return reach_; }
  double operator()(long s) const {
    const long a = std::labs(s);
    return a > reach_ ? 0.0 : w_[a];
  }

 private:
  double h_;
  int reach_;
  std::vector<double> w_;
};

}  // namespace

double gaussian_cell_integral(double a, double b, double sigma) {
  if (b <= a) return 0.0;
  const double za = a / sigma;
  const double zb = b / sigma;
  if (za >= 0.0) return std_sf(za) - std_sf(zb);
  if (zb <= 0.0) return std_sf(-zb) - std_sf(-za);
  return 1.0 - std_sf(-za) - std_sf(zb);
}

double neumann_green_images(double t, double r, double r2) {
  check_time(t);
  check_unit(r, "r");
  check_unit(r2, "r2");
  const double sigma = std::sqrt(t);
  const int n_max = static_cast<int>(std::ceil((kTailSigmas * sigma + 2.0) / 2.0)) + 1;
  double sum = 0.0;
  for (int n = -n_max; n <= n_max; ++n) {
    sum += gauss(r - r2 - 2.0 * n, sigma) + gauss(r + r2 - 2.0 * n, sigma);
  }
  return sum;
}

double neumann_green_series(double t, double r, double r2) {
  check_time(t);
  check_unit(r, "r");
  check_unit(r2, "r2");
  double sum = 1.0;
  for (int q = 1;; ++q) {
    const double decay = std::exp(-0.5 * q * q * kPi * kPi * t);
    if (decay < 1e-17) break;
    sum += 2.0 * decay * std::cos(q * kPi * r) * std::cos(q * kPi * r2);
  }
  return sum;
}

double neumann_green(double t, double r, double r2) {
  return t <= kImageSeriesSwitch ? neumann_green_images(t, r, r2) : neumann_green_series(t, r, r2);
}

double dirichlet_green(double t, double r, double r2, double R) {
  check_time(t);
  if (!(R > 0.0)) throw DomainError("half-width must be positive");
  if (std::abs(r) > R || std::abs(r2) > R) throw DomainError("argument outside [-R, R]");
  const double sigma = std::sqrt(t);
  if (t <= R * R) {
    const int n_max = static_cast<int>(std::ceil((kTailSigmas * sigma + 2.0 * R) / (4.0 * R))) + 1;
    double sum = 0.0;
    for (int n = -n_max; n <= n_max; ++n) {
      sum += gauss(r - r2 - 4.0 * n * R, sigma) - gauss(r + r2 - 2.0 * R - 4.0 * n * R, sigma);
    }
    return sum;
  }
  double sum = 0.0;
  for (int k = 1;; ++k) {
    const double w = k * kPi / (2.0 * R);
    const double decay = std::exp(-0.5 * w * w * t);
    if (decay < 1e-17) break;
    sum += decay * std::sin(w * (r + R)) * std::sin(w * (r2 + R));
  }
  return sum / R;
}

double dirichlet_resolvent_origin(double R, double r, double T, double dt) {
  if (!(R > 0.0)) throw DomainError("half-width must be positive");
  if (!(dt > 0.0 && dt < T)) throw DomainError("need 0 < dt < T");
  if (std::abs(r) > R) throw DomainError("|r| must not exceed R");
  const double gap = R - std::abs(r);
  if (gap <= 0.0) return 0.0;
  const double ar = std::abs(r);

  // Free-space Gaussian integrated over (0, t0]; images are O(exp(-12.5)) there.
  const double t0 = std::min(1e-3, gap * gap / 25.0);
  double total = std::sqrt(2.0 * t0 / kPi) * std::exp(-ar * ar / (2.0 * t0)) -
                 ar * std::erfc(ar / std::sqrt(2.0 * t0));

  auto integrand = [&](double s) { return dirichlet_green(s, 0.0, r, R); };
  double lo = t0;
  double width = t0;
  while (lo < T) {
    const double hi = std::min(T, lo + width);
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, lo, hi, 10,
                                                                           1e-12, &err);
    lo = hi;
    width = std::min(2.0 * width, dt);
  }
  return total;
}

KernelCache::KernelCache(const Grid& grid, KernelKind kind, double t, double edge, int support)
    : grid_(grid),
      kind_(kind),
      t_(t),
      edge_(edge),
      support_(support),
      matrix_(static_cast<std::size_t>(grid.cells()) * grid.cells(), 0.0),
      origin_(grid.cells(), 0.0) {}

std::span<const double> KernelCache::row(int i) const {
  return {matrix_.data() + static_cast<std::size_t>(i) * grid_.cells(),
          static_cast<std::size_t>(grid_.cells())};
}

KernelCache KernelCache::neumann(const Grid& grid, double t) {
  check_time(t);
  const int m = grid.cells();
  const double h = grid.width();
  KernelCache cache(grid, KernelKind::neumann, t, 1.0, m);
  auto at = [&](int i, int k) -> double& { return cache.matrix_[static_cast<std::size_t>(i) * m + k]; };

  if (t <= kImageSeriesSwitch) {
    const double sigma = std::sqrt(t);
    const CellOverlap W(h, sigma);
    const int n_max = static_cast<int>(std::ceil((kTailSigmas * sigma + 2.0) / 2.0)) + 1;
    for (int i = 0; i < m; ++i) {
      for (int k = i; k < m; ++k) {
        double sum = 0.0;
        for (long n = -n_max; n <= n_max; ++n) {
          sum += W(k - i + 2 * n * m) + W(2 * n * m - k - 1 - i);
        }
        at(i, k) = at(k, i) = sum / h;
      }
      double col = 0.0;
      for (int n = -n_max; n <= n_max; ++n) {
        col += 2.0 * gaussian_cell_integral(grid.node(i) - 2.0 * n, grid.node(i + 1) - 2.0 * n, sigma);
      }
      cache.origin_[i] = col / h;
    }
    return cache;
  }

  std::vector<double> decay;
  for (int q = 1;; ++q) {
    const double e = std::exp(-0.5 * q * q * kPi * kPi * t);
    if (e < 1e-17) break;
    decay.push_back(e);
  }
  const int Q = static_cast<int>(decay.size());
  std::vector<double> S(static_cast<std::size_t>(Q) * m);
  for (int q = 1; q <= Q; ++q) {
    const double w = q * kPi;
    for (int i = 0; i < m; ++i) {
      S[static_cast<std::size_t>(q - 1) * m + i] = (std::sin(w * grid.node(i + 1)) - std::sin(w * grid.node(i))) / w;
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int k = i; k < m; ++k) {
      double sum = 0.0;
      for (int q = 0; q < Q; ++q) sum += decay[q] * S[static_cast<std::size_t>(q) * m + i] * S[static_cast<std::size_t>(q) * m + k];
      at(i, k) = at(k, i) = h + 2.0 * sum / h;
    }
    double col = 0.0;
    for (int q = 0; q < Q; ++q) col += decay[q] * S[static_cast<std::size_t>(q) * m + i];
    cache.origin_[i] = 1.0 + 2.0 * col / h;
  }
  return cache;
}

KernelCache KernelCache::truncated(const Grid& grid, double t, double R) {
  const int s = grid.node_index(R);
  if (s < 1 || s > grid.cells()) throw DomainError("truncation edge must be a positive grid node");
  KernelCache full = neumann(grid, t);
  const int m = grid.cells();
  KernelCache cache(grid, KernelKind::truncated, t, grid.node(s), s);
  for (int i = 0; i < s; ++i) {
    std::copy_n(full.matrix_.begin() + static_cast<std::ptrdiff_t>(i) * m, s,
                cache.matrix_.begin() + static_cast<std::ptrdiff_t>(i) * m);
    cache.origin_[i] = full.origin_[i];
  }
  return cache;
}

KernelCache KernelCache::dirichlet(const Grid& grid, double t, double R) {
  check_time(t);
  const int s = grid.node_index(R);
  if (s < 1 || s > grid.cells()) throw DomainError("absorbing edge must be a positive grid node");
  const int m = grid.cells();
  const double h = grid.width();
  const double edge = grid.node(s);
  KernelCache cache(grid, KernelKind::dirichlet, t, edge, s);
  auto at = [&](int i, int k) -> double& { return cache.matrix_[static_cast<std::size_t>(i) * m + k]; };

  if (t <= 2.0 * edge * edge) {
    const double sigma = std::sqrt(t);
    const CellOverlap W(h, sigma);
    const int q_max = static_cast<int>(std::ceil((kTailSigmas * sigma + 2.0 * edge) / (2.0 * edge))) + 1;
    for (int i = 0; i < s; ++i) {
      for (int k = i; k < s; ++k) {
        double sum = 0.0;
        for (long q = -q_max; q <= q_max; ++q) {
          const double sign = (q % 2 == 0) ? 1.0 : -1.0;
          sum += sign * (W(k - i + 2 * q * s) + W(2 * q * s - k - 1 - i));
        }
        at(i, k) = at(k, i) = sum / h;
      }
      double col = 0.0;
      for (int q = -q_max; q <= q_max; ++q) {
        const double sign = (q % 2 == 0) ? 1.0 : -1.0;
        col += 2.0 * sign *
               gaussian_cell_integral(grid.node(i) - 2.0 * q * edge, grid.node(i + 1) - 2.0 * q * edge, sigma);
      }
      cache.origin_[i] = col / h;
    }
    return cache;
  }

  std::vector<double> omega;
  std::vector<double> decay;
  for (int k = 0;; ++k) {
    const double w = (k + 0.5) * kPi / edge;
    const double e = std::exp(-0.5 * w * w * t);
    if (e < 1e-17) break;
    omega.push_back(w);
    decay.push_back(e);
  }
  const int K = static_cast<int>(omega.size());
  std::vector<double> C(static_cast<std::size_t>(K) * s);
  for (int q = 0; q < K; ++q) {
    for (int i = 0; i < s; ++i) {
      C[static_cast<std::size_t>(q) * s + i] =
          (std::sin(omega[q] * grid.node(i + 1)) - std::sin(omega[q] * grid.node(i))) / omega[q];
    }
  }
  const double norm = 2.0 / edge;
  for (int i = 0; i < s; ++i) {
    for (int k = i; k < s; ++k) {
      double sum = 0.0;
      for (int q = 0; q < K; ++q) sum += decay[q] * C[static_cast<std::size_t>(q) * s + i] * C[static_cast<std::size_t>(q) * s + k];
      at(i, k) = at(k, i) = norm * sum / h;
    }
    double col = 0.0;
    for (int q = 0; q < K; ++q) col += decay[q] * C[static_cast<std::size_t>(q) * s + i];
    cache.origin_[i] = norm * col / h;
  }
  return cache;
}

void KernelCache::apply_into(std::span<const double> density, double atom, std::span<double> out) const {
  const int m = grid_.cells();
  if (static_cast<int>(density.size()) != m || static_cast<int>(out.size()) != m) {
    throw ShapeError("density size does not match kernel grid");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor, 0, Eigen::OuterStride<>> block(matrix_.data(), support_, support_,
                                                                  Eigen::OuterStride<>(m));
  const Eigen::Map<const Eigen::VectorXd> rho(density.data(), support_);
  const Eigen::Map<const Eigen::VectorXd> origin(origin_.data(), support_);
  Eigen::Map<Eigen::VectorXd> result(out.data(), support_);
  result.noalias() = block * rho;
  if (atom != 0.0) result += atom * origin;
  std::fill(out.begin() + support_, out.end(), 0.0);
}

std::vector<double> KernelCache::apply(std::span<const double> density, double atom) const {
  std::vector<double> out(grid_.cells());
  apply_into(density, atom, out);
  return out;
}

std::vector<double> apply_kernel(const KernelCache& cache, const MeasureU& u) {
  if (!(u.grid == cache.grid())) throw ShapeError("measure grid does not match kernel grid");
  return cache.apply(u.density, u.atom);
}

}  // namespace curres
