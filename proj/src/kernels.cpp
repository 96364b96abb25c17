#include "rmtlab/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rmtlab/semicircle.hpp"

namespace rmtlab {

namespace {

constexpr double kConfluentThreshold = 1e-6;
constexpr double kRescaleAbove = 1e200;

double log_psi0_prefactor() { return -0.25 * std::log(2.0 * std::numbers::pi); }

// psi_{k-2}, psi_{k-1}, psi_k at u for k >= 0.
std::array<double, 3> psi_tail_impl(int k, double u) {
  double log_scale = -0.25 * u * u + log_psi0_prefactor();
  double pm2 = 0.0, pm1 = 0.0, p = 1.0;  // psi_{-2}, psi_{-1}, psi_0 in units of e^{log_scale}
  for (int j = 0; j < k; ++j) {
    const double next = (u * p - std::sqrt(static_cast<double>(j)) * pm1) /
                        std::sqrt(static_cast<double>(j + 1));
    pm2 = pm1;
    pm1 = p;
    p = next;
    if (std::abs(p) > kRescaleAbove) {
      pm2 /= kRescaleAbove;
      pm1 /= kRescaleAbove;
      p /= kRescaleAbove;
      log_scale += std::log(kRescaleAbove);
    }
  }
  const double s = std::exp(log_scale);
  return {pm2 * s, pm1 * s, p * s};
}

struct Tail {
  double m2, m1, n;  // psi_{N-2}, psi_{N-1}, psi_N at x sqrt(N)
};

Tail gue_tail(int N, double x) {
  const auto t = psi_tail_impl(N, x * std::sqrt(static_cast<double>(N)));
  return {t[0], t[1], t[2]};
}

double confluent(int N, const Tail& t) {
  const double n = N;
  return n * (std::sqrt(n) * t.m1 * t.m1 - std::sqrt(n - 1.0) * t.n * t.m2);
}

double christoffel_darboux(int N, double x, double y, const Tail& tx, const Tail& ty) {
  return std::sqrt(static_cast<double>(N)) * (tx.n * ty.m1 - tx.m1 * ty.n) / (x - y);
}

}  // namespace

std::array<double, 3> hermite_psi_tail(int k, double x) {
  if (k < 0) throw std::invalid_argument("hermite_psi: k must be nonnegative");
  return psi_tail_impl(k, x);
}

double hermite_psi(int k, double x) { return hermite_psi_tail(k, x)[2]; }

double gue_kernel_diagonal(int N, double x) {
  if (N < 1) throw std::invalid_argument("gue_kernel: N must be >= 1");
  return confluent(N, gue_tail(N, x));
}

double gue_kernel(int N, double x, double y) {
  if (N < 1) throw std::invalid_argument("gue_kernel: N must be >= 1");
  if (std::abs(x - y) < kConfluentThreshold) return gue_kernel_diagonal(N, 0.5 * (x + y));
  return christoffel_darboux(N, x, y, gue_tail(N, x), gue_tail(N, y));
}

double sine_kernel(double u, double v) noexcept {
  const double d = u - v;
  if (d == 0.0) return 1.0;
  const double z = std::numbers::pi * d;
  return std::sin(z) / z;
}

double bulk_rescaled_kernel(int N, double E, double a, double b) {
  if (!(std::abs(E) < 2.0))
    throw std::invalid_argument("bulk_rescaled_kernel: E must lie in the bulk (|E| < 2)");
  const double scale = N * sc_density(E);
  return gue_kernel(N, E + a / scale, E + b / scale) / scale;
}

Kernel Kernel::gue(int N) {
  if (N < 1) throw std::invalid_argument("Kernel::gue: N must be >= 1");
  return Kernel(Kind::kGueFinite, N);
}

double Kernel::operator()(double x, double y) const {
  return kind_ == Kind::kSine ? sine_kernel(x, y) : gue_kernel(n_, x, y);
}

Eigen::MatrixXd Kernel::matrix(std::span<const double> points) const {
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd K(m, m);
  if (kind_ == Kind::kSine) {
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        K(i, j) = sine_kernel(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
    return K;
  }
  std::vector<Tail> tails;
  tails.reserve(points.size());
  for (double p : points) tails.push_back(gue_tail(n_, p));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double xi = points[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i; j < m; ++j) {
      const double xj = points[static_cast<std::size_t>(j)];
      double v;
      if (std::abs(xi - xj) < kConfluentThreshold) {
        v = (i == j) ? confluent(n_, tails[static_cast<std::size_t>(i)])
                     : gue_kernel_diagonal(n_, 0.5 * (xi + xj));
      } else {
        v = christoffel_darboux(n_, xi, xj, tails[static_cast<std::size_t>(i)],
                                tails[static_cast<std::size_t>(j)]);
      }
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

}  // namespace rmtlab
