#include "rmtlab/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace rmtlab {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

double correlation_det(const Kernel& kernel, std::span<const double> points) {
  if (points.empty()) throw std::invalid_argument("correlation_det: need at least one point");
  if (points.size() == 1) return kernel(points[0], points[0]);
  return kernel.matrix(points).determinant();
}

Eigen::MatrixXd nystrom_matrix(const Kernel& kernel, Interval iv, int q) {
  if (q < 2) throw std::invalid_argument("nystrom_matrix: quadrature order must be >= 2");
  if (!(iv.hi >= iv.lo)) throw std::invalid_argument("nystrom_matrix: need lo <= hi");
  const auto rule = gauss_legendre(iv, q);
  Eigen::MatrixXd M = kernel.matrix(rule.nodes);
  if (!M.allFinite()) throw std::domain_error("nystrom_matrix: non-finite kernel values");
  Eigen::VectorXd sw(q);
  for (int i = 0; i < q; ++i) sw(i) = std::sqrt(rule.weights[static_cast<std::size_t>(i)]);
  return sw.asDiagonal() * M * sw.asDiagonal();
}

double fredholm_det(const Kernel& kernel, Interval iv, double z, int q) {
  if (q < 2) throw std::invalid_argument("fredholm_det: quadrature order must be >= 2");
  if (iv.hi == iv.lo || z == 0.0) return 1.0;
  const Eigen::MatrixXd M = nystrom_matrix(kernel, iv, q);
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(q, q) - z * M;
  return A.partialPivLu().determinant();
}

double factorial_moment(const Kernel& kernel, Interval iv, int k, int q, int max_k) {
  if (k < 0) throw std::invalid_argument("factorial_moment: k must be >= 0");
  if (k > max_k) throw std::invalid_argument("factorial_moment: k exceeds the cost guard");
  if (k == 0) return 1.0;
  if (iv.hi == iv.lo) return 0.0;
  const auto rule = gauss_legendre(iv, q);
  const Eigen::MatrixXd K = kernel.matrix(rule.nodes);

  // Enumerate index tuples in lexicographic order; parallel over the leading
  // index with a fixed-order reduction of the per-index partial sums.
  std::vector<double> partial(static_cast<std::size_t>(q), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int lead = 0; lead < q; ++lead) {
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    idx[0] = lead;
    Eigen::MatrixXd sub(k, k);
    double acc = 0.0;
    while (true) {
      double w = 1.0;
      for (int a = 0; a < k; ++a) {
        w *= rule.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
        for (int b = 0; b < k; ++b)
          sub(a, b) = K(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
      }
      acc += w * sub.determinant();
      int pos = k - 1;
      while (pos >= 1 && ++idx[static_cast<std::size_t>(pos)] == q) {
        idx[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos == 0) break;
    }
    partial[static_cast<std::size_t>(lead)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total / std::tgamma(k + 1.0);
}

std::vector<double> factorial_moments(const Kernel& kernel, Interval iv, int k_max, int q) {
  if (k_max < 0) throw std::invalid_argument("factorial_moments: k_max must be >= 0");
  std::vector<double> e(static_cast<std::size_t>(k_max) + 1, 0.0);
  e[0] = 1.0;
  if (iv.hi == iv.lo) return e;
  const Eigen::MatrixXd M = nystrom_matrix(kernel, iv, q);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double mu = solver.eigenvalues()(i);
    for (int k = k_max; k >= 1; --k)
      e[static_cast<std::size_t>(k)] += mu * e[static_cast<std::size_t>(k - 1)];
  }
  return e;
}

CountLaw count_distribution(const Kernel& kernel, Interval iv, int l_max,
                            const CountOptions& options) {
  if (l_max < 0) throw std::invalid_argument("count_distribution: l_max must be >= 0");
  CountLaw law{std::vector<double>(static_cast<std::size_t>(l_max) + 1, 0.0), 0.0, 0.0};
  if (iv.hi == iv.lo) {
    law.probs[0] = 1.0;
    return law;
  }
  const int k_max = l_max + options.extra_terms;
  const auto M = factorial_moments(kernel, iv, k_max + 1, options.q);
  double total = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    double p = 0.0;
    for (int k = l; k <= k_max; ++k)
      p += ((k - l) % 2 == 0 ? 1.0 : -1.0) * binomial(k, l) * M[static_cast<std::size_t>(k)];
    law.probs[static_cast<std::size_t>(l)] = p;
    total += p;
    law.series_bound = std::max(
        law.series_bound, binomial(k_max + 1, l) * std::abs(M[static_cast<std::size_t>(k_max + 1)]));
  }
  law.truncation_residual = 1.0 - total;
  if (law.series_bound > options.max_series_bound)
    throw std::runtime_error("count_distribution: inclusion-exclusion truncation bound exceeded");
  return law;
}

CountLaw count_distribution_generating(const Kernel& kernel, Interval iv, int l_max, int q,
                                       int points) {
  if (l_max < 0) throw std::invalid_argument("count_distribution_generating: l_max must be >= 0");
  if (points <= l_max)
    throw std::invalid_argument("count_distribution_generating: need more roots than l_max");
  CountLaw law{std::vector<double>(static_cast<std::size_t>(l_max) + 1, 0.0), 0.0, 0.0};
  if (iv.hi == iv.lo) {
    law.probs[0] = 1.0;
    return law;
  }
  const Eigen::MatrixXcd M = nystrom_matrix(kernel, iv, q).cast<std::complex<double>>();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(q, q);
  std::vector<std::complex<double>> g(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    const auto w = std::polar(1.0, 2.0 * std::numbers::pi * j / points);
    g[static_cast<std::size_t>(j)] = (I - (1.0 - w) * M).partialPivLu().determinant();
  }
  double total = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    std::complex<double> c = 0.0;
    for (int j = 0; j < points; ++j)
      c += g[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * std::numbers::pi * j * l / points);
    law.probs[static_cast<std::size_t>(l)] = c.real() / points;
    total += law.probs[static_cast<std::size_t>(l)];
  }
  law.truncation_residual = 1.0 - total;
  return law;
}

Eigen::MatrixXd joint_count_distribution(const Kernel& kernel, Interval iv1, Interval iv2,
                                         int l_max, int q, int points) {
  if (l_max < 0 || points <= l_max)
    throw std::invalid_argument("joint_count_distribution: need 0 <= l_max < points");
  if (q < 2) throw std::invalid_argument("joint_count_distribution: quadrature order must be >= 2");
  if (!(iv1.hi < iv2.lo || iv2.hi < iv1.lo))
    throw std::invalid_argument("joint_count_distribution: windows overlap");
  const auto r1 = gauss_legendre(iv1, q), r2 = gauss_legendre(iv2, q);
  std::vector<double> nodes(r1.nodes), weights(r1.weights);
  nodes.insert(nodes.end(), r2.nodes.begin(), r2.nodes.end());
  weights.insert(weights.end(), r2.weights.begin(), r2.weights.end());
  const int m = 2 * q;
  Eigen::MatrixXd K = kernel.matrix(nodes);
  if (!K.allFinite()) throw std::domain_error("joint_count_distribution: non-finite kernel values");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      K(i, j) *= std::sqrt(weights[static_cast<std::size_t>(i)] * weights[static_cast<std::size_t>(j)]);
  const Eigen::MatrixXcd Kc = K.cast<std::complex<double>>();

  std::vector<std::complex<double>> roots(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j)
    roots[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * std::numbers::pi * j / points);

  Eigen::MatrixXcd G(points, points);
  const auto np = static_cast<long long>(points) * points;
#pragma omp parallel for schedule(dynamic)
  for (long long idx = 0; idx < np; ++idx) {
    const int a = static_cast<int>(idx / points), b = static_cast<int>(idx % points);
    Eigen::MatrixXcd A = -Kc;
    for (int i = 0; i < m; ++i) {
      const auto f = 1.0 - (i < q ? roots[static_cast<std::size_t>(a)] : roots[static_cast<std::size_t>(b)]);
      A.row(i) *= f;
      A(i, i) += 1.0;
    }
    G(a, b) = A.partialPivLu().determinant();
  }
  Eigen::MatrixXd P(l_max + 1, l_max + 1);
  for (int l1 = 0; l1 <= l_max; ++l1) {
    for (int l2 = 0; l2 <= l_max; ++l2) {
      std::complex<double> c = 0.0;
      for (int a = 0; a < points; ++a)
        for (int b = 0; b < points; ++b)
          c += G(a, b) * std::conj(roots[static_cast<std::size_t>((static_cast<long long>(a) * l1) % points)]) *
               std::conj(roots[static_cast<std::size_t>((static_cast<long long>(b) * l2) % points)]);
      P(l1, l2) = c.real() / (static_cast<double>(points) * points);
    }
  }
  return P;
}

}  // namespace rmtlab
