#pragma once

#include <span>
#include <vector>

#include "rmtlab/kernels.hpp"
#include "rmtlab/quadrature.hpp"

namespace rmtlab {

/// det [K(x_i, x_j)]_{i,j<m}: the m-point correlation function.
double correlation_det(const Kernel& kernel, std::span<const double> points);

/// Nystrom discretization sqrt(w_i) K(x_i, x_j) sqrt(w_j) on a q-point
/// Gauss-Legendre rule. Throws on q < 2 or non-finite kernel values.
Eigen::MatrixXd nystrom_matrix(const Kernel& kernel, Interval iv, int q);

/// det(I - z K) restricted to iv.
double fredholm_det(const Kernel& kernel, Interval iv, double z, int q);

/// M_k = (1/k!) int_{iv^k} det[K(x_i, x_j)] by tensorized q-point quadrature.
/// Cost grows as q^k; k > max_k throws std::invalid_argument.
double factorial_moment(const Kernel& kernel, Interval iv, int k, int q = 12, int max_k = 6);

/// M_0..M_{k_max} on the q-point Nystrom grid, computed as the elementary
/// symmetric polynomials of the eigenvalues of nystrom_matrix(). On the same
/// grid this equals the tensorized sum of factorial_moment() exactly, since
/// tuples with a repeated node contribute zero.
std::vector<double> factorial_moments(const Kernel& kernel, Interval iv, int k_max, int q);

/// Law of the number of points in a window.
struct CountLaw {
  std::vector<double> probs;   // P[count = l], l = 0..l_max
  double truncation_residual;  // 1 - sum(probs): mass beyond l_max
  double series_bound;         // bound on the error of each probs[l]
};

struct CountOptions {
  int q = 40;             // Nystrom order
  int extra_terms = 8;    // inclusion-exclusion runs to k_max = l_max + extra_terms
  double max_series_bound = 1e-3;
};

/// P[count = l] = sum_{k >= l} (-1)^{k-l} C(k, l) M_k, truncated at k_max.
/// Bonferroni's inequalities bound the truncation error by the first omitted
/// term, which is reported in series_bound. Throws std::runtime_error if
/// that bound exceeds options.max_series_bound.
CountLaw count_distribution(const Kernel& kernel, Interval iv, int l_max,
                            const CountOptions& options = {});

/// Generating-function route: E[w^count] = det(I - (1 - w) K) sampled at
/// `points` roots of unity and Fourier-inverted. series_bound is 0; aliasing
/// from counts >= points is not reported.
CountLaw count_distribution_generating(const Kernel& kernel, Interval iv, int l_max, int q = 40,
                                       int points = 64);

/// P[n1 = l1, n2 = l2], l1, l2 <= l_max, for two disjoint windows from
/// E[w1^n1 w2^n2] = det(I - K ((1 - w1) 1_{iv1} + (1 - w2) 1_{iv2})) sampled on
/// a points x points grid of roots of unity.
Eigen::MatrixXd joint_count_distribution(const Kernel& kernel, Interval iv1, Interval iv2,
                                         int l_max, int q = 30, int points = 32);

}  // namespace rmtlab
