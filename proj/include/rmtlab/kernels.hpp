#pragma once

#include <Eigen/Dense>

#include <array>
#include <span>

namespace rmtlab {

/// Orthonormal Hermite function psi_k(x) = e^{-x^2/4} He_k(x) / sqrt(sqrt(2 pi) k!)
/// by the three-term recurrence, carried with a separate exponent so large
/// k and |x| neither overflow nor underflow prematurely.
double hermite_psi(int k, double x);

/// {psi_{k-2}(x), psi_{k-1}(x), psi_k(x)}; entries with negative index are 0.
std::array<double, 3> hermite_psi_tail(int k, double x);

/// Finite-N GUE kernel (Christoffel-Darboux form) in the eigenvalue scale
/// of the 1/N-variance ensemble:
///   K_N(x, y) = sqrt(N) [psi_N(u) psi_{N-1}(v) - psi_{N-1}(u) psi_N(v)] / (x - y),
/// u = x sqrt(N), v = y sqrt(N). Equals sqrt(N) sum_{k<N} psi_k(u) psi_k(v), so
/// the diagonal integrates to N. Within 1e-6 of the diagonal the confluent
/// form at the midpoint is used.
double gue_kernel(int N, double x, double y);

/// Confluent diagonal N [sqrt(N) psi_{N-1}(u)^2 - sqrt(N-1) psi_N(u) psi_{N-2}(u)].
double gue_kernel_diagonal(int N, double x);

/// sin(pi (u - v)) / (pi (u - v)), 1 on the diagonal.
double sine_kernel(double u, double v) noexcept;

/// K_N(E + a/(N rho), E + b/(N rho)) / (N rho) with rho = sc_density(E).
/// Throws std::invalid_argument for |E| >= 2.
double bulk_rescaled_kernel(int N, double E, double a, double b);

/// A symmetric correlation kernel: finite-N GUE or sine.
class Kernel {
 public:
  enum class Kind { kGueFinite, kSine };

  static Kernel gue(int N);
  static Kernel sine() noexcept { return Kernel(Kind::kSine, 0); }

  Kind kind() const noexcept { return kind_; }
  int N() const noexcept { return n_; }

  double operator()(double x, double y) const;

  /// [K(p_i, p_j)]; for the GUE kernel the Hermite tails are computed once
  /// per point.
  Eigen::MatrixXd matrix(std::span<const double> points) const;

 private:
  Kernel(Kind kind, int n) noexcept : kind_(kind), n_(n) {}
  Kind kind_;
  int n_;
};

}  // namespace rmtlab
