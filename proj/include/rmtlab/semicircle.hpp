#pragma once

#include <span>
#include <vector>

#include "rmtlab/ensembles.hpp"

namespace rmtlab {

/// Sorted eigenvalues of one matrix.
class Spectrum {
 public:
  Spectrum() = default;
  /// Sorts `values`; throws std::invalid_argument on non-finite entries.
  explicit Spectrum(std::vector<double> values);

  int size() const noexcept { return static_cast<int>(values_.size()); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<double> values_;
};

/// All eigenvalues of H, ascending. Throws std::invalid_argument on
/// non-finite entries.
Spectrum eigenvalues(const HermitianMatrix& H);

/// Eigenvalues of a GUE matrix (diagonal variance 1/N) drawn through the
/// unitarily equivalent real tridiagonal form: diagonal N(0, 1/N), and
/// off-diagonal k (k = 1..N-1) distributed as chi_{2(N-k)} / sqrt(2N). Same
/// law as eigenvalues(sample_gue(N, rng)) at O(N^2) cost.
Spectrum gue_tridiagonal_spectrum(int N, Engine& rng);

/// Mass-one semicircle density sqrt(4 - x^2) / (2 pi) on [-2, 2].
double sc_density(double x) noexcept;

/// Closed-form CDF, clamped to [0, 1].
double sc_cdf(double x) noexcept;

/// gamma_k: the x with sc_cdf(x) = k/N, 0 < k < N, by bisection to 1e-12.
double classical_location(int k, int N);

struct RigidityReport {
  double max_dev;  // max |lambda_k - gamma_k| over k in [0.1 N, 0.9 N]
  double gap;      // lambda_{L+1} - lambda_L (1-based)
  bool gap_exceeds;  // gap > 2n/N
};

RigidityReport rigidity_deviation(const Spectrum& spec, int n, int L);

}  // namespace rmtlab
