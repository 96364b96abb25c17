#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "rmtlab/rng.hpp"

namespace rmtlab {

struct Atom {
  double value;
  double prob;
};

/// Mean-zero, unit-variance real law used for matrix entries. Either a finite
/// atomic law or the standard Gaussian. Scaling to the 1/N (off-diagonal) and
/// 2/N (diagonal) variances happens in the samplers.
///
/// In complex mode an off-diagonal entry is re + i*im with re, im independent
/// draws from this law, each carrying half of the entry variance.
class EntryDistribution {
 public:
  static EntryDistribution standard_gaussian(bool complex_mode = true);

  /// Throws std::invalid_argument unless probabilities are nonnegative, sum to
  /// 1, and the law has mean 0 and variance 1 (all within 1e-12).
  static EntryDistribution atomic(std::vector<Atom> atoms, bool complex_mode = true);

  bool is_gaussian() const noexcept { return atoms_.empty(); }
  bool complex_mode() const noexcept { return complex_mode_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }

  /// One unit-variance real draw.
  double draw(Engine& rng) const;

 private:
  EntryDistribution(std::vector<Atom> atoms, bool complex_mode);

  std::vector<Atom> atoms_;
  std::vector<double> cdf_;
  bool complex_mode_;
};

/// The symmetric law on {-a, 0, a} with moments (0, 1, 0, m4):
/// a = sqrt(m4), P(+-a) = 1/(2 m4). Requires m4 >= 1 (m4 >= m2^2).
EntryDistribution three_point_matching(double m4, bool complex_mode = true);

/// Exact k-th moment, k in [1, 8].
double entry_moment(const EntryDistribution& dist, int k);

/// Variance of diagonal entries in units of 1/N.
///  - kWigner:  2/N, the convention of the Wigner conditions.
///  - kUnitary: 1/N, the unitarily invariant GUE whose eigenvalue law is the
///    determinantal process of the Hermite kernel and the invariant law of the
///    Dyson flow.
enum class DiagonalVariance { kWigner, kUnitary };

double diagonal_variance_factor(DiagonalVariance d) noexcept;

class HermitianMatrix {
 public:
  /// Throws std::invalid_argument if `m` is not square, not Hermitian, or has
  /// a nonzero imaginary part on the diagonal.
  explicit HermitianMatrix(Eigen::MatrixXcd m);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const noexcept { return m_; }
  std::complex<double> operator()(int i, int j) const { return m_(i, j); }

 private:
  struct Unchecked {};
  HermitianMatrix(Eigen::MatrixXcd m, Unchecked) : m_(std::move(m)) {}

  Eigen::MatrixXcd m_;

  friend HermitianMatrix sample_wigner(const EntryDistribution&, const EntryDistribution&, int,
                                       Engine&, DiagonalVariance);
  friend HermitianMatrix interpolate(const HermitianMatrix&, const HermitianMatrix&, double);
};

/// Wigner matrix: upper-triangular entries iid with E|x_ij|^2 = 1/N, diagonal
/// iid real with variance 2/N (or 1/N for kUnitary). Draw order is fixed
/// (row-major upper triangle, then the diagonal) so output is a pure function
/// of the engine state.
HermitianMatrix sample_wigner(const EntryDistribution& off_diag, const EntryDistribution& diag,
                              int N, Engine& rng,
                              DiagonalVariance diag_variance = DiagonalVariance::kWigner);

/// GUE with complex Gaussian off-diagonal entries of variance 1/N. The
/// default diagonal variance is 1/N, see DiagonalVariance.
HermitianMatrix sample_gue(int N, Engine& rng,
                           DiagonalVariance diag_variance = DiagonalVariance::kUnitary);

/// (1-t)^{1/2} W + t^{1/2} U, t in [0, 1].
HermitianMatrix interpolate(const HermitianMatrix& W, const HermitianMatrix& U, double t);

}  // namespace rmtlab
