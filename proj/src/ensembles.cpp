#include "rmtlab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmtlab {

namespace {
constexpr double kLawTol = 1e-12;

// (k-1)!! for even k, 0 for odd k.
double gaussian_moment(int k) {
  if (k % 2 != 0) return 0.0;
  double m = 1.0;
  for (int j = k - 1; j > 1; j -= 2) m *= j;
  return m;
}
}  // namespace

EntryDistribution::EntryDistribution(std::vector<Atom> atoms, bool complex_mode)
    : atoms_(std::move(atoms)), complex_mode_(complex_mode) {
  double acc = 0.0;
  cdf_.reserve(atoms_.size());
  for (const auto& a : atoms_) {
    acc += a.prob;
    cdf_.push_back(acc);
  }
}

EntryDistribution EntryDistribution::standard_gaussian(bool complex_mode) {
  return EntryDistribution({}, complex_mode);
}

EntryDistribution EntryDistribution::atomic(std::vector<Atom> atoms, bool complex_mode) {
  if (atoms.empty()) throw std::invalid_argument("atomic law needs at least one atom");
  double total = 0.0, mean = 0.0, second = 0.0;
  for (const auto& a : atoms) {
    if (!(a.prob >= 0.0) || !std::isfinite(a.value))
      throw std::invalid_argument("atomic law: negative probability or non-finite atom");
    total += a.prob;
    mean += a.prob * a.value;
    second += a.prob * a.value * a.value;
  }
  if (std::abs(total - 1.0) > kLawTol)
    throw std::invalid_argument("atomic law: probabilities do not sum to 1");
  if (std::abs(mean) > kLawTol) throw std::invalid_argument("atomic law: mean is not 0");
  if (std::abs(second - 1.0) > kLawTol)
    throw std::invalid_argument("atomic law: variance is not 1");
  return EntryDistribution(std::move(atoms), complex_mode);
}

double EntryDistribution::draw(Engine& rng) const {
  if (is_gaussian()) return std::normal_distribution<double>{}(rng);
  const double u = std::uniform_real_distribution<double>{}(rng) * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return atoms_[static_cast<std::size_t>(it - cdf_.begin())].value;
}

EntryDistribution three_point_matching(double m4, bool complex_mode) {
  if (!(m4 >= 1.0))
    throw std::invalid_argument("three_point_matching: m4 must be >= 1 (m4 >= m2^2)");
  const double a = std::sqrt(m4);
  const double p = 1.0 / (2.0 * m4);
  return EntryDistribution::atomic({{-a, p}, {0.0, 1.0 - 2.0 * p}, {a, p}}, complex_mode);
}

double entry_moment(const EntryDistribution& dist, int k) {
  if (k < 1 || k > 8) throw std::invalid_argument("entry_moment: k must be in [1, 8]");
  if (dist.is_gaussian()) return gaussian_moment(k);
  double m = 0.0;
  for (const auto& a : dist.atoms()) m += a.prob * std::pow(a.value, k);
  return m;
}

double diagonal_variance_factor(DiagonalVariance d) noexcept {
  return d == DiagonalVariance::kWigner ? 2.0 : 1.0;
}

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw std::invalid_argument("HermitianMatrix: matrix must be square and nonempty");
  const auto n = m_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m_(i, i).imag() != 0.0)
      throw std::invalid_argument("HermitianMatrix: diagonal must be real");
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (m_(j, i) != std::conj(m_(i, j)))
        throw std::invalid_argument("HermitianMatrix: matrix is not Hermitian");
  }
}

HermitianMatrix sample_wigner(const EntryDistribution& off_diag, const EntryDistribution& diag,
                              int N, Engine& rng, DiagonalVariance diag_variance) {
  if (N < 1) throw std::invalid_argument("sample_wigner: empty matrix (N must be >= 1)");
  Eigen::MatrixXcd m(N, N);
  const double off_scale =
      off_diag.complex_mode() ? std::sqrt(0.5 / N) : std::sqrt(1.0 / N);
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const double re = off_scale * off_diag.draw(rng);
      const double im = off_diag.complex_mode() ? off_scale * off_diag.draw(rng) : 0.0;
      m(i, j) = {re, im};
      m(j, i) = {re, -im};
    }
  }
  const double diag_scale = std::sqrt(diagonal_variance_factor(diag_variance) / N);
  for (int i = 0; i < N; ++i) m(i, i) = {diag_scale * diag.draw(rng), 0.0};
  return HermitianMatrix(std::move(m), HermitianMatrix::Unchecked{});
}

HermitianMatrix sample_gue(int N, Engine& rng, DiagonalVariance diag_variance) {
  const auto gauss = EntryDistribution::standard_gaussian(true);
  return sample_wigner(gauss, gauss, N, rng, diag_variance);
}

HermitianMatrix interpolate(const HermitianMatrix& W, const HermitianMatrix& U, double t) {
  if (W.dim() != U.dim()) throw std::invalid_argument("interpolate: dimension mismatch");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("interpolate: t must lie in [0, 1]");
  if (t == 0.0) return W;
  if (t == 1.0) return U;
  Eigen::MatrixXcd m = std::sqrt(1.0 - t) * W.matrix() + std::sqrt(t) * U.matrix();
  // Real scalars keep conj symmetry exact entrywise; the diagonal stays real.
  return HermitianMatrix(std::move(m), HermitianMatrix::Unchecked{});
}

}  // namespace rmtlab
