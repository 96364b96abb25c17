#include "rmtlab/semicircle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rmtlab {

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("Spectrum: non-finite eigenvalue");
  std::sort(values_.begin(), values_.end());
}

Spectrum eigenvalues(const HermitianMatrix& H) {
  const auto& m = H.matrix();
  if (!m.allFinite()) throw std::invalid_argument("eigenvalues: non-finite matrix entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalues: Hermitian eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  return Spectrum(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

Spectrum gue_tridiagonal_spectrum(int N, Engine& rng) {
  if (N < 1) throw std::invalid_argument("gue_tridiagonal_spectrum: N must be >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  Eigen::VectorXd diag(N), sub(std::max(N - 1, 0));
  std::normal_distribution<double> gauss;
  for (int i = 0; i < N; ++i) diag(i) = scale * gauss(rng);
  for (int k = 1; k < N; ++k) {
    std::chi_squared_distribution<double> chi2(2.0 * (N - k));
    sub(k - 1) = scale * std::sqrt(0.5 * chi2(rng));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gue_tridiagonal_spectrum: eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  return Spectrum(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

double sc_density(double x) noexcept {
  const double ax = std::abs(x);
  if (ax >= 2.0) return 0.0;
  return std::sqrt((2.0 - ax) * (2.0 + ax)) / (2.0 * std::numbers::pi);
}

double sc_cdf(double x) noexcept {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  const double v = x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) +
                   std::asin(x / 2.0) / std::numbers::pi + 0.5;
  return std::clamp(v, 0.0, 1.0);
}

double classical_location(int k, int N) {
  if (N < 2 || k <= 0 || k >= N)
    throw std::invalid_argument("classical_location: need 0 < k < N");
  const double target = static_cast<double>(k) / N;
  double lo = -2.0, hi = 2.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (sc_cdf(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

RigidityReport rigidity_deviation(const Spectrum& spec, int n, int L) {
  const int N = spec.size();
  if (L < 1 || L >= N) throw std::invalid_argument("rigidity_deviation: need 1 <= L < N");
  const int k_lo = std::max(1, static_cast<int>(std::ceil(0.1 * N)));
  const int k_hi = std::min(N - 1, static_cast<int>(std::floor(0.9 * N)));
  double max_dev = 0.0;
  for (int k = k_lo; k <= k_hi; ++k)
    max_dev = std::max(max_dev, std::abs(spec[k - 1] - classical_location(k, N)));
  const double gap = spec[L] - spec[L - 1];
  return {max_dev, gap, gap > 2.0 * n / N};
}

}  // namespace rmtlab
