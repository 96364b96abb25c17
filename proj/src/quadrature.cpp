#include "rmtlab/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <stdexcept>

namespace rmtlab {

QuadratureRule gauss_legendre(Interval iv, int q) {
  if (q < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  if (!(iv.hi >= iv.lo)) throw std::invalid_argument("gauss_legendre: need lo <= hi");
  // Nonnegative zeros of P_q, ascending.
  const auto zeros = boost::math::legendre_p_zeros<double>(q);
  std::vector<double> x, w;
  x.reserve(static_cast<std::size_t>(q));
  w.reserve(static_cast<std::size_t>(q));
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime<double>(q, z);
    const double wz = 2.0 / ((1.0 - z * z) * dp * dp);
    x.push_back(z);
    w.push_back(wz);
    if (z != 0.0) {
      x.push_back(-z);
      w.push_back(wz);
    }
  }
  std::vector<std::size_t> idx(x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });

  const double half = 0.5 * iv.length();
  const double mid = 0.5 * (iv.lo + iv.hi);
  QuadratureRule rule;
  for (auto i : idx) {
    rule.nodes.push_back(mid + half * x[i]);
    rule.weights.push_back(half * w[i]);
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(Interval iv, int panels, int q) {
  if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: panels must be >= 1");
  QuadratureRule rule;
  const double h = iv.length() / panels;
  for (int p = 0; p < panels; ++p) {
    const auto piece = gauss_legendre({iv.lo + p * h, iv.lo + (p + 1) * h}, q);
    rule.nodes.insert(rule.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    rule.weights.insert(rule.weights.end(), piece.weights.begin(), piece.weights.end());
  }
  return rule;
}

double integrate(const std::function<double(double)>& f, const QuadratureRule& rule) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

}  // namespace rmtlab
