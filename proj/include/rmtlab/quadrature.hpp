#pragma once

#include <functional>
#include <vector>

namespace rmtlab {

struct Interval {
  double lo;
  double hi;
  double length() const noexcept { return hi - lo; }
};

/// Nodes strictly increasing in [lo, hi]; weights positive, summing to hi - lo.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order() const noexcept { return static_cast<int>(nodes.size()); }
};

/// q-point Gauss-Legendre rule mapped to [lo, hi]. q >= 1.
QuadratureRule gauss_legendre(Interval iv, int q);

/// `panels` equal Gauss-Legendre panels of order q each.
QuadratureRule composite_gauss_legendre(Interval iv, int panels, int q);

double integrate(const std::function<double(double)>& f, const QuadratureRule& rule);

}  // namespace rmtlab
