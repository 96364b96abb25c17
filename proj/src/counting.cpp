#include "rmtlab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmtlab {

Window Window::rescaled(double E, double length, int N) {
  const double rho = sc_density(E);
  if (!(rho > 0.0)) throw std::invalid_argument("Window::rescaled: E must lie in the bulk");
  return {E, length / rho, N};
}

int count_in_window(const Spectrum& spec, const Window& w) {
  const auto v = spec.values();
  const auto first = std::lower_bound(v.begin(), v.end(), w.lo());
  const auto last = std::upper_bound(first, v.end(), w.hi());
  return static_cast<int>(last - first);
}

double local_statistic(const Spectrum& spec, const TestFunction& f, double a, int k) {
  if (!(std::abs(a) < 2.0)) throw std::invalid_argument("local_statistic: a must lie in the bulk");
  if (k < 1) throw std::invalid_argument("local_statistic: k must be >= 1");
  const double scale = spec.size() * sc_density(a);
  std::vector<double> pts;
  for (double lam : spec.values()) {
    const double s = scale * (lam - a);
    if (std::abs(s) <= f.radius) pts.push_back(s);
  }
  const int m = static_cast<int>(pts.size());
  if (k >= 3 && m > 40)
    throw std::length_error("local_statistic: too many eigenvalues in the support for k >= 3");
  if (m < k) return 0.0;

  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::vector<double> arg(static_cast<std::size_t>(k));
  double total = 0.0;
  while (true) {
    for (int i = 0; i < k; ++i)
      arg[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    total += f.fn(arg);
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < k; ++i)
      idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
  }
  return total;
}

std::vector<double> energy_grid(double a, double eps, int G) {
  if (!(eps > 0.0)) throw std::invalid_argument("energy_grid: eps must be positive");
  if (G < 1) throw std::invalid_argument("energy_grid: G must be >= 1");
  std::vector<double> grid(static_cast<std::size_t>(G));
  const double h = 2.0 * eps / G;
  for (int g = 0; g < G; ++g) grid[static_cast<std::size_t>(g)] = a - eps + (g + 0.5) * h;
  return grid;
}

double energy_average(const std::function<double(double)>& stat, double a, double eps, int G) {
  double s = 0.0;
  for (double u : energy_grid(a, eps, G)) s += stat(u);
  return s / G;
}

double rescale_T(double lo, double hi, double x) {
  if (!(hi > lo)) throw std::invalid_argument("rescale_T: need hi > lo");
  return 4.0 * (x - lo) / (hi - lo);
}

std::vector<int> covering_indices(double E, int N, int n, double delta) {
  if (!(std::abs(E) < 2.0)) throw std::invalid_argument("covering_indices: E must lie in the bulk");
  if (!(delta >= 0.0 && delta < 0.5))
    throw std::invalid_argument("covering_indices: delta must lie in [0, 1/2)");
  if (n < 0) throw std::invalid_argument("covering_indices: n must be >= 0");
  const double pad = delta * n / N;
  std::vector<int> out;
  for (int L = 1; L + n + 1 <= N - 1; ++L) {
    const double left = classical_location(L, N) + pad;
    if (!(left < E)) break;
    if (E < classical_location(L + n + 1, N) - pad) out.push_back(L);
  }
  return out;
}

void JointCountHistogram::add(int l1, int l2, long weight) {
  if (weight < 0) throw std::invalid_argument("JointCountHistogram: negative weight");
  if (weight == 0) return;
  counts_[{l1, l2}] += weight;
  total_ += weight;
}

void JointCountHistogram::merge(const JointCountHistogram& other) {
  for (const auto& [cell, n] : other.counts_) counts_[cell] += n;
  total_ += other.total_;
}

long JointCountHistogram::count(int l1, int l2) const {
  const auto it = counts_.find({l1, l2});
  return it == counts_.end() ? 0 : it->second;
}

JointCountHistogram joint_histogram(std::span<const Spectrum> spectra, const Window& w1,
                                    const Window& w2) {
  if (!(w1.hi() < w2.lo() || w2.hi() < w1.lo()))
    throw std::invalid_argument("joint_histogram: windows overlap");
  JointCountHistogram h(w1, w2);
  for (const auto& s : spectra) h.add(count_in_window(s, w1), count_in_window(s, w2));
  return h;
}

double independence_gap(const JointCountHistogram& h) {
  if (h.total() <= 0) throw std::invalid_argument("independence_gap: empty histogram");
  std::map<int, double> p1, p2;
  const double total = static_cast<double>(h.total());
  for (const auto& [cell, n] : h.cells()) {
    p1[cell.first] += n / total;
    p2[cell.second] += n / total;
  }
  double gap = 0.0;
  for (const auto& [l1, a] : p1) {
    for (const auto& [l2, b] : p2) {
      gap += std::abs(static_cast<double>(h.count(l1, l2)) / total - a * b);
    }
  }
  return 0.5 * gap;
}

}  // namespace rmtlab
