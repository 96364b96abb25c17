#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rmtlab/quadrature.hpp"
#include "rmtlab/semicircle.hpp"

namespace rmtlab {

/// Delta = [E, E + c/N] for c >= 0, [E + c/N, E] for c < 0. Closed.
struct Window {
  double E;
  double c;
  int N;

  double lo() const noexcept { return c >= 0.0 ? E : E + c / N; }
  double hi() const noexcept { return c >= 0.0 ? E + c / N : E; }
  Interval interval() const noexcept { return {lo(), hi()}; }

  /// Window whose length is `length` mean spacings at E: c = length / rho_sc(E).
  static Window rescaled(double E, double length, int N);
};

/// #{i : lo <= lambda_i <= hi}.
int count_in_window(const Spectrum& spec, const Window& w);

/// Compactly supported test function on R^k; `fn` is never called with a
/// point outside the cube [-radius, radius]^k.
struct TestFunction {
  std::function<double(std::span<const double>)> fn;
  double radius;
};

/// sum_{i_1 < ... < i_k} f(N rho(a)(lambda_{i_1} - a), ...). Only eigenvalues
/// with |N rho(a)(lambda - a)| <= radius enter. Throws std::length_error if
/// k >= 3 and more than 40 eigenvalues survive pruning.
double local_statistic(const Spectrum& spec, const TestFunction& f, double a, int k);

/// Midpoint-rule average of stat over a uniform G-grid on [a - eps, a + eps].
double energy_average(const std::function<double(double)>& stat, double a, double eps, int G);

/// Midpoints of the energy_average grid.
std::vector<double> energy_grid(double a, double eps, int G);

/// 4 (x - lo) / (hi - lo).
double rescale_T(double lo, double hi, double x);

/// All L with gamma_L + delta n/N < E < gamma_{L+n+1} - delta n/N, where
/// gamma_k = classical_location(k, N) and 1 <= L, L + n + 1 <= N - 1.
std::vector<int> covering_indices(double E, int N, int n, double delta);

/// Empirical joint law of (count in w1, count in w2).
class JointCountHistogram {
 public:
  JointCountHistogram() = default;
  JointCountHistogram(Window w1, Window w2) : w1_(w1), w2_(w2) {}

  void add(int l1, int l2, long weight = 1);
  void merge(const JointCountHistogram& other);

  long count(int l1, int l2) const;
  long total() const noexcept { return total_; }
  const std::map<std::pair<int, int>, long>& cells() const noexcept { return counts_; }
  std::optional<Window> window1() const noexcept { return w1_; }
  std::optional<Window> window2() const noexcept { return w2_; }

 private:
  std::map<std::pair<int, int>, long> counts_;
  long total_ = 0;
  std::optional<Window> w1_, w2_;
};

/// Throws std::invalid_argument if the windows overlap.
JointCountHistogram joint_histogram(std::span<const Spectrum> spectra, const Window& w1,
                                    const Window& w2);

/// 1/2 sum |p(l1, l2) - p1(l1) p2(l2)| for the empirical law and its
/// marginals. Throws std::invalid_argument on an empty histogram.
double independence_gap(const JointCountHistogram& h);

}  // namespace rmtlab
