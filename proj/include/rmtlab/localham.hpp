#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

#include "rmtlab/rng.hpp"

namespace rmtlab {

class SingularConfiguration : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Box {
  double lo;
  double hi;
  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// Two clusters x1, x2 (n points each) confined to box1 < box2, with the
/// external configuration y held fixed. The clusters sit in consecutive gaps
/// of y: box1 = [y_{L1}, y_{L1+1}], box2 = [y_{L2-n}, y_{L2-n+1}].
struct LocalHamiltonianInstance {
  int N = 0;
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> y;
  Box box1{};
  Box box2{};
  /// Test switch: false drops every logarithmic interaction.
  bool interactions = true;

  int n() const noexcept { return static_cast<int>(x1.size()); }

  /// Throws std::invalid_argument on shape/ordering/box violations and
  /// SingularConfiguration when two coordinates are closer than 1e-12.
  void validate() const;
};

/// H_y(x) = N/2 |x|^2 - sum over distinct pairs of cluster points of
/// log (a - b)^2 - sum over (cluster point, y_k) of log (a - y_k)^2.
double local_hamiltonian(const LocalHamiltonianInstance& inst);

struct GradHess {
  Eigen::VectorXd gradient;  // ordered (x1, x2)
  Eigen::MatrixXd hessian;
};

GradHess grad_hessian(const LocalHamiltonianInstance& inst);

struct QuadraticFormBound {
  double lhs;  // <v, Hess v>
  double rhs;  // N |v|^2
  bool holds() const noexcept { return lhs >= rhs - 1e-9 * std::abs(rhs); }
};

QuadraticFormBound quadratic_form_bound(const LocalHamiltonianInstance& inst,
                                        std::span<const double> v);

/// H = h1 + h2 + r with h1 = H^{L1}_{y u z2}(x1), h2 = H^{L2}_{y u z1}(x2) and
/// r = sum log(x1_i - z2_k)^2 + sum log(x2_i - z1_k)^2 - sum log(x1_i - x2_j)^2.
struct Decoupling {
  double h1;
  double h2;
  double r;
};

Decoupling decouple(const LocalHamiltonianInstance& inst, std::span<const double> z1,
                    std::span<const double> z2);

/// The remainder r of decouple() as a function of the four n-vectors.
double decoupling_remainder(std::span<const double> x1, std::span<const double> x2,
                            std::span<const double> z1, std::span<const double> z2);

/// Cluster placement for remainder scans: box centers E1 < E2 and box width
/// width_factor * n / N (the largest gap allowed off the rigidity event).
struct ClusterGeometry {
  double E1 = -1.0;
  double E2 = 1.0;
  double width_factor = 2.0;
};

struct FluctuationEstimate {
  int n;
  int N;
  double box_width;
  double separation;  // distance between box centers
  double fluctuation;  // sup - inf of r over the explored (x, z)
};

/// For each n: sup - inf of the decoupling remainder over `trials` random
/// admissible (x, z), each refined by projected gradient ascent and descent
/// inside the boxes so the extremes approach the true sup and inf.
std::vector<FluctuationEstimate> remainder_fluctuation(int N, std::span<const int> n_grid,
                                                       const ClusterGeometry& geometry,
                                                       int trials, Seed seed);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Random admissible instance: N positions at jittered semicircle quantiles,
/// clusters at random bulk anchors near N/4 and 3N/4, cluster points
/// resampled uniformly inside their boxes.
LocalHamiltonianInstance random_instance(int N, int n, Engine& rng);

/// Probability vector summing to 1 within 1e-12.
class DiscreteLaw {
 public:
  explicit DiscreteLaw(std::vector<double> probs);
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

/// S(p, q) = sum_i q_i log(q_i / p_i) in nats; +infinity when q charges a
/// point p does not. Throws std::invalid_argument on mismatched supports.
double relative_entropy(const DiscreteLaw& p, const DiscreteLaw& q);

/// 1/2 sum |p_i - q_i|.
double tv_distance(const DiscreteLaw& p, const DiscreteLaw& q);

}  // namespace rmtlab
