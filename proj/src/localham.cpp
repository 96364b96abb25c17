#include "rmtlab/localham.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rmtlab/semicircle.hpp"

namespace rmtlab {

namespace {

constexpr double kMinGap = 1e-12;

// log (a - b)^2
double log_sq(double a, double b) { return 2.0 * std::log(std::abs(a - b)); }

void check_gap(double a, double b) {
  if (std::abs(a - b) < kMinGap)
    throw SingularConfiguration("local Hamiltonian: coincident coordinates");
}

bool sorted_inside(std::span<const double> v, const Box& b) {
  return std::is_sorted(v.begin(), v.end()) &&
         std::all_of(v.begin(), v.end(), [&](double x) { return b.contains(x); });
}

// Cluster coordinates concatenated as (x1, x2).
std::vector<double> cluster_coords(const LocalHamiltonianInstance& inst) {
  std::vector<double> x(inst.x1);
  x.insert(x.end(), inst.x2.begin(), inst.x2.end());
  return x;
}

// Single-cluster Hamiltonian with external points `ext`.
double cluster_hamiltonian(int N, std::span<const double> x, std::span<const double> y,
                           std::span<const double> ext) {
  double h = 0.0;
  for (double v : x) h += 0.5 * N * v * v;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) h -= log_sq(x[i], x[j]);
  for (double v : x) {
    for (double yk : y) h -= log_sq(v, yk);
    for (double zk : ext) h -= log_sq(v, zk);
  }
  return h;
}

}  // namespace

void LocalHamiltonianInstance::validate() const {
  if (N < 1) throw std::invalid_argument("local Hamiltonian: N must be >= 1");
  if (x1.empty() || x1.size() != x2.size())
    throw std::invalid_argument("local Hamiltonian: clusters must have equal nonzero size");
  if (!(box1.lo < box1.hi && box1.hi <= box2.lo && box2.lo < box2.hi))
    throw std::invalid_argument("local Hamiltonian: boxes must be disjoint and ordered");
  if (!sorted_inside(x1, box1) || !sorted_inside(x2, box2))
    throw std::invalid_argument("local Hamiltonian: clusters must be sorted inside their boxes");
  if (!std::is_sorted(y.begin(), y.end()))
    throw std::invalid_argument("local Hamiltonian: external configuration must be sorted");
  const auto x = cluster_coords(*this);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) check_gap(x[i], x[j]);
    for (double yk : y) check_gap(x[i], yk);
  }
}

double local_hamiltonian(const LocalHamiltonianInstance& inst) {
  inst.validate();
  const auto x = cluster_coords(inst);
  double h = 0.0;
  for (double v : x) h += 0.5 * inst.N * v * v;
  if (!inst.interactions) return h;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) h -= log_sq(x[i], x[j]);
  for (double v : x)
    for (double yk : inst.y) h -= log_sq(v, yk);
  return h;
}

GradHess grad_hessian(const LocalHamiltonianInstance& inst) {
  inst.validate();
  const auto x = cluster_coords(inst);
  const auto m = static_cast<Eigen::Index>(x.size());
  GradHess gh{Eigen::VectorXd(m), Eigen::MatrixXd::Zero(m, m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    gh.gradient(i) = inst.N * x[static_cast<std::size_t>(i)];
    gh.hessian(i, i) = inst.N;
  }
  if (!inst.interactions) return gh;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const double d = xi - x[static_cast<std::size_t>(j)];
      gh.gradient(i) -= 2.0 / d;
      gh.hessian(i, i) += 2.0 / (d * d);
      gh.hessian(i, j) = -2.0 / (d * d);
    }
    for (double yk : inst.y) {
      const double d = xi - yk;
      gh.gradient(i) -= 2.0 / d;
      gh.hessian(i, i) += 2.0 / (d * d);
    }
  }
  return gh;
}

QuadraticFormBound quadratic_form_bound(const LocalHamiltonianInstance& inst,
                                        std::span<const double> v) {
  const auto gh = grad_hessian(inst);
  if (static_cast<Eigen::Index>(v.size()) != gh.hessian.rows())
    throw std::invalid_argument("quadratic_form_bound: vector length must be 2n");
  const Eigen::Map<const Eigen::VectorXd> vv(v.data(), static_cast<Eigen::Index>(v.size()));
  return {vv.dot(gh.hessian * vv), inst.N * vv.squaredNorm()};
}

double decoupling_remainder(std::span<const double> x1, std::span<const double> x2,
                            std::span<const double> z1, std::span<const double> z2) {
  double r = 0.0;
  for (double a : x1)
    for (double z : z2) r += log_sq(a, z);
  for (double b : x2)
    for (double z : z1) r += log_sq(b, z);
  for (double a : x1)
    for (double b : x2) r -= log_sq(a, b);
  return r;
}

Decoupling decouple(const LocalHamiltonianInstance& inst, std::span<const double> z1,
                    std::span<const double> z2) {
  inst.validate();
  if (z1.size() != inst.x1.size() || z2.size() != inst.x2.size())
    throw std::invalid_argument("decouple: surrogate vectors must have n entries");
  if (!sorted_inside(z1, inst.box1) || !sorted_inside(z2, inst.box2))
    throw std::invalid_argument("decouple: surrogates must be sorted inside their boxes");
  for (double a : inst.x1)
    for (double z : z2) check_gap(a, z);
  for (double b : inst.x2)
    for (double z : z1) check_gap(b, z);
  return {cluster_hamiltonian(inst.N, inst.x1, inst.y, z2),
          cluster_hamiltonian(inst.N, inst.x2, inst.y, z1),
          decoupling_remainder(inst.x1, inst.x2, z1, z2)};
}

namespace {

// Projected gradient ascent (sign = +1) or descent (sign = -1) of the
// remainder over the four coordinate blocks, each clamped to its box.
double optimize_remainder(std::vector<double> x1, std::vector<double> x2, std::vector<double> z1,
                          std::vector<double> z2, const Box& b1, const Box& b2, double sign) {
  const std::size_t n = x1.size();
  auto value = [&] { return decoupling_remainder(x1, x2, z1, z2); };
  double current = value();
  double step = 0.25 * std::min(b1.width(), b2.width());
  std::vector<double> g_x1(n), g_x2(n), g_z1(n), g_z2(n);
  for (int iter = 0; iter < 200 && step > 1e-6 * b1.width(); ++iter) {
    // d/da log(a - b)^2 = 2 / (a - b)
    for (std::size_t i = 0; i < n; ++i) {
      g_x1[i] = 0.0;
      for (double z : z2) g_x1[i] += 2.0 / (x1[i] - z);
      for (double b : x2) g_x1[i] -= 2.0 / (x1[i] - b);
      g_x2[i] = 0.0;
      for (double z : z1) g_x2[i] += 2.0 / (x2[i] - z);
      for (double a : x1) g_x2[i] -= 2.0 / (x2[i] - a);
      g_z1[i] = 0.0;
      for (double b : x2) g_z1[i] += 2.0 / (z1[i] - b);
      g_z2[i] = 0.0;
      for (double a : x1) g_z2[i] += 2.0 / (z2[i] - a);
    }
    double gmax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      gmax = std::max({gmax, std::abs(g_x1[i]), std::abs(g_x2[i]), std::abs(g_z1[i]),
                       std::abs(g_z2[i])});
    if (gmax == 0.0) break;
    auto moved = [&](std::vector<double> v, const std::vector<double>& g, const Box& b) {
      for (std::size_t i = 0; i < n; ++i)
        v[i] = std::clamp(v[i] + sign * step * g[i] / gmax, b.lo, b.hi);
      return v;
    };
    auto nx1 = moved(x1, g_x1, b1), nx2 = moved(x2, g_x2, b2);
    auto nz1 = moved(z1, g_z1, b1), nz2 = moved(z2, g_z2, b2);
    const double trial = decoupling_remainder(nx1, nx2, nz1, nz2);
    if (sign * (trial - current) > 0.0) {
      x1 = std::move(nx1);
      x2 = std::move(nx2);
      z1 = std::move(nz1);
      z2 = std::move(nz2);
      current = trial;
    } else {
      step *= 0.5;
    }
  }
  return current;
}

std::vector<double> uniform_sorted(int n, const Box& b, Engine& rng) {
  std::uniform_real_distribution<double> u(b.lo, b.hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = u(rng);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<FluctuationEstimate> remainder_fluctuation(int N, std::span<const int> n_grid,
                                                       const ClusterGeometry& geometry,
                                                       int trials, Seed seed) {
  if (!(geometry.E1 < geometry.E2)) throw std::invalid_argument("remainder_fluctuation: need E1 < E2");
  if (trials < 1) throw std::invalid_argument("remainder_fluctuation: trials must be >= 1");
  std::vector<FluctuationEstimate> out;
  for (int n : n_grid) {
    if (n < 1) throw std::invalid_argument("remainder_fluctuation: n must be >= 1");
    const double w = geometry.width_factor * n / N;
    const Box b1{geometry.E1 - 0.5 * w, geometry.E1 + 0.5 * w};
    const Box b2{geometry.E2 - 0.5 * w, geometry.E2 + 0.5 * w};
    if (!(b1.hi < b2.lo)) throw std::invalid_argument("remainder_fluctuation: boxes overlap");
    std::vector<double> sup(static_cast<std::size_t>(trials)), inf(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
      auto rng = make_engine(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t));
      auto x1 = uniform_sorted(n, b1, rng), x2 = uniform_sorted(n, b2, rng);
      auto z1 = uniform_sorted(n, b1, rng), z2 = uniform_sorted(n, b2, rng);
      sup[static_cast<std::size_t>(t)] = optimize_remainder(x1, x2, z1, z2, b1, b2, +1.0);
      inf[static_cast<std::size_t>(t)] = optimize_remainder(x1, x2, z1, z2, b1, b2, -1.0);
    }
    const double hi = *std::max_element(sup.begin(), sup.end());
    const double lo = *std::min_element(inf.begin(), inf.end());
    out.push_back({n, N, w, geometry.E2 - geometry.E1, hi - lo});
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need at least two paired points");
  const auto m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

LocalHamiltonianInstance random_instance(int N, int n, Engine& rng) {
  if (n < 1 || N < 4 * n + 8) throw std::invalid_argument("random_instance: need N >= 4n + 8");
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // Jittered quantiles stay strictly increasing: each point moves by less
  // than a third of the smaller neighbouring spacing.
  std::vector<double> p(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) p[static_cast<std::size_t>(k)] = classical_location(k + 1, N + 1);
  std::vector<double> jittered(p);
  for (int k = 0; k < N; ++k) {
    const double left = k > 0 ? p[k] - p[k - 1] : p[1] - p[0];
    const double right = k + 1 < N ? p[k + 1] - p[k] : p[k] - p[k - 1];
    jittered[static_cast<std::size_t>(k)] += (u01(rng) - 0.5) * 0.66 * std::min(left, right);
  }
  std::uniform_int_distribution<int> anchor1(N / 5, N / 3);
  std::uniform_int_distribution<int> anchor2(2 * N / 3, 4 * N / 5 - n);
  const int L1 = anchor1(rng), L2 = anchor2(rng);

  LocalHamiltonianInstance inst;
  inst.N = N;
  for (int k = 0; k < N; ++k) {
    const bool in1 = k >= L1 && k < L1 + n;
    const bool in2 = k >= L2 && k < L2 + n;
    if (!in1 && !in2) inst.y.push_back(jittered[static_cast<std::size_t>(k)]);
  }
  inst.box1 = {jittered[static_cast<std::size_t>(L1 - 1)], jittered[static_cast<std::size_t>(L1 + n)]};
  inst.box2 = {jittered[static_cast<std::size_t>(L2 - 1)], jittered[static_cast<std::size_t>(L2 + n)]};
  // Interior of each box, away from the endpoints (which are points of y).
  auto fill = [&](const Box& b) {
    const double margin = 0.02 * b.width();
    return uniform_sorted(n, {b.lo + margin, b.hi - margin}, rng);
  };
  inst.x1 = fill(inst.box1);
  inst.x2 = fill(inst.box2);
  return inst;
}

DiscreteLaw::DiscreteLaw(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("DiscreteLaw: empty support");
  double s = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw std::invalid_argument("DiscreteLaw: negative probability");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("DiscreteLaw: mass is not 1");
}

double relative_entropy(const DiscreteLaw& p, const DiscreteLaw& q) {
  if (p.size() != q.size()) throw std::invalid_argument("relative_entropy: support mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.probs()[i], qi = q.probs()[i];
    if (qi == 0.0) continue;
    if (pi == 0.0) return std::numeric_limits<double>::infinity();
    s += qi * std::log(qi / pi);
  }
  return s;
}

double tv_distance(const DiscreteLaw& p, const DiscreteLaw& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: support mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p.probs()[i] - q.probs()[i]);
  return 0.5 * s;
}

}  // namespace rmtlab
