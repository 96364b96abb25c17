#include "rmtlab/dbm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmtlab {

double interpolation_time(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("interpolation_time: flow time must be >= 0");
  return -std::expm1(-s);
}

double flow_time(double t) {
  if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("flow_time: need t in [0, 1)");
  return -std::log1p(-t);
}

void DbmState::validate() const {
  const auto v = spec.values();
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw std::invalid_argument("DbmState: eigenvalues collide");
}

namespace {

std::vector<double> drift(std::span<const double> lam) {
  const auto N = static_cast<double>(lam.size());
  std::vector<double> d(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    double rep = 0.0;
    for (std::size_t j = 0; j < lam.size(); ++j)
      if (j != i) rep += 1.0 / (lam[i] - lam[j]);
    d[i] = -0.5 * lam[i] + rep / N;
  }
  return d;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

// Advances lam by dt given the Brownian increment db (variance dt per
// coordinate, before the N^{-1/2} factor).
std::vector<double> advance(const std::vector<double>& lam, double dt,
                            const std::vector<double>& db, Engine& rng, const DbmOptions& opts,
                            int depth) {
  const double noise_scale = 1.0 / std::sqrt(static_cast<double>(lam.size()));
  const auto d = drift(lam);
  std::vector<double> next(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) next[i] = lam[i] + d[i] * dt + noise_scale * db[i];
  if (strictly_increasing(next)) return next;
  if (depth >= opts.max_halvings)
    throw std::runtime_error("dbm_sde_step: ordering still violated at the substep floor");
  // Brownian bridge midpoint: B(dt/2) | B(dt) = db  ~  db/2 + N(0, dt/4).
  std::vector<double> first(db.size()), second(db.size());
  std::normal_distribution<double> gauss;
  const double bridge_sd = opts.noise ? 0.5 * std::sqrt(dt) : 0.0;
  for (std::size_t i = 0; i < db.size(); ++i) {
    first[i] = 0.5 * db[i] + (opts.noise ? bridge_sd * gauss(rng) : 0.0);
    second[i] = db[i] - first[i];
  }
  const auto mid = advance(lam, 0.5 * dt, first, rng, opts, depth + 1);
  return advance(mid, 0.5 * dt, second, rng, opts, depth + 1);
}

}  // namespace

DbmState dbm_sde_step(const DbmState& state, double dt, Engine& rng, const DbmOptions& opts) {
  if (!(dt >= 0.0)) throw std::invalid_argument("dbm_sde_step: dt must be >= 0");
  state.validate();
  if (dt == 0.0) return state;
  const auto v = state.spec.values();
  std::vector<double> lam(v.begin(), v.end());
  std::vector<double> db(lam.size(), 0.0);
  if (opts.noise) {
    std::normal_distribution<double> gauss;
    const double sd = std::sqrt(dt);
    for (auto& b : db) b = sd * gauss(rng);
  }
  return {Spectrum(advance(lam, dt, db, rng, opts, 0)), state.t + dt};
}

DbmState dbm_evolve(DbmState state, double duration, double dt, Engine& rng,
                    const DbmOptions& opts) {
  if (!(dt > 0.0) || !(duration >= 0.0))
    throw std::invalid_argument("dbm_evolve: need dt > 0 and duration >= 0");
  const double t_end = state.t + duration;
  const auto steps = static_cast<long>(std::ceil(duration / dt - 1e-9));
  for (long k = 0; k < steps; ++k) {
    const double h = std::min(dt, t_end - state.t);
    if (h <= 0.0) break;
    state = dbm_sde_step(state, h, rng, opts);
  }
  state.t = t_end;
  return state;
}

std::vector<Spectrum> dbm_matrix_path(const HermitianMatrix& W, const HermitianMatrix& U,
                                      std::span<const double> times) {
  if (W.dim() != U.dim()) throw std::invalid_argument("dbm_matrix_path: dimension mismatch");
  std::vector<Spectrum> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(eigenvalues(interpolate(W, U, t)));
  return out;
}

}  // namespace rmtlab
