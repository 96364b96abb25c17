#pragma once

#include <span>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/semicircle.hpp"

namespace rmtlab {

// Two clocks describe the same flow. The eigenvalue SDE
//   d lambda_i = [-lambda_i / 2 + (1/N) sum_{j != i} 1/(lambda_i - lambda_j)] ds
//                + N^{-1/2} dB_i
// runs in flow time s. It is the eigenvalue image of the matrix OU process
// dH = -H/2 ds + N^{-1/2} dB_H, whose time-s law from H_0 = W is that of
// e^{-s/2} W + (1 - e^{-s})^{1/2} U with U a unitary-convention GUE, i.e. the
// interpolation X^t with t = 1 - e^{-s}.

/// t = 1 - e^{-s}.
double interpolation_time(double flow_time);
/// s = -log(1 - t), t in [0, 1).
double flow_time(double interpolation_time);

/// Strictly increasing eigenvalues at flow time t.
struct DbmState {
  Spectrum spec;
  double t = 0.0;

  /// Throws std::invalid_argument unless the eigenvalues are strictly increasing.
  void validate() const;
};

struct DbmOptions {
  bool noise = true;
  /// The step is split dyadically at most this many times (default floor dt / 2^10).
  int max_halvings = 10;
};

/// One Euler-Maruyama step of length dt. A proposal that breaks the ordering
/// is retried as two half steps whose Brownian increments are drawn from the
/// bridge conditioned on the original increment. dt == 0 returns the state.
/// Throws std::runtime_error once the substep floor is reached.
DbmState dbm_sde_step(const DbmState& state, double dt, Engine& rng, const DbmOptions& opts = {});

/// Repeated steps of size dt up to flow time state.t + duration (the last
/// step is shortened to land exactly).
DbmState dbm_evolve(DbmState state, double duration, double dt, Engine& rng,
                    const DbmOptions& opts = {});

/// eigenvalues(interpolate(W, U, t)) for each t.
std::vector<Spectrum> dbm_matrix_path(const HermitianMatrix& W, const HermitianMatrix& U,
                                      std::span<const double> times);

}  // namespace rmtlab
