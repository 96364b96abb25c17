#include <gtest/gtest.h>

#include <cmath>

#include "rmtlab/dbm.hpp"

using namespace rmtlab;

TEST(TimeChange, RoundTrip) {
  // Rounding t near 1 costs relative precision 1/(1 - t) = e^s.
  for (double s : {0.0, 1e-8, 0.1, 0.5, 3.0, 20.0})
    EXPECT_NEAR(flow_time(interpolation_time(s)), s, 1e-15 * std::exp(s) + 1e-14 * s);
  EXPECT_NEAR(interpolation_time(0.5), 1.0 - std::exp(-0.5), 1e-15);
  EXPECT_THROW(interpolation_time(-1.0), std::invalid_argument);
  EXPECT_THROW(flow_time(1.0), std::invalid_argument);
}

TEST(DbmState, RejectsCollisions) {
  EXPECT_THROW((DbmState{Spectrum({0.0, 0.0, 1.0}), 0.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((DbmState{Spectrum({0.0, 0.5, 1.0}), 0.0}.validate()));
}

TEST(DbmStep, ZeroStepIsIdentity) {
  auto rng = make_engine(61, 0);
  const DbmState s{Spectrum({-0.4, 0.1, 0.9}), 0.3};
  const auto out = dbm_sde_step(s, 0.0, rng);
  EXPECT_EQ(out.t, s.t);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(out.spec[i], s.spec[i]);
  EXPECT_THROW(dbm_sde_step(s, -1e-3, rng), std::invalid_argument);
}

TEST(DbmStep, SingleParticleOrnsteinUhlenbeckDecay) {
  auto rng = make_engine(62, 0);
  const DbmOptions quiet{false, 10};
  for (double dt : {1e-2, 1e-3}) {
    const auto out = dbm_evolve({Spectrum({1.5}), 0.0}, 2.0, dt, rng, quiet);
    EXPECT_NEAR(out.spec[0], 1.5 * std::exp(-1.0), 2.0 * dt);
    EXPECT_NEAR(out.t, 2.0, 1e-12);
  }
}

TEST(DbmStep, TwoParticleStationaryGap) {
  // s = g^2 obeys s' = -s + 1/2, so the half-gap settles at 1/sqrt(2).
  auto rng = make_engine(63, 0);
  const auto out = dbm_evolve({Spectrum({-0.2, 0.2}), 0.0}, 20.0, 1e-3, rng, {false, 10});
  EXPECT_NEAR(0.5 * (out.spec[1] - out.spec[0]), 1.0 / std::sqrt(2.0), 1e-3);
  EXPECT_NEAR(out.spec[0] + out.spec[1], 0.0, 1e-12);
}

TEST(DbmStep, OrderingPreservedOnNoisyPaths) {
  for (std::uint64_t p = 0; p < 10; ++p) {
    auto rng = make_engine(64, p);
    DbmState st{eigenvalues(sample_gue(30, rng)), 0.0};
    for (int k = 0; k < 300; ++k) {
      st = dbm_sde_step(st, 2e-3, rng);
      ASSERT_NO_THROW(st.validate());
    }
  }
}

TEST(DbmStep, SubstepFloorFailure) {
  // A near-collision pair at step dt pushes the middle point past its
  // neighbour; with no halvings allowed the step must fail.
  auto rng = make_engine(65, 0);
  const DbmState st{Spectrum({-1.0, 0.0, 1e-9}), 0.0};
  EXPECT_THROW(dbm_sde_step(st, 1e-2, rng, {false, 0}), std::runtime_error);
  EXPECT_NO_THROW(dbm_sde_step(st, 1e-12, rng, {false, 10}));
}

TEST(DbmMatrixPath, EndpointsAndWeylBound) {
  auto rng = make_engine(66, 0);
  const auto W = sample_gue(20, rng), U = sample_gue(20, rng);
  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(i / 20.0);
  const auto path = dbm_matrix_path(W, U, times);
  const auto a = eigenvalues(W), b = eigenvalues(U);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(path.front()[i], a[i]);
    EXPECT_EQ(path.back()[i], b[i]);
  }
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double frob = (interpolate(W, U, times[k + 1]).matrix() - interpolate(W, U, times[k]).matrix()).norm();
    for (int i = 0; i < 20; ++i) EXPECT_LE(std::abs(path[k + 1][i] - path[k][i]), frob + 1e-12);
  }
  EXPECT_THROW(dbm_matrix_path(W, sample_gue(21, rng), times), std::invalid_argument);
}
