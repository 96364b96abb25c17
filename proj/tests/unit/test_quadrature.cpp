#include <gtest/gtest.h>

#include <cmath>

#include "rmtlab/quadrature.hpp"

using namespace rmtlab;

TEST(GaussLegendre, WeightsSumToLength) {
  for (int q : {1, 2, 5, 12, 40, 80}) {
    const auto r = gauss_legendre({-0.3, 1.7}, q);
    double s = 0.0;
    for (double w : r.weights) s += w;
    EXPECT_NEAR(s, 2.0, 1e-12) << q;
    for (std::size_t i = 1; i < r.nodes.size(); ++i) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
    EXPECT_EQ(r.order(), q);
  }
}

TEST(GaussLegendre, ExactForDegreeTwoQMinusOne) {
  for (int q : {2, 4, 9, 20}) {
    const auto r = gauss_legendre({0.0, 1.0}, q);
    const int d = 2 * q - 1;
    const double got = integrate([d](double x) { return std::pow(x, d) + std::pow(x, d - 1); }, r);
    EXPECT_NEAR(got, 1.0 / (d + 1) + 1.0 / d, 1e-13) << q;
  }
}

TEST(GaussLegendre, ZeroLengthInterval) {
  const auto r = gauss_legendre({0.5, 0.5}, 6);
  EXPECT_EQ(integrate([](double) { return 1.0; }, r), 0.0);
}

TEST(GaussLegendre, Errors) {
  EXPECT_THROW(gauss_legendre({0.0, 1.0}, 0), std::invalid_argument);
  EXPECT_THROW(gauss_legendre({1.0, 0.0}, 4), std::invalid_argument);
  EXPECT_THROW(composite_gauss_legendre({0.0, 1.0}, 0, 4), std::invalid_argument);
}

TEST(CompositeGaussLegendre, SmoothIntegrand) {
  const auto r = composite_gauss_legendre({0.0, 10.0}, 8, 12);
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, r), 1.0 - std::cos(10.0), 1e-13);
  EXPECT_EQ(r.order(), 96);
}
