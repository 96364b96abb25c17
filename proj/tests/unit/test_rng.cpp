#include <gtest/gtest.h>

#include <set>

#include "rmtlab/rng.hpp"

using namespace rmtlab;

TEST(Rng, SameSeedSameStream) {
  auto a = make_engine(42, 7);
  auto b = make_engine(42, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, SubstreamsAreDistinct) {
  std::set<Seed> seen;
  for (std::uint64_t id = 0; id < 10000; ++id) seen.insert(derive_substream(123, id));
  EXPECT_EQ(seen.size(), 10000u);
}

TEST(Rng, GroupAndItemSeparate) {
  std::set<Seed> seen;
  for (std::uint64_t g = 0; g < 50; ++g)
    for (std::uint64_t i = 0; i < 200; ++i) seen.insert(derive_substream(9, g, i));
  EXPECT_EQ(seen.size(), 50u * 200u);
}

TEST(Rng, MasterSeedMatters) {
  EXPECT_NE(derive_substream(1, 0), derive_substream(2, 0));
  EXPECT_NE(make_engine(1, 0)(), make_engine(2, 0)());
}

TEST(Rng, SubstreamOutputsLookUniform) {
  // Mean of U(0,1) over first draws of 20000 substreams: 1/2 within 4 SE.
  double s = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    auto e = make_engine(5, static_cast<std::uint64_t>(i));
    s += std::uniform_real_distribution<double>{}(e);
  }
  EXPECT_NEAR(s / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}
