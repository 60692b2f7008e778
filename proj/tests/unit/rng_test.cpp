#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "privcore/rng.hpp"

namespace privcore {
namespace {

TEST(SplitMix, MatchesReferenceOutput) {
  // First output of the reference SplitMix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(DeriveSeed, IsPureAndSeparatesStreams) {
  EXPECT_EQ(derive_seed(42, Stream::kNoise), derive_seed(42, Stream::kNoise));
  std::set<std::uint64_t> seen;
  for (Stream s : {Stream::kTrueModels, Stream::kFeatures, Stream::kNoise, Stream::kPlant,
                   Stream::kShuffle, Stream::kSplit, Stream::kRandomScores, Stream::kClassCenters,
                   Stream::kSample}) {
    EXPECT_TRUE(seen.insert(derive_seed(42, s)).second);
  }
  EXPECT_NE(derive_seed(1, Stream::kNoise), derive_seed(2, Stream::kNoise));
  EXPECT_NE(derive_seed(1, Stream::kNoise, 0), derive_seed(1, Stream::kNoise, 1));
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_EQ(a.normal(), b.normal());
  }
}

TEST(Rng, UniformStaysInRange) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform(-1.0, 1.0);
    ASSERT_GE(v, -1.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(Rng, UniformIndexCoversRangeEvenly) {
  Rng rng(2);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    const auto v = rng.uniform_index(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, draws / 7, 400);
}

TEST(Rng, MomentsOfContinuousDraws) {
  Rng rng(3);
  const int n = 200000;
  double s = 0, s2 = 0, e = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
    e += rng.exponential(2.0);
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  EXPECT_NEAR(e / n, 0.5, 0.01);
}

}  // namespace
}  // namespace privcore
