#include <gtest/gtest.h>

#include <unordered_set>

#include "dynkin/policy.hpp"

using dynkin::StoppingPolicy;

TEST(StoppingPolicy, MaskRoundTrip) {
  for (std::uint64_t m = 0; m < 64; ++m) {
    auto p = StoppingPolicy::from_mask(6, m);
    EXPECT_EQ(p.to_mask(), m);
    EXPECT_EQ(p.count(), static_cast<std::size_t>(__builtin_popcountll(m)));
  }
}

TEST(StoppingPolicy, SetAlgebra) {
  StoppingPolicy a(5, {0, 2}), b(5, {2, 3});
  EXPECT_EQ((a | b), StoppingPolicy(5, {0, 2, 3}));
  EXPECT_EQ((a & b), StoppingPolicy(5, {2}));
  EXPECT_EQ((a - b), StoppingPolicy(5, {0}));
  EXPECT_EQ(a.complement(), StoppingPolicy(5, {1, 3, 4}));
  EXPECT_TRUE(StoppingPolicy(5, {2}).subset_of(a));
  EXPECT_FALSE(a.subset_of(b));
  EXPECT_TRUE((a - b).disjoint_from(b));
  EXPECT_TRUE(StoppingPolicy::full(5).is_full());
  EXPECT_TRUE(StoppingPolicy(5).empty());
}

TEST(StoppingPolicy, ComplementTrimsUnusedBits) {
  auto p = StoppingPolicy(70).complement();
  EXPECT_EQ(p.count(), 70u);
  EXPECT_EQ(p, StoppingPolicy::full(70));
}

TEST(StoppingPolicy, WideUniverse) {
  StoppingPolicy p(130, {0, 64, 129});
  EXPECT_TRUE(p.contains(64));
  EXPECT_FALSE(p.contains(63));
  EXPECT_EQ(p.indices(), (std::vector<std::size_t>{0, 64, 129}));
  EXPECT_THROW(p.insert(130), std::out_of_range);
}

TEST(StoppingPolicy, HexMostSignificantStateFirst) {
  EXPECT_EQ(StoppingPolicy(3).hex(), "0x0");
  EXPECT_EQ(StoppingPolicy(3, {0, 1}).hex(), "0x3");
  EXPECT_EQ(StoppingPolicy(5, {4}).hex(), "0x10");
  EXPECT_EQ(StoppingPolicy::full(8).hex(), "0xff");
}

TEST(StoppingPolicy, OrderMatchesMask) {
  for (std::uint64_t a = 0; a < 16; ++a)
    for (std::uint64_t b = 0; b < 16; ++b)
      EXPECT_EQ(StoppingPolicy::from_mask(4, a) < StoppingPolicy::from_mask(4, b), a < b);
}

TEST(StoppingPolicy, UniverseMismatchThrows) {
  EXPECT_THROW((void)(StoppingPolicy(3) | StoppingPolicy(4)), std::invalid_argument);
}

TEST(StoppingPolicy, HashDistinguishesSmallSets) {
  std::unordered_set<StoppingPolicy, dynkin::PolicyHash> seen;
  for (std::uint64_t m = 0; m < 256; ++m) seen.insert(StoppingPolicy::from_mask(8, m));
  EXPECT_EQ(seen.size(), 256u);
}
