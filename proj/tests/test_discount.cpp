#include <gtest/gtest.h>

#include <cmath>

#include "dynkin/discount.hpp"
#include "dynkin/scenario.hpp"

using dynkin::DiscountFunction;

TEST(Discount, ClosedForms) {
  auto e = DiscountFunction::exponential(0.5);
  auto h = DiscountFunction::hyperbolic(2.0);
  auto g = DiscountFunction::generalized_hyperbolic(3.0, 0.5);
  EXPECT_DOUBLE_EQ(e(0), 1.0);
  EXPECT_DOUBLE_EQ(e(4), std::exp(-2.0));
  EXPECT_DOUBLE_EQ(h(3), 1.0 / 7.0);
  EXPECT_DOUBLE_EQ(g(2), std::pow(2.0, -6.0));
}

TEST(Discount, TableLookupAndDomain) {
  auto t = DiscountFunction::table({1.0, 0.5, 0.2});
  EXPECT_DOUBLE_EQ(t(1), 0.5);
  EXPECT_EQ(t.domain_limit(), 2u);
  EXPECT_THROW(t(3), dynkin::Error);
  EXPECT_THROW(DiscountFunction::table({}), dynkin::Error);
}

TEST(Discount, RejectsBadParameters) {
  EXPECT_THROW(DiscountFunction::hyperbolic(0.0), dynkin::Error);
  EXPECT_THROW(DiscountFunction::exponential(-1.0), dynkin::Error);
  EXPECT_THROW(DiscountFunction::generalized_hyperbolic(1.0, 0.0), dynkin::Error);
  EXPECT_THROW(DiscountFunction::hyperbolic(std::nan("")), dynkin::Error);
}

TEST(Discount, Tabulate) {
  auto h = DiscountFunction::hyperbolic(1.0);
  auto v = h.tabulate(4);
  ASSERT_EQ(v.size(), 5u);
  for (std::size_t t = 0; t <= 4; ++t) EXPECT_DOUBLE_EQ(v[t], 1.0 / (1.0 + t));
}

TEST(Discount, SupStepRatio) {
  EXPECT_NEAR(DiscountFunction::exponential(1.0).sup_step_ratio().value, std::exp(-1.0), 1e-15);
  EXPECT_TRUE(DiscountFunction::exponential(1.0).sup_step_ratio().attained);
  auto h = DiscountFunction::hyperbolic(1.0).sup_step_ratio();
  EXPECT_DOUBLE_EQ(h.value, 1.0);
  EXPECT_FALSE(h.attained);
  EXPECT_DOUBLE_EQ(DiscountFunction::table({1.0, 0.5, 0.4}).sup_step_ratio().value, 0.8);
}

TEST(Discount, DecreasingImpatience) {
  EXPECT_LE(dynkin::decreasing_impatience_residual(DiscountFunction::hyperbolic(1.0), 50), 1e-15);
  EXPECT_LE(dynkin::decreasing_impatience_residual(DiscountFunction::exponential(0.3), 50), 1e-15);
  EXPECT_LE(dynkin::decreasing_impatience_residual(DiscountFunction::generalized_hyperbolic(2.0, 0.7), 50),
            1e-15);
  // delta(1)^2 = 0.81 > delta(2) = 0.5: increasing impatience.
  auto bad = DiscountFunction::table({1.0, 0.9, 0.5, 0.4});
  EXPECT_GT(dynkin::decreasing_impatience_residual(bad, 3), 0.3);
}
