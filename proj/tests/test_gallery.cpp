#include <gtest/gtest.h>

#include "dynkin/dynkin.hpp"

using namespace dynkin;

namespace {

void expect_all_pass(const Fixture& f) {
  for (const auto& r : run_assertions(f)) EXPECT_TRUE(r.passed) << f.name << ": " << r.name << " -- " << r.detail;
}

}  // namespace

TEST(Gallery, Names) {
  EXPECT_EQ(gallery_names(), (std::vector<std::string>{"countable", "extended", "three-state"}));
  EXPECT_THROW(gallery_fixture("nope"), Error);
}

TEST(Gallery, CountableAssertionsHold) { expect_all_pass(example_countable()); }

TEST(Gallery, ExtendedAssertionsHold) {
  auto f = example_extended();
  ASSERT_TRUE(f.limit);
  EXPECT_EQ(f.scenario.size(), 14u);
  expect_all_pass(f);
}

TEST(Gallery, ThreeStateAssertionsHold) {
  auto f = example_three_state();
  auto results = run_assertions(f);
  EXPECT_GE(results.size(), 24u + 4u + 8u);
  expect_all_pass(f);
}

TEST(Gallery, ThreeStateSweepCoversAllPairs) {
  auto f = example_three_state();
  auto all = sweep_pairs(f.scenario);
  EXPECT_EQ(all.size(), 64u);
  for (const auto& [pair, v] : all) EXPECT_EQ(v, Verdict::not_equilibrium);
}

TEST(Gallery, ParameterConstraints) {
  CountableParams c;
  c.M = 1.5;  // 1/M no longer between delta(2) and delta(1)
  EXPECT_THROW(example_countable(c), RangeError);
  ExtendedParams e;
  e.f2z = 2.0;
  EXPECT_THROW(example_extended(e), RangeError);
  ThreeStateParams t;
  t.q_ab = 1.0;
  EXPECT_THROW(example_three_state(t), RangeError);
}

TEST(Gallery, LargerCountableChainKeepsPattern) {
  CountableParams c;
  c.n_states = 16;
  c.pattern_rows = 12;
  auto f = example_countable(c);
  // Exhaustive verification is out of reach at 16 states: only the
  // trajectory is checked here.
  for (const auto& r : run_assertions(f))
    if (r.name == "iterate table S_n, T_n") {
      EXPECT_TRUE(r.passed) << r.detail;
    }
}

TEST(Gallery, FormatPolicy) {
  auto f = example_three_state();
  EXPECT_EQ(format_policy(f.scenario, StoppingPolicy(3)), "∅");
  EXPECT_EQ(format_policy(f.scenario, StoppingPolicy::full(3)), "ALL");
  EXPECT_EQ(format_policy(f.scenario, StoppingPolicy(3, {0, 2})), "a,c");
  EXPECT_EQ(policy_of(f.scenario, {"b"}), StoppingPolicy(3, {1}));
}
