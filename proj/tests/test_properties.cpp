#include <gtest/gtest.h>

#include "support/suites.hpp"

namespace {

void report(const oracle::SuiteResult& r) {
  for (const auto& m : r.messages) ADD_FAILURE() << m;
}

}  // namespace

TEST(Properties, DynamicProgramMatchesPathEnumeration) {
  auto r = oracle::oracle_equivalence(2024, 60);
  EXPECT_EQ(r.violations, 0u);
  report(r);
}

TEST(Properties, MonteCarloAgreesWithDynamicProgram) {
  auto r = oracle::mc_agreement(77, 40, 20000);
  EXPECT_GE(r.inside * 100, r.tuples * 95);
}

TEST(Properties, OperatorsOnRandomScenarios) {
  auto r = oracle::property_suite(31337, 300);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_GT(r.monotone_subset, 100u);
  report(r);
}
