#include <gtest/gtest.h>

#include <cmath>

#include "dynkin/dynkin.hpp"
#include "support/oracles.hpp"

using namespace dynkin;

namespace {

// alpha1 = int_0^1 G(s^beta) ds with G the first-passage generating
// function, since 1/(1 + beta k) = int_0^1 s^(beta k) ds.
double alpha1_quadrature(double p, double beta) {
  const double q = 1.0 - p;
  auto G = [&](double s) {
    if (s == 0.0) return 0.0;
    return (1.0 - std::sqrt(std::max(0.0, 1.0 - 4.0 * p * q * s * s))) / (2.0 * p * s);
  };
  // Substitute so the integrand is smooth: s^beta = 1 - v^2 when beta <= 1
  // (then ds = (2v/beta) w^(1/beta - 1) dw), s = 1 - v^2 otherwise.
  const int n = 200000;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double v = static_cast<double>(k) / n;
    const double w = 1.0 - v * v;
    const double weight = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    const double f = beta <= 1.0 ? G(w) * std::pow(w, 1.0 / beta - 1.0) / beta * 2.0 * v
                                 : G(std::pow(w, beta)) * 2.0 * v;
    acc += weight * f;
  }
  return acc / (3.0 * n);
}

}  // namespace

TEST(Negotiation, Alpha1MatchesQuadrature) {
  for (double p : {0.4, 0.5, 0.6, 0.8})
    for (double beta : {0.2, 1.0, 3.0}) {
      auto a = alpha1(p, beta);
      EXPECT_LT(a.tail, 1e-10);
      EXPECT_NEAR(a.value, alpha1_quadrature(p, beta), 1e-8) << "p=" << p << " beta=" << beta;
    }
}

TEST(Negotiation, Alpha1MatchesFirstPassageSimulation) {
  auto a = alpha1(0.6, 1.0);
  auto mc = oracle::first_passage_mc(0.6, 1.0, 200000, 99);
  EXPECT_LE(std::abs(a.value - mc.mean), 3.0 * mc.stderr_);
  EXPECT_NEAR(a.value, 0.240979, 1e-6);
}

TEST(Negotiation, Alpha1Errors) {
  EXPECT_THROW(alpha1(0.0, 1.0), RangeError);
  EXPECT_THROW(alpha1(0.5, 0.0), RangeError);
}

TEST(Negotiation, ClosedForms) {
  EXPECT_NEAR(beta_bar(6, 4, 2), 2.0, 1e-12);
  EXPECT_NEAR(beta_underbar(6, 4, 0.6), 0.3, 1e-12);
  EXPECT_DOUBLE_EQ(threshold(4, 2, 0.5), 4.0 / 3.0);
  auto y = y_star(4, 2, 0.6, 1.0, 20);
  EXPECT_EQ(y.exponent, 1);
  EXPECT_DOUBLE_EQ(y.value, 2.0);
  EXPECT_THROW(y_star(4, 1.1, 0.6, 1.0, 1), RangeError);
  EXPECT_EQ(lattice_label(-3), "u^-3");
}

TEST(Negotiation, ParameterValidation) {
  NegotiationParams p;
  EXPECT_NO_THROW(p.validate());
  auto bad = p;
  bad.N = 4;
  EXPECT_THROW(bad.validate(), RangeError);
  bad = p;
  bad.p = 0.2;  // below 1/(u+1)
  EXPECT_THROW(bad.validate(), RangeError);
  bad = p;
  bad.u = 1.0;
  EXPECT_THROW(bad.validate(), RangeError);
}

TEST(Negotiation, LatticeScenario) {
  NegotiationParams prm;
  prm.m = 3;
  auto s = build_negotiation(prm);
  ASSERT_EQ(s.size(), 7u);
  EXPECT_EQ(s.states().label(0), "u^-3");
  EXPECT_DOUBLE_EQ(s.kernel().prob(6, 6), 1.0);
  EXPECT_DOUBLE_EQ(s.kernel().prob(0, 0), 0.4);
  EXPECT_DOUBLE_EQ(s.kernel().prob(0, 1), 0.6);
  EXPECT_DOUBLE_EQ(s.kernel().prob(3, 2), 0.4);
  const auto& f = s.player(Player::one);
  EXPECT_DOUBLE_EQ(f.f[3], 3.0);  // (4 - 1)^+
  EXPECT_DOUBLE_EQ(f.f[6], 0.0);  // (4 - 8)^+
  EXPECT_DOUBLE_EQ(f.g[0], 6.0);
  EXPECT_DOUBLE_EQ(f.h[3], 4.5);
  EXPECT_TRUE(validate(s, ValidationMode::war_of_attrition).ok());
  EXPECT_EQ(lattice_prefix(3, 1), StoppingPolicy(7, {0, 1, 2, 3, 4}));
  EXPECT_EQ(lattice_interval(3, -1, 9), StoppingPolicy(7, {2, 3, 4, 5, 6}));
}

TEST(Negotiation, SingleFirmBestResponseIsPrefix) {
  NegotiationParams prm;
  for (double beta : {0.5, 2.0}) {
    prm.beta1 = prm.beta2 = beta;
    auto s = build_negotiation(prm);
    const auto y = y_star(prm.K(), prm.u, prm.p, beta, prm.m);
    EXPECT_EQ(gamma_set(s, Player::one, s.empty_policy()), lattice_prefix(prm.m, y.exponent));
  }
}

TEST(Negotiation, EqualImpatienceTerminatesAfterOneRound) {
  NegotiationParams prm;
  auto r = solve_negotiation(prm);
  EXPECT_EQ(r.case_label, "prop-beta1<=beta2");
  ASSERT_EQ(r.outcome.terminal, AlternatingOutcome::Terminal::fixed_point);
  EXPECT_TRUE(r.outcome.S_inf.empty());
  EXPECT_EQ(r.outcome.T_inf, lattice_prefix(prm.m, r.y_star[1].exponent));
  EXPECT_EQ(r.outcome.pairs.size(), 1u);
  EXPECT_TRUE(r.findings.empty());
}

TEST(Negotiation, CoercionReversal) {
  NegotiationParams prm;
  prm.p = 0.4;
  prm.beta1 = 3.0;
  prm.beta2 = 0.1;
  prm.m = 8;
  auto r = solve_negotiation(prm);
  EXPECT_GT(prm.beta1, r.beta_bar);
  EXPECT_LT(prm.beta2, r.beta_underbar);
  EXPECT_EQ(r.case_label, "case3-infinite");
  EXPECT_TRUE(r.finite_lattice_proxy);
  EXPECT_EQ(r.outcome.S_inf, lattice_prefix(prm.m, r.y_star[0].exponent));
  EXPECT_TRUE(r.outcome.T_inf.empty());
  ASSERT_TRUE(r.outcome.classification);
  EXPECT_EQ(r.outcome.classification->verdict, Verdict::sharp_sufficient);
}
