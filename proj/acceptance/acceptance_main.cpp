#include <chrono>
#include <iomanip>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "dynkin/dynkin.hpp"
#include "support/suites.hpp"

using namespace dynkin;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

bool assertions_pass(const Fixture& f, Outcome& o, const std::vector<std::string>& names = {}) {
  bool all = true;
  for (const auto& r : run_assertions(f)) {
    if (!names.empty() && std::find(names.begin(), names.end(), r.name) == names.end()) continue;
    o.require(r.passed, r.name + ": " + r.detail);
    all = all && r.passed;
  }
  return all;
}

Outcome countable() {
  Outcome o;
  const auto t0 = Clock::now();
  auto f = example_countable();
  assertions_pass(f, o);
  const double dt = seconds_since(t0);
  o.require(dt < 10.0, "runtime under 10 s");
  o.detail << "iterate table rows 0..9, terminal (ALL, ∅), sharp-verified over 13 states in " << dt << " s";
  return o;
}

Outcome extended() {
  Outcome o;
  auto f = example_extended();
  const auto& s = f.scenario;
  assertions_pass(f, o);
  const auto [xs, yz] = *f.limit;
  const auto c = verify(s, xs, yz, true);
  o.require(c.verdict == Verdict::soft_not_sharp, "verdict soft-not-sharp");
  o.require(c.witness && c.witness->state == *s.states().find("z"), "witness at z");
  const double eta = s.numerics().comparison_margin;
  if (c.witness) {
    o.require(c.witness->gap >= 10 * eta, "gap at least 10 eta");
    o.detail << "limit (x0..x11, {y,z}) is soft-not-sharp, witness player" << number_of(c.witness->player)
             << "@" << s.states().label(c.witness->state) << " gap " << c.witness->gap << " (10 eta = " << 10 * eta
             << "); Gamma_2(S_inf) = ∅";
  }
  return o;
}

Outcome three_state() {
  Outcome o;
  auto f = example_three_state();
  assertions_pass(f, o);
  const auto all = sweep_pairs(f.scenario);
  std::size_t rejected = 0;
  for (const auto& kv : all) rejected += kv.second == Verdict::not_equilibrium;
  o.require(all.size() == 64 && rejected == 64, "all 64 pairs not-equilibrium");
  o.detail << rejected << "/" << all.size() << " pairs not-equilibrium; supermartingale fails for player 1 at c; "
           << "8 loop tables reproduced";
  return o;
}

Outcome equal_impatience() {
  Outcome o;
  NegotiationParams prm;
  auto r = solve_negotiation(prm);
  const auto& out = r.outcome;
  o.require(out.terminal == AlternatingOutcome::Terminal::fixed_point, "fixed point");
  o.require(out.pairs.size() == 1, "one round");
  o.require(out.S_inf.empty(), "S empty");
  o.require(out.T_inf == lattice_prefix(prm.m, r.y_star[1].exponent), "T = (0, y2*]");
  o.require(r.alpha1[1].tail < 1e-10, "alpha tail below 1e-10");
  const auto mc = oracle::first_passage_mc(prm.p, prm.beta2, 1'000'000, 20240601);
  const double z = std::abs(mc.mean - r.alpha1[1].value) / mc.stderr_;
  o.require(z <= 3.0, "Monte Carlo within 3 standard errors");
  o.detail << "(∅, (0, " << lattice_label(r.y_star[1].exponent) << "]) after one round; alpha1 = "
           << r.alpha1[1].value << " (tail " << r.alpha1[1].tail << "), MC " << mc.mean << " ± " << mc.stderr_
           << " (" << z << " se)";
  return o;
}

Outcome coercion_reversal() {
  Outcome o;
  NegotiationParams prm;
  prm.beta1 = 3.0;
  prm.beta2 = 0.1;
  auto at_06 = solve_negotiation(prm);
  o.require(std::abs(at_06.beta_bar - 2.0) <= 1e-12, "beta_bar = 2");
  o.require(std::abs(at_06.beta_underbar - 0.3) <= 1e-12, "beta_underbar = 0.3");
  // At p = 0.6 both thresholds fall between u^0 and u^1 for every beta,
  // so y1* = y2* and the first round already settles the game.
  o.require(at_06.y_star[0].exponent == at_06.y_star[1].exponent, "y1* = y2* at p = 0.6");
  o.require(at_06.case_label == "case1", "case1 at p = 0.6");

  prm.p = 0.4;
  auto r = solve_negotiation(prm);
  o.require(prm.beta1 > r.beta_bar && prm.beta2 < r.beta_underbar, "beta1 > beta_bar, beta2 < beta_underbar");
  o.require(r.case_label == "case3-infinite" && r.finite_lattice_proxy, "case3-infinite limit form");
  o.require(r.outcome.S_inf == lattice_prefix(prm.m, r.y_star[0].exponent), "S = (0, y1*]");
  o.require(r.outcome.T_inf.empty(), "T empty");
  o.require(r.outcome.classification && r.outcome.classification->verdict == Verdict::sharp_sufficient,
            "sharp-sufficient");
  o.detail << std::setprecision(17) << "beta_bar = " << at_06.beta_bar
           << ", beta_underbar = " << at_06.beta_underbar << std::setprecision(6) << "; p=0.6 gives y1* = y2* = " << lattice_label(at_06.y_star[0].exponent) << " and case1; p=0.4 "
           << "(beta_underbar = " << r.beta_underbar << ") ends at ((0, " << lattice_label(r.y_star[0].exponent)
           << "], ∅) after " << r.outcome.pairs.size() << " rounds (" << r.case_label << "), "
           << (r.outcome.classification ? to_string(r.outcome.classification->verdict) : "unclassified");
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  auto e = oracle::oracle_equivalence(2025, 200);
  auto mc = oracle::mc_agreement(4242, 100, 100000);
  o.require(e.violations == 0, "dp equals enumeration to 1e-12");
  for (const auto& m : e.messages) o.detail << " " << m;
  o.require(mc.inside * 100 >= mc.tuples * 95, "MC agreement on at least 95%");
  o.detail << e.checks << " dp/enumeration comparisons on " << e.scenarios << " scenarios, " << e.violations
           << " violations; MC within 3 se + tail on " << mc.inside << "/" << mc.tuples;
  return o;
}

Outcome properties() {
  Outcome o;
  auto r = oracle::property_suite(1234, 1000);
  o.require(r.violations == 0, "zero violations");
  for (const auto& m : r.messages) o.detail << " " << m;
  o.detail << r.checks << " checks on " << r.scenarios << " scenarios (" << r.monotone_subset
           << " in the monotone subset), " << r.violations << " violations";
  return o;
}

Outcome lattice_grid() {
  Outcome o;
  const auto t0 = Clock::now();
  int points = 0;
  for (double p : {0.4, 0.6})
    for (double beta : {0.2, 0.5, 1.0, 2.0}) {
      NegotiationParams prm;
      prm.p = p;
      prm.beta1 = prm.beta2 = beta;
      auto s = build_negotiation(prm);
      for (Player i : {Player::one, Player::two}) {
        const auto y = y_star(prm.K(), prm.u, p, beta, prm.m);
        const auto G = gamma_set(s, i, s.empty_policy());
        std::ostringstream tag;
        tag << "p=" << p << " beta=" << beta << " player" << number_of(i);
        o.require(G == lattice_prefix(prm.m, y.exponent), tag.str() + " gamma = (0, y*]");
        o.require(!s.splits_boundary(G), tag.str() + " boundary flag");
        ++points;
      }
    }
  const double dt = seconds_since(t0);
  o.require(dt < 60.0, "runtime under 60 s");
  o.detail << points << " grid evaluations match (0, y*] without boundary flags in " << dt << " s";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"countable chain iterate table and sharp limit", countable},
      {"extended chain soft-not-sharp limit", extended},
      {"three-state model without soft equilibria", three_state},
      {"negotiation with equal impatience", equal_impatience},
      {"negotiation coercion reversal", coercion_reversal},
      {"oracle equivalence", oracle_equivalence},
      {"property suite", properties},
      {"single-firm thresholds on the lattice", lattice_grid},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << k + 1 << " " << criteria[k].first << ": " << o.detail.str()
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
