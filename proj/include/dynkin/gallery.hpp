#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dynkin/equilibrium.hpp"

namespace dynkin {

inline StoppingPolicy policy_of(const Scenario& s, const std::vector<std::string>& labels) {
  StoppingPolicy p(s.size());
  for (const auto& l : labels) {
    auto idx = s.states().find(l);
    if (!idx) throw Error("unknown state label '" + l + "'");
    p.insert(*idx);
  }
  return p;
}

/// "ALL", "∅", or comma-separated labels in state order.
inline std::string format_policy(const Scenario& s, const StoppingPolicy& p) {
  if (p.empty()) return "∅";
  if (p.is_full()) return "ALL";
  std::string out;
  for (auto i : p.indices()) {
    if (!out.empty()) out += ",";
    out += s.states().label(i);
  }
  return out;
}

/// One machine-checkable claim about a fixture.
struct Expectation {
  enum class Op {
    gamma,                // gamma(player, args[0]) == expected[0]
    enumerate_intra,      // enumerate_intra(player, args[0]) == expected
    enumerate_contains,   // enumerate_intra(player, args[0]) contains every expected
    theta,                // theta(player, args[0], args[1]) == expected[0]
    theta_differs,        // theta(player, args[0], args[1]) != args[0]
    trajectory,           // alternate(args[0]) nodes start with expected
    cycle,                // alternate(args[0]) cycles; nodes plus the repeat == expected
    terminal,             // alternate(args[0]) reaches the fixed point (expected[0], expected[1])
    verify,               // verify(args[0], args[1]) has `verdict` (and witness, gap)
    supermartingale_fails,// check_supermartingale(player) fails at `state`
    no_soft_pairs,        // every (S, T) pair is not-equilibrium
    stop_beats_constrained,// immediate > constrained(player, args[0], args[1]) at `state`
    dominance_gap,        // U(player, args[1], args[2]) - U(player, args[0], args[2]) >= min_gap at `state`
  };

  std::string name;
  Op op;
  Player player = Player::one;
  std::vector<StoppingPolicy> args;
  std::vector<StoppingPolicy> expected;
  std::optional<Verdict> verdict;
  bool exhaustive = false;
  std::optional<std::size_t> state;
  double min_gap = 0.0;
};

struct Fixture {
  std::string name;
  std::string description;
  Scenario scenario;
  std::vector<Expectation> expected;
  /// Limit pair of the iterate pattern, when the paper's limit is not
  /// itself reached on the truncated chain.
  std::optional<std::pair<StoppingPolicy, StoppingPolicy>> limit;
};

struct AssertionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string list_policies(const Scenario& s, const std::vector<StoppingPolicy>& ps) {
  std::string out = "[";
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (k) out += " | ";
    out += format_policy(s, ps[k]);
  }
  return out + "]";
}

inline AssertionResult evaluate(const Scenario& s, const Expectation& e) {
  AssertionResult r{e.name, false, ""};
  using Op = Expectation::Op;
  switch (e.op) {
    case Op::gamma: {
      const auto got = gamma_set(s, e.player, e.args.at(0));
      r.passed = got == e.expected.at(0);
      r.detail = "got " + format_policy(s, got);
      break;
    }
    case Op::enumerate_intra: {
      const auto got = enumerate_intra(s, e.player, e.args.at(0));
      r.passed = got == e.expected;
      r.detail = "got " + list_policies(s, got);
      break;
    }
    case Op::enumerate_contains: {
      const auto got = enumerate_intra(s, e.player, e.args.at(0));
      r.passed = std::all_of(e.expected.begin(), e.expected.end(), [&](const StoppingPolicy& p) {
        return std::find(got.begin(), got.end(), p) != got.end();
      });
      r.detail = "got " + list_policies(s, got);
      break;
    }
    case Op::theta: {
      const auto got = theta(s, e.player, e.args.at(0), e.args.at(1));
      r.passed = got == e.expected.at(0);
      r.detail = "got " + format_policy(s, got);
      break;
    }
    case Op::theta_differs: {
      const auto got = theta(s, e.player, e.args.at(0), e.args.at(1));
      r.passed = got != e.args.at(0);
      r.detail = "got " + format_policy(s, got);
      break;
    }
    case Op::trajectory: {
      AlternateOptions opt;
      opt.classify = false;
      const auto out = alternate(s, e.args.at(0), opt);
      r.passed = out.nodes.size() >= e.expected.size() &&
                 std::equal(e.expected.begin(), e.expected.end(), out.nodes.begin());
      r.detail = "got " + list_policies(s, out.nodes);
      break;
    }
    case Op::cycle: {
      AlternateOptions opt;
      opt.classify = false;
      const auto out = alternate(s, e.args.at(0), opt);
      auto seq = out.nodes;
      seq.push_back(out.nodes[out.cycle_start]);
      r.passed = out.terminal == AlternatingOutcome::Terminal::cycle && seq == e.expected;
      r.detail = "got " + list_policies(s, seq);
      break;
    }
    case Op::terminal: {
      AlternateOptions opt;
      opt.exhaustive = e.exhaustive;
      opt.classify = e.verdict.has_value();
      const auto out = alternate(s, e.args.at(0), opt);
      r.passed = out.terminal == AlternatingOutcome::Terminal::fixed_point &&
                 out.S_inf == e.expected.at(0) && out.T_inf == e.expected.at(1);
      r.detail = "terminal S=" + format_policy(s, out.S_inf) + " T=" + format_policy(s, out.T_inf);
      if (e.verdict) {
        r.passed = r.passed && out.classification && out.classification->verdict == *e.verdict;
        if (out.classification) r.detail += " verdict=" + to_string(out.classification->verdict);
      }
      break;
    }
    case Op::verify: {
      const auto c = verify(s, e.args.at(0), e.args.at(1), e.exhaustive);
      r.passed = e.verdict && c.verdict == *e.verdict;
      r.detail = "verdict=" + to_string(c.verdict);
      if (c.witness) {
        r.detail += " witness=player" + std::to_string(number_of(c.witness->player)) + "@" +
                    s.states().label(c.witness->state);
        std::ostringstream gap;
        gap << c.witness->gap;
        r.detail += " gap=" + gap.str();
      }
      if (e.state) {
        r.passed = r.passed && c.witness && c.witness->state == *e.state &&
                   c.witness->player == e.player && c.witness->gap >= e.min_gap;
      }
      break;
    }
    case Op::supermartingale_fails: {
      const auto rep = check_supermartingale(s, e.player);
      r.passed = !rep.passed() && rep.fails_at(e.state.value());
      r.detail = rep.passed() ? "condition holds" : "fails";
      break;
    }
    case Op::no_soft_pairs: {
      const auto all = sweep_pairs(s);
      const auto soft = std::count_if(all.begin(), all.end(),
                                      [](const auto& kv) { return is_soft(kv.second); });
      r.passed = soft == 0;
      r.detail = "pairs: " + std::to_string(all.size()) + ", soft equilibria: " + std::to_string(soft);
      break;
    }
    case Op::stop_beats_constrained: {
      const auto x = e.state.value();
      const double V = constrained_value(s, e.player, e.args.at(0), e.args.at(1), x);
      const double now = immediate_value(s, e.player, e.args.at(1), x);
      r.passed = now > V + s.numerics().comparison_margin;
      std::ostringstream d;
      d << "immediate " << now << " vs constrained " << V;
      r.detail = d.str();
      break;
    }
    case Op::dominance_gap: {
      const auto x = e.state.value();
      const double mine = equilibrium_value(s, e.player, e.args.at(0), e.args.at(2), x);
      const double rival = equilibrium_value(s, e.player, e.args.at(1), e.args.at(2), x);
      r.passed = rival - mine >= e.min_gap;
      std::ostringstream d;
      d << "gap " << rival - mine;
      r.detail = d.str();
      break;
    }
  }
  return r;
}

}  // namespace detail

inline std::vector<AssertionResult> run_assertions(const Fixture& f) {
  std::vector<AssertionResult> out;
  for (const auto& e : f.expected) {
    try {
      out.push_back(detail::evaluate(f.scenario, e));
    } catch (const Error& err) {
      out.push_back({e.name, false, std::string("error: ") + err.what()});
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Countable chain with a sharp limit

struct CountableParams {
  double eps = 0.05;
  double L = 1.5;
  double M = 2.5;
  double beta1 = 1.0;
  double beta2 = 1.0;
  int n_states = 13;
  int horizon = 1000;
  /// Pattern rows checked against the iterate table.
  int pattern_rows = 10;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw RangeError("fixture constraint violated: " + what);
}

/// x_{n+1} -> x_n; x_0 stays w.p. 1-eps and moves to x_1 w.p. eps.
inline std::vector<std::vector<double>> countable_rows(std::size_t nx, std::size_t total, double eps) {
  std::vector<std::vector<double>> rows(total, std::vector<double>(total, 0.0));
  rows[0][0] = 1.0 - eps;
  rows[0][1] = eps;
  for (std::size_t n = 1; n < nx; ++n) rows[n][n - 1] = 1.0;
  return rows;
}

inline std::vector<double> midpoint(const std::vector<double>& f, const std::vector<double>& g) {
  std::vector<double> h(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) h[i] = 0.5 * (f[i] + g[i]);
  return h;
}

inline StoppingPolicy range_policy(std::size_t universe, std::size_t lo, std::size_t hi) {
  StoppingPolicy p(universe);
  for (std::size_t i = lo; i < hi && i < universe; ++i) p.insert(i);
  return p;
}

}  // namespace detail

inline Fixture example_countable(const CountableParams& prm = {}) {
  using detail::require;
  const auto d2 = DiscountFunction::hyperbolic(prm.beta2);
  require(prm.n_states >= 6, "n_states >= 6");
  require(prm.eps > 0 && prm.eps < 1, "eps in (0,1)");
  require(prm.L > 1, "L > 1");
  require(prm.M > 1, "M > 1");
  require(d2(2) < 1.0 / prm.M && 1.0 / prm.M < d2(1), "delta2(2) < 1/M < delta2(1)");

  const auto n = static_cast<std::size_t>(prm.n_states);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i));
  std::array<PlayerSpec, 2> pl;
  pl[0].f.assign(n, 1.0);
  pl[0].g.assign(n, prm.L);
  pl[1].f.assign(n, 1.0);
  pl[1].f[0] = 0.0;
  pl[1].g.assign(n, prm.M);
  for (auto& p : pl) p.h = detail::midpoint(p.f, p.g);
  pl[0].discount = DiscountFunction::hyperbolic(prm.beta1);
  pl[1].discount = d2;
  NumericsConfig num;
  num.horizon = prm.horizon;
  const StoppingPolicy buffer = detail::range_policy(n, n - 3, n);
  Scenario s(StateSpace(labels), TransitionKernel::from_dense(detail::countable_rows(n, n, prm.eps)),
             pl, num, {buffer});

  Fixture f{"countable", "countable chain, iterates climb to a sharp limit", s, {}, std::nullopt};
  const StoppingPolicy none(n), all = StoppingPolicy::full(n);
  const auto T0 = detail::range_policy(n, 1, n);

  // Smallness of eps: player 1 strictly prefers stopping at x0 against T0.
  {
    auto e = Expectation{"eps small: player 1 stops at x0 against T0",
                         Expectation::Op::stop_beats_constrained};
    e.player = Player::one;
    e.args = {none, T0};
    e.state = 0;
    require(detail::evaluate(s, e).passed, "eps too large for player 1 to stop at x0");
    f.expected.push_back(e);
  }

  std::vector<StoppingPolicy> nodes;
  const int rows = std::min(prm.pattern_rows, prm.n_states - 1);
  for (int k = 0; k < rows; ++k) {
    nodes.push_back(detail::range_policy(n, 0, static_cast<std::size_t>(k)));
    nodes.push_back(detail::range_policy(n, static_cast<std::size_t>(k) + 1, n));
  }
  {
    Expectation e{"iterate table S_n, T_n", Expectation::Op::trajectory};
    e.args = {none};
    e.expected = nodes;
    f.expected.push_back(e);
  }
  {
    Expectation e{"phi of player 2 from empty against S0", Expectation::Op::gamma};
    e.player = Player::two;
    e.args = {none};
    e.expected = {T0};
    f.expected.push_back(e);
  }
  {
    Expectation e{"Gamma_2(X) is empty", Expectation::Op::gamma};
    e.player = Player::two;
    e.args = {all};
    e.expected = {none};
    f.expected.push_back(e);
  }
  {
    Expectation e{"terminal (X, empty), sharp", Expectation::Op::terminal};
    e.args = {none};
    e.expected = {all, none};
    e.verdict = Verdict::sharp_verified;
    e.exhaustive = true;
    f.expected.push_back(e);
  }
  return f;
}

// --------------------------------------------------------------------------
// Extended chain whose limit is soft but not sharp

struct ExtendedParams {
  double eps = 0.05;
  double L = 1.5;
  double M = 2.5;
  double beta1 = 1.0;
  double beta2 = 1.0;
  double f2z = 0.7;
  /// Weights of y -> x_n; empty means proportional to 2^-n.
  std::vector<double> pdist;
  /// Number of x-states; y and z are added on top.
  int n_x = 12;
  int horizon = 1000;
  int pattern_rows = 10;
};

inline Fixture example_extended(const ExtendedParams& prm = {}) {
  using detail::require;
  const auto d2 = DiscountFunction::hyperbolic(prm.beta2);
  require(prm.n_x >= 6, "n_x >= 6");
  require(prm.eps > 0 && prm.eps < 1, "eps in (0,1)");
  require(prm.L > 1 && prm.M > 1, "L > 1 and M > 1");
  require(d2(2) < 1.0 / prm.M && 1.0 / prm.M < d2(1), "delta2(2) < 1/M < delta2(1)");
  require(d2(1) * d2(1) < d2(2), "delta2(1)^2 < delta2(2)");
  const double lo = std::max(prm.M * d2(1) * d2(1), d2(2)), hi = prm.M * d2(2);
  require(prm.f2z > lo && prm.f2z < hi, "f2(z) inside (M delta2(1)^2 v delta2(2), M delta2(2))");

  const auto nx = static_cast<std::size_t>(prm.n_x);
  const std::size_t n = nx + 2, y = nx, z = nx + 1;
  std::vector<double> pd = prm.pdist;
  if (pd.empty())
    for (std::size_t k = 0; k < nx; ++k) pd.push_back(std::ldexp(1.0, -static_cast<int>(k)));
  require(pd.size() == nx, "pdist has one weight per x-state");
  double total = 0.0;
  for (double w : pd) {
    require(w > 0, "pdist weights positive");
    total += w;
  }

  std::vector<std::string> labels;
  for (std::size_t i = 0; i < nx; ++i) labels.push_back("x" + std::to_string(i));
  labels.push_back("y");
  labels.push_back("z");
  auto rows = detail::countable_rows(nx, n, prm.eps);
  for (std::size_t k = 0; k < nx; ++k) rows[y][k] = pd[k] / total;
  rows[z][y] = 1.0;

  std::array<PlayerSpec, 2> pl;
  pl[0].f.assign(n, 1.0);
  pl[0].g.assign(n, prm.L);
  pl[1].f.assign(n, 1.0);
  pl[1].f[0] = 0.0;
  pl[1].f[y] = prm.M * d2(1);
  pl[1].f[z] = prm.f2z;
  pl[1].g.assign(n, prm.M);
  for (auto& p : pl) p.h = detail::midpoint(p.f, p.g);
  pl[0].discount = DiscountFunction::hyperbolic(prm.beta1);
  pl[1].discount = d2;
  NumericsConfig num;
  num.horizon = prm.horizon;
  const StoppingPolicy buffer = detail::range_policy(n, nx - 3, nx);
  Scenario s(StateSpace(labels), TransitionKernel::from_dense(rows), pl, num, {buffer});

  Fixture f{"extended", "extended chain, limit is soft but not sharp", s, {}, std::nullopt};
  const StoppingPolicy none(n);
  StoppingPolicy yz(n, {y, z});
  const auto xs = detail::range_policy(n, 0, nx);

  std::vector<StoppingPolicy> nodes;
  const int rows_checked = std::min(prm.pattern_rows, prm.n_x);
  for (int k = 0; k < rows_checked; ++k) {
    nodes.push_back(detail::range_policy(n, 0, static_cast<std::size_t>(k)));
    nodes.push_back(detail::range_policy(n, static_cast<std::size_t>(k) + 1, nx) | yz);
  }
  if (rows_checked == prm.n_x) nodes.push_back(xs);
  {
    Expectation e{"iterate table S_n, T_n", Expectation::Op::trajectory};
    e.args = {none};
    e.expected = nodes;
    f.expected.push_back(e);
  }
  // On the closed chain the limit pair appears as (S_N, T_{N-1}).
  {
    std::vector<StoppingPolicy> full_pattern;
    for (std::size_t k = 0; k < nx; ++k) {
      full_pattern.push_back(detail::range_policy(n, 0, k));
      full_pattern.push_back(detail::range_policy(n, k + 1, nx) | yz);
    }
    full_pattern.push_back(xs);
    Expectation e{"limit pair (x-states, {y,z}) reached by the pattern", Expectation::Op::trajectory};
    e.args = {none};
    e.expected = full_pattern;
    f.expected.push_back(e);
  }
  f.limit = std::pair{xs, yz};
  {
    Expectation e{"Gamma_2(S_inf) is empty", Expectation::Op::gamma};
    e.player = Player::two;
    e.args = {xs};
    e.expected = {none};
    f.expected.push_back(e);
  }
  {
    Expectation e{"{y,z} and empty both intra-personal for player 2", Expectation::Op::enumerate_contains};
    e.player = Player::two;
    e.args = {xs};
    e.expected = {none, yz};
    f.expected.push_back(e);
  }
  {
    Expectation e{"empty dominates {y,z} at z", Expectation::Op::dominance_gap};
    e.player = Player::two;
    e.args = {yz, none, xs};
    e.state = z;
    e.min_gap = 10.0 * num.comparison_margin;
    f.expected.push_back(e);
  }
  {
    Expectation e{"limit pair is soft but not sharp", Expectation::Op::verify};
    e.args = {xs, yz};
    e.verdict = Verdict::soft_not_sharp;
    e.exhaustive = true;
    e.player = Player::two;
    e.state = z;
    e.min_gap = 10.0 * num.comparison_margin;
    f.expected.push_back(e);
  }
  return f;
}

// --------------------------------------------------------------------------
// Three-state model without soft equilibria

struct ThreeStateParams {
  double M = 100.0;
  /// a -> a with this probability, a -> b otherwise; a never moves to c.
  double q_ab = 0.5;
  std::array<double, 3> row_b{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::array<double, 3> row_c{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double beta = 1.0;
  int horizon = 400;
};

inline Fixture example_three_state(const ThreeStateParams& prm = {}) {
  using detail::require;
  require(prm.q_ab > 0 && prm.q_ab < 1, "q_ab in (0,1)");
  for (const auto* row : {&prm.row_b, &prm.row_c})
    for (double v : *row) require(v > 0, "rows of b and c strictly positive");
  const double M = prm.M;
  std::array<PlayerSpec, 2> pl;
  pl[0].f = {1, M, 1};
  pl[0].g = {M * M, M + 1, 2};
  pl[1].f = {M, 1, M * M};
  pl[1].g = {M + 1, 2, M * M + 1};
  for (auto& p : pl) {
    p.h = detail::midpoint(p.f, p.g);
    p.discount = DiscountFunction::hyperbolic(prm.beta);
  }
  std::vector<std::vector<double>> rows = {
      {prm.q_ab, 1.0 - prm.q_ab, 0.0},
      {prm.row_b[0], prm.row_b[1], prm.row_b[2]},
      {prm.row_c[0], prm.row_c[1], prm.row_c[2]},
  };
  NumericsConfig num;
  num.horizon = prm.horizon;
  Scenario s(StateSpace({"a", "b", "c"}), TransitionKernel::from_dense(rows), pl, num);

  Fixture f{"three-state", "three-state model without soft equilibria", s, {}, std::nullopt};
  auto P = [&](std::vector<std::string> l) { return policy_of(s, l); };
  const auto E = StoppingPolicy(3), X = StoppingPolicy::full(3);

  struct Identity {
    Player player;
    StoppingPolicy other;
    std::vector<StoppingPolicy> equilibria;
  };
  const std::vector<Identity> ids = {
      {Player::two, X, {E}},
      {Player::two, P({"a", "c"}), {E}},
      {Player::two, P({"c"}), {E}},
      {Player::one, E, {P({"b"})}},
      {Player::two, P({"a", "b"}), {P({"c"})}},
      {Player::two, P({"a"}), {P({"c"})}},
      {Player::two, E, {P({"c"})}},
      {Player::one, P({"c"}), {P({"b"})}},
      {Player::two, P({"b", "c"}), {P({"a"})}},
      {Player::one, P({"a"}), {E}},
      {Player::two, P({"b"}), {P({"a", "c"})}},
      {Player::one, P({"a", "c"}), {E}},
  };
  for (const auto& id : ids) {
    Expectation e{"E_" + std::to_string(number_of(id.player)) + "^{" + format_policy(s, id.other) +
                      "} = " + detail::list_policies(s, id.equilibria),
                  Expectation::Op::enumerate_intra};
    e.player = id.player;
    e.args = {id.other};
    e.expected = id.equilibria;
    f.expected.push_back(e);
    Expectation g{"Gamma_" + std::to_string(number_of(id.player)) + "(" +
                      format_policy(s, id.other) + ") = " + format_policy(s, id.equilibria[0]),
                  Expectation::Op::gamma};
    g.player = id.player;
    g.args = {id.other};
    g.expected = {id.equilibria[0]};
    f.expected.push_back(g);
  }
  for (const auto& e : f.expected) {
    if (!detail::evaluate(s, e).passed)
      throw RangeError("three-state identity '" + e.name + "' fails at M=" + std::to_string(M) +
                       "; choose a larger M");
  }

  {
    Expectation e{"theta_1 keeps {b} against {c}", Expectation::Op::theta};
    e.args = {P({"b"}), P({"c"})};
    e.expected = {P({"b"})};
    f.expected.push_back(e);
  }
  {
    Expectation e{"theta_1 moves {a,b} against {c}", Expectation::Op::theta_differs};
    e.args = {P({"a", "b"}), P({"c"})};
    f.expected.push_back(e);
  }
  {
    Expectation e{"supermartingale fails for player 1 at c", Expectation::Op::supermartingale_fails};
    e.state = 2;
    f.expected.push_back(e);
  }
  {
    Expectation e{"no soft equilibrium among all pairs", Expectation::Op::no_soft_pairs};
    f.expected.push_back(e);
  }

  const std::vector<std::vector<std::vector<std::string>>> loops = {
      {{}, {"c"}, {"b"}, {"a", "c"}, {}},
      {{"a"}, {"c"}, {"b"}, {"a", "c"}, {}, {"c"}},
      {{"b"}, {"a", "c"}, {}, {"c"}, {"b"}},
      {{"c"}, {}, {"b"}, {"a", "c"}, {}, {"c"}, {"b"}},
      {{"a", "b"}, {"c"}, {"b"}, {"a", "c"}, {}, {"c"}},
      {{"a", "c"}, {}, {"b"}, {"a", "c"}, {}, {"c"}, {"b"}},
      {{"b", "c"}, {"a"}, {}, {"c"}, {"b"}, {"a", "c"}, {}},
      {{"a", "b", "c"}, {}, {"b"}, {"a", "c"}, {}, {"c"}, {"b"}},
  };
  for (std::size_t k = 0; k < loops.size(); ++k) {
    Expectation e{"loop " + std::to_string(k + 1), Expectation::Op::cycle};
    for (const auto& node : loops[k]) e.expected.push_back(P(node));
    e.args = {e.expected.front()};
    f.expected.push_back(e);
  }
  return f;
}

inline std::vector<std::string> gallery_names() { return {"countable", "extended", "three-state"}; }

inline Fixture gallery_fixture(const std::string& name) {
  if (name == "countable") return example_countable();
  if (name == "extended") return example_extended();
  if (name == "three-state") return example_three_state();
  throw Error("unknown gallery fixture '" + name + "'");
}

}  // namespace dynkin
