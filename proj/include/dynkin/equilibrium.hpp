#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "dynkin/detail/parallel.hpp"
#include "dynkin/valuation.hpp"

namespace dynkin {

// Throughout, `own` is the policy of player i and `other` the policy of
// her opponent, so for player 2 the roles of S and T are swapped.

/// Improving operator: keep x in `own` unless stopping is worse by more
/// than the margin; add x outside `own` only on a strict gain.
inline StoppingPolicy theta(const Scenario& s, Player i, const StoppingPolicy& own,
                            const StoppingPolicy& other) {
  const double eta = s.numerics().comparison_margin;
  const auto J = joint_table(s, i, own, other, StartMode::hitting);
  StoppingPolicy out(s.size());
  for (std::size_t x = 0; x < s.size(); ++x) {
    const double now = immediate_value(s, i, other, x);
    if (own.contains(x) ? now >= J[x] - eta : now > J[x] + eta) out.insert(x);
  }
  return out;
}

inline bool is_intra_equilibrium(const Scenario& s, Player i, const StoppingPolicy& own,
                                 const StoppingPolicy& other) {
  return theta(s, i, own, other) == own;
}

inline StoppingPolicy phi(const Scenario& s, Player i, const StoppingPolicy& own,
                          const StoppingPolicy& other) {
  const double eta = s.numerics().comparison_margin;
  const auto V = constrained_table(s, i, own, other);
  StoppingPolicy out = own;
  for (std::size_t x = 0; x < s.size(); ++x)
    if (!own.contains(x) && immediate_value(s, i, other, x) > V[x] + eta) out.insert(x);
  return out;
}

inline void require_h_le_g(const Scenario& s, Player i) {
  const auto& p = s.player(i);
  for (std::size_t x = 0; x < s.size(); ++x)
    if (p.h[x] > p.g[x])
      throw OrderingViolation("player " + std::to_string(number_of(i)) + ": h > g at state '" +
                              s.states().label(x) + "'");
}

struct GammaTrace {
  /// S^1, S^2, ..., ending with the first repeat.
  std::vector<StoppingPolicy> steps;
  StoppingPolicy fixed_point;
  std::size_t iterations = 0;
};

/// Least fixed point of phi from the empty policy.
inline GammaTrace gamma(const Scenario& s, Player i, const StoppingPolicy& other) {
  require_h_le_g(s, i);
  GammaTrace tr;
  StoppingPolicy cur(s.size());
  for (;;) {
    auto next = phi(s, i, cur, other);
    tr.steps.push_back(next);
    if (next == cur) break;
    cur = std::move(next);
  }
  tr.fixed_point = cur;
  tr.iterations = tr.steps.size();
  return tr;
}

inline StoppingPolicy gamma_set(const Scenario& s, Player i, const StoppingPolicy& other) {
  return gamma(s, i, other).fixed_point;
}

// --------------------------------------------------------------------------
// Classification

enum class Verdict { not_equilibrium, soft, sharp_sufficient, sharp_verified, soft_not_sharp };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::not_equilibrium: return "not-equilibrium";
    case Verdict::soft: return "soft";
    case Verdict::sharp_sufficient: return "sharp-sufficient";
    case Verdict::sharp_verified: return "sharp-verified";
    case Verdict::soft_not_sharp: return "soft-not-sharp";
  }
  return "?";
}

inline bool is_sharp(Verdict v) {
  return v == Verdict::sharp_sufficient || v == Verdict::sharp_verified;
}
inline bool is_soft(Verdict v) { return v != Verdict::not_equilibrium; }

struct Witness {
  Player player;
  std::size_t state;
  /// For dominance failures: the competing equilibrium and the value gap.
  std::optional<StoppingPolicy> rival;
  double gap = 0.0;
};

struct Classification {
  Verdict verdict = Verdict::not_equilibrium;
  /// Gamma_1(T) = S and Gamma_2(S) = T.
  bool sufficient = false;
  bool exhaustive = false;
  std::optional<Witness> witness;
  /// Either policy splits a truncation boundary group.
  bool boundary_flag = false;
};

inline constexpr std::size_t kExhaustiveStateCap = 14;

/// Every own policy that is a fixed point of theta, in increasing mask order.
inline std::vector<StoppingPolicy> enumerate_intra(const Scenario& s, Player i,
                                                   const StoppingPolicy& other) {
  const std::size_t n = s.size();
  if (n > kExhaustiveStateCap)
    throw SizeGuard("exhaustive enumeration needs at most " + std::to_string(kExhaustiveStateCap) +
                    " states, scenario has " + std::to_string(n));
  const std::size_t total = std::size_t{1} << n;
  auto fixed = detail::parallel_map<char>(total, [&](std::size_t mask) -> char {
    const auto S = StoppingPolicy::from_mask(n, mask);
    return is_intra_equilibrium(s, i, S, other) ? 1 : 0;
  });
  std::vector<StoppingPolicy> out;
  for (std::size_t mask = 0; mask < total; ++mask)
    if (fixed[mask]) out.push_back(StoppingPolicy::from_mask(n, mask));
  return out;
}

namespace detail {

/// Largest U-advantage of any rival equilibrium over `own`, or nullopt if
/// `own` dominates all of them within the margin.
inline std::optional<Witness> dominance_failure(const Scenario& s, Player i,
                                                const StoppingPolicy& own,
                                                const StoppingPolicy& other) {
  const double eta = s.numerics().comparison_margin;
  const auto mine = equilibrium_table(s, i, own, other);
  std::optional<Witness> worst;
  for (const auto& R : enumerate_intra(s, i, other)) {
    if (R == own) continue;
    const auto theirs = equilibrium_table(s, i, R, other);
    for (std::size_t x = 0; x < s.size(); ++x) {
      const double gap = theirs[x] - mine[x];
      if (gap > eta && (!worst || gap > worst->gap)) worst = Witness{i, x, R, gap};
    }
  }
  return worst;
}

}  // namespace detail

inline Classification verify(const Scenario& s, const StoppingPolicy& S, const StoppingPolicy& T,
                             bool exhaustive = false) {
  Classification c;
  c.exhaustive = exhaustive;
  c.boundary_flag = s.splits_boundary(S) || s.splits_boundary(T);
  if (exhaustive && s.size() > kExhaustiveStateCap)
    throw SizeGuard("exhaustive verification needs at most " +
                    std::to_string(kExhaustiveStateCap) + " states");

  for (auto [i, own, other] : {std::tuple{Player::one, &S, &T}, std::tuple{Player::two, &T, &S}}) {
    const auto th = theta(s, i, *own, *other);
    if (th != *own) {
      std::size_t x = 0;
      while (th.contains(x) == own->contains(x)) ++x;
      c.verdict = Verdict::not_equilibrium;
      c.witness = Witness{i, x, std::nullopt, 0.0};
      return c;
    }
  }
  c.verdict = Verdict::soft;

  const auto ordered = [&](Player i) {
    const auto& p = s.player(i);
    for (std::size_t x = 0; x < s.size(); ++x)
      if (p.h[x] > p.g[x]) return false;
    return true;
  };
  if (ordered(Player::one) && ordered(Player::two))
    c.sufficient = gamma_set(s, Player::one, T) == S && gamma_set(s, Player::two, S) == T;
  if (c.sufficient) c.verdict = Verdict::sharp_sufficient;

  if (exhaustive) {
    auto w = detail::dominance_failure(s, Player::one, S, T);
    if (!w) w = detail::dominance_failure(s, Player::two, T, S);
    if (w) {
      c.verdict = Verdict::soft_not_sharp;
      c.witness = w;
    } else {
      c.verdict = Verdict::sharp_verified;
    }
  }
  return c;
}

// --------------------------------------------------------------------------
// Alternating procedure

struct AlternatingOutcome {
  enum class Terminal { fixed_point, cycle };

  /// Policies in the order produced: the start policy, then alternately
  /// the best response of the first mover and of her opponent.
  std::vector<StoppingPolicy> nodes;
  Player first_mover = Player::two;
  /// Completed (S_n, T_n) pairs in order.
  std::vector<std::pair<StoppingPolicy, StoppingPolicy>> pairs;
  Terminal terminal = Terminal::fixed_point;
  /// Index into `nodes` where the loop starts; the loop is
  /// nodes[cycle_start..] followed by nodes[cycle_start] again.
  std::size_t cycle_start = 0;
  StoppingPolicy S_inf, T_inf;
  std::optional<Classification> classification;
  bool boundary_flag = false;

  /// Owner of nodes[k].
  Player owner(std::size_t k) const {
    const Player starter = other(first_mover);
    return k % 2 == 0 ? starter : first_mover;
  }
};

struct AlternateOptions {
  Player first_mover = Player::two;
  bool classify = true;
  bool exhaustive = false;
  /// 0 means 2^|X| + 1, capped to keep the count representable.
  std::size_t max_pairs = 0;
};

/// Starting from `start` (owned by the player who does not move first),
/// alternate best responses Gamma until a policy repeats.
inline AlternatingOutcome alternate(const Scenario& s, const StoppingPolicy& start,
                                    AlternateOptions opt = {}) {
  require_h_le_g(s, Player::one);
  require_h_le_g(s, Player::two);
  const std::size_t n = s.size();
  std::size_t cap = opt.max_pairs;
  if (cap == 0) cap = n >= 20 ? (std::size_t{1} << 20) + 1 : (std::size_t{1} << n) + 1;

  AlternatingOutcome out;
  out.first_mover = opt.first_mover;
  out.nodes.push_back(start);
  // Seen policies, keyed separately per owner parity.
  std::unordered_map<StoppingPolicy, std::size_t, PolicyHash> seen[2];
  seen[0].emplace(start, 0);

  for (std::size_t k = 1;; ++k) {
    if (k > 2 * cap) throw IterationCap("alternating procedure exceeded its iteration cap");
    const Player mover = out.owner(k);
    auto next = gamma_set(s, mover, out.nodes.back());
    auto [it, inserted] = seen[k % 2].emplace(next, k);
    if (!inserted) {
      const std::size_t j = it->second;
      out.terminal = j + 2 == k ? AlternatingOutcome::Terminal::fixed_point
                                : AlternatingOutcome::Terminal::cycle;
      out.cycle_start = j;
      break;
    }
    out.nodes.push_back(std::move(next));
    if (k % 2 == 1) {
      const auto& a = out.nodes[k - 1];
      const auto& b = out.nodes[k];
      if (out.owner(k - 1) == Player::one) out.pairs.emplace_back(a, b);
      else out.pairs.emplace_back(b, a);
    }
  }

  // The repeating node closes the fixed pair (nodes[j], nodes[j+1]).
  const auto& a = out.nodes[out.cycle_start];
  const auto& b = out.nodes[out.cycle_start + 1];
  const bool a_is_S = out.owner(out.cycle_start) == Player::one;
  out.S_inf = a_is_S ? a : b;
  out.T_inf = a_is_S ? b : a;
  for (const auto& p : out.nodes) out.boundary_flag = out.boundary_flag || s.splits_boundary(p);

  if (out.terminal == AlternatingOutcome::Terminal::fixed_point && opt.classify)
    out.classification = verify(s, out.S_inf, out.T_inf, opt.exhaustive);
  return out;
}

/// Classifies every (S, T) pair; feasible up to kExhaustiveStateCap / 2 states.
inline std::vector<std::pair<std::pair<StoppingPolicy, StoppingPolicy>, Verdict>> sweep_pairs(
    const Scenario& s) {
  const std::size_t n = s.size();
  if (2 * n > kExhaustiveStateCap)
    throw SizeGuard("pair sweep needs at most " + std::to_string(kExhaustiveStateCap / 2) + " states");
  const std::size_t side = std::size_t{1} << n;
  auto verdicts = detail::parallel_map<Verdict>(side * side, [&](std::size_t k) {
    const auto S = StoppingPolicy::from_mask(n, k / side);
    const auto T = StoppingPolicy::from_mask(n, k % side);
    return verify(s, S, T, false).verdict;
  });
  std::vector<std::pair<std::pair<StoppingPolicy, StoppingPolicy>, Verdict>> out;
  out.reserve(side * side);
  for (std::size_t k = 0; k < side * side; ++k)
    out.push_back({{StoppingPolicy::from_mask(n, k / side), StoppingPolicy::from_mask(n, k % side)},
                   verdicts[k]});
  return out;
}

}  // namespace dynkin
