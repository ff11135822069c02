#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dynkin/equilibrium.hpp"

namespace dynkin {

struct NegotiationParams {
  double R = 10.0;
  double N = 6.0;
  double u = 2.0;
  double p = 0.6;
  double beta1 = 1.0;
  double beta2 = 1.0;
  int m = 20;
  Player first_mover = Player::two;
  NumericsConfig numerics{.horizon = 2000};

  double K() const { return R - N; }
  double beta(Player i) const { return i == Player::one ? beta1 : beta2; }

  void validate() const {
    if (!(R > 0)) throw RangeError("R must be positive");
    if (!(N > R / 2 && N < R)) throw RangeError("N must lie in (R/2, R)");
    if (!(u > 1)) throw RangeError("u must exceed 1");
    if (!(p > 0 && p < 1)) throw RangeError("p must lie in (0, 1)");
    if (p < 1.0 / (u + 1.0) - 1e-15) throw RangeError("p must be at least 1/(u+1)");
    if (!(beta1 > 0 && beta2 > 0)) throw RangeError("impatience rates must be positive");
    if (m < 1) throw RangeError("lattice half-width m must be at least 1");
  }
};

struct Alpha1 {
  double value = 0.0;
  /// Certified bound on the omitted tail.
  double tail = 0.0;
  std::size_t terms = 0;
};

/// E^1[1/(1 + beta xi)] for the first passage xi of a +-1 walk (up w.p. p)
/// from 1 to 0, as a series over xi = 2k-1.
inline Alpha1 alpha1(double p, double beta, double tol = 1e-11) {
  if (!(p > 0 && p < 1)) throw RangeError("alpha1: p must lie in (0, 1)");
  if (!(beta > 0)) throw RangeError("alpha1: beta must be positive");
  const double q = 1.0 - p;
  const double hit = std::min(1.0, q / p);
  const double ratio_cap = 4.0 * p * q;
  // w_k = P(xi = 2k-1); w_{k+1}/w_k = 2(2k-1)/(k+1) pq.
  // Near p = 1/2 the series needs ~1e7 terms; long double keeps hit - mass exact enough.
  long double w = q, mass = 0.0L, sum = 0.0L;
  for (std::size_t k = 1; k <= 1'000'000'000; ++k) {
    const double odd = 2.0 * static_cast<double>(k) - 1.0;
    sum += w / (1.0L + beta * odd);
    mass += w;
    const long double next_w = w * 2.0L * odd / (static_cast<long double>(k) + 1.0L) * p * q;
    const double next_term = static_cast<double>(next_w / (1.0L + beta * (odd + 2.0)));
    double tail = static_cast<double>(std::max(0.0L, hit - mass) / (1.0L + beta * (odd + 2.0)));
    if (ratio_cap < 1.0) tail = std::min(tail, next_term / (1.0 - ratio_cap));
    if (tail < tol) return {static_cast<double>(sum), tail, k};
    w = next_w;
  }
  throw Error("alpha1: tail certificate did not converge");
}

inline double threshold(double K, double u, double a1) { return (1.0 - a1) / (u - a1) * K; }

struct LatticePoint {
  int exponent;
  double value;
};

/// Smallest u^i, |i| <= m, at or above the threshold.
inline LatticePoint y_star(double K, double u, double p, double beta, int m) {
  const double th = threshold(K, u, alpha1(p, beta).value);
  for (int i = -m; i <= m; ++i) {
    const double x = std::pow(u, i);
    if (x >= th * (1.0 - 1e-12)) return {i, x};
  }
  throw RangeError("threshold " + std::to_string(th) + " lies above the lattice top u^" +
                   std::to_string(m));
}

inline double beta_bar(double N, double K, double u) {
  return u / (u - 1.0) * (N / K - 1.0) + 1.0 / (u - 1.0);
}
inline double beta_underbar(double N, double K, double p) { return p * (N / K - 1.0); }

inline std::string lattice_label(int i) { return "u^" + std::to_string(i); }

/// Lattice u^-m..u^m: up w.p. p, down w.p. 1-p. The top is absorbing; a
/// down move at the bottom stays put. Boundary groups are the three
/// states at each end.
inline Scenario build_negotiation(const NegotiationParams& prm) {
  prm.validate();
  const int m = prm.m;
  const std::size_t n = static_cast<std::size_t>(2 * m + 1);
  std::vector<std::string> labels;
  std::vector<double> xs;
  for (int i = -m; i <= m; ++i) {
    labels.push_back(lattice_label(i));
    xs.push_back(std::pow(prm.u, i));
  }
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    if (j + 1 == n) {
      rows[j][j] = 1.0;
      continue;
    }
    rows[j][j + 1] = prm.p;
    rows[j][j == 0 ? 0 : j - 1] += 1.0 - prm.p;
  }
  const double K = prm.K();
  std::array<PlayerSpec, 2> players;
  for (Player i : {Player::one, Player::two}) {
    auto& ps = players[index_of(i)];
    ps.f.resize(n);
    ps.g.assign(n, prm.N);
    ps.h.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      ps.f[j] = std::max(K - xs[j], 0.0);
      ps.h[j] = 0.5 * (ps.f[j] + ps.g[j]);
    }
    ps.discount = DiscountFunction::hyperbolic(prm.beta(i));
  }
  const std::size_t g = std::min<std::size_t>(3, n);
  StoppingPolicy bottom(n), top(n);
  for (std::size_t j = 0; j < g; ++j) {
    bottom.insert(j);
    top.insert(n - 1 - j);
  }
  return Scenario(StateSpace(std::move(labels)), TransitionKernel::from_dense(rows),
                  std::move(players), prm.numerics, {bottom, top});
}

/// Lattice states with exponent in [lo, hi] (clamped to the lattice).
inline StoppingPolicy lattice_interval(int m, int lo, int hi) {
  StoppingPolicy p(static_cast<std::size_t>(2 * m + 1));
  for (int i = std::max(lo, -m); i <= std::min(hi, m); ++i) p.insert(static_cast<std::size_t>(i + m));
  return p;
}

/// (0, u^top] on the lattice.
inline StoppingPolicy lattice_prefix(int m, int top) { return lattice_interval(m, -m, top); }

struct NegotiationReport {
  NegotiationParams params;
  std::array<Alpha1, 2> alpha1{};
  std::array<double, 2> threshold{};
  std::array<LatticePoint, 2> y_star{};
  double beta_bar = 0.0;
  double beta_underbar = 0.0;
  AlternatingOutcome outcome;
  std::string case_label;
  /// Structural mismatches against the expected interval forms.
  std::vector<std::string> findings;
  /// True when the case label is the finite-lattice stand-in for an
  /// iteration that does not terminate on the infinite lattice.
  bool finite_lattice_proxy = false;
};

namespace detail {

/// Exponent range [lo, hi] if the policy is a contiguous block of lattice
/// states, nullopt otherwise (including empty).
inline std::optional<std::pair<int, int>> contiguous(const StoppingPolicy& p, int m) {
  const auto idx = p.indices();
  if (idx.empty()) return std::nullopt;
  if (idx.back() - idx.front() + 1 != idx.size()) return std::nullopt;
  return std::pair{static_cast<int>(idx.front()) - m, static_cast<int>(idx.back()) - m};
}

}  // namespace detail

inline NegotiationReport solve_negotiation(const NegotiationParams& prm) {
  prm.validate();
  NegotiationReport r;
  r.params = prm;
  const double K = prm.K();
  for (Player i : {Player::one, Player::two}) {
    const auto k = index_of(i);
    r.alpha1[k] = alpha1(prm.p, prm.beta(i));
    r.threshold[k] = threshold(K, prm.u, r.alpha1[k].value);
    r.y_star[k] = y_star(K, prm.u, prm.p, prm.beta(i), prm.m);
  }
  r.beta_bar = beta_bar(prm.N, K, prm.u);
  r.beta_underbar = beta_underbar(prm.N, K, prm.p);

  const auto s = build_negotiation(prm);
  AlternateOptions opt;
  opt.first_mover = prm.first_mover;
  r.outcome = alternate(s, s.empty_policy(), opt);

  const int m = prm.m;
  const int y1 = r.y_star[0].exponent;
  for (std::size_t k = 0; k < r.outcome.nodes.size(); ++k) {
    const auto& node = r.outcome.nodes[k];
    if (node.empty()) continue;
    const auto range = detail::contiguous(node, m);
    const auto name = std::string(r.outcome.owner(k) == Player::one ? "S" : "T") + " node " +
                      std::to_string(k);
    if (!range) {
      r.findings.push_back(name + " is not a lattice interval");
    } else if (r.outcome.owner(k) == Player::one) {
      if (range->second != y1)
        r.findings.push_back(name + " does not end at y1* (ends at " + lattice_label(range->second) + ")");
    } else if (range->first != -m) {
      r.findings.push_back(name + " does not start at the lattice floor");
    }
  }

  const auto& out = r.outcome;
  const bool fixed = out.terminal == AlternatingOutcome::Terminal::fixed_point;
  if (prm.beta1 <= prm.beta2) {
    r.case_label = "prop-beta1<=beta2";
  } else if (!fixed) {
    r.case_label = "cycle";
    r.findings.push_back("alternating procedure entered a cycle");
  } else {
    const bool s1_empty = out.pairs.size() < 2 ? out.S_inf.empty() : out.pairs[1].first.empty();
    if (prm.first_mover == Player::two && s1_empty) {
      r.case_label = "case1";
    } else if (!out.T_inf.empty()) {
      r.case_label = "case3-finite";
    } else {
      // On the infinite lattice the iteration runs on with c_n, d_n decreasing
      // to 0; here it stops once T reaches the floor and empties.
      const StoppingPolicy* last_T = nullptr;
      for (std::size_t k = 0; k < out.nodes.size(); ++k)
        if (out.owner(k) == Player::two && !out.nodes[k].empty()) last_T = &out.nodes[k];
      const bool floor_hit = last_T && s.splits_boundary(*last_T);
      const bool limit_form = out.S_inf == lattice_prefix(m, y1);
      r.case_label = limit_form || floor_hit ? "case3-infinite" : "case2";
      r.finite_lattice_proxy = r.case_label == "case3-infinite";
    }
  }
  return r;
}

}  // namespace dynkin
