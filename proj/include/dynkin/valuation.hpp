#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dynkin/scenario.hpp"

namespace dynkin {

/// How player i's stopping time is read off her policy S: the entrance
/// time rho_S (t >= 0) or the hitting time rho_S^+ (t >= 1).
enum class StartMode { entrance, hitting };

/// Per-state values at elapsed time 0. `tail_bound` certifies the
/// truncation error: every infinite-horizon value lies in
/// [values[x], values[x] + tail_bound].
struct ValueTable {
  std::vector<double> values;
  double tail_bound = 0.0;
  int horizon = 0;

  double operator[](std::size_t x) const { return values[x]; }
  std::size_t size() const { return values.size(); }
};

/// J_i(x, 0, rho_T): h at a tie, f otherwise.
inline double immediate_value(const Scenario& s, Player i, const StoppingPolicy& T, std::size_t x) {
  const auto& p = s.player(i);
  return T.contains(x) ? p.h[x] : p.f[x];
}

inline std::vector<double> immediate_values(const Scenario& s, Player i, const StoppingPolicy& T) {
  std::vector<double> out(s.size());
  for (std::size_t x = 0; x < s.size(); ++x) out[x] = immediate_value(s, i, T, x);
  return out;
}

namespace detail {

inline void certify(const ValueTable& v, const Scenario& s) {
  if (v.tail_bound > s.numerics().tail_tolerance)
    throw HorizonTooSmall(v.tail_bound, s.numerics().tail_tolerance, v.horizon);
}

inline double spread(const std::vector<double>& lo, const std::vector<double>& hi) {
  double m = 0.0;
  for (std::size_t x = 0; x < lo.size(); ++x) m = std::max(m, hi[x] - lo[x]);
  return m;
}

inline double expect(const TransitionKernel& k, std::size_t y, const std::vector<double>& w) {
  double acc = 0.0;
  for (const auto& e : k.row(y)) acc += e.prob * w[e.to];
  return acc;
}

}  // namespace detail

/// J_i(x, rho_S or rho_S^+, rho_T) for every x, by backward induction over
/// elapsed time with W(., H) = 0. A second pass with W(y, H) set to
/// delta(H) times the largest payoff reachable from y gives the upper end
/// of the bracket.
inline ValueTable joint_table_at(const Scenario& s, Player i, const StoppingPolicy& S,
                                 const StoppingPolicy& T, StartMode mode, int horizon) {
  const auto& p = s.player(i);
  const auto& k = s.kernel();
  const std::size_t n = s.size();
  const auto delta = p.discount.tabulate(static_cast<std::size_t>(horizon));

  // 0 = continue, else the payoff collected on arrival.
  std::vector<double> pay(n, 0.0);
  std::vector<char> stops(n, 0);
  for (std::size_t y = 0; y < n; ++y) {
    const bool inS = S.contains(y), inT = T.contains(y);
    if (inS && inT) pay[y] = p.h[y];
    else if (inS) pay[y] = p.f[y];
    else if (inT) pay[y] = p.g[y];
    stops[y] = inS || inT;
  }
  const auto reach = k.max_reachable(pay);

  std::vector<double> lo(n, 0.0), hi(n), nlo(n), nhi(n);
  for (std::size_t y = 0; y < n; ++y) hi[y] = delta[horizon] * reach[y];

  for (int t = horizon - 1; t >= 1; --t) {
    const double d = delta[t];
    for (std::size_t y = 0; y < n; ++y) {
      if (stops[y]) {
        nlo[y] = nhi[y] = d * pay[y];
      } else {
        nlo[y] = detail::expect(k, y, lo);
        nhi[y] = detail::expect(k, y, hi);
      }
    }
    lo.swap(nlo);
    hi.swap(nhi);
  }

  for (std::size_t x = 0; x < n; ++x) {
    const bool stop_now = mode == StartMode::entrance ? stops[x] : T.contains(x);
    if (stop_now) {
      // In hitting mode only sigma can be 0 here, and then tau > sigma.
      nlo[x] = nhi[x] = mode == StartMode::entrance ? pay[x] : p.g[x];
    } else {
      nlo[x] = detail::expect(k, x, lo);
      nhi[x] = detail::expect(k, x, hi);
    }
  }
  return {nlo, detail::spread(nlo, nhi), horizon};
}

inline ValueTable joint_table(const Scenario& s, Player i, const StoppingPolicy& S,
                              const StoppingPolicy& T, StartMode mode) {
  auto v = joint_table_at(s, i, S, T, mode, s.numerics().horizon);
  detail::certify(v, s);
  return v;
}

inline double joint_value(const Scenario& s, Player i, const StoppingPolicy& S,
                          const StoppingPolicy& T, std::size_t x, StartMode mode) {
  return joint_table(s, i, S, T, mode)[x];
}

/// V_i^T(x, S) = sup over 1 <= tau <= rho_S^+ of E_x[F_i(tau, rho_T)].
inline ValueTable constrained_table_at(const Scenario& s, Player i, const StoppingPolicy& S,
                                       const StoppingPolicy& T, int horizon) {
  const auto& p = s.player(i);
  const auto& k = s.kernel();
  const std::size_t n = s.size();
  const auto delta = p.discount.tabulate(static_cast<std::size_t>(horizon));

  std::vector<double> pay(n);
  for (std::size_t y = 0; y < n; ++y) {
    const bool inS = S.contains(y), inT = T.contains(y);
    if (inT && inS) pay[y] = p.h[y];
    else if (inT) pay[y] = std::max(p.h[y], p.g[y]);
    else pay[y] = p.f[y];
  }
  const auto reach = k.max_reachable(pay);

  std::vector<double> lo(n, 0.0), hi(n), nlo(n), nhi(n);
  for (std::size_t y = 0; y < n; ++y) hi[y] = delta[horizon] * reach[y];

  for (int t = horizon - 1; t >= 1; --t) {
    const double d = delta[t];
    for (std::size_t y = 0; y < n; ++y) {
      if (T.contains(y) || S.contains(y)) {
        nlo[y] = nhi[y] = d * pay[y];
      } else {
        const double stop = d * p.f[y];
        nlo[y] = std::max(stop, detail::expect(k, y, lo));
        nhi[y] = std::max(stop, detail::expect(k, y, hi));
      }
    }
    lo.swap(nlo);
    hi.swap(nhi);
  }

  for (std::size_t x = 0; x < n; ++x) {
    if (T.contains(x)) {
      nlo[x] = nhi[x] = p.g[x];
    } else {
      nlo[x] = detail::expect(k, x, lo);
      nhi[x] = detail::expect(k, x, hi);
    }
  }
  return {nlo, detail::spread(nlo, nhi), horizon};
}

inline ValueTable constrained_table(const Scenario& s, Player i, const StoppingPolicy& S,
                                    const StoppingPolicy& T) {
  auto v = constrained_table_at(s, i, S, T, s.numerics().horizon);
  detail::certify(v, s);
  return v;
}

inline double constrained_value(const Scenario& s, Player i, const StoppingPolicy& S,
                                const StoppingPolicy& T, std::size_t x) {
  return constrained_table(s, i, S, T)[x];
}

/// U_i^T(x, S) = max(J_i(x, 0, rho_T), J_i(x, rho_S^+, rho_T)).
inline ValueTable equilibrium_table(const Scenario& s, Player i, const StoppingPolicy& S,
                                    const StoppingPolicy& T) {
  auto v = joint_table(s, i, S, T, StartMode::hitting);
  for (std::size_t x = 0; x < s.size(); ++x)
    v.values[x] = std::max(v.values[x], immediate_value(s, i, T, x));
  return v;
}

inline double equilibrium_value(const Scenario& s, Player i, const StoppingPolicy& S,
                                const StoppingPolicy& T, std::size_t x) {
  return equilibrium_table(s, i, S, T)[x];
}

inline constexpr std::size_t kEnumerateStateCap = 8;
inline constexpr int kEnumerateHorizonCap = 8;

/// Exact E_x[F_i] over every path X_0..X_{H-1}, weighted by its probability;
/// payoffs at or after H count as 0.
inline double enumerate_value(const Scenario& s, Player i, const StoppingPolicy& S,
                              const StoppingPolicy& T, std::size_t x, StartMode mode, int horizon) {
  const std::size_t n = s.size();
  if (n > kEnumerateStateCap || horizon > kEnumerateHorizonCap || horizon < 1)
    throw SizeGuard("enumerate_value needs at most " + std::to_string(kEnumerateStateCap) +
                    " states and horizon in [1, " + std::to_string(kEnumerateHorizonCap) + "]");
  const auto& p = s.player(i);
  const auto dense = s.kernel().dense();
  const auto delta = p.discount.tabulate(static_cast<std::size_t>(horizon));

  // Odometer over the steps X_1..X_{H-1}.
  const auto steps = static_cast<std::size_t>(horizon - 1);
  std::vector<std::size_t> path(steps, 0);
  double total = 0.0;
  for (;;) {
    // Full-path weight, so that suffixes after a stop sum to the prefix weight.
    double weight = 1.0;
    for (std::size_t t = 0; t < steps && weight != 0.0; ++t)
      weight *= dense[t == 0 ? x : path[t - 1]][path[t]];
    double payoff = 0.0;
    for (std::size_t t = 0; t <= steps && weight != 0.0; ++t) {
      const std::size_t y = t == 0 ? x : path[t - 1];
      const bool tau_here = S.contains(y) && (t > 0 || mode == StartMode::entrance);
      const bool sigma_here = T.contains(y);
      if (tau_here && sigma_here) payoff = delta[t] * p.h[y];
      else if (tau_here) payoff = delta[t] * p.f[y];
      else if (sigma_here) payoff = delta[t] * p.g[y];
      else continue;
      break;
    }
    total += weight * payoff;

    std::size_t d = 0;
    while (d < steps && ++path[d] == n) path[d++] = 0;
    if (d == steps) break;
  }
  return total;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
};

/// Sample mean of F_i over simulated paths, truncated at the scenario horizon.
inline MonteCarloEstimate mc_estimate(const Scenario& s, Player i, const StoppingPolicy& S,
                                      const StoppingPolicy& T, std::size_t x, StartMode mode,
                                      std::size_t paths, std::uint64_t seed) {
  if (paths < 1) throw RangeError("mc_estimate needs at least one path");
  const auto& p = s.player(i);
  const auto& k = s.kernel();
  const int horizon = s.numerics().horizon;
  const auto delta = p.discount.tabulate(static_cast<std::size_t>(horizon));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Welford updates: exact when every path pays the same.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t path = 0; path < paths; ++path) {
    std::size_t y = x;
    double payoff = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const bool tau_here = S.contains(y) && (t > 0 || mode == StartMode::entrance);
      const bool sigma_here = T.contains(y);
      if (tau_here || sigma_here) {
        const double v = tau_here && sigma_here ? p.h[y] : tau_here ? p.f[y] : p.g[y];
        payoff = delta[t] * v;
        break;
      }
      const double u = unif(rng);
      const auto row = k.row(y);
      double acc = 0.0;
      std::size_t next = row.back().to;
      for (const auto& e : row) {
        acc += e.prob;
        if (u < acc) {
          next = e.to;
          break;
        }
      }
      y = next;
    }
    const double dev = payoff - mean;
    mean += dev / static_cast<double>(path + 1);
    m2 += dev * (payoff - mean);
  }
  const double np = static_cast<double>(paths);
  const double var = paths > 1 ? m2 / (np - 1.0) : 0.0;
  return {mean, std::sqrt(var / np), paths, seed};
}

}  // namespace dynkin
