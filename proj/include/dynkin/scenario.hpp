#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dynkin/discount.hpp"
#include "dynkin/errors.hpp"
#include "dynkin/policy.hpp"

namespace dynkin {

enum class Player : int { one = 0, two = 1 };

constexpr Player other(Player p) { return p == Player::one ? Player::two : Player::one; }
constexpr std::size_t index_of(Player p) { return static_cast<std::size_t>(p); }
constexpr int number_of(Player p) { return static_cast<int>(p) + 1; }

inline Player player_from_number(int n) {
  if (n == 1) return Player::one;
  if (n == 2) return Player::two;
  throw Error("player must be 1 or 2, got " + std::to_string(n));
}

inline constexpr std::size_t kDefaultStateCap = 4096;

/// Ordered, unique state labels.
class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(std::vector<std::string> labels, std::size_t cap = kDefaultStateCap)
      : labels_(std::move(labels)) {
    if (labels_.empty()) throw ScenarioError("/states", "state space is empty");
    if (labels_.size() > cap)
      throw ScenarioError("/states", "state count " + std::to_string(labels_.size()) +
                                         " exceeds cap " + std::to_string(cap));
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const auto path = "/states/" + std::to_string(i);
      if (labels_[i].empty()) throw ScenarioError(path, "empty state label");
      if (!index_.emplace(labels_[i], i).second)
        throw ScenarioError(path, "duplicate state label '" + labels_[i] + "'");
    }
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  std::optional<std::size_t> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Row-stochastic kernel in compressed sparse row form.
class TransitionKernel {
 public:
  struct Entry {
    std::size_t to;
    double prob;
  };

  TransitionKernel() = default;

  static TransitionKernel from_dense(const std::vector<std::vector<double>>& rows) {
    TransitionKernel k;
    const std::size_t n = rows.size();
    k.offsets_.reserve(n + 1);
    k.offsets_.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto path = "/transitions/" + std::to_string(i);
      if (rows[i].size() != n)
        throw ScenarioError(path, "row has " + std::to_string(rows[i].size()) +
                                      " entries, expected " + std::to_string(n));
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p = rows[i][j];
        if (!std::isfinite(p) || p < 0.0 || p > 1.0)
          throw ScenarioError(path + "/" + std::to_string(j), "probability outside [0,1]");
        sum += p;
        if (p > 0.0) k.entries_.push_back({j, p});
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw ScenarioError(path, "non-stochastic row (sum " + std::to_string(sum) + ")");
      k.offsets_.push_back(k.entries_.size());
    }
    return k;
  }

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const Entry> row(std::size_t i) const {
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  double prob(std::size_t i, std::size_t j) const {
    for (const auto& e : row(i))
      if (e.to == j) return e.prob;
    return 0.0;
  }
  std::vector<std::vector<double>> dense() const {
    std::vector<std::vector<double>> out(size(), std::vector<double>(size(), 0.0));
    for (std::size_t i = 0; i < size(); ++i)
      for (const auto& e : row(i)) out[i][e.to] = e.prob;
    return out;
  }
  /// (P v)(x) = sum_y P(x,y) v(y).
  std::vector<double> apply(std::span<const double> v) const {
    std::vector<double> out(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
      double acc = 0.0;
      for (const auto& e : row(i)) acc += e.prob * v[e.to];
      out[i] = acc;
    }
    return out;
  }

  /// For each state y, the maximum of `weight` over all states reachable
  /// from y in zero or more steps.
  std::vector<double> max_reachable(std::span<const double> weight) const {
    const std::size_t n = size();
    std::vector<std::vector<std::size_t>> preds(n);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& e : row(i)) preds[e.to].push_back(i);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
    std::vector<double> out(n, 0.0);
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack;
    for (auto src : order) {
      if (seen[src]) continue;
      seen[src] = true;
      out[src] = weight[src];
      stack.push_back(src);
      while (!stack.empty()) {
        auto y = stack.back();
        stack.pop_back();
        for (auto p : preds[y])
          if (!seen[p]) {
            seen[p] = true;
            out[p] = weight[src];
            stack.push_back(p);
          }
      }
    }
    return out;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

/// One player's payoffs: f when she stops first, g when the other stops
/// first, h on a simultaneous stop.
struct PlayerSpec {
  std::vector<double> f;
  std::vector<double> g;
  std::vector<double> h;
  DiscountFunction discount = DiscountFunction::hyperbolic(1.0);

  double max_payoff() const {
    double m = 0.0;
    for (const auto* v : {&f, &g, &h})
      for (double x : *v) m = std::max(m, x);
    return m;
  }
};

struct NumericsConfig {
  int horizon = 200;
  double comparison_margin = 1e-7;
  double tail_tolerance = 1e-9;
  std::size_t mc_paths = 100000;
  std::uint64_t mc_seed = 42;
};

/// A complete game instance. Immutable once constructed.
class Scenario {
 public:
  Scenario(StateSpace states, TransitionKernel kernel, std::array<PlayerSpec, 2> players,
           NumericsConfig numerics = {}, std::vector<StoppingPolicy> boundary_groups = {})
      : states_(std::move(states)),
        kernel_(std::move(kernel)),
        players_(std::move(players)),
        numerics_(numerics),
        boundary_groups_(std::move(boundary_groups)) {
    const std::size_t n = states_.size();
    if (kernel_.size() != n)
      throw ScenarioError("/transitions", "expected " + std::to_string(n) + " rows");
    for (std::size_t i = 0; i < 2; ++i) {
      const auto base = "/players/" + std::to_string(i);
      auto check_vec = [&](const std::vector<double>& v, const char* name) {
        if (v.size() != n)
          throw ScenarioError(base + "/" + name, "payoff vector length " +
                                                     std::to_string(v.size()) + " != " +
                                                     std::to_string(n));
        for (std::size_t x = 0; x < n; ++x)
          if (!std::isfinite(v[x]) || v[x] < 0.0)
            throw ScenarioError(base + "/" + name + "/" + std::to_string(x),
                                "negative payoff at state '" + states_.label(x) + "'");
      };
      check_vec(players_[i].f, "f");
      check_vec(players_[i].g, "g");
      check_vec(players_[i].h, "h");
      const auto& d = players_[i].discount;
      if (auto lim = d.domain_limit(); lim && *lim < static_cast<std::size_t>(numerics_.horizon))
        throw ScenarioError(base + "/discount/values",
                            "discount table must cover 0..horizon (" +
                                std::to_string(numerics_.horizon) + ")");
      if (d.family() == DiscountFamily::table) {
        double hmax = 0.0;
        for (double x : players_[i].h) hmax = std::max(hmax, x);
        if (d(static_cast<std::size_t>(numerics_.horizon)) * hmax > numerics_.tail_tolerance)
          throw ScenarioError(base + "/discount/values",
                              "discount table does not decay below tail tolerance at the horizon");
      }
    }
    if (numerics_.horizon < 1) throw ScenarioError("/numerics/horizon", "horizon must be positive");
    if (!(numerics_.comparison_margin >= 0.0))
      throw ScenarioError("/numerics/comparison_margin", "margin must be nonnegative");
    if (!(numerics_.tail_tolerance > 0.0))
      throw ScenarioError("/numerics/tail_tolerance", "tail tolerance must be positive");
    if (numerics_.mc_paths < 1) throw ScenarioError("/numerics/mc_paths", "mc_paths must be >= 1");
    for (std::size_t g = 0; g < boundary_groups_.size(); ++g)
      if (boundary_groups_[g].universe() != n)
        throw ScenarioError("/boundary_groups/" + std::to_string(g), "universe mismatch");
  }

  const StateSpace& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  const TransitionKernel& kernel() const { return kernel_; }
  const PlayerSpec& player(Player p) const { return players_[index_of(p)]; }
  const std::array<PlayerSpec, 2>& players() const { return players_; }
  const NumericsConfig& numerics() const { return numerics_; }
  /// Truncation buffers; a policy that splits a group is flagged.
  const std::vector<StoppingPolicy>& boundary_groups() const { return boundary_groups_; }

  Scenario with_numerics(const NumericsConfig& n) const {
    return Scenario(states_, kernel_, players_, n, boundary_groups_);
  }

  StoppingPolicy empty_policy() const { return StoppingPolicy(size()); }
  StoppingPolicy full_policy() const { return StoppingPolicy::full(size()); }

  /// True when `p` contains some but not all states of a boundary group.
  bool splits_boundary(const StoppingPolicy& p) const {
    for (const auto& g : boundary_groups_) {
      auto in = (p & g).count();
      if (in != 0 && in != g.count()) return true;
    }
    return false;
  }

 private:
  StateSpace states_;
  TransitionKernel kernel_;
  std::array<PlayerSpec, 2> players_;
  NumericsConfig numerics_;
  std::vector<StoppingPolicy> boundary_groups_;
};

/// delta_i(H) * max over states of max(f_i, g_i, h_i).
inline double tail_bound(const Scenario& s, Player i, int horizon) {
  const auto& p = s.player(i);
  return p.discount(static_cast<std::size_t>(horizon)) * p.max_payoff();
}

// --------------------------------------------------------------------------
// Validation

enum class ValidationMode { basic, war_of_attrition };

struct Check {
  std::string name;
  bool passed = true;
  /// Advisory checks are reported but do not affect ValidationReport::ok().
  bool advisory = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.passed || c.advisory; });
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Largest value of delta(s)delta(t) - delta(s+t) over s+t <= horizon.
inline double decreasing_impatience_residual(const DiscountFunction& d, int horizon) {
  const auto tab = d.tabulate(static_cast<std::size_t>(horizon));
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < tab.size(); ++s)
    for (std::size_t t = 0; s + t < tab.size(); ++t)
      worst = std::max(worst, tab[s] * tab[t] - tab[s + t]);
  return worst;
}

inline ValidationReport validate(const Scenario& s, ValidationMode mode = ValidationMode::basic) {
  ValidationReport r;
  const auto n = s.size();
  const auto& num = s.numerics();

  {
    Check c{"row-stochastic"};
    for (std::size_t x = 0; x < n; ++x) {
      double sum = 0.0;
      for (const auto& e : s.kernel().row(x)) {
        sum += e.prob;
        if (e.prob < 0.0) c.passed = false;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        c.passed = false;
        c.detail = "row '" + s.states().label(x) + "' sums to " + std::to_string(sum);
        break;
      }
    }
    r.checks.push_back(c);
  }

  for (Player i : {Player::one, Player::two}) {
    const auto& p = s.player(i);
    const auto tag = "player" + std::to_string(number_of(i));

    Check nonneg{tag + ":payoff-nonnegative"};
    for (std::size_t x = 0; x < n && nonneg.passed; ++x)
      if (p.f[x] < 0 || p.g[x] < 0 || p.h[x] < 0) {
        nonneg.passed = false;
        nonneg.detail = "negative payoff at '" + s.states().label(x) + "'";
      }
    r.checks.push_back(nonneg);

    Check dec{tag + ":discount-decreasing"};
    const auto tab = p.discount.tabulate(static_cast<std::size_t>(num.horizon));
    if (tab[0] != 1.0) {
      dec.passed = false;
      dec.detail = "delta(0) != 1";
    }
    for (std::size_t t = 0; t + 1 < tab.size() && dec.passed; ++t)
      if (!(tab[t + 1] < tab[t])) {
        dec.passed = false;
        dec.detail = "not strictly decreasing at t=" + std::to_string(t);
      }
    r.checks.push_back(dec);

    Check di{tag + ":decreasing-impatience"};
    const double residual = decreasing_impatience_residual(p.discount, num.horizon);
    di.passed = residual <= 1e-12;
    di.detail = "max residual " + std::to_string(residual);
    r.checks.push_back(di);

    if (mode == ValidationMode::war_of_attrition) {
      Check ord{tag + ":ordering f<=h<=g"};
      for (std::size_t x = 0; x < n; ++x)
        if (!(p.f[x] <= p.h[x] && p.h[x] <= p.g[x])) {
          ord.passed = false;
          if (!ord.detail.empty()) ord.detail += ", ";
          ord.detail += s.states().label(x);
        }
      if (!ord.passed) ord.detail = "violated at " + ord.detail;
      r.checks.push_back(ord);
    }

    // The a-priori bound is loose for polynomially decaying discounts; each
    // value computation certifies its own truncation error instead.
    Check margin{tag + ":margin-vs-a-priori-tail"};
    margin.advisory = true;
    const double tb = tail_bound(s, i, num.horizon);
    margin.passed = num.comparison_margin >= 2.0 * tb;
    margin.detail = "tail bound " + std::to_string(tb);
    r.checks.push_back(margin);
  }

  Check tol{"tail-tolerance-vs-margin"};
  tol.passed = 2.0 * num.tail_tolerance <= num.comparison_margin;
  tol.detail = "need 2*tail_tolerance <= comparison_margin";
  r.checks.push_back(tol);
  return r;
}

// --------------------------------------------------------------------------
// Supermartingale condition on (delta_i(t) g_i(X_t))

struct ConditionReport {
  struct Failure {
    std::size_t state;
    int t;  // first failing grid time, -1 for the analytic (all-t) check
    double lhs;
    double rhs;
  };
  bool grid_pass = true;
  bool analytic_pass = true;
  double sup_ratio = 1.0;
  bool sup_attained = false;
  std::vector<Failure> failures;

  bool passed() const { return grid_pass && analytic_pass; }
  bool fails_at(std::size_t state) const {
    return std::any_of(failures.begin(), failures.end(),
                       [&](const Failure& f) { return f.state == state; });
  }
};

inline ConditionReport check_supermartingale(const Scenario& s, Player i) {
  ConditionReport rep;
  const auto& p = s.player(i);
  const auto pg = s.kernel().apply(p.g);
  const auto tab = p.discount.tabulate(static_cast<std::size_t>(s.numerics().horizon));
  std::vector<bool> failed(s.size(), false);

  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t t = 0; t + 1 < tab.size(); ++t) {
      const double lhs = tab[t + 1] * pg[x];
      const double rhs = tab[t] * p.g[x];
      if (lhs > rhs + 1e-12) {
        rep.grid_pass = false;
        failed[x] = true;
        rep.failures.push_back({x, static_cast<int>(t), lhs, rhs});
        break;
      }
    }

  const auto sup = p.discount.sup_step_ratio();
  rep.sup_ratio = sup.value;
  rep.sup_attained = sup.attained;
  if (p.discount.family() != DiscountFamily::table) {
    for (std::size_t x = 0; x < s.size(); ++x) {
      const double lhs = sup.value * pg[x];
      if (lhs > p.g[x] + 1e-12) {
        rep.analytic_pass = false;
        if (!failed[x]) rep.failures.push_back({x, -1, lhs, p.g[x]});
      }
    }
  }
  return rep;
}

}  // namespace dynkin
