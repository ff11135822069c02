#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynkin/errors.hpp"

namespace dynkin {

enum class DiscountFamily { exponential, hyperbolic, generalized_hyperbolic, table };

inline std::string to_string(DiscountFamily f) {
  switch (f) {
    case DiscountFamily::exponential: return "exponential";
    case DiscountFamily::hyperbolic: return "hyperbolic";
    case DiscountFamily::generalized_hyperbolic: return "generalized-hyperbolic";
    case DiscountFamily::table: return "table";
  }
  return "?";
}

/// Discount function t -> delta(t) on the nonnegative integers.
///
///   exponential             exp(-beta t)
///   hyperbolic              1 / (1 + beta t)
///   generalized-hyperbolic  (1 + k t)^(-beta / k)
///   table                   explicit values delta(0), delta(1), ...
class DiscountFunction {
 public:
  static DiscountFunction exponential(double beta) {
    require_positive(beta, "beta");
    return DiscountFunction(DiscountFamily::exponential, beta, 0.0, {});
  }
  static DiscountFunction hyperbolic(double beta) {
    require_positive(beta, "beta");
    return DiscountFunction(DiscountFamily::hyperbolic, beta, 0.0, {});
  }
  static DiscountFunction generalized_hyperbolic(double beta, double k) {
    require_positive(beta, "beta");
    require_positive(k, "k");
    return DiscountFunction(DiscountFamily::generalized_hyperbolic, beta, k, {});
  }
  static DiscountFunction table(std::vector<double> values) {
    if (values.empty()) throw Error("discount table is empty");
    return DiscountFunction(DiscountFamily::table, 0.0, 0.0, std::move(values));
  }

  DiscountFamily family() const { return family_; }
  double beta() const { return beta_; }
  double k() const { return k_; }
  const std::vector<double>& values() const { return values_; }

  /// Largest t at which the function is defined (tables only).
  std::optional<std::size_t> domain_limit() const {
    if (family_ == DiscountFamily::table) return values_.size() - 1;
    return std::nullopt;
  }

  double operator()(std::size_t t) const {
    const double x = static_cast<double>(t);
    switch (family_) {
      case DiscountFamily::exponential: return std::exp(-beta_ * x);
      case DiscountFamily::hyperbolic: return 1.0 / (1.0 + beta_ * x);
      case DiscountFamily::generalized_hyperbolic: return std::pow(1.0 + k_ * x, -beta_ / k_);
      case DiscountFamily::table:
        if (t >= values_.size())
          throw Error("discount table has no value at t=" + std::to_string(t));
        return values_[t];
    }
    return 0.0;
  }

  /// delta(0..horizon) inclusive.
  std::vector<double> tabulate(std::size_t horizon) const {
    std::vector<double> out(horizon + 1);
    for (std::size_t t = 0; t <= horizon; ++t) out[t] = (*this)(t);
    return out;
  }

  /// sup_t delta(t+1)/delta(t) over all t for closed-form families; for
  /// tables the maximum over the available grid. `attained` is false when
  /// the supremum is only a limit (hyperbolic families approach 1).
  struct SupRatio {
    double value;
    bool attained;
  };
  SupRatio sup_step_ratio() const {
    switch (family_) {
      case DiscountFamily::exponential: return {std::exp(-beta_), true};
      case DiscountFamily::hyperbolic:
      case DiscountFamily::generalized_hyperbolic: return {1.0, false};
      case DiscountFamily::table: {
        double r = 0.0;
        for (std::size_t t = 0; t + 1 < values_.size(); ++t)
          if (values_[t] > 0) r = std::max(r, values_[t + 1] / values_[t]);
        return {r, true};
      }
    }
    return {1.0, false};
  }

  friend bool operator==(const DiscountFunction&, const DiscountFunction&) = default;

 private:
  DiscountFunction(DiscountFamily f, double beta, double k, std::vector<double> values)
      : family_(f), beta_(beta), k_(k), values_(std::move(values)) {}

  static void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(std::string("discount parameter ") + name + " must be positive and finite");
  }

  DiscountFamily family_;
  double beta_;
  double k_;
  std::vector<double> values_;
};

}  // namespace dynkin
