#pragma once

#include <stdexcept>
#include <string>

namespace dynkin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent scenario input. `path` points into the
/// source document (JSON-pointer style, e.g. "/transitions/2").
class ScenarioError : public Error {
 public:
  ScenarioError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// The truncation certificate of a value computation exceeded the
/// configured tail tolerance.
class HorizonTooSmall : public Error {
 public:
  HorizonTooSmall(double bound, double tolerance, int horizon)
      : Error("horizon " + std::to_string(horizon) + " too small: truncation bound " +
              std::to_string(bound) + " exceeds tail tolerance " + std::to_string(tolerance)),
        bound_(bound) {}
  double bound() const { return bound_; }

 private:
  double bound_;
};

/// Payoff ordering precondition (h <= g, or f <= h <= g) does not hold.
class OrderingViolation : public Error {
 public:
  using Error::Error;
};

/// Exhaustive routine called on an instance larger than its size gate.
class SizeGuard : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class IterationCap : public Error {
 public:
  using Error::Error;
};

}  // namespace dynkin
