#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dirl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Positive infinity doubles as the extended-real value r'(0+) = +inf and as
/// an infinite weight. IEEE rules give finite/inf = 0 and total comparisons.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline bool is_infinite(double v) { return v == kInfinity; }

/// Raised when a scalar argument lies outside the function's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for malformed arguments: wrong sizes, negative weights, bad grids.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iteration or numerical routine breaks a guaranteed
/// property (descent, convergence of a sweep, finiteness).
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what,
                            std::optional<std::size_t> iteration = std::nullopt)
      : std::runtime_error(what), iteration_(iteration) {}

  std::optional<std::size_t> iteration() const { return iteration_; }

 private:
  std::optional<std::size_t> iteration_;
};

/// Raised when an analysis routine is handed a point that is not stationary.
class PreconditionError : public std::logic_error {
 public:
  PreconditionError(const std::string& what, double residual)
      : std::logic_error(what), residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Raised while reading problem / config files. `field()` names the offender.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace dirl
