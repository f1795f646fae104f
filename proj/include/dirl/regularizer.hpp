#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dirl/types.hpp"

namespace dirl {

/// Built-in concave penalty families r(t), t = |x_i|.
///
///   EXP  1 - exp(-p t)          LOG  log(1 + p t)
///   FRA  t / (t + p)            LPN  t^p, 0 < p < 1
///   TAN  atan(t / p)
enum class Family { EXP, LOG, FRA, LPN, TAN, Custom };

std::string_view family_name(Family family);
Family parse_family(std::string_view name);

/// User-supplied penalty. The callbacks must honour the same contract as the
/// built-in families: concave, nondecreasing on (0, inf), r(0) = 0.
struct CustomPenalty {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;
  /// r'(0+); may be kInfinity.
  double derivative_at_zero = kInfinity;
  /// sup |r''| on (0, inf) when r'(0+) is finite. Ignored otherwise.
  double curvature_bound = kInfinity;
};

struct RegularizerClass {
  bool lipschitz_at_zero = false;
  double derivative_at_zero = 0.0;
};

/// Immutable penalty r with closed-form first and second derivatives.
class Regularizer {
 public:
  /// Throws ArgumentError naming "p" when the parameter is out of range.
  Regularizer(Family family, double p);

  static Regularizer custom(CustomPenalty penalty);

  Family family() const { return family_; }
  double p() const { return p_; }
  std::string name() const;

  /// r(t) for t >= 0.
  double value(double t) const;
  /// r'(t) for t > 0.
  double derivative(double t) const;
  /// r''(t) for t > 0.
  double second_derivative(double t) const;
  /// lim_{t -> 0+} r'(t); kInfinity for LPN.
  double derivative_at_zero_plus() const;
  /// sup_{t > 0} |r''(t)|, the Lipschitz constant of r' on (0, inf).
  /// kInfinity when r'(0+) is infinite.
  double curvature_bound() const;
  /// Smallest t >= 0 with r'(t) <= w, i.e. (r')^{-1}(w) on the range of r'.
  double inverse_derivative(double w) const;

  RegularizerClass classify() const;

 private:
  Regularizer() = default;

  Family family_ = Family::Custom;
  double p_ = 0.0;
  std::shared_ptr<const CustomPenalty> custom_;
};

struct Assumption1Report {
  bool zero_at_origin = false;
  bool nonnegative_derivative = false;
  bool nonincreasing_derivative = false;
  bool nonpositive_curvature = false;
  bool positive_derivative_at_zero = false;

  bool holds() const {
    return zero_at_origin && nonnegative_derivative && nonincreasing_derivative &&
           nonpositive_curvature && positive_derivative_at_zero;
  }
};

/// Numeric check of concavity / monotonicity on a strictly increasing grid
/// of positive abscissae.
Assumption1Report check_assumption1(const Regularizer& reg, std::span<const double> grid);

struct Assumption4Report {
  std::vector<double> z;
  std::vector<double> derivative;
  /// z r''(z) / r'(z)^2 along the sequence.
  std::vector<double> curvature_ratio;
  bool derivative_unbounded = false;
  bool derivative_increasing = false;
  bool ratio_vanishing = false;
  bool holds = false;
};

/// Trend check of r'(z) -> inf and z r''(z) / r'(z)^2 -> 0 along a strictly
/// decreasing positive sequence.
Assumption4Report check_assumption4(const Regularizer& reg, std::span<const double> sequence);

}  // namespace dirl
