#include "dirl/regularizer.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dirl {

namespace {

void require_nonnegative(double t, const char* op) {
  if (!std::isfinite(t) || t < 0.0) {
    std::ostringstream os;
    os << op << ": argument must be finite and >= 0, got " << t;
    throw DomainError(os.str());
  }
}

void require_positive(double t, const char* op) {
  if (!std::isfinite(t) || t <= 0.0) {
    std::ostringstream os;
    os << op << ": argument must be finite and > 0, got " << t;
    throw DomainError(os.str());
  }
}

}  // namespace

std::string_view family_name(Family family) {
  switch (family) {
    case Family::EXP: return "EXP";
    case Family::LOG: return "LOG";
    case Family::FRA: return "FRA";
    case Family::LPN: return "LPN";
    case Family::TAN: return "TAN";
    case Family::Custom: return "CUSTOM";
  }
  return "CUSTOM";
}

Family parse_family(std::string_view name) {
  if (name == "EXP") return Family::EXP;
  if (name == "LOG") return Family::LOG;
  if (name == "FRA") return Family::FRA;
  if (name == "LPN") return Family::LPN;
  if (name == "TAN") return Family::TAN;
  throw ArgumentError("family: unknown regularizer family '" + std::string(name) + "'");
}

Regularizer::Regularizer(Family family, double p) : family_(family), p_(p) {
  if (family == Family::Custom) {
    throw ArgumentError("family: use Regularizer::custom for user-defined penalties");
  }
  if (!std::isfinite(p) || p <= 0.0) {
    std::ostringstream os;
    os << "p: must be finite and > 0, got " << p;
    throw ArgumentError(os.str());
  }
  if (family == Family::LPN && p >= 1.0) {
    std::ostringstream os;
    os << "p: LPN requires 0 < p < 1, got " << p;
    throw ArgumentError(os.str());
  }
}

Regularizer Regularizer::custom(CustomPenalty penalty) {
  if (!penalty.value || !penalty.derivative || !penalty.second_derivative) {
    throw ArgumentError("custom: value, derivative and second_derivative callbacks are required");
  }
  if (!(penalty.derivative_at_zero > 0.0)) {
    throw ArgumentError("custom: derivative_at_zero must be > 0");
  }
  Regularizer reg;
  reg.family_ = Family::Custom;
  reg.custom_ = std::make_shared<const CustomPenalty>(std::move(penalty));
  return reg;
}

std::string Regularizer::name() const {
  if (family_ == Family::Custom) return custom_->name;
  std::ostringstream os;
  os << family_name(family_) << "(p=" << p_ << ")";
  return os.str();
}

double Regularizer::value(double t) const {
  require_nonnegative(t, "value");
  const double p = p_;
  switch (family_) {
    case Family::EXP: return -std::expm1(-p * t);
    case Family::LOG: return std::log1p(p * t);
    case Family::FRA: return t / (t + p);
    case Family::LPN: return std::pow(t, p);
    case Family::TAN: return std::atan(t / p);
    case Family::Custom: return custom_->value(t);
  }
  return 0.0;
}

double Regularizer::derivative(double t) const {
  require_positive(t, "derivative");
  const double p = p_;
  switch (family_) {
    case Family::EXP: return p * std::exp(-p * t);
    case Family::LOG: return p / (1.0 + p * t);
    case Family::FRA: return p / ((t + p) * (t + p));
    case Family::LPN: return p * std::pow(t, p - 1.0);
    case Family::TAN: return p / (t * t + p * p);
    case Family::Custom: return custom_->derivative(t);
  }
  return 0.0;
}

double Regularizer::second_derivative(double t) const {
  require_positive(t, "second_derivative");
  const double p = p_;
  switch (family_) {
    case Family::EXP: return -p * p * std::exp(-p * t);
    case Family::LOG: {
      const double d = 1.0 + p * t;
      return -p * p / (d * d);
    }
    case Family::FRA: {
      const double d = t + p;
      return -2.0 * p / (d * d * d);
    }
    case Family::LPN: return p * (p - 1.0) * std::pow(t, p - 2.0);
    case Family::TAN: {
      const double d = t * t + p * p;
      return -2.0 * p * t / (d * d);
    }
    case Family::Custom: return custom_->second_derivative(t);
  }
  return 0.0;
}

double Regularizer::derivative_at_zero_plus() const {
  switch (family_) {
    case Family::EXP:
    case Family::LOG: return p_;
    case Family::FRA:
    case Family::TAN: return 1.0 / p_;
    case Family::LPN: return kInfinity;
    case Family::Custom: return custom_->derivative_at_zero;
  }
  return kInfinity;
}

double Regularizer::curvature_bound() const {
  const double p = p_;
  switch (family_) {
    case Family::EXP:
    case Family::LOG: return p * p;
    case Family::FRA: return 2.0 / (p * p);
    // |r''| for TAN peaks at t = p / sqrt(3), not at the origin.
    case Family::TAN: return 9.0 / (8.0 * std::numbers::sqrt3 * p * p);
    case Family::LPN: return kInfinity;
    case Family::Custom:
      return is_infinite(custom_->derivative_at_zero) ? kInfinity : custom_->curvature_bound;
  }
  return kInfinity;
}

double Regularizer::inverse_derivative(double w) const {
  if (!(w > 0.0)) throw DomainError("inverse_derivative: weight must be > 0");
  if (w >= derivative_at_zero_plus()) return 0.0;
  const double p = p_;
  switch (family_) {
    case Family::EXP: return -std::log(w / p) / p;
    case Family::LOG: return (p / w - 1.0) / p;
    case Family::FRA: return std::sqrt(p / w) - p;
    case Family::LPN: return std::pow(w / p, 1.0 / (p - 1.0));
    case Family::TAN: return std::sqrt(std::max(p / w - p * p, 0.0));
    case Family::Custom: break;
  }
  // r' is nonincreasing; bracket and bisect.
  double lo = 0.0;
  double hi = 1.0;
  while (derivative(hi) > w) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericalFailure("inverse_derivative: weight below the range of r'");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid > 0.0 && derivative(mid) > w) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

RegularizerClass Regularizer::classify() const {
  const double d0 = derivative_at_zero_plus();
  return RegularizerClass{.lipschitz_at_zero = !is_infinite(d0), .derivative_at_zero = d0};
}

Assumption1Report check_assumption1(const Regularizer& reg, std::span<const double> grid) {
  if (grid.empty()) throw ArgumentError("grid: must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw ArgumentError("grid: entries must be finite and > 0");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ArgumentError("grid: must be strictly increasing");
    }
  }

  Assumption1Report report;
  report.zero_at_origin = std::abs(reg.value(0.0)) <= 1e-12;
  report.nonnegative_derivative = true;
  report.nonincreasing_derivative = true;
  report.nonpositive_curvature = true;
  double previous = kInfinity;
  for (double t : grid) {
    const double d = reg.derivative(t);
    if (d < 0.0) report.nonnegative_derivative = false;
    if (d > previous) report.nonincreasing_derivative = false;
    if (reg.second_derivative(t) > 0.0) report.nonpositive_curvature = false;
    previous = d;
  }
  report.positive_derivative_at_zero = reg.derivative_at_zero_plus() > 0.0;
  return report;
}

Assumption4Report check_assumption4(const Regularizer& reg, std::span<const double> sequence) {
  if (sequence.size() < 2) throw ArgumentError("sequence: needs at least two entries");
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (!(sequence[i] > 0.0)) throw ArgumentError("sequence: entries must be > 0");
    if (i > 0 && !(sequence[i] < sequence[i - 1])) {
      throw ArgumentError("sequence: must be strictly decreasing");
    }
  }

  Assumption4Report report;
  for (double z : sequence) {
    const double d = reg.derivative(z);
    report.z.push_back(z);
    report.derivative.push_back(d);
    report.curvature_ratio.push_back(z * reg.second_derivative(z) / (d * d));
  }

  report.derivative_unbounded = is_infinite(reg.derivative_at_zero_plus());
  report.derivative_increasing = true;
  report.ratio_vanishing = true;
  for (std::size_t i = 1; i < sequence.size(); ++i) {
    if (!(report.derivative[i] > report.derivative[i - 1])) report.derivative_increasing = false;
    if (std::abs(report.curvature_ratio[i]) > std::abs(report.curvature_ratio[i - 1])) {
      report.ratio_vanishing = false;
    }
  }
  if (!(std::abs(report.curvature_ratio.back()) < std::abs(report.curvature_ratio.front()))) {
    report.ratio_vanishing = false;
  }
  report.holds =
      report.derivative_unbounded && report.derivative_increasing && report.ratio_vanishing;
  return report;
}

}  // namespace dirl
