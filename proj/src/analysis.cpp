#include "dirl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dirl/solver.hpp"
#include "dirl/symmetric_eigen.hpp"

namespace dirl {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

SupportPattern pattern_from_mask(const Vector& x, const std::vector<bool>& active_mask) {
  SupportPattern pattern;
  pattern.signs.resize(static_cast<std::size_t>(x.size()), 0);
  for (Index i = 0; i < x.size(); ++i) {
    if (active_mask[static_cast<std::size_t>(i)]) {
      pattern.active.push_back(i);
      pattern.signs[static_cast<std::size_t>(i)] = sign_of(x[i]);
    } else {
      pattern.inactive.push_back(i);
    }
  }
  return pattern;
}

}  // namespace

std::string SupportPattern::fingerprint() const {
  std::string s;
  s.reserve(signs.size());
  for (int v : signs) s.push_back(v > 0 ? '+' : (v < 0 ? '-' : '0'));
  return s;
}

SupportPattern support(const Vector& x, double tol) {
  if (!(tol >= 0.0)) throw ArgumentError("tol: must be >= 0");
  std::vector<bool> mask(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) mask[static_cast<std::size_t>(i)] = std::abs(x[i]) > tol;
  return pattern_from_mask(x, mask);
}

std::string support_fingerprint(const Vector& x, double tol) {
  std::string s(static_cast<std::size_t>(x.size()), '0');
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > tol) s[static_cast<std::size_t>(i)] = x[i] > 0.0 ? '+' : '-';
  }
  return s;
}

namespace {

StationarityReport stationarity_for_pattern(const Problem& prob, const Vector& x,
                                            SupportPattern pattern, double tol_residual) {
  const Regularizer& reg = prob.regularizer();
  const Vector grad = prob.gradient_smooth(x);
  StationarityReport report;
  report.tolerance = tol_residual;

  double residual = 0.0;
  for (Index i : pattern.active) {
    const double r = grad[i] + prob.lambda() * sign_of(x[i]) * reg.derivative(std::abs(x[i]));
    residual = std::max(residual, std::abs(r));
  }
  report.residual_active = residual;

  const double d0 = reg.derivative_at_zero_plus();
  if (is_infinite(d0) || pattern.inactive.empty()) {
    report.margin_inactive = kInfinity;
  } else {
    double worst = 0.0;
    for (Index j : pattern.inactive) worst = std::max(worst, std::abs(grad[j]));
    report.margin_inactive = prob.lambda() * d0 - worst;
  }
  report.is_stationary = report.residual_active <= tol_residual && report.margin_inactive > 0.0;
  report.pattern = std::move(pattern);
  return report;
}

}  // namespace

StationarityReport stationarity_residual(const Problem& prob, const Vector& x, double tol_support,
                                         double tol_residual) {
  if (x.size() != prob.dimension()) throw ArgumentError("x: dimension mismatch");
  return stationarity_for_pattern(prob, x, support(x, tol_support), tol_residual);
}

StationarityReport stationarity_with_pattern(const Problem& prob, const Vector& x,
                                             const SupportPattern& pattern, double tol_residual) {
  if (x.size() != prob.dimension()) throw ArgumentError("x: dimension mismatch");
  return stationarity_for_pattern(prob, x, pattern, tol_residual);
}

Matrix restricted_hessian(const Problem& prob, const Vector& x, const SupportPattern& pattern) {
  const Matrix& H = prob.hessian_smooth();
  const auto m = static_cast<Index>(pattern.active.size());
  Matrix out(m, m);
  for (Index a = 0; a < m; ++a) {
    const Index i = pattern.active[static_cast<std::size_t>(a)];
    for (Index b = 0; b < m; ++b) {
      out(a, b) = H(i, pattern.active[static_cast<std::size_t>(b)]);
    }
    out(a, a) += prob.lambda() * prob.regularizer().second_derivative(std::abs(x[i]));
  }
  return out;
}

std::string_view point_class_name(PointClass c) {
  switch (c) {
    case PointClass::StrictLocalMin: return "StrictLocalMin";
    case PointClass::StrictSaddle: return "StrictSaddle";
    case PointClass::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

SaddleReport classify_with_pattern(const Problem& prob, const Vector& x,
                                   const SupportPattern& pattern, double delta,
                                   double stationarity_tol) {
  if (x.size() != prob.dimension()) throw ArgumentError("x: dimension mismatch");
  SaddleReport report;
  report.delta = delta;
  report.stationarity = stationarity_for_pattern(prob, x, pattern, stationarity_tol);
  if (!report.stationarity.is_stationary) {
    std::ostringstream os;
    os << "point is not stationary: residual_active = " << report.stationarity.residual_active
       << ", margin_inactive = " << report.stationarity.margin_inactive;
    throw PreconditionError(os.str(), report.stationarity.residual_active);
  }

  report.restricted_hessian = restricted_hessian(prob, x, pattern);
  if (pattern.active.empty()) {
    // The second-order form ranges over the trivial subspace.
    report.eigenvalues = Vector(0);
    report.classification = PointClass::StrictLocalMin;
    return report;
  }

  const EigenDecomposition eig = symmetric_eigen(report.restricted_hessian);
  report.eigenvalues = eig.values;
  report.lambda_min = eig.values[0];
  report.lambda_max = eig.values[eig.values.size() - 1];
  report.hessian_norm = std::max(std::abs(report.lambda_min), std::abs(report.lambda_max));
  report.negative_definite = report.lambda_max < -delta;
  if (report.lambda_min > delta) {
    report.classification = PointClass::StrictLocalMin;
  } else if (report.lambda_min < -delta) {
    report.classification = PointClass::StrictSaddle;
  } else {
    report.classification = PointClass::Degenerate;
  }
  return report;
}

SaddleReport classify_stationary_point(const Problem& prob, const Vector& x, double tol_support,
                                       double delta, double stationarity_tol) {
  return classify_with_pattern(prob, x, support(x, tol_support), delta, stationarity_tol);
}

bool check_support_identification(const SolveTrace& trace, std::size_t window) {
  if (window == 0) throw ArgumentError("window: must be positive");
  const auto& records = trace.records;
  if (records.size() < window) {
    std::ostringstream os;
    os << "window: trace has " << records.size() << " records, fewer than " << window;
    throw ArgumentError(os.str());
  }
  const std::string& last = records.back().support;
  return std::all_of(records.end() - static_cast<std::ptrdiff_t>(window), records.end(),
                     [&](const TraceRecord& r) { return r.support == last; });
}

SupportPattern extrapolated_support(const std::vector<Vector>& tail, double tol, double max_ratio,
                                    double vanish_tol) {
  if (tail.empty()) throw ArgumentError("tail: must be nonempty");
  const Vector& last = tail.back();
  std::vector<bool> mask(static_cast<std::size_t>(last.size()));
  for (Index i = 0; i < last.size(); ++i) {
    bool active = std::abs(last[i]) > tol;
    if (active && tail.size() >= 3 && std::abs(last[i]) < vanish_tol) {
      bool decaying = true;
      for (std::size_t k = 1; k < tail.size() && decaying; ++k) {
        const double prev = std::abs(tail[k - 1][i]);
        const double cur = std::abs(tail[k][i]);
        decaying = prev > 0.0 && cur <= max_ratio * prev;
      }
      active = !decaying;
    }
    mask[static_cast<std::size_t>(i)] = active;
  }
  return pattern_from_mask(last, mask);
}

}  // namespace dirl
