#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dirl/problem.hpp"
#include "dirl/types.hpp"

namespace dirl {

struct SolveTrace;

inline constexpr double kDefaultSupportTol = 1e-10;
inline constexpr double kDefaultDegeneracyBand = 1e-8;
inline constexpr double kDefaultStationarityTol = 1e-6;

/// Active set I(x) = {i : |x_i| > tol}, its complement J(x) and sign(x).
struct SupportPattern {
  std::vector<Index> active;
  std::vector<Index> inactive;
  std::vector<int> signs;

  /// Sign pattern over {+,-,0}, one character per coordinate.
  std::string fingerprint() const;
};

SupportPattern support(const Vector& x, double tol = kDefaultSupportTol);

/// Sign-pattern string of x at tolerance tol without building index sets.
std::string support_fingerprint(const Vector& x, double tol = kDefaultSupportTol);

struct StationarityReport {
  /// max_{i in I} |grad_i f + lambda sign(x_i) r'(|x_i|)|; 0 when I is empty.
  double residual_active = 0.0;
  /// lambda r'(0+) - max_{i in J} |grad_i f|; +inf if r'(0+) = inf or J empty.
  double margin_inactive = kInfinity;
  bool is_stationary = false;
  double tolerance = kDefaultStationarityTol;
  SupportPattern pattern;
};

StationarityReport stationarity_residual(const Problem& prob, const Vector& x,
                                         double tol_support = kDefaultSupportTol,
                                         double tol_residual = kDefaultStationarityTol);

/// Same report over an explicit support pattern.
StationarityReport stationarity_with_pattern(const Problem& prob, const Vector& x,
                                             const SupportPattern& pattern,
                                             double tol_residual = kDefaultStationarityTol);

/// grad^2_{II} f(x) + lambda diag(r''(|x_i|)) over the active set.
Matrix restricted_hessian(const Problem& prob, const Vector& x, const SupportPattern& pattern);

enum class PointClass { StrictLocalMin, StrictSaddle, Degenerate };

std::string_view point_class_name(PointClass c);

struct SaddleReport {
  Matrix restricted_hessian;
  /// Ascending eigenvalues of the restricted Hessian.
  Vector eigenvalues;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  /// Spectral norm of the restricted Hessian (an empirical rho).
  double hessian_norm = 0.0;
  PointClass classification = PointClass::StrictLocalMin;
  /// Every direction in the active subspace has negative curvature.
  bool negative_definite = false;
  double delta = kDefaultDegeneracyBand;
  StationarityReport stationarity;
};

/// Classifies a stationary point by lambda_min of the restricted Hessian.
/// An empty active set is classified StrictLocalMin. Throws
/// PreconditionError carrying the residual when x is not stationary at
/// `stationarity_tol`.
SaddleReport classify_stationary_point(const Problem& prob, const Vector& x,
                                       double tol_support = kDefaultSupportTol,
                                       double delta = kDefaultDegeneracyBand,
                                       double stationarity_tol = kDefaultStationarityTol);

/// Same as above with an explicit support pattern (e.g. an extrapolated one).
SaddleReport classify_with_pattern(const Problem& prob, const Vector& x,
                                   const SupportPattern& pattern,
                                   double delta = kDefaultDegeneracyBand,
                                   double stationarity_tol = kDefaultStationarityTol);

/// True iff the recorded sign pattern is identical across the final
/// `window` records. Throws ArgumentError when the trace is shorter.
bool check_support_identification(const SolveTrace& trace, std::size_t window);

/// Support that additionally assigns to J every coordinate whose magnitude
/// shrinks geometrically (ratio <= max_ratio every step) across `tail` and
/// ends below `vanish_tol`. `tail` holds consecutive iterates, oldest first.
SupportPattern extrapolated_support(const std::vector<Vector>& tail,
                                    double tol = kDefaultSupportTol,
                                    double max_ratio = 0.99, double vanish_tol = 1e-6);

}  // namespace dirl
