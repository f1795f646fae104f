#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dirl/regularizer.hpp"
#include "dirl/types.hpp"

namespace dirl {

enum class SmoothKind { Quadratic, LeastSquares };

/// Smooth part f of the composite objective. Both kinds have a constant
/// Hessian, so gradient-Lipschitz constants are global and exact.
///
///   Quadratic     f(x) = 1/2 x'Ax + b'x + c     (A symmetric, n x n)
///   LeastSquares  f(x) = 1/2 |Ax - b|^2 + c     (A is m x n)
class SmoothTerm {
 public:
  static SmoothTerm quadratic(Matrix A, Vector b, double c = 0.0);
  static SmoothTerm least_squares(Matrix A, Vector b, double c = 0.0);

  SmoothKind kind() const { return kind_; }
  Index dimension() const { return A_.cols(); }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  double c() const { return c_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  const Matrix& hessian() const { return hessian_; }

 private:
  SmoothTerm(SmoothKind kind, Matrix A, Vector b, double c);

  SmoothKind kind_;
  Matrix A_;
  Vector b_;
  double c_;
  Matrix hessian_;
};

/// F(x) = f(x) + lambda * sum_i r(|x_i|).
class Problem {
 public:
  Problem(SmoothTerm smooth, Regularizer reg, double lambda);

  const SmoothTerm& smooth() const { return smooth_; }
  const Regularizer& regularizer() const { return reg_; }
  double lambda() const { return lambda_; }
  Index dimension() const { return smooth_.dimension(); }

  double objective_value(const Vector& x) const;
  /// f(x) + lambda * sum r(|x_i| + eps_i)
  double perturbed_value_l1(const Vector& x, const Vector& eps) const;
  /// f(x) + lambda * sum r(sqrt(x_i^2 + eps_i^2))
  double perturbed_value_l2(const Vector& x, const Vector& eps) const;

  Vector gradient_smooth(const Vector& x) const;
  const Matrix& hessian_smooth() const { return smooth_.hessian(); }

  /// L of grad f; cached at construction.
  double lipschitz_gradient() const { return lipschitz_; }

  /// F_v(x) = F(x) - <v, x>. The result always carries a Quadratic smooth term.
  Problem with_linear_tilt(const Vector& v) const;

 private:
  void check_dimension(const Vector& x, const char* what) const;

  SmoothTerm smooth_;
  Regularizer reg_;
  double lambda_;
  double lipschitz_;
};

/// Largest-magnitude eigenvalue of a symmetric matrix by power iteration on
/// H^2, stopped at relative change 1e-8 of the Rayleigh quotient.
double estimate_lipschitz_gradient(const Matrix& hessian, double rel_tol = 1e-8,
                                   int max_iter = 10000);

inline double estimate_lipschitz_gradient(const Problem& prob) {
  return estimate_lipschitz_gradient(prob.hessian_smooth());
}

/// f(x) = x1^2 + (x2 - 5/4)^2, LPN p = 1/2, lambda = 1.
Problem benchmark2d();

struct KnownPoint {
  Vector x;
  std::string label;
};

/// The three stationary points of benchmark2d: the origin, the saddle
/// (0, (3 - 2 sqrt 2)/4) and the global minimizer (0, 1).
std::vector<KnownPoint> benchmark2d_stationary_points();

/// Resolves a built-in name ("benchmark2d") or a JSON problem file.
Problem resolve_problem(const std::string& name_or_path);

Problem load_problem(const std::filesystem::path& path);

}  // namespace dirl
