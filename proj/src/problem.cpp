#include "dirl/problem.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dirl/serialization.hpp"

namespace dirl {

SmoothTerm::SmoothTerm(SmoothKind kind, Matrix A, Vector b, double c)
    : kind_(kind), A_(std::move(A)), b_(std::move(b)), c_(c) {
  if (!A_.allFinite() || !b_.allFinite() || !std::isfinite(c_)) {
    throw ArgumentError("A: smooth term data must be finite");
  }
  if (A_.cols() == 0) throw ArgumentError("A: must have at least one column");
  if (kind_ == SmoothKind::Quadratic) {
    if (A_.rows() != A_.cols()) throw ArgumentError("A: quadratic term needs a square matrix");
    const double scale = std::max(1.0, A_.cwiseAbs().maxCoeff());
    if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw ArgumentError("A: quadratic term needs a symmetric matrix");
    }
    if (b_.size() != A_.rows()) throw ArgumentError("b: length must equal the dimension of A");
    hessian_ = A_;
  } else {
    if (b_.size() != A_.rows()) throw ArgumentError("b: length must equal the row count of A");
    hessian_ = A_.transpose() * A_;
  }
}

SmoothTerm SmoothTerm::quadratic(Matrix A, Vector b, double c) {
  return SmoothTerm(SmoothKind::Quadratic, std::move(A), std::move(b), c);
}

SmoothTerm SmoothTerm::least_squares(Matrix A, Vector b, double c) {
  return SmoothTerm(SmoothKind::LeastSquares, std::move(A), std::move(b), c);
}

double SmoothTerm::value(const Vector& x) const {
  if (kind_ == SmoothKind::Quadratic) {
    return 0.5 * x.dot(A_ * x) + b_.dot(x) + c_;
  }
  return 0.5 * (A_ * x - b_).squaredNorm() + c_;
}

Vector SmoothTerm::gradient(const Vector& x) const {
  if (kind_ == SmoothKind::Quadratic) return A_ * x + b_;
  return A_.transpose() * (A_ * x - b_);
}

Problem::Problem(SmoothTerm smooth, Regularizer reg, double lambda)
    : smooth_(std::move(smooth)), reg_(std::move(reg)), lambda_(lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    std::ostringstream os;
    os << "lambda: must be finite and > 0, got " << lambda;
    throw ArgumentError(os.str());
  }
  lipschitz_ = estimate_lipschitz_gradient(smooth_.hessian());
}

void Problem::check_dimension(const Vector& x, const char* what) const {
  if (x.size() != dimension()) {
    std::ostringstream os;
    os << what << ": expected length " << dimension() << ", got " << x.size();
    throw ArgumentError(os.str());
  }
}

double Problem::objective_value(const Vector& x) const {
  check_dimension(x, "x");
  double penalty = 0.0;
  for (Index i = 0; i < x.size(); ++i) penalty += reg_.value(std::abs(x[i]));
  return smooth_.value(x) + lambda_ * penalty;
}

double Problem::perturbed_value_l1(const Vector& x, const Vector& eps) const {
  check_dimension(x, "x");
  check_dimension(eps, "eps");
  if ((eps.array() < 0.0).any()) throw ArgumentError("eps: entries must be >= 0");
  double penalty = 0.0;
  for (Index i = 0; i < x.size(); ++i) penalty += reg_.value(std::abs(x[i]) + eps[i]);
  return smooth_.value(x) + lambda_ * penalty;
}

double Problem::perturbed_value_l2(const Vector& x, const Vector& eps) const {
  check_dimension(x, "x");
  check_dimension(eps, "eps");
  if ((eps.array() < 0.0).any()) throw ArgumentError("eps: entries must be >= 0");
  double penalty = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    // hypot(x, 0) == |x| exactly, so eps = 0 reproduces objective_value.
    penalty += reg_.value(std::hypot(x[i], eps[i]));
  }
  return smooth_.value(x) + lambda_ * penalty;
}

Vector Problem::gradient_smooth(const Vector& x) const {
  check_dimension(x, "x");
  return smooth_.gradient(x);
}

Problem Problem::with_linear_tilt(const Vector& v) const {
  check_dimension(v, "v");
  const Matrix& A = smooth_.A();
  const Vector& b = smooth_.b();
  if (smooth_.kind() == SmoothKind::Quadratic) {
    return Problem(SmoothTerm::quadratic(A, b - v, smooth_.c()), reg_, lambda_);
  }
  // 1/2|Ax - b|^2 = 1/2 x'A'Ax - (A'b)'x + 1/2|b|^2
  Matrix H = A.transpose() * A;
  H = 0.5 * (H + H.transpose());
  return Problem(SmoothTerm::quadratic(H, -(A.transpose() * b) - v, 0.5 * b.squaredNorm() + smooth_.c()),
                 reg_, lambda_);
}

double estimate_lipschitz_gradient(const Matrix& hessian, double rel_tol, int max_iter) {
  const Index n = hessian.rows();
  if (n == 0) return 0.0;
  if (hessian.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  // Deterministic start with no exact symmetry so it is unlikely to be
  // orthogonal to the dominant eigenvector.
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * std::sin(static_cast<double>(i + 1));
  v.normalize();

  double rayleigh = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector hv = hessian * v;
    Vector w = hessian.transpose() * hv;  // H^2 v, PSD
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - rayleigh) <= rel_tol * std::abs(next)) {
      rayleigh = next;
      break;
    }
    rayleigh = next;
  }
  return std::sqrt(std::max(rayleigh, 0.0));
}

Problem benchmark2d() {
  Matrix A = 2.0 * Matrix::Identity(2, 2);
  Vector b(2);
  b << 0.0, -2.5;
  return Problem(SmoothTerm::quadratic(A, b, 25.0 / 16.0), Regularizer(Family::LPN, 0.5), 1.0);
}

std::vector<KnownPoint> benchmark2d_stationary_points() {
  // On the x2-axis, s = sqrt(x2) solves 4s^3 - 5s + 1 = (s - 1)(4s^2 + 4s - 1) = 0.
  const double saddle = (3.0 - 2.0 * std::numbers::sqrt2) / 4.0;
  return {
      {Vector::Zero(2), "origin"},
      {(Vector(2) << 0.0, saddle).finished(), "saddle"},
      {(Vector(2) << 0.0, 1.0).finished(), "global_min"},
  };
}

Problem resolve_problem(const std::string& name_or_path) {
  if (name_or_path == "benchmark2d") return benchmark2d();
  return load_problem(name_or_path);
}

Problem load_problem(const std::filesystem::path& path) {
  return problem_from_json(read_json_file(path));
}

}  // namespace dirl
