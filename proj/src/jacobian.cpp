#include "dirl/jacobian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dirl/symmetric_eigen.hpp"

namespace dirl {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

Vector sorted(Vector v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

void require_stationary(const Problem& prob, const Vector& x, double tol_support, const char* who) {
  const StationarityReport st = stationarity_residual(prob, x, tol_support, kDefaultStationarityTol);
  if (!st.is_stationary) {
    std::ostringstream os;
    os << who << ": point is not stationary (residual_active = " << st.residual_active
       << ", margin_inactive = " << st.margin_inactive << ")";
    throw PreconditionError(os.str(), st.residual_active);
  }
}

void check_params(double alpha, double beta, double mu) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha: must lie in (0, 1)");
  if (!(beta > 0.0)) throw ArgumentError("beta: must be > 0");
  if (!(mu > 0.0 && mu < 1.0)) throw ArgumentError("mu: must lie in (0, 1)");
}

FixedPointJacobian skeleton(Algorithm algorithm, const SupportPattern& pattern, Index n, double alpha,
                            double beta, double mu) {
  FixedPointJacobian jac;
  jac.algorithm = algorithm;
  jac.alpha = alpha;
  jac.beta = beta;
  jac.mu = mu;
  jac.active = pattern.active;
  jac.inactive = pattern.inactive;
  jac.scalar_j = 1.0 - alpha;
  jac.scalar_eps = 1.0 - alpha * (1.0 - mu);
  const auto m = static_cast<Index>(pattern.active.size());
  jac.off_block = Matrix::Zero(m, static_cast<Index>(pattern.inactive.size()));
  jac.eps_block = Matrix::Zero(m, n);
  return jac;
}

void assemble_spectrum(FixedPointJacobian& jac) {
  const Index m = jac.block_eigenvalues.size();
  const auto nj = static_cast<Index>(jac.inactive.size());
  const Index n = jac.dimension();
  Vector all(m + nj + n);
  all.head(m) = jac.block_eigenvalues;
  all.segment(m, nj).setConstant(jac.scalar_j);
  all.tail(n).setConstant(jac.scalar_eps);
  jac.spectrum = sorted(all);
}

void fill_off_block(FixedPointJacobian& jac, const Matrix& rows) {
  for (std::size_t a = 0; a < jac.active.size(); ++a) {
    for (std::size_t b = 0; b < jac.inactive.size(); ++b) {
      jac.off_block(static_cast<Index>(a), static_cast<Index>(b)) =
          rows(static_cast<Index>(a), jac.inactive[b]);
    }
  }
}

}  // namespace

Matrix FixedPointJacobian::full() const {
  const Index n = dimension();
  Matrix dt = Matrix::Zero(2 * n, 2 * n);
  for (std::size_t a = 0; a < active.size(); ++a) {
    const Index i = active[a];
    for (std::size_t b = 0; b < active.size(); ++b) {
      dt(i, active[b]) = diag_block(static_cast<Index>(a), static_cast<Index>(b));
    }
    for (std::size_t b = 0; b < inactive.size(); ++b) {
      dt(i, inactive[b]) = off_block(static_cast<Index>(a), static_cast<Index>(b));
    }
    dt.block(i, n, 1, n) = eps_block.row(static_cast<Index>(a));
  }
  for (Index j : inactive) dt(j, j) = scalar_j;
  for (Index k = 0; k < n; ++k) dt(n + k, n + k) = scalar_eps;
  return dt;
}

FixedPointJacobian dirl1_jacobian(const Problem& prob, const Vector& x_star, double alpha, double beta,
                                  double mu, double tol_support) {
  check_params(alpha, beta, mu);
  if (x_star.size() != prob.dimension()) throw ArgumentError("x: dimension mismatch");
  require_stationary(prob, x_star, tol_support, "dirl1_jacobian");

  const SupportPattern pattern = support(x_star, tol_support);
  const Index n = prob.dimension();
  FixedPointJacobian jac = skeleton(Algorithm::DIRL1, pattern, n, alpha, beta, mu);
  const Matrix hess_f = prob.hessian_smooth();
  const Matrix hess_F = restricted_hessian(prob, x_star, pattern);
  const auto m = hess_F.rows();

  jac.h_block = Matrix::Identity(m, m) - hess_F / beta;
  jac.diag_block = Matrix::Identity(m, m) - (alpha / beta) * hess_F;

  Matrix rows(m, n);
  for (Index a = 0; a < m; ++a) rows.row(a) = hess_f.row(pattern.active[static_cast<std::size_t>(a)]);
  fill_off_block(jac, -(alpha / beta) * rows);

  const Regularizer& reg = prob.regularizer();
  for (Index a = 0; a < m; ++a) {
    const Index i = pattern.active[static_cast<std::size_t>(a)];
    jac.eps_block(a, i) =
        -(alpha / beta) * prob.lambda() * reg.second_derivative(std::abs(x_star[i])) * sign_of(x_star[i]);
  }

  Vector block(m);
  if (m > 0) {
    const Vector curv = symmetric_eigen(hess_F).values;
    for (Index a = 0; a < m; ++a) block[a] = 1.0 - (alpha / beta) * curv[a];
  }
  jac.block_eigenvalues = sorted(block);
  assemble_spectrum(jac);
  return jac;
}

FixedPointJacobian dirl2_jacobian(const Problem& prob, const Vector& x_star, double alpha, double beta,
                                  double mu, double tol_support) {
  check_params(alpha, beta, mu);
  if (x_star.size() != prob.dimension()) throw ArgumentError("x: dimension mismatch");
  require_stationary(prob, x_star, tol_support, "dirl2_jacobian");

  const SupportPattern pattern = support(x_star, tol_support);
  const Regularizer& reg = prob.regularizer();
  if (!pattern.inactive.empty() && !is_infinite(reg.derivative_at_zero_plus())) {
    throw PreconditionError(
        "dirl2_jacobian: a zero coordinate is a fixed point only when r'(0+) = inf", 0.0);
  }

  const Index n = prob.dimension();
  FixedPointJacobian jac = skeleton(Algorithm::DIRL2, pattern, n, alpha, beta, mu);
  const Matrix hess_f = prob.hessian_smooth();
  const Matrix hess_F = restricted_hessian(prob, x_star, pattern);
  const auto m = hess_F.rows();
  const double lambda = prob.lambda();

  // P = I + (lambda/beta) diag(r'(|x_i|) / |x_i|)
  Vector scale(m);
  for (Index a = 0; a < m; ++a) {
    const double t = std::abs(x_star[pattern.active[static_cast<std::size_t>(a)]]);
    scale[a] = 1.0 + (lambda / beta) * reg.derivative(t) / t;
  }

  jac.h_block = Matrix::Identity(m, m) - (scale.cwiseInverse().asDiagonal() * hess_F) / beta;
  jac.diag_block = (1.0 - alpha) * Matrix::Identity(m, m) + alpha * jac.h_block;

  Matrix rows(m, n);
  for (Index a = 0; a < m; ++a) {
    rows.row(a) = -(alpha / beta) * hess_f.row(pattern.active[static_cast<std::size_t>(a)]) / scale[a];
  }
  fill_off_block(jac, rows);

  Vector block(m);
  if (m > 0) {
    const Vector root_inv = scale.cwiseSqrt().cwiseInverse();
    const Matrix congruent = root_inv.asDiagonal() * hess_F * root_inv.asDiagonal();
    const Matrix sym = 0.5 * (congruent + congruent.transpose());
    const Vector curv = symmetric_eigen(sym).values;
    for (Index a = 0; a < m; ++a) block[a] = 1.0 - (alpha / beta) * curv[a];
  }
  jac.block_eigenvalues = sorted(block);
  assemble_spectrum(jac);
  return jac;
}

FixedPointJacobian fixed_point_jacobian(Algorithm algorithm, const Problem& prob, const Vector& x_star,
                                        double alpha, double beta, double mu, double tol_support) {
  return algorithm == Algorithm::DIRL1 ? dirl1_jacobian(prob, x_star, alpha, beta, mu, tol_support)
                                       : dirl2_jacobian(prob, x_star, alpha, beta, mu, tol_support);
}

PointMap fixed_point_map(Algorithm algorithm, const Problem& prob, double alpha, double beta, double mu,
                         EpsDecay decay) {
  check_params(alpha, beta, mu);
  const double factor = decay == EpsDecay::Damped ? 1.0 - alpha * (1.0 - mu) : mu;
  return [algorithm, &prob, alpha, beta, factor](const Vector& p) {
    const Index n = prob.dimension();
    if (p.size() != 2 * n) throw ArgumentError("p: expected length 2n");
    const Vector x = p.head(n);
    const Vector eps = p.tail(n);
    Vector out(2 * n);
    out.head(n) = (1.0 - alpha) * x + alpha * subproblem_map(algorithm, prob, x, eps, beta);
    out.tail(n) = factor * eps;
    return out;
  };
}

Matrix finite_difference_jacobian(const PointMap& map, const Vector& point, double h) {
  if (!(h > 0.0)) throw ArgumentError("h: must be > 0");
  const Vector center = map(point);
  Matrix jac(center.size(), point.size());
  Vector probe = point;
  for (Index j = 0; j < point.size(); ++j) {
    probe[j] = point[j] + h;
    const Vector plus = map(probe);
    probe[j] = point[j] - h;
    const Vector minus = map(probe);
    probe[j] = point[j];
    if (!plus.allFinite() || !minus.allFinite()) {
      std::ostringstream os;
      os << "finite_difference_jacobian: non-finite map value in column " << j;
      throw NumericalFailure(os.str());
    }
    jac.col(j) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

double dirl1_kink_distance(const Problem& prob, const Vector& x, const Vector& eps, double beta) {
  const Vector q = x - prob.gradient_smooth(x) / beta;
  const Vector w = dirl1_weights(x, eps, prob.regularizer());
  double dist = kInfinity;
  for (Index i = 0; i < x.size(); ++i) {
    const double tau = prob.lambda() / beta * w[i];
    dist = std::min(dist, std::abs(std::abs(q[i]) - tau));
    if (std::abs(q[i]) > tau) dist = std::min(dist, std::abs(x[i]));
  }
  return dist;
}

Matrix dirl1_map_jacobian(const Problem& prob, const Vector& x, const Vector& eps, double alpha,
                          double beta, double mu) {
  check_params(alpha, beta, mu);
  const Index n = prob.dimension();
  if (x.size() != n || eps.size() != n) throw ArgumentError("x, eps: dimension mismatch");
  const Regularizer& reg = prob.regularizer();
  const double lambda = prob.lambda();
  const Matrix& hess = prob.hessian_smooth();
  const Vector q = x - prob.gradient_smooth(x) / beta;

  Matrix ds_dx = Matrix::Zero(n, n);
  Vector ds_deps = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const double t = std::abs(x[i]) + eps[i];
    if (!(t > 0.0)) throw DomainError("dirl1_map_jacobian: |x_i| + eps_i must be > 0");
    const double tau = lambda / beta * reg.derivative(t);
    if (std::abs(q[i]) == tau) throw DomainError("dirl1_map_jacobian: point lies on a kink");
    if (std::abs(q[i]) < tau) continue;
    if (x[i] == 0.0) throw DomainError("dirl1_map_jacobian: active branch with x_i = 0");
    const double curv = sign_of(q[i]) * (lambda / beta) * reg.second_derivative(t);
    ds_dx.row(i) = -hess.row(i) / beta;
    ds_dx(i, i) += 1.0 - curv * sign_of(x[i]);
    ds_deps[i] = -curv;
  }

  Matrix dt = Matrix::Zero(2 * n, 2 * n);
  dt.topLeftCorner(n, n) = (1.0 - alpha) * Matrix::Identity(n, n) + alpha * ds_dx;
  dt.topRightCorner(n, n) = (alpha * ds_deps).asDiagonal();
  dt.bottomRightCorner(n, n) = (1.0 - alpha * (1.0 - mu)) * Matrix::Identity(n, n);
  return dt;
}

double dirl2_gain(const Regularizer& reg, double lambda, double beta, double z) {
  if (z < 0.0) throw DomainError("z: must be >= 0");
  if (z == 0.0) return 0.0;
  return z / (z + lambda / beta * reg.derivative(z));
}

double dirl2_gain_derivative(const Regularizer& reg, double lambda, double beta, double z) {
  if (!(z > 0.0)) throw DomainError("z: must be > 0");
  const double c = lambda / beta;
  const double d1 = reg.derivative(z);
  const double denom = z + c * d1;
  return -c * (reg.second_derivative(z) * z - d1) / (denom * denom);
}

Matrix dirl2_map_jacobian(const Problem& prob, const Vector& x, const Vector& eps, double alpha,
                          double beta, double mu) {
  check_params(alpha, beta, mu);
  const Index n = prob.dimension();
  if (x.size() != n || eps.size() != n) throw ArgumentError("x, eps: dimension mismatch");
  const Regularizer& reg = prob.regularizer();
  const double lambda = prob.lambda();
  const Matrix& hess = prob.hessian_smooth();
  const Vector q = x - prob.gradient_smooth(x) / beta;

  Matrix ds_dx(n, n);
  Vector ds_deps(n);
  for (Index i = 0; i < n; ++i) {
    const double z = std::hypot(x[i], eps[i]);
    if (!(z > 0.0)) throw DomainError("dirl2_map_jacobian: x_i^2 + eps_i^2 must be > 0");
    const double g = dirl2_gain(reg, lambda, beta, z);
    const double dg = dirl2_gain_derivative(reg, lambda, beta, z);
    ds_dx.row(i) = -g * hess.row(i) / beta;
    ds_dx(i, i) += g + (x[i] / z) * dg * q[i];
    ds_deps[i] = (eps[i] / z) * dg * q[i];
  }

  Matrix dt = Matrix::Zero(2 * n, 2 * n);
  dt.topLeftCorner(n, n) = (1.0 - alpha) * Matrix::Identity(n, n) + alpha * ds_dx;
  dt.topRightCorner(n, n) = (alpha * ds_deps).asDiagonal();
  dt.bottomRightCorner(n, n) = (1.0 - alpha * (1.0 - mu)) * Matrix::Identity(n, n);
  return dt;
}

bool unstable_fixed_point_check(const Vector& spectrum, double delta) {
  for (Index i = 0; i < spectrum.size(); ++i) {
    if (std::abs(spectrum[i]) > 1.0 + delta) return true;
  }
  return false;
}

bool unstable_fixed_point_check(const FixedPointJacobian& jac, double delta) {
  return unstable_fixed_point_check(jac.spectrum, delta);
}

EquivalenceReport saddle_unstable_equivalence(const Problem& prob, const Vector& x_star, double alpha,
                                              double beta, double mu, Algorithm algorithm,
                                              std::optional<double> rho) {
  EquivalenceReport rep;
  rep.saddle = classify_stationary_point(prob, x_star);
  rep.jacobian = fixed_point_jacobian(algorithm, prob, x_star, alpha, beta, mu);
  rep.unstable = unstable_fixed_point_check(rep.jacobian);
  rep.rho = rho.value_or(rep.saddle.hessian_norm);
  rep.invertible = (rep.jacobian.spectrum.array().abs() > 1e-10).all();

  std::ostringstream os;
  os << point_class_name(rep.saddle.classification) << ", " << (rep.unstable ? "unstable" : "stable");
  switch (rep.saddle.classification) {
    case PointClass::StrictSaddle:
      rep.consistent = rep.unstable;
      if (!rep.consistent) os << ": strict saddle without an eigenvalue of magnitude > 1";
      break;
    case PointClass::StrictLocalMin: {
      rep.stability_asserted = rep.rho == 0.0 || alpha < beta / rep.rho;
      if (rep.stability_asserted) {
        const Vector& block = rep.jacobian.block_eigenvalues;
        rep.consistent = (block.array().abs() < 1.0).all();
        if (!rep.consistent) os << ": local minimum with a block eigenvalue of magnitude >= 1";
      } else {
        rep.consistent = true;
        os << ": alpha >= beta/rho, stability not asserted";
      }
      break;
    }
    case PointClass::Degenerate:
      rep.consistent = true;
      os << ": degenerate, nothing asserted";
      break;
  }
  rep.detail = os.str();
  return rep;
}

double empirical_rho(const Problem& prob, const std::vector<Vector>& points) {
  double rho = 0.0;
  for (const Vector& x : points) {
    try {
      rho = std::max(rho, classify_stationary_point(prob, x).hessian_norm);
    } catch (const PreconditionError&) {
    }
  }
  return rho;
}

LipschitzEstimate estimate_subproblem_lipschitz(const Problem& prob, double alpha, double beta,
                                                const std::vector<Vector>& xs,
                                                const std::vector<Vector>& epss, double h) {
  if (xs.size() != epss.size()) throw ArgumentError("epss: must pair with xs");
  const Index n = prob.dimension();
  const PointMap map = [&prob, beta, n](const Vector& p) {
    return subproblem_map(Algorithm::DIRL2, prob, p.head(n), p.tail(n).cwiseAbs(), beta);
  };
  LipschitzEstimate est;
  for (std::size_t s = 0; s < xs.size(); ++s) {
    Vector p(2 * n);
    p << xs[s], epss[s];
    if ((p.tail(n).array() <= h).any()) continue;
    const Matrix jac = finite_difference_jacobian(map, p, h);
    const Matrix gram = jac.transpose() * jac;
    const Vector vals = symmetric_eigen(0.5 * (gram + gram.transpose())).values;
    est.l_s = std::max(est.l_s, std::sqrt(std::max(0.0, vals[vals.size() - 1])));
    ++est.samples;
  }
  est.damping_ok = alpha < 1.0 / (1.0 + est.l_s);
  return est;
}

}  // namespace dirl
