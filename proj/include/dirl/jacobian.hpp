#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dirl/analysis.hpp"
#include "dirl/problem.hpp"
#include "dirl/solver.hpp"

namespace dirl {

/// Jacobian of the damped map T(x, eps) at a stationary point (x*, 0).
///
/// In the ordering (x_I, x_J, eps) the matrix is block upper triangular:
///
///   [ diag_block   off_block    eps_block           ]
///   [ 0            scalar_j I   0                   ]
///   [ 0            0            scalar_eps I        ]
///
/// so its spectrum is eig(diag_block) with 1 - alpha repeated |J| times
/// and 1 - alpha (1 - mu) repeated n times.
struct FixedPointJacobian {
  Algorithm algorithm = Algorithm::DIRL1;
  double alpha = 0.0;
  double beta = 0.0;
  double mu = 0.0;
  std::vector<Index> active;
  std::vector<Index> inactive;
  /// Jacobian of the subproblem map S^x restricted to I x I.
  Matrix h_block;
  /// I x I block of DT.
  Matrix diag_block;
  /// I x J block of DT.
  Matrix off_block;
  /// I x n block d T_I / d eps.
  Matrix eps_block;
  double scalar_j = 0.0;
  double scalar_eps = 0.0;
  /// Eigenvalues of diag_block, ascending (real by construction).
  Vector block_eigenvalues;
  /// Full spectrum of DT, ascending.
  Vector spectrum;

  Index dimension() const { return static_cast<Index>(active.size() + inactive.size()); }
  /// Dense 2n x 2n DT in the natural (x, eps) coordinate order.
  Matrix full() const;
};

/// DIRL1: diag_block = I - (alpha/beta) grad^2_{II} F(x*).
/// Throws PreconditionError unless x* is stationary within 1e-6.
FixedPointJacobian dirl1_jacobian(const Problem& prob, const Vector& x_star, double alpha, double beta,
                                  double mu, double tol_support = kDefaultSupportTol);

/// DIRL2: diag_block = (1 - alpha) I + alpha H_II with
/// H_II = I - (1/beta) P^{-1} grad^2_{II} F(x*), P = I + (lambda/beta) diag(r'(|x_i|)/|x_i|).
/// The block spectrum comes from the symmetric congruence P^{-1/2} grad^2 F P^{-1/2}.
/// Also requires r'(0+) = inf or an empty zero set.
FixedPointJacobian dirl2_jacobian(const Problem& prob, const Vector& x_star, double alpha, double beta,
                                  double mu, double tol_support = kDefaultSupportTol);

FixedPointJacobian fixed_point_jacobian(Algorithm algorithm, const Problem& prob, const Vector& x_star,
                                        double alpha, double beta, double mu,
                                        double tol_support = kDefaultSupportTol);

using PointMap = std::function<Vector(const Vector&)>;

/// The damped map T on R^{2n}, p = (x, eps).
PointMap fixed_point_map(Algorithm algorithm, const Problem& prob, double alpha, double beta, double mu,
                         EpsDecay decay = EpsDecay::Damped);

/// Central differences, one column per coordinate of `point`. Throws
/// NumericalFailure naming the column on a non-finite map value.
Matrix finite_difference_jacobian(const PointMap& map, const Vector& point, double h = 1e-6);

/// Analytic DT of the DIRL1 map at a point where every coordinate is off a
/// soft-threshold kink and every active branch has x_i != 0.
Matrix dirl1_map_jacobian(const Problem& prob, const Vector& x, const Vector& eps, double alpha,
                          double beta, double mu);

/// Distance of (x, eps) to the nearest DIRL1 nonsmoothness:
/// min_i min(| |q_i| - tau_i |, |x_i| on active branches) with
/// q = x - grad f / beta and tau = lambda w / beta.
double dirl1_kink_distance(const Problem& prob, const Vector& x, const Vector& eps, double beta);

/// Analytic DT of the DIRL2 map at a point with x_i^2 + eps_i^2 > 0 for all i.
Matrix dirl2_map_jacobian(const Problem& prob, const Vector& x, const Vector& eps, double alpha,
                          double beta, double mu);

/// g(z) = 1 / (1 + (lambda/beta) r'(z)/z), g(0) = 0, and its derivative.
double dirl2_gain(const Regularizer& reg, double lambda, double beta, double z);
double dirl2_gain_derivative(const Regularizer& reg, double lambda, double beta, double z);

/// True iff some eigenvalue has magnitude > 1 + delta.
bool unstable_fixed_point_check(const FixedPointJacobian& jac, double delta = 1e-10);
bool unstable_fixed_point_check(const Vector& spectrum, double delta = 1e-10);

struct EquivalenceReport {
  SaddleReport saddle;
  FixedPointJacobian jacobian;
  bool unstable = false;
  /// rho used for the alpha < beta / rho gate.
  double rho = 0.0;
  /// Whether the stability implication was asserted (StrictLocalMin with alpha < beta/rho).
  bool stability_asserted = false;
  /// No eigenvalue of DT within 1e-10 of zero.
  bool invertible = false;
  bool consistent = false;
  std::string detail;
};

/// Cross-checks the classification against the fixed-point spectrum:
/// StrictSaddle implies unstable; StrictLocalMin with alpha < beta/rho
/// implies every non-structural eigenvalue has magnitude < 1. rho defaults
/// to the restricted-Hessian norm at x_star.
EquivalenceReport saddle_unstable_equivalence(const Problem& prob, const Vector& x_star, double alpha,
                                              double beta, double mu, Algorithm algorithm,
                                              std::optional<double> rho = std::nullopt);

/// Largest restricted-Hessian norm over the stationary points among `points`
/// (non-stationary entries are skipped). Returns 0 if none qualifies.
double empirical_rho(const Problem& prob, const std::vector<Vector>& points);

struct LipschitzEstimate {
  /// max over samples of the spectral norm of the FD Jacobian of (x, eps) -> S^x(x, eps).
  double l_s = 0.0;
  std::size_t samples = 0;
  /// alpha < 1 / (1 + l_s).
  bool damping_ok = false;
};

/// Empirical Lipschitz constant of the DIRL2 subproblem map over sampled
/// (x, eps) pairs with eps > 0.
LipschitzEstimate estimate_subproblem_lipschitz(const Problem& prob, double alpha, double beta,
                                                const std::vector<Vector>& xs,
                                                const std::vector<Vector>& epss, double h = 1e-6);

}  // namespace dirl
