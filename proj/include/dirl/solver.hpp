#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dirl/problem.hpp"
#include "dirl/types.hpp"

namespace dirl {

enum class Algorithm { DIRL1, DIRL2 };

/// How eps shrinks per iteration.
///   Damped     eps+ = (1 - alpha (1 - mu)) eps   (the map T analysed for escape)
///   Geometric  eps+ = mu eps
enum class EpsDecay { Damped, Geometric };

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
std::string_view eps_decay_name(EpsDecay d);
EpsDecay parse_eps_decay(std::string_view name);

struct SolverConfig {
  Algorithm algorithm = Algorithm::DIRL1;
  double alpha = 0.2;
  double beta = 4.0;
  double mu = 0.3;
  /// Either one entry (broadcast) or one per coordinate.
  Vector eps0 = Vector::Constant(1, 1.0);
  EpsDecay eps_decay = EpsDecay::Damped;
  std::size_t max_iter = 100000;
  /// Termination threshold on |x^{k+1} - x^k|_inf.
  double tol_step = 1e-10;
  /// Termination threshold on |eps|_inf.
  double tol_eps = 1e-10;
  /// Both thresholds must hold on this many consecutive iterations.
  std::size_t stall_window = 10;
  /// Keep every k-th trace record (the final record is always kept).
  std::size_t trace_stride = 1;
  /// Store the full per-iteration state (x, eps, y) in the trace.
  bool store_states = false;
  /// Number of trailing iterates kept for support extrapolation.
  std::size_t tail_window = 50;

  Vector eps0_for(Index n) const;
};

/// Benchmark defaults: alpha 0.2, beta 4, mu 0.3, eps0 1, tol_step 1e-10,
/// max_iter 1e5.
SolverConfig default_config(Algorithm algorithm = Algorithm::DIRL1);

struct IterateState {
  std::size_t k = 0;
  Vector x;
  Vector eps;
  /// Last subproblem solution (empty for the initial state).
  Vector y;
  double f_perturbed = 0.0;
  /// |x^k - x^{k-1}|_inf; +inf for the initial state.
  double step_norm = kInfinity;
};

/// Scalar summary of one iteration.
struct TraceRecord {
  std::size_t k = 0;
  double f_perturbed = 0.0;
  double step_norm = kInfinity;
  double eps_inf = 0.0;
  /// Sign pattern of x over {+,-,0} at tolerance 1e-10.
  std::string support;
  /// sum_{t<k} |x^t - x^{t+1}|_2^2, kept cumulative so thinning preserves it.
  double cumulative_step_sq = 0.0;
};

struct LipeomorphismReport {
  bool evaluated = false;
  /// C = max over the trace of |x - grad f(x)/beta|_inf.
  double c_estimate = 0.0;
  /// Lower bound on nonzero magnitudes, (r')^{-1}(C/lambda); LPN only.
  double x_lower = 0.0;
  double l_r = 0.0;
  /// alpha (2 + L/beta + lambda L_r / beta + mu).
  double lhs = 0.0;
  bool satisfied = false;
};

struct SolveTrace {
  std::vector<TraceRecord> records;
  /// Populated only when SolverConfig::store_states is set.
  std::vector<IterateState> states;
  /// Last SolverConfig::tail_window iterates, oldest first.
  std::vector<Vector> tail;
  bool converged = false;
  std::size_t iterations = 0;
  Vector final_x;
  Vector final_eps;
  /// Stationarity residual on the support of final_x.
  double final_residual = 0.0;
  /// Strict-inequality margin on the zero set of final_x.
  double final_margin = kInfinity;
  LipeomorphismReport lipeomorphism;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  LipeomorphismReport lipeomorphism;

  bool ok() const { return errors.empty(); }
  std::string to_string() const;
};

/// Raised by run() when validate_config reports hard errors.
class ConfigError : public ArgumentError {
 public:
  explicit ConfigError(ValidationReport report)
      : ArgumentError(report.to_string()), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Hard errors: alpha or mu outside (0, 1), beta <= alpha L / 2, eps0 not
/// positive or of the wrong length, zero max tolerances.
/// Warnings: the lipeomorphism inequality (with C if supplied, otherwise
/// unverifiable for r'(0+) = inf), alpha >= beta / rho (or rho unknown),
/// the slope-blowup check (check_assumption4) failing for DIRL2.
ValidationReport validate_config(const SolverConfig& config, const Problem& problem,
                                 std::optional<double> rho = std::nullopt,
                                 std::optional<double> c_estimate = std::nullopt);

/// [S_w(z)]_i = sign(z_i) max(|z_i| - w_i, 0); w_i = inf gives 0.
Vector soft_threshold(const Vector& z, const Vector& w);

/// w_i = r'(|x_i| + eps_i); r'(0+) where the argument is 0.
Vector dirl1_weights(const Vector& x, const Vector& eps, const Regularizer& reg);

/// S_{lambda w / beta}(x - grad / beta).
Vector dirl1_subproblem(const Vector& x, const Vector& grad, const Vector& w, double beta,
                        double lambda);

/// u_i = r'(z_i) / (2 z_i) with z_i = sqrt(x_i^2 + eps_i^2); inf where z_i = 0.
Vector dirl2_weights(const Vector& x, const Vector& eps, const Regularizer& reg);

/// y_i = (x_i - grad_i / beta) / (1 + 2 lambda u_i / beta); 0 where u_i = inf.
Vector dirl2_subproblem(const Vector& x, const Vector& grad, const Vector& u, double beta,
                        double lambda);

/// x-part of the subproblem map S^x(x, eps) for either algorithm.
Vector subproblem_map(Algorithm algorithm, const Problem& problem, const Vector& x,
                      const Vector& eps, double beta);

/// One damped step (x, eps) -> ((1 - alpha) x + alpha y, decayed eps).
/// Throws NumericalFailure carrying the iteration index if the perturbed
/// objective rises by more than 1e-10 max(1, |F|).
IterateState dirl1_step(const IterateState& state, const SolverConfig& config,
                        const Problem& problem);
IterateState dirl2_step(const IterateState& state, const SolverConfig& config,
                        const Problem& problem);

double perturbed_value(Algorithm algorithm, const Problem& problem, const Vector& x,
                       const Vector& eps);

IterateState initial_state(const SolverConfig& config, const Problem& problem, const Vector& x0);

/// Runs until |dx|_inf <= tol_step and |eps|_inf <= tol_eps hold for
/// stall_window consecutive iterations, or max_iter is reached.
/// Throws ConfigError on validation errors.
SolveTrace run(const SolverConfig& config, const Problem& problem, const Vector& x0);

/// Post-hoc lipeomorphism parameter check with C estimated from iterates.
LipeomorphismReport lipeomorphism_check(const SolverConfig& config, const Problem& problem,
                                        double c_estimate);

}  // namespace dirl
