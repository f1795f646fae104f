#include "dirl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dirl/analysis.hpp"

namespace dirl {

std::string_view algorithm_name(Algorithm a) { return a == Algorithm::DIRL1 ? "DIRL1" : "DIRL2"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "DIRL1" || name == "dirl1") return Algorithm::DIRL1;
  if (name == "DIRL2" || name == "dirl2") return Algorithm::DIRL2;
  throw ArgumentError("algorithm: expected DIRL1 or DIRL2, got '" + std::string(name) + "'");
}

std::string_view eps_decay_name(EpsDecay d) { return d == EpsDecay::Damped ? "damped" : "geometric"; }

EpsDecay parse_eps_decay(std::string_view name) {
  if (name == "damped" || name == "Damped") return EpsDecay::Damped;
  if (name == "geometric" || name == "Geometric") return EpsDecay::Geometric;
  throw ArgumentError("eps_decay: expected damped or geometric, got '" + std::string(name) + "'");
}

Vector SolverConfig::eps0_for(Index n) const {
  if (eps0.size() == 1) return Vector::Constant(n, eps0[0]);
  if (eps0.size() != n) {
    std::ostringstream os;
    os << "eps0: expected 1 or " << n << " entries, got " << eps0.size();
    throw ArgumentError(os.str());
  }
  return eps0;
}

SolverConfig default_config(Algorithm algorithm) {
  SolverConfig config;
  config.algorithm = algorithm;
  return config;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& e : errors) os << "error: " << e << "\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  return os.str();
}

LipeomorphismReport lipeomorphism_check(const SolverConfig& config, const Problem& problem,
                                        double c_estimate) {
  LipeomorphismReport report;
  const Regularizer& reg = problem.regularizer();
  report.c_estimate = c_estimate;
  if (reg.classify().lipschitz_at_zero) {
    report.l_r = reg.curvature_bound();
  } else {
    if (!(c_estimate > 0.0)) return report;
    report.x_lower = reg.inverse_derivative(c_estimate / problem.lambda());
    report.l_r = std::abs(reg.second_derivative(report.x_lower));
  }
  report.lhs = config.alpha * (2.0 + problem.lipschitz_gradient() / config.beta +
                               problem.lambda() / config.beta * report.l_r + config.mu);
  report.satisfied = report.lhs < 1.0;
  report.evaluated = std::isfinite(report.lhs);
  return report;
}

ValidationReport validate_config(const SolverConfig& config, const Problem& problem,
                                 std::optional<double> rho, std::optional<double> c_estimate) {
  ValidationReport report;
  auto error = [&](const std::string& s) { report.errors.push_back(s); };
  auto warn = [&](const std::string& s) { report.warnings.push_back(s); };

  if (!(config.alpha > 0.0 && config.alpha < 1.0)) error("alpha must lie in (0, 1)");
  if (!(config.mu > 0.0 && config.mu < 1.0)) error("mu must lie in (0, 1)");
  const double L = problem.lipschitz_gradient();
  if (!(config.beta > config.alpha * L / 2.0)) {
    std::ostringstream os;
    os << "beta must exceed alpha * L / 2 = " << config.alpha * L / 2.0 << " (beta = " << config.beta
       << ", L = " << L << ")";
    error(os.str());
  }
  if (config.eps0.size() != 1 && config.eps0.size() != problem.dimension()) {
    error("eps0 must have 1 or n entries");
  } else if (!(config.eps0.array() > 0.0).all() || !config.eps0.allFinite()) {
    error("eps0 must be positive and finite");
  }
  if (!(config.tol_step > 0.0)) error("tol_step must be > 0");
  if (!(config.tol_eps > 0.0)) error("tol_eps must be > 0");
  if (config.trace_stride == 0) error("trace_stride must be >= 1");
  if (config.stall_window == 0) error("stall_window must be >= 1");
  if (!report.ok()) return report;

  const Regularizer& reg = problem.regularizer();
  if (reg.classify().lipschitz_at_zero || c_estimate) {
    report.lipeomorphism = lipeomorphism_check(config, problem, c_estimate.value_or(0.0));
    if (!report.lipeomorphism.satisfied) {
      std::ostringstream os;
      os << "lipeomorphism inequality alpha(2 + L/beta + lambda L_r/beta + mu) < 1 violated: lhs = "
         << report.lipeomorphism.lhs;
      warn(os.str());
    }
  } else {
    warn("lipeomorphism inequality unverifiable before the run: L_r depends on the level-set bound C");
  }

  if (rho) {
    if (!(config.alpha < config.beta / *rho)) {
      std::ostringstream os;
      os << "alpha >= beta / rho = " << config.beta / *rho << "; DT may be singular at stationary points";
      warn(os.str());
    }
  } else {
    warn("rho unknown; invertibility condition alpha < beta / rho not verified");
  }

  if (config.algorithm == Algorithm::DIRL2 && reg.classify().lipschitz_at_zero) {
    warn("DIRL2 with a regularizer that has finite r'(0+): local smoothness of the map is not guaranteed");
  }
  return report;
}

Vector soft_threshold(const Vector& z, const Vector& w) {
  if (z.size() != w.size()) throw ArgumentError("w: length must match z");
  Vector out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    if (std::isnan(w[i]) || w[i] < 0.0) throw ArgumentError("w: entries must be >= 0");
    const double shrunk = std::abs(z[i]) - w[i];
    out[i] = shrunk > 0.0 ? std::copysign(shrunk, z[i]) : 0.0;
  }
  return out;
}

Vector dirl1_weights(const Vector& x, const Vector& eps, const Regularizer& reg) {
  if (x.size() != eps.size()) throw ArgumentError("eps: length must match x");
  Vector w(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double t = std::abs(x[i]) + eps[i];
    w[i] = t > 0.0 ? reg.derivative(t) : reg.derivative_at_zero_plus();
  }
  return w;
}

Vector dirl1_subproblem(const Vector& x, const Vector& grad, const Vector& w, double beta,
                        double lambda) {
  if (!(beta > 0.0)) throw ArgumentError("beta: must be > 0");
  return soft_threshold(x - grad / beta, (lambda / beta) * w);
}

Vector dirl2_weights(const Vector& x, const Vector& eps, const Regularizer& reg) {
  if (x.size() != eps.size()) throw ArgumentError("eps: length must match x");
  Vector u(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double z = std::hypot(x[i], eps[i]);
    u[i] = z > 0.0 ? reg.derivative(z) / (2.0 * z) : kInfinity;
  }
  return u;
}

Vector dirl2_subproblem(const Vector& x, const Vector& grad, const Vector& u, double beta,
                        double lambda) {
  if (!(beta > 0.0)) throw ArgumentError("beta: must be > 0");
  Vector y(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    if (is_infinite(u[i])) {
      y[i] = 0.0;
    } else {
      y[i] = (x[i] - grad[i] / beta) / (1.0 + 2.0 * lambda / beta * u[i]);
    }
  }
  return y;
}

Vector subproblem_map(Algorithm algorithm, const Problem& problem, const Vector& x,
                      const Vector& eps, double beta) {
  const Vector grad = problem.gradient_smooth(x);
  if (algorithm == Algorithm::DIRL1) {
    return dirl1_subproblem(x, grad, dirl1_weights(x, eps, problem.regularizer()), beta,
                            problem.lambda());
  }
  return dirl2_subproblem(x, grad, dirl2_weights(x, eps, problem.regularizer()), beta,
                          problem.lambda());
}

double perturbed_value(Algorithm algorithm, const Problem& problem, const Vector& x,
                       const Vector& eps) {
  return algorithm == Algorithm::DIRL1 ? problem.perturbed_value_l1(x, eps)
                                       : problem.perturbed_value_l2(x, eps);
}

namespace {

double decay_factor(const SolverConfig& config) {
  return config.eps_decay == EpsDecay::Damped ? 1.0 - config.alpha * (1.0 - config.mu) : config.mu;
}

// Shared body of both steps. `shifted_inf` receives |x - grad/beta|_inf.
IterateState step_impl(Algorithm algorithm, const IterateState& state, const SolverConfig& config,
                       const Problem& problem, double* shifted_inf) {
  const Vector grad = problem.gradient_smooth(state.x);
  if (shifted_inf) *shifted_inf = (state.x - grad / config.beta).cwiseAbs().maxCoeff();

  IterateState next;
  next.k = state.k + 1;
  if (algorithm == Algorithm::DIRL1) {
    next.y = dirl1_subproblem(state.x, grad, dirl1_weights(state.x, state.eps, problem.regularizer()),
                              config.beta, problem.lambda());
  } else {
    next.y = dirl2_subproblem(state.x, grad, dirl2_weights(state.x, state.eps, problem.regularizer()),
                              config.beta, problem.lambda());
  }
  next.x = (1.0 - config.alpha) * state.x + config.alpha * next.y;
  next.eps = decay_factor(config) * state.eps;
  next.f_perturbed = perturbed_value(algorithm, problem, next.x, next.eps);
  next.step_norm = (next.x - state.x).cwiseAbs().maxCoeff();

  if (!next.x.allFinite() || !std::isfinite(next.f_perturbed)) {
    throw NumericalFailure("non-finite iterate", next.k);
  }
  const double slack = 1e-10 * std::max(1.0, std::abs(state.f_perturbed));
  if (next.f_perturbed > state.f_perturbed + slack) {
    std::ostringstream os;
    os << algorithm_name(algorithm) << " descent violated at iteration " << next.k << ": F rose from "
       << state.f_perturbed << " to " << next.f_perturbed;
    throw NumericalFailure(os.str(), next.k);
  }
  return next;
}

}  // namespace

IterateState dirl1_step(const IterateState& state, const SolverConfig& config,
                        const Problem& problem) {
  if (config.algorithm != Algorithm::DIRL1) throw ArgumentError("algorithm: dirl1_step needs DIRL1");
  return step_impl(Algorithm::DIRL1, state, config, problem, nullptr);
}

IterateState dirl2_step(const IterateState& state, const SolverConfig& config,
                        const Problem& problem) {
  if (config.algorithm != Algorithm::DIRL2) throw ArgumentError("algorithm: dirl2_step needs DIRL2");
  return step_impl(Algorithm::DIRL2, state, config, problem, nullptr);
}

IterateState initial_state(const SolverConfig& config, const Problem& problem, const Vector& x0) {
  if (x0.size() != problem.dimension()) throw ArgumentError("x0: dimension mismatch");
  if (!x0.allFinite()) throw ArgumentError("x0: entries must be finite");
  IterateState state;
  state.k = 0;
  state.x = x0;
  state.eps = config.eps0_for(problem.dimension());
  state.f_perturbed = perturbed_value(config.algorithm, problem, state.x, state.eps);
  state.step_norm = kInfinity;
  return state;
}

SolveTrace run(const SolverConfig& config, const Problem& problem, const Vector& x0) {
  ValidationReport validation = validate_config(config, problem);
  if (!validation.ok()) throw ConfigError(std::move(validation));

  SolveTrace trace;
  IterateState state = initial_state(config, problem, x0);
  double cumulative = 0.0;
  double c_estimate = 0.0;

  auto record = [&](const IterateState& s, bool force) {
    if (!force && s.k % config.trace_stride != 0) return;
    if (!trace.records.empty() && trace.records.back().k == s.k) return;
    trace.records.push_back(TraceRecord{s.k, s.f_perturbed, s.step_norm,
                                        s.eps.size() ? s.eps.cwiseAbs().maxCoeff() : 0.0,
                                        support_fingerprint(s.x), cumulative});
    if (config.store_states) trace.states.push_back(s);
  };
  auto remember = [&](const Vector& x) {
    if (config.tail_window == 0) return;
    if (trace.tail.size() == config.tail_window) trace.tail.erase(trace.tail.begin());
    trace.tail.push_back(x);
  };

  record(state, true);
  remember(state.x);

  std::size_t calm = 0;
  while (state.k < config.max_iter) {
    double shifted = 0.0;
    IterateState next = step_impl(config.algorithm, state, config, problem, &shifted);
    c_estimate = std::max(c_estimate, shifted);
    cumulative += (next.x - state.x).squaredNorm();
    state = std::move(next);
    remember(state.x);

    const double eps_inf = state.eps.cwiseAbs().maxCoeff();
    calm = (state.step_norm <= config.tol_step && eps_inf <= config.tol_eps) ? calm + 1 : 0;
    if (calm >= config.stall_window) {
      trace.converged = true;
      break;
    }
    record(state, false);
  }
  record(state, true);

  trace.iterations = state.k;
  trace.final_x = state.x;
  trace.final_eps = state.eps;
  // Coordinates still decaying geometrically toward zero count as inactive.
  const SupportPattern pattern =
      trace.tail.empty() ? support(state.x) : extrapolated_support(trace.tail);
  const StationarityReport st = stationarity_with_pattern(problem, state.x, pattern);
  trace.final_residual = st.residual_active;
  trace.final_margin = st.margin_inactive;
  trace.lipeomorphism = lipeomorphism_check(config, problem, c_estimate);
  return trace;
}

}  // namespace dirl
