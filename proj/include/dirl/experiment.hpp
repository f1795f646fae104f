#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dirl/problem.hpp"
#include "dirl/serialization.hpp"
#include "dirl/solver.hpp"

namespace dirl {

struct ExperimentConfig {
  /// Built-in name or problem file path.
  std::string problem = "benchmark2d";
  SolverConfig solver;
  std::size_t num_inits = 1000;
  /// Broadcast when of length 1.
  Vector init_lower = Vector::Constant(1, -3.0);
  Vector init_upper = Vector::Constant(1, 3.0);
  std::uint64_t seed = 0;
  double saddle_radius = 1e-3;
  /// Limits closer than this are merged into one known point.
  double cluster_radius = 1e-3;
  /// Fixed tilt v for F_v(x) = F(x) - <v, x>.
  std::optional<Vector> perturbation;
  /// When set (and no fixed tilt), v ~ scale * N(0, I) from the seeded stream.
  std::optional<double> perturbation_scale;
};

/// Keys: problem, solver, num_inits, init_box {lower, upper}, seed,
/// saddle_radius, cluster_radius, perturbation (array, or {"scale": s}).
ExperimentConfig experiment_from_json(const Json& j);
Json experiment_to_json(const ExperimentConfig& config);

struct KnownLimit {
  std::string label;
  Vector x;
  /// "StrictLocalMin", "StrictSaddle", "Degenerate" or "Unclassified".
  std::string classification;
  double lambda_min = 0.0;
  double hessian_norm = 0.0;
  /// True for analytic points injected up front.
  bool analytic = false;
};

struct InitRecord {
  std::size_t index = 0;
  Vector init;
  Vector final_x;
  bool converged = false;
  bool failed = false;
  std::string error;
  std::size_t iterations = 0;
  double residual = 0.0;
  std::string nearest_known_point;
  double distance = kInfinity;
  /// F(x^0, eps^0) - F(x^k, eps^k) - (beta/alpha - L/2) sum |dx|^2.
  double telescope_gap = 0.0;
  /// Largest single-step increase of the perturbed objective (<= 0 under descent).
  double max_increase = 0.0;
  /// |x - S^x(x, 0)|_inf at the final iterate.
  double fixed_point_residual = 0.0;
  /// Sign pattern constant over the last 50 records (false if fewer).
  bool support_stable = false;
};

struct EscapeSummary {
  Vector perturbation;
  std::vector<KnownLimit> known_points;
  std::vector<InitRecord> records;
  /// Label -> count over known points, then "not_converged" and "failed".
  std::vector<std::pair<std::string, std::size_t>> counts;
  double fraction_at_saddle = 0.0;
  /// Known points (excluding analytic ones) that classify as Degenerate.
  std::size_t degenerate_limits = 0;
  double rho_empirical = 0.0;
};

/// The problem the experiment actually solves (tilted when requested).
Problem experiment_problem(const ExperimentConfig& config, Vector* tilt = nullptr);

/// Init i drawn from the box with StreamRng(seed, "init", i).
Vector experiment_init(const ExperimentConfig& config, std::size_t index, Index n);

/// Runs every init (on `workers` threads), then clusters and classifies the
/// limits in init order. The result does not depend on `workers`.
EscapeSummary run_escape(const ExperimentConfig& config, std::size_t workers = 1);

Json escape_to_json(const EscapeSummary& summary, bool include_records = true);

}  // namespace dirl
