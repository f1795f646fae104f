#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "dirl/types.hpp"

namespace dirl {

/// Exit codes shared by the command front ends.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitMaxIter = 2;
inline constexpr int kExitNotStationary = 3;

/// Looser stationarity gate used by `classify`.
inline constexpr double kClassifyGate = 1e-4;

/// Parses "zeros", "uniform" / "uniform:<seed>" (box [-3, 3]^n) or a literal
/// vector ("1,2", "[1, 2]"). `seed` is used by a bare "uniform".
Vector parse_x0(const std::string& spec, Index n, std::uint64_t seed = 0);

struct SolveOptions {
  std::optional<std::string> config_path;
  std::string problem = "benchmark2d";
  std::string x0 = "zeros";
  /// Output prefix: writes <out>.trace.csv, <out>.summary.json and, with
  /// trace_full, <out>.states.jsonl. Without it the summary goes to `out`.
  std::optional<std::string> out_prefix;
  std::uint64_t seed = 0;
  bool trace_full = false;
};

/// 0 converged, 2 max_iter, 1 error (validation report on `err`).
int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err);

struct ClassifyOptions {
  std::string problem = "benchmark2d";
  std::string x;
  /// Adds fixed-point Jacobian checks for both algorithms with these parameters.
  std::optional<std::string> config_path;
};

/// Prints the stationarity and saddle reports as JSON; 3 when x is not
/// stationary within 1e-4.
int cmd_classify(const ClassifyOptions& opts, std::ostream& out, std::ostream& err);

struct EscapeOptions {
  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
};

int cmd_escape(const EscapeOptions& opts, std::ostream& out, std::ostream& err);

/// Runs every property suite; 0 iff all pass.
int cmd_selfcheck(std::ostream& out, std::uint64_t seed = 20240601);

}  // namespace dirl
