#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "dirl/analysis.hpp"
#include "dirl/jacobian.hpp"
#include "dirl/problem.hpp"
#include "dirl/regularizer.hpp"
#include "dirl/solver.hpp"

namespace dirl {

using Json = nlohmann::ordered_json;

/// Parses a JSON file; ParseError("file", ...) on I/O or syntax errors.
Json read_json_file(const std::filesystem::path& path);

// JSON has no infinity: +-inf is written as the strings "inf" / "-inf" and
// accepted back on input.
Json number_to_json(double v);
double number_from_json(const Json& j, const std::string& field);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& field);
/// Row-major nested arrays.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& field);

/// {"family": "LPN", "p": 0.5}. Custom penalties cannot be serialized.
Json regularizer_to_json(const Regularizer& reg);
Regularizer regularizer_from_json(const Json& j);

/// {"smooth": {"kind", "A", "b", "c"}, "regularizer": {...}, "lambda": ...}
Json problem_to_json(const Problem& prob);
Problem problem_from_json(const Json& j);

/// Keys mirror SolverConfig; absent keys keep the values of `base`.
/// "eps0" may be a number or an array.
Json config_to_json(const SolverConfig& config);
SolverConfig config_from_json(const Json& j, const SolverConfig& base = SolverConfig{});

Json pattern_to_json(const SupportPattern& pattern);
Json stationarity_to_json(const StationarityReport& report);
Json saddle_to_json(const SaddleReport& report);
Json lipeomorphism_to_json(const LipeomorphismReport& report);
/// Blocks as row-major arrays; spectrum as a sorted list of {re, im}.
Json jacobian_to_json(const FixedPointJacobian& jac);
Json equivalence_to_json(const EquivalenceReport& report);

/// Scalar summary of a run (no per-iteration data).
Json trace_summary_to_json(const SolveTrace& trace);

/// k,F_perturbed,step_norm,eps_inf,support_bits
void write_trace_csv(std::ostream& out, const SolveTrace& trace);
/// One JSON object per stored state: {"k", "x", "eps", "y", "F_perturbed", "step_norm"}.
void write_states_jsonl(std::ostream& out, const SolveTrace& trace);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace dirl
