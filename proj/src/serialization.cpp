#include "dirl/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace dirl {

namespace {

// Library errors carry a "field: message" prefix; lift it into a ParseError.
[[noreturn]] void rethrow_as_parse(const std::exception& e, const std::string& fallback) {
  const std::string what = e.what();
  const auto colon = what.find(": ");
  if (colon != std::string::npos && colon > 0 && what.find(' ') > colon) {
    throw ParseError(what.substr(0, colon), what.substr(colon + 2));
  }
  throw ParseError(fallback, what);
}

const Json& require(const Json& j, const char* key, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(field.empty() ? key : field + "." + key, "missing");
  return *it;
}

std::string require_string(const Json& j, const std::string& field) {
  if (!j.is_string()) throw ParseError(field, "expected a string");
  return j.get<std::string>();
}

std::size_t require_count(const Json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ParseError(field, "expected a nonnegative integer");
  }
  return static_cast<std::size_t>(j.get<long long>());
}

bool require_bool(const Json& j, const std::string& field) {
  if (!j.is_boolean()) throw ParseError(field, "expected a boolean");
  return j.get<bool>();
}

Json index_list(const std::vector<Index>& idx) {
  Json out = Json::array();
  for (Index i : idx) out.push_back(i);
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("file", "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError("file", path.string() + ": " + e.what());
  }
}

Json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
  }
  throw ParseError(field, "expected a number");
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number_to_json(v[i]));
  return out;
}

Vector vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = number_from_json(j[i], field);
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ParseError(field, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw ParseError(field, "expected an array of rows");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ParseError(field, "rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = number_from_json(j[r][c], field);
    }
  }
  return m;
}

Json regularizer_to_json(const Regularizer& reg) {
  if (reg.family() == Family::Custom) throw ArgumentError("regularizer: custom penalties are not serializable");
  Json out;
  out["family"] = std::string(family_name(reg.family()));
  out["p"] = reg.p();
  return out;
}

Regularizer regularizer_from_json(const Json& j) {
  const std::string name = require_string(require(j, "family", "regularizer"), "family");
  const double p = number_from_json(require(j, "p", "regularizer"), "p");
  try {
    return Regularizer(parse_family(name), p);
  } catch (const std::invalid_argument& e) {
    rethrow_as_parse(e, "regularizer");
  }
}

Json problem_to_json(const Problem& prob) {
  const SmoothTerm& s = prob.smooth();
  Json smooth;
  smooth["kind"] = s.kind() == SmoothKind::Quadratic ? "quadratic" : "least_squares";
  smooth["A"] = matrix_to_json(s.A());
  smooth["b"] = vector_to_json(s.b());
  smooth["c"] = s.c();
  Json out;
  out["smooth"] = smooth;
  out["regularizer"] = regularizer_to_json(prob.regularizer());
  out["lambda"] = prob.lambda();
  return out;
}

Problem problem_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("problem", "expected a JSON object");
  const Json& smooth = require(j, "smooth", "");
  const std::string kind = require_string(require(smooth, "kind", "smooth"), "kind");
  Matrix A = matrix_from_json(require(smooth, "A", "smooth"), "A");
  Vector b = vector_from_json(require(smooth, "b", "smooth"), "b");
  double c = 0.0;
  if (smooth.contains("c")) c = number_from_json(smooth["c"], "c");
  Regularizer reg = regularizer_from_json(require(j, "regularizer", ""));
  const double lambda = number_from_json(require(j, "lambda", ""), "lambda");

  try {
    SmoothTerm term = [&] {
      if (kind == "quadratic") return SmoothTerm::quadratic(std::move(A), std::move(b), c);
      if (kind == "least_squares") return SmoothTerm::least_squares(std::move(A), std::move(b), c);
      throw ParseError("kind", "expected \"quadratic\" or \"least_squares\", got \"" + kind + "\"");
    }();
    return Problem(std::move(term), std::move(reg), lambda);
  } catch (const std::invalid_argument& e) {
    rethrow_as_parse(e, "problem");
  }
}

Json config_to_json(const SolverConfig& config) {
  Json out;
  out["algorithm"] = std::string(algorithm_name(config.algorithm));
  out["alpha"] = config.alpha;
  out["beta"] = config.beta;
  out["mu"] = config.mu;
  if (config.eps0.size() == 1) {
    out["eps0"] = config.eps0[0];
  } else {
    out["eps0"] = vector_to_json(config.eps0);
  }
  out["eps_decay"] = std::string(eps_decay_name(config.eps_decay));
  out["max_iter"] = config.max_iter;
  out["tol_step"] = config.tol_step;
  out["tol_eps"] = config.tol_eps;
  out["stall_window"] = config.stall_window;
  out["trace_stride"] = config.trace_stride;
  out["store_states"] = config.store_states;
  out["tail_window"] = config.tail_window;
  return out;
}

SolverConfig config_from_json(const Json& j, const SolverConfig& base) {
  if (!j.is_object()) throw ParseError("config", "expected a JSON object");
  SolverConfig c = base;
  try {
    if (j.contains("algorithm")) c.algorithm = parse_algorithm(require_string(j["algorithm"], "algorithm"));
    if (j.contains("eps_decay")) c.eps_decay = parse_eps_decay(require_string(j["eps_decay"], "eps_decay"));
  } catch (const std::invalid_argument& e) {
    rethrow_as_parse(e, "config");
  }
  if (j.contains("alpha")) c.alpha = number_from_json(j["alpha"], "alpha");
  if (j.contains("beta")) c.beta = number_from_json(j["beta"], "beta");
  if (j.contains("mu")) c.mu = number_from_json(j["mu"], "mu");
  if (j.contains("eps0")) {
    const Json& e = j["eps0"];
    c.eps0 = e.is_array() ? vector_from_json(e, "eps0") : Vector::Constant(1, number_from_json(e, "eps0"));
  }
  if (j.contains("max_iter")) c.max_iter = require_count(j["max_iter"], "max_iter");
  if (j.contains("tol_step")) c.tol_step = number_from_json(j["tol_step"], "tol_step");
  if (j.contains("tol_eps")) c.tol_eps = number_from_json(j["tol_eps"], "tol_eps");
  if (j.contains("stall_window")) c.stall_window = require_count(j["stall_window"], "stall_window");
  if (j.contains("trace_stride")) c.trace_stride = require_count(j["trace_stride"], "trace_stride");
  if (j.contains("store_states")) c.store_states = require_bool(j["store_states"], "store_states");
  if (j.contains("tail_window")) c.tail_window = require_count(j["tail_window"], "tail_window");
  return c;
}

Json pattern_to_json(const SupportPattern& pattern) {
  Json out;
  out["active"] = index_list(pattern.active);
  out["inactive"] = index_list(pattern.inactive);
  out["signs"] = pattern.signs;
  out["fingerprint"] = pattern.fingerprint();
  return out;
}

Json stationarity_to_json(const StationarityReport& report) {
  Json out;
  out["residual_active"] = number_to_json(report.residual_active);
  out["margin_inactive"] = number_to_json(report.margin_inactive);
  out["is_stationary"] = report.is_stationary;
  out["tolerance"] = report.tolerance;
  out["support"] = pattern_to_json(report.pattern);
  return out;
}

Json saddle_to_json(const SaddleReport& report) {
  Json out;
  out["classification"] = std::string(point_class_name(report.classification));
  out["lambda_min"] = number_to_json(report.lambda_min);
  out["lambda_max"] = number_to_json(report.lambda_max);
  out["hessian_norm"] = number_to_json(report.hessian_norm);
  out["negative_definite"] = report.negative_definite;
  out["delta"] = report.delta;
  out["eigenvalues"] = vector_to_json(report.eigenvalues);
  out["restricted_hessian"] = matrix_to_json(report.restricted_hessian);
  return out;
}

Json lipeomorphism_to_json(const LipeomorphismReport& report) {
  Json out;
  out["evaluated"] = report.evaluated;
  out["c_estimate"] = number_to_json(report.c_estimate);
  out["x_lower"] = number_to_json(report.x_lower);
  out["l_r"] = number_to_json(report.l_r);
  out["lhs"] = number_to_json(report.lhs);
  out["satisfied"] = report.satisfied;
  return out;
}

Json jacobian_to_json(const FixedPointJacobian& jac) {
  Json out;
  out["algorithm"] = std::string(algorithm_name(jac.algorithm));
  out["alpha"] = jac.alpha;
  out["beta"] = jac.beta;
  out["mu"] = jac.mu;
  out["active"] = index_list(jac.active);
  out["inactive"] = index_list(jac.inactive);
  out["h_block"] = matrix_to_json(jac.h_block);
  out["diag_block"] = matrix_to_json(jac.diag_block);
  out["off_block"] = matrix_to_json(jac.off_block);
  out["eps_block"] = matrix_to_json(jac.eps_block);
  out["scalar_j"] = jac.scalar_j;
  out["scalar_eps"] = jac.scalar_eps;
  Json spectrum = Json::array();
  for (Index i = 0; i < jac.spectrum.size(); ++i) {
    spectrum.push_back(Json{{"re", number_to_json(jac.spectrum[i])}, {"im", 0.0}});
  }
  out["spectrum"] = spectrum;
  return out;
}

Json equivalence_to_json(const EquivalenceReport& report) {
  Json out;
  out["classification"] = std::string(point_class_name(report.saddle.classification));
  out["unstable"] = report.unstable;
  out["rho"] = number_to_json(report.rho);
  out["stability_asserted"] = report.stability_asserted;
  out["invertible"] = report.invertible;
  out["consistent"] = report.consistent;
  out["detail"] = report.detail;
  out["jacobian"] = jacobian_to_json(report.jacobian);
  return out;
}

Json trace_summary_to_json(const SolveTrace& trace) {
  Json out;
  out["converged"] = trace.converged;
  out["iterations"] = trace.iterations;
  out["final_x"] = vector_to_json(trace.final_x);
  out["final_eps_inf"] = number_to_json(trace.final_eps.size() ? trace.final_eps.cwiseAbs().maxCoeff() : 0.0);
  out["final_residual"] = number_to_json(trace.final_residual);
  out["final_margin"] = number_to_json(trace.final_margin);
  if (!trace.records.empty()) out["final_F_perturbed"] = number_to_json(trace.records.back().f_perturbed);
  out["lipeomorphism"] = lipeomorphism_to_json(trace.lipeomorphism);
  return out;
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
  out << "k,F_perturbed,step_norm,eps_inf,support_bits\n";
  for (const TraceRecord& r : trace.records) {
    out << r.k << ',' << format_double(r.f_perturbed) << ',' << format_double(r.step_norm) << ','
        << format_double(r.eps_inf) << ',' << r.support << '\n';
  }
}

void write_states_jsonl(std::ostream& out, const SolveTrace& trace) {
  for (const IterateState& s : trace.states) {
    Json line;
    line["k"] = s.k;
    line["x"] = vector_to_json(s.x);
    line["eps"] = vector_to_json(s.eps);
    line["y"] = vector_to_json(s.y);
    line["F_perturbed"] = number_to_json(s.f_perturbed);
    line["step_norm"] = number_to_json(s.step_norm);
    out << line.dump() << '\n';
  }
}

}  // namespace dirl
