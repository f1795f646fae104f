#include "dirl/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "dirl/analysis.hpp"
#include "dirl/experiment.hpp"
#include "dirl/jacobian.hpp"
#include "dirl/random.hpp"
#include "dirl/selfcheck.hpp"
#include "dirl/serialization.hpp"
#include "dirl/solver.hpp"

namespace dirl {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ArgumentError("out: cannot write " + path);
  return f;
}

SolverConfig load_config(const std::optional<std::string>& path) {
  return path ? config_from_json(read_json_file(*path)) : SolverConfig{};
}

Json classify_limit_json(const Problem& prob, const SolveTrace& trace) {
  const SupportPattern pattern =
      trace.tail.empty() ? support(trace.final_x) : extrapolated_support(trace.tail);
  Json out;
  out["support"] = pattern_to_json(pattern);
  try {
    const SaddleReport rep = classify_with_pattern(prob, trace.final_x, pattern, kDefaultDegeneracyBand,
                                                   kClassifyGate);
    out["classification"] = std::string(point_class_name(rep.classification));
    out["saddle"] = saddle_to_json(rep);
  } catch (const PreconditionError& e) {
    out["classification"] = "Unclassified";
    out["reason"] = e.what();
  }
  return out;
}

}  // namespace

Vector parse_x0(const std::string& spec, Index n, std::uint64_t seed) {
  if (spec == "zeros") return Vector::Zero(n);
  if (spec.rfind("uniform", 0) == 0) {
    std::uint64_t s = seed;
    if (spec.size() > 7) {
      if (spec[7] != ':') throw ArgumentError("x0: expected uniform:<seed>");
      try {
        std::size_t used = 0;
        s = std::stoull(spec.substr(8), &used);
        if (used != spec.size() - 8) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ArgumentError("x0: bad seed in '" + spec + "'");
      }
    }
    StreamRng rng(s, "x0", 0);
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = rng.uniform(-3.0, 3.0);
    return x;
  }
  std::string text = spec;
  if (text.empty() || text.front() != '[') text = "[" + text + "]";
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error&) {
    throw ArgumentError("x0: expected zeros, uniform:<seed> or a vector, got '" + spec + "'");
  }
  Vector x;
  try {
    x = vector_from_json(j, "x0");
  } catch (const ParseError& e) {
    throw ArgumentError(e.what());
  }
  if (x.size() != n) {
    std::ostringstream os;
    os << "x0: expected " << n << " entries, got " << x.size();
    throw ArgumentError(os.str());
  }
  return x;
}

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    SolverConfig config = load_config(opts.config_path);
    if (opts.trace_full) config.store_states = true;
    const Problem prob = resolve_problem(opts.problem);
    const Vector x0 = parse_x0(opts.x0, prob.dimension(), opts.seed);

    const ValidationReport validation = validate_config(config, prob);
    if (!validation.ok()) {
      err << validation.to_string();
      return kExitError;
    }
    const SolveTrace trace = run(config, prob, x0);

    Json summary;
    summary["problem"] = opts.problem;
    summary["config"] = config_to_json(config);
    summary["x0"] = vector_to_json(x0);
    summary["result"] = trace_summary_to_json(trace);
    summary["limit"] = classify_limit_json(prob, trace);
    Json warnings = Json::array();
    for (const auto& w : validation.warnings) warnings.push_back(w);
    summary["warnings"] = warnings;

    if (opts.out_prefix) {
      std::ofstream csv = open_output(*opts.out_prefix + ".trace.csv");
      write_trace_csv(csv, trace);
      std::ofstream js = open_output(*opts.out_prefix + ".summary.json");
      js << summary.dump(2) << "\n";
      if (opts.trace_full) {
        std::ofstream states = open_output(*opts.out_prefix + ".states.jsonl");
        write_states_jsonl(states, trace);
      }
    } else {
      out << summary.dump(2) << "\n";
    }
    if (!trace.converged) {
      err << "max_iter reached after " << trace.iterations << " iterations\n";
      return kExitMaxIter;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.report().to_string();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

int cmd_classify(const ClassifyOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const Problem prob = resolve_problem(opts.problem);
    const Vector x = parse_x0(opts.x, prob.dimension());
    const StationarityReport st = stationarity_residual(prob, x, kDefaultSupportTol, kClassifyGate);

    Json report;
    report["x"] = vector_to_json(x);
    report["stationarity_gate"] = kClassifyGate;
    report["stationarity"] = stationarity_to_json(st);
    if (!st.is_stationary) {
      out << report.dump(2) << "\n";
      err << "not stationary: residual_active = " << format_double(st.residual_active)
          << ", margin_inactive = " << format_double(st.margin_inactive) << "\n";
      return kExitNotStationary;
    }
    const SaddleReport rep =
        classify_stationary_point(prob, x, kDefaultSupportTol, kDefaultDegeneracyBand, kClassifyGate);
    report["saddle"] = saddle_to_json(rep);

    if (opts.config_path) {
      const SolverConfig cfg = load_config(opts.config_path);
      Json fixed = Json::object();
      for (Algorithm alg : {Algorithm::DIRL1, Algorithm::DIRL2}) {
        try {
          const EquivalenceReport eq =
              saddle_unstable_equivalence(prob, x, cfg.alpha, cfg.beta, cfg.mu, alg);
          fixed[std::string(algorithm_name(alg))] = equivalence_to_json(eq);
        } catch (const PreconditionError& e) {
          fixed[std::string(algorithm_name(alg))] = Json{{"error", e.what()}};
        }
      }
      report["fixed_point"] = fixed;
    }
    out << report.dump(2) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

int cmd_escape(const EscapeOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig config = experiment_from_json(read_json_file(opts.config_path));
    if (opts.seed) config.seed = *opts.seed;
    const EscapeSummary summary = run_escape(config, opts.workers);
    Json result;
    result["experiment"] = experiment_to_json(config);
    result["summary"] = escape_to_json(summary);
    if (opts.out_path) {
      std::ofstream f = open_output(*opts.out_path);
      f << result.dump(2) << "\n";
      out << "fraction_at_saddle " << format_double(summary.fraction_at_saddle) << "\n";
    } else {
      out << result.dump(2) << "\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.report().to_string();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

int cmd_selfcheck(std::ostream& out, std::uint64_t seed) {
  const std::vector<PropertyResult> results = run_selfcheck(seed);
  print_results(out, results);
  for (const PropertyResult& r : results) {
    if (!r.passed) return kExitError;
  }
  return kExitOk;
}

}  // namespace dirl
