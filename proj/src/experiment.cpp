#include "dirl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "dirl/analysis.hpp"
#include "dirl/random.hpp"

namespace dirl {

namespace {

constexpr std::size_t kSupportWindow = 50;

Vector broadcast(const Vector& v, Index n, const char* field) {
  if (v.size() == 1) return Vector::Constant(n, v[0]);
  if (v.size() != n) throw ArgumentError(std::string(field) + ": expected 1 or n entries");
  return v;
}

Vector bound_from_json(const Json& j, const std::string& field) {
  return j.is_array() ? vector_from_json(j, field) : Vector::Constant(1, number_from_json(j, field));
}

// Per-run diagnostics derived from the trace.
void fill_diagnostics(InitRecord& rec, const SolveTrace& trace, const SolverConfig& cfg,
                      const Problem& prob) {
  const auto& recs = trace.records;
  const double slope = cfg.beta / cfg.alpha - prob.lipschitz_gradient() / 2.0;
  rec.telescope_gap = recs.front().f_perturbed - recs.back().f_perturbed -
                      slope * recs.back().cumulative_step_sq;
  rec.max_increase = -kInfinity;
  for (std::size_t k = 1; k < recs.size(); ++k) {
    rec.max_increase = std::max(rec.max_increase, recs[k].f_perturbed - recs[k - 1].f_perturbed);
  }
  if (recs.size() < 2) rec.max_increase = 0.0;
  const Vector zero = Vector::Zero(trace.final_x.size());
  const Vector s = subproblem_map(cfg.algorithm, prob, trace.final_x, zero, cfg.beta);
  rec.fixed_point_residual = (trace.final_x - s).cwiseAbs().maxCoeff();
  rec.support_stable = recs.size() >= kSupportWindow && check_support_identification(trace, kSupportWindow);
}

KnownLimit classify_limit(const Problem& prob, const std::string& label, const Vector& x,
                          const SupportPattern& pattern, bool analytic) {
  KnownLimit k;
  k.label = label;
  k.x = x;
  k.analytic = analytic;
  try {
    const SaddleReport rep = classify_with_pattern(prob, x, pattern);
    k.classification = std::string(point_class_name(rep.classification));
    k.lambda_min = rep.lambda_min;
    k.hessian_norm = rep.hessian_norm;
  } catch (const PreconditionError&) {
    k.classification = "Unclassified";
  }
  return k;
}

}  // namespace

ExperimentConfig experiment_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("experiment", "expected a JSON object");
  ExperimentConfig c;
  if (j.contains("problem")) {
    if (!j["problem"].is_string()) throw ParseError("problem", "expected a name or path");
    c.problem = j["problem"].get<std::string>();
  }
  if (j.contains("solver")) c.solver = config_from_json(j["solver"], c.solver);
  if (j.contains("num_inits")) {
    const Json& n = j["num_inits"];
    if (!n.is_number_integer() || n.get<long long>() < 1) throw ParseError("num_inits", "expected an integer >= 1");
    c.num_inits = static_cast<std::size_t>(n.get<long long>());
  }
  if (j.contains("init_box")) {
    const Json& box = j["init_box"];
    if (!box.is_object() || !box.contains("lower") || !box.contains("upper")) {
      throw ParseError("init_box", "expected {\"lower\": ..., \"upper\": ...}");
    }
    c.init_lower = bound_from_json(box["lower"], "init_box.lower");
    c.init_upper = bound_from_json(box["upper"], "init_box.upper");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) throw ParseError("seed", "expected an integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("saddle_radius")) c.saddle_radius = number_from_json(j["saddle_radius"], "saddle_radius");
  if (j.contains("cluster_radius")) c.cluster_radius = number_from_json(j["cluster_radius"], "cluster_radius");
  if (j.contains("perturbation") && !j["perturbation"].is_null()) {
    const Json& p = j["perturbation"];
    if (p.is_array()) {
      c.perturbation = vector_from_json(p, "perturbation");
    } else if (p.is_object() && p.contains("scale")) {
      c.perturbation_scale = number_from_json(p["scale"], "perturbation.scale");
    } else {
      throw ParseError("perturbation", "expected an array or {\"scale\": s}");
    }
  }
  if (!(c.saddle_radius > 0.0)) throw ParseError("saddle_radius", "must be > 0");
  if (!(c.cluster_radius > 0.0)) throw ParseError("cluster_radius", "must be > 0");
  return c;
}

Json experiment_to_json(const ExperimentConfig& c) {
  Json out;
  out["problem"] = c.problem;
  out["solver"] = config_to_json(c.solver);
  out["num_inits"] = c.num_inits;
  out["init_box"] = Json{{"lower", vector_to_json(c.init_lower)}, {"upper", vector_to_json(c.init_upper)}};
  out["seed"] = c.seed;
  out["saddle_radius"] = c.saddle_radius;
  out["cluster_radius"] = c.cluster_radius;
  if (c.perturbation) {
    out["perturbation"] = vector_to_json(*c.perturbation);
  } else if (c.perturbation_scale) {
    out["perturbation"] = Json{{"scale", *c.perturbation_scale}};
  }
  return out;
}

Problem experiment_problem(const ExperimentConfig& config, Vector* tilt) {
  Problem base = resolve_problem(config.problem);
  const Index n = base.dimension();
  Vector v;
  if (config.perturbation) {
    if (config.perturbation->size() != n) throw ArgumentError("perturbation: expected n entries");
    v = *config.perturbation;
  } else if (config.perturbation_scale) {
    StreamRng rng(config.seed, "perturbation", 0);
    v.resize(n);
    for (Index i = 0; i < n; ++i) v[i] = *config.perturbation_scale * rng.normal();
  }
  if (tilt) *tilt = v;
  return v.size() ? base.with_linear_tilt(v) : base;
}

Vector experiment_init(const ExperimentConfig& config, std::size_t index, Index n) {
  const Vector lo = broadcast(config.init_lower, n, "init_box.lower");
  const Vector hi = broadcast(config.init_upper, n, "init_box.upper");
  if (!(lo.array() < hi.array()).all()) throw ArgumentError("init_box: lower must be < upper elementwise");
  StreamRng rng(config.seed, "init", index);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = rng.uniform(lo[i], hi[i]);
  return x;
}

EscapeSummary run_escape(const ExperimentConfig& config, std::size_t workers) {
  if (config.num_inits == 0) throw ArgumentError("num_inits: must be >= 1");
  EscapeSummary summary;
  const Problem prob = experiment_problem(config, &summary.perturbation);
  const Index n = prob.dimension();

  const ValidationReport validation = validate_config(config.solver, prob);
  if (!validation.ok()) throw ConfigError(validation);

  std::vector<InitRecord> records(config.num_inits);
  std::vector<std::vector<Vector>> tails(config.num_inits);
  for (std::size_t i = 0; i < config.num_inits; ++i) {
    records[i].index = i;
    records[i].init = experiment_init(config, i, n);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.num_inits; i = next++) {
      InitRecord& rec = records[i];
      try {
        SolveTrace trace = run(config.solver, prob, rec.init);
        rec.final_x = trace.final_x;
        rec.converged = trace.converged;
        rec.iterations = trace.iterations;
        rec.residual = trace.final_residual;
        fill_diagnostics(rec, trace, config.solver, prob);
        tails[i] = std::move(trace.tail);
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, config.num_inits));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Everything below runs in init order, so the result is independent of threads.
  if (config.problem == "benchmark2d" && summary.perturbation.size() == 0) {
    for (const KnownPoint& p : benchmark2d_stationary_points()) {
      summary.known_points.push_back(classify_limit(prob, p.label, p.x, support(p.x), true));
    }
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    InitRecord& rec = records[i];
    if (rec.failed) continue;
    std::size_t best = summary.known_points.size();
    double best_d = kInfinity;
    for (std::size_t k = 0; k < summary.known_points.size(); ++k) {
      const double d = (rec.final_x - summary.known_points[k].x).norm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    if (rec.converged && best_d > config.cluster_radius) {
      const std::string label = "limit_" + std::to_string(summary.known_points.size());
      const SupportPattern pattern = tails[i].empty() ? support(rec.final_x) : extrapolated_support(tails[i]);
      summary.known_points.push_back(classify_limit(prob, label, rec.final_x, pattern, false));
      best = summary.known_points.size() - 1;
      best_d = 0.0;
    }
    if (best < summary.known_points.size()) {
      rec.nearest_known_point = summary.known_points[best].label;
      rec.distance = best_d;
    }
  }

  std::vector<std::size_t> counts(summary.known_points.size(), 0);
  std::size_t not_converged = 0, failed = 0, at_saddle = 0;
  for (const InitRecord& rec : records) {
    if (rec.failed) {
      ++failed;
      continue;
    }
    bool near_saddle = false;
    for (const KnownLimit& k : summary.known_points) {
      if (k.classification == "StrictSaddle" && (rec.final_x - k.x).norm() <= config.saddle_radius) {
        near_saddle = true;
      }
    }
    if (near_saddle) ++at_saddle;
    if (!rec.converged || rec.distance > config.cluster_radius) {
      ++not_converged;
      continue;
    }
    for (std::size_t k = 0; k < summary.known_points.size(); ++k) {
      if (summary.known_points[k].label == rec.nearest_known_point) ++counts[k];
    }
  }
  for (std::size_t k = 0; k < summary.known_points.size(); ++k) {
    summary.counts.emplace_back(summary.known_points[k].label, counts[k]);
    const KnownLimit& kp = summary.known_points[k];
    if (!kp.analytic && kp.classification == "Degenerate") ++summary.degenerate_limits;
  }
  summary.counts.emplace_back("not_converged", not_converged);
  summary.counts.emplace_back("failed", failed);
  summary.fraction_at_saddle = static_cast<double>(at_saddle) / static_cast<double>(config.num_inits);

  for (const KnownLimit& k : summary.known_points) {
    summary.rho_empirical = std::max(summary.rho_empirical, k.hessian_norm);
  }
  summary.records = std::move(records);
  return summary;
}

Json escape_to_json(const EscapeSummary& s, bool include_records) {
  Json out;
  out["num_inits"] = s.records.size();
  out["fraction_at_saddle"] = s.fraction_at_saddle;
  out["degenerate_limits"] = s.degenerate_limits;
  out["rho_empirical"] = s.rho_empirical;
  out["perturbation"] = vector_to_json(s.perturbation);
  Json counts = Json::object();
  for (const auto& [label, count] : s.counts) counts[label] = count;
  out["counts"] = counts;
  Json known = Json::array();
  for (const KnownLimit& k : s.known_points) {
    known.push_back(Json{{"label", k.label},
                         {"x", vector_to_json(k.x)},
                         {"classification", k.classification},
                         {"lambda_min", number_to_json(k.lambda_min)},
                         {"analytic", k.analytic}});
  }
  out["known_points"] = known;
  if (include_records) {
    Json recs = Json::array();
    for (const InitRecord& r : s.records) {
      Json j;
      j["init"] = vector_to_json(r.init);
      j["final_x"] = vector_to_json(r.final_x);
      j["converged"] = r.converged;
      j["iterations"] = r.iterations;
      j["residual"] = number_to_json(r.residual);
      j["nearest_known_point"] = r.nearest_known_point;
      j["distance"] = number_to_json(r.distance);
      if (r.failed) j["error"] = r.error;
      recs.push_back(std::move(j));
    }
    out["records"] = recs;
  }
  return out;
}

}  // namespace dirl
