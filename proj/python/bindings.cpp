#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dirl/analysis.hpp"
#include "dirl/experiment.hpp"
#include "dirl/jacobian.hpp"
#include "dirl/problem.hpp"
#include "dirl/regularizer.hpp"
#include "dirl/selfcheck.hpp"
#include "dirl/serialization.hpp"
#include "dirl/solver.hpp"

namespace py = pybind11;
using namespace dirl;

namespace {

// Reports cross the boundary as JSON text; the Python wrapper decodes them.
std::string dump(const Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Damped iteratively reweighted l1/l2 solvers and stationary-point analysis";

  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  py::enum_<Family>(m, "Family")
      .value("EXP", Family::EXP)
      .value("LOG", Family::LOG)
      .value("FRA", Family::FRA)
      .value("LPN", Family::LPN)
      .value("TAN", Family::TAN);

  py::class_<Regularizer>(m, "Regularizer")
      .def(py::init([](const std::string& family, double p) { return Regularizer(parse_family(family), p); }),
           py::arg("family"), py::arg("p"))
      .def_property_readonly("family", [](const Regularizer& r) { return std::string(family_name(r.family())); })
      .def_property_readonly("p", &Regularizer::p)
      .def("value", &Regularizer::value, py::arg("t"))
      .def("derivative", &Regularizer::derivative, py::arg("t"))
      .def("second_derivative", &Regularizer::second_derivative, py::arg("t"))
      .def("derivative_at_zero_plus", &Regularizer::derivative_at_zero_plus)
      .def_property_readonly("lipschitz_at_zero", [](const Regularizer& r) { return r.classify().lipschitz_at_zero; })
      .def("assumption4_holds", [](const Regularizer& r, const std::vector<double>& seq) {
        return check_assumption4(r, seq).holds;
      })
      .def("__repr__", [](const Regularizer& r) { return "Regularizer(" + r.name() + ")"; });

  py::class_<Problem>(m, "Problem")
      .def_static("quadratic",
                  [](const Matrix& A, const Vector& b, double c, const Regularizer& reg, double lambda) {
                    return Problem(SmoothTerm::quadratic(A, b, c), reg, lambda);
                  },
                  py::arg("A"), py::arg("b"), py::arg("c"), py::arg("regularizer"), py::arg("lam"))
      .def_static("least_squares",
                  [](const Matrix& A, const Vector& b, double c, const Regularizer& reg, double lambda) {
                    return Problem(SmoothTerm::least_squares(A, b, c), reg, lambda);
                  },
                  py::arg("A"), py::arg("b"), py::arg("c"), py::arg("regularizer"), py::arg("lam"))
      .def_static("from_json", [](const std::string& text) { return problem_from_json(Json::parse(text)); })
      .def_property_readonly("dimension", &Problem::dimension)
      .def_property_readonly("lam", &Problem::lambda)
      .def_property_readonly("regularizer", &Problem::regularizer)
      .def_property_readonly("lipschitz_gradient", &Problem::lipschitz_gradient)
      .def("objective_value", &Problem::objective_value, py::arg("x"))
      .def("perturbed_value_l1", &Problem::perturbed_value_l1, py::arg("x"), py::arg("eps"))
      .def("perturbed_value_l2", &Problem::perturbed_value_l2, py::arg("x"), py::arg("eps"))
      .def("gradient", &Problem::gradient_smooth, py::arg("x"))
      .def("hessian", [](const Problem& p) { return Matrix(p.hessian_smooth()); })
      .def("to_json", [](const Problem& p) { return dump(problem_to_json(p)); });

  m.def("benchmark2d", &benchmark2d);
  m.def("load_problem", [](const std::string& path) { return load_problem(path); }, py::arg("path"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init([](const std::string& algorithm) { return default_config(parse_algorithm(algorithm)); }),
           py::arg("algorithm") = "DIRL1")
      .def_property("algorithm",
                    [](const SolverConfig& c) { return std::string(algorithm_name(c.algorithm)); },
                    [](SolverConfig& c, const std::string& a) { c.algorithm = parse_algorithm(a); })
      .def_property("eps_decay",
                    [](const SolverConfig& c) { return std::string(eps_decay_name(c.eps_decay)); },
                    [](SolverConfig& c, const std::string& d) { c.eps_decay = parse_eps_decay(d); })
      .def_readwrite("alpha", &SolverConfig::alpha)
      .def_readwrite("beta", &SolverConfig::beta)
      .def_readwrite("mu", &SolverConfig::mu)
      .def_readwrite("eps0", &SolverConfig::eps0)
      .def_readwrite("max_iter", &SolverConfig::max_iter)
      .def_readwrite("tol_step", &SolverConfig::tol_step)
      .def_readwrite("tol_eps", &SolverConfig::tol_eps)
      .def_readwrite("stall_window", &SolverConfig::stall_window)
      .def_readwrite("trace_stride", &SolverConfig::trace_stride)
      .def_readwrite("store_states", &SolverConfig::store_states)
      .def("to_json", [](const SolverConfig& c) { return dump(config_to_json(c)); });

  py::class_<TraceRecord>(m, "TraceRecord")
      .def_readonly("k", &TraceRecord::k)
      .def_readonly("f_perturbed", &TraceRecord::f_perturbed)
      .def_readonly("step_norm", &TraceRecord::step_norm)
      .def_readonly("eps_inf", &TraceRecord::eps_inf)
      .def_readonly("support", &TraceRecord::support)
      .def_readonly("cumulative_step_sq", &TraceRecord::cumulative_step_sq);

  py::class_<SolveTrace>(m, "SolveTrace")
      .def_readonly("records", &SolveTrace::records)
      .def_readonly("converged", &SolveTrace::converged)
      .def_readonly("iterations", &SolveTrace::iterations)
      .def_readonly("final_x", &SolveTrace::final_x)
      .def_readonly("final_eps", &SolveTrace::final_eps)
      .def_readonly("final_residual", &SolveTrace::final_residual)
      .def_readonly("final_margin", &SolveTrace::final_margin)
      .def("states", [](const SolveTrace& t) {
        std::vector<Vector> xs;
        for (const auto& s : t.states) xs.push_back(s.x);
        return xs;
      })
      .def("support_identified", &check_support_identification, py::arg("window"))
      .def("summary_json", [](const SolveTrace& t) { return dump(trace_summary_to_json(t)); });

  m.def("validate_config", [](const SolverConfig& c, const Problem& p) {
    const ValidationReport r = validate_config(c, p);
    return py::make_tuple(r.errors, r.warnings);
  });
  m.def("run", &run, py::arg("config"), py::arg("problem"), py::arg("x0"));
  m.def("soft_threshold", &soft_threshold, py::arg("z"), py::arg("w"));
  m.def("dirl1_weights", &dirl1_weights, py::arg("x"), py::arg("eps"), py::arg("regularizer"));
  m.def("dirl2_weights", &dirl2_weights, py::arg("x"), py::arg("eps"), py::arg("regularizer"));
  m.def("subproblem_map",
        [](const std::string& algorithm, const Problem& p, const Vector& x, const Vector& eps, double beta) {
          return subproblem_map(parse_algorithm(algorithm), p, x, eps, beta);
        },
        py::arg("algorithm"), py::arg("problem"), py::arg("x"), py::arg("eps"), py::arg("beta"));

  m.def("_stationarity", [](const Problem& p, const Vector& x, double tol_support, double tol) {
    return dump(stationarity_to_json(stationarity_residual(p, x, tol_support, tol)));
  }, py::arg("problem"), py::arg("x"), py::arg("tol_support") = kDefaultSupportTol,
     py::arg("tol") = kDefaultStationarityTol);
  m.def("_classify", [](const Problem& p, const Vector& x, double tol_support, double delta) {
    return dump(saddle_to_json(classify_stationary_point(p, x, tol_support, delta)));
  }, py::arg("problem"), py::arg("x"), py::arg("tol_support") = kDefaultSupportTol,
     py::arg("delta") = kDefaultDegeneracyBand);

  py::class_<FixedPointJacobian>(m, "FixedPointJacobian")
      .def_property_readonly("algorithm", [](const FixedPointJacobian& j) { return std::string(algorithm_name(j.algorithm)); })
      .def_readonly("diag_block", &FixedPointJacobian::diag_block)
      .def_readonly("off_block", &FixedPointJacobian::off_block)
      .def_readonly("eps_block", &FixedPointJacobian::eps_block)
      .def_readonly("scalar_j", &FixedPointJacobian::scalar_j)
      .def_readonly("scalar_eps", &FixedPointJacobian::scalar_eps)
      .def_readonly("block_eigenvalues", &FixedPointJacobian::block_eigenvalues)
      .def_readonly("spectrum", &FixedPointJacobian::spectrum)
      .def("full", &FixedPointJacobian::full)
      .def("unstable", [](const FixedPointJacobian& j, double delta) { return unstable_fixed_point_check(j, delta); },
           py::arg("delta") = 1e-10)
      .def("to_json", [](const FixedPointJacobian& j) { return dump(jacobian_to_json(j)); });

  m.def("fixed_point_jacobian",
        [](const std::string& algorithm, const Problem& p, const Vector& x, double alpha, double beta, double mu) {
          return fixed_point_jacobian(parse_algorithm(algorithm), p, x, alpha, beta, mu);
        },
        py::arg("algorithm"), py::arg("problem"), py::arg("x"), py::arg("alpha"), py::arg("beta"), py::arg("mu"));
  m.def("map_jacobian",
        [](const std::string& algorithm, const Problem& p, const Vector& x, const Vector& eps, double alpha,
           double beta, double mu) {
          return parse_algorithm(algorithm) == Algorithm::DIRL1 ? dirl1_map_jacobian(p, x, eps, alpha, beta, mu)
                                                                : dirl2_map_jacobian(p, x, eps, alpha, beta, mu);
        },
        py::arg("algorithm"), py::arg("problem"), py::arg("x"), py::arg("eps"), py::arg("alpha"), py::arg("beta"),
        py::arg("mu"));
  m.def("finite_difference_jacobian",
        [](const std::function<Vector(const Vector&)>& f, const Vector& p, double h) {
          return finite_difference_jacobian(f, p, h);
        },
        py::arg("map"), py::arg("point"), py::arg("h") = 1e-6);

  m.def("_escape", [](const std::string& config_text, std::size_t workers) {
    const ExperimentConfig cfg = experiment_from_json(Json::parse(config_text));
    EscapeSummary s;
    {
      py::gil_scoped_release release;
      s = run_escape(cfg, workers);
    }
    return dump(escape_to_json(s));
  }, py::arg("config"), py::arg("workers") = 1);

  m.def("_selfcheck", [](std::uint64_t seed) {
    std::vector<std::tuple<std::string, bool, std::string>> out;
    for (const PropertyResult& r : run_selfcheck(seed)) out.emplace_back(r.name, r.passed, r.detail);
    return out;
  }, py::arg("seed") = 20240601);
}
