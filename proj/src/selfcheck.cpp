#include "dirl/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "dirl/jacobian.hpp"
#include "dirl/problem.hpp"
#include "dirl/random.hpp"
#include "dirl/solver.hpp"
#include "dirl/symmetric_eigen.hpp"

namespace dirl {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

PropertyResult finish(std::string name, bool passed, std::string detail, const Stopwatch& sw) {
  return PropertyResult{std::move(name), passed, std::move(detail), sw.seconds()};
}

Matrix random_symmetric(StreamRng& rng, Index n) {
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

// Random problems for the run-based suites: a well-scaled quadratic or
// least-squares smooth term with a random built-in regularizer.
Problem random_problem(StreamRng& rng, Index n) {
  const std::vector<Regularizer> regs = reference_regularizers();
  const Regularizer& reg = regs[static_cast<std::size_t>(rng.next() % regs.size())];
  const double lambda = rng.uniform(0.2, 1.5);
  if (rng.uniform() < 0.5) {
    Matrix A = random_symmetric(rng, n);
    A += static_cast<double>(n) * Matrix::Identity(n, n);
    Vector b(n);
    for (Index i = 0; i < n; ++i) b[i] = rng.uniform(-2.0, 2.0);
    return Problem(SmoothTerm::quadratic(A, b), reg, lambda);
  }
  const Index m = n + 2;
  Matrix A(m, n);
  Vector b(m);
  for (Index i = 0; i < m; ++i) {
    b[i] = rng.uniform(-2.0, 2.0);
    for (Index j = 0; j < n; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
  }
  return Problem(SmoothTerm::least_squares(A, b), reg, lambda);
}

}  // namespace

std::vector<Regularizer> reference_regularizers() {
  return {
      Regularizer(Family::EXP, 1.0), Regularizer(Family::EXP, 3.0), Regularizer(Family::LOG, 1.0),
      Regularizer(Family::LOG, 2.0), Regularizer(Family::FRA, 0.5), Regularizer(Family::FRA, 2.0),
      Regularizer(Family::LPN, 0.1), Regularizer(Family::LPN, 0.5), Regularizer(Family::LPN, 0.9),
      Regularizer(Family::TAN, 0.5), Regularizer(Family::TAN, 2.0),
  };
}

PropertyResult check_derivative_consistency(const std::vector<Regularizer>& regs, std::uint64_t seed) {
  Stopwatch sw;
  std::size_t checks = 0;
  for (std::size_t r = 0; r < regs.size(); ++r) {
    const Regularizer& reg = regs[r];
    StreamRng rng(seed, "derivative", r);
    for (int s = 0; s < 100; ++s) {
      const double t = rng.uniform(0.1, 10.0);
      const double h = 1e-6 * std::max(1.0, t);
      const double d = reg.derivative(t);
      const double fd1 = (reg.value(t + h) - reg.value(t - h)) / (2.0 * h);
      const double d2 = reg.second_derivative(t);
      const double fd2 = (reg.derivative(t + h) - reg.derivative(t - h)) / (2.0 * h);
      const bool ok1 = std::abs(d - fd1) <= 1e-6 * std::max(1.0, std::abs(d));
      const bool ok2 = std::abs(d2 - fd2) <= 1e-6 * std::max(1.0, std::abs(d2));
      checks += 2;
      if (!ok1 || !ok2) {
        std::ostringstream os;
        os << std::setprecision(12) << reg.name() << " at t = " << t << ": "
           << (ok1 ? "r''" : "r'") << " analytic " << (ok1 ? d2 : d) << " vs central difference "
           << (ok1 ? fd2 : fd1);
        return finish("derivative consistency", false, os.str(), sw);
      }
    }
  }
  return finish("derivative consistency", true, std::to_string(checks) + " comparisons", sw);
}

PropertyResult check_concavity(const std::vector<Regularizer>& regs, std::uint64_t seed) {
  Stopwatch sw;
  for (std::size_t r = 0; r < regs.size(); ++r) {
    StreamRng rng(seed, "concavity", r);
    for (int s = 0; s < 100; ++s) {
      double t1 = rng.uniform(1e-3, 10.0);
      double t2 = rng.uniform(1e-3, 10.0);
      if (t1 > t2) std::swap(t1, t2);
      for (double theta : {0.25, 0.5, 0.75}) {
        const double mid = regs[r].value(theta * t1 + (1.0 - theta) * t2);
        const double chord = theta * regs[r].value(t1) + (1.0 - theta) * regs[r].value(t2);
        if (mid < chord - 1e-12) {
          std::ostringstream os;
          os << regs[r].name() << ": t1 = " << t1 << ", t2 = " << t2 << ", theta = " << theta;
          return finish("concavity", false, os.str(), sw);
        }
      }
    }
  }
  return finish("concavity", true, std::to_string(regs.size() * 300) + " chords", sw);
}

PropertyResult check_monotone_weight(const std::vector<Regularizer>& regs, std::uint64_t seed) {
  Stopwatch sw;
  for (std::size_t r = 0; r < regs.size(); ++r) {
    StreamRng rng(seed, "monotone", r);
    for (int s = 0; s < 100; ++s) {
      double t1 = rng.uniform(1e-3, 10.0);
      double t2 = rng.uniform(1e-3, 10.0);
      if (t1 > t2) std::swap(t1, t2);
      if (regs[r].derivative(t1) < regs[r].derivative(t2)) {
        std::ostringstream os;
        os << regs[r].name() << ": r'(" << t1 << ") < r'(" << t2 << ")";
        return finish("monotone weight", false, os.str(), sw);
      }
    }
  }
  return finish("monotone weight", true, std::to_string(regs.size() * 100) + " pairs", sw);
}

PropertyResult check_classification_consistency(const std::vector<Regularizer>& regs) {
  Stopwatch sw;
  for (const Regularizer& reg : regs) {
    // Finite limits flatten out: the last decade changes r' by a factor near 1.
    const double last = reg.derivative(1e-12);
    const double before = reg.derivative(1e-11);
    const bool growing = last > 1.01 * before;
    if (growing == reg.classify().lipschitz_at_zero) {
      std::ostringstream os;
      os << reg.name() << ": r'(1e-11) = " << before << ", r'(1e-12) = " << last
         << ", lipschitz_at_zero = " << reg.classify().lipschitz_at_zero;
      return finish("classification consistency", false, os.str(), sw);
    }
  }
  return finish("classification consistency", true, std::to_string(regs.size()) + " regularizers", sw);
}

PropertyResult check_assumption4_split(const std::vector<Regularizer>& regs) {
  Stopwatch sw;
  std::vector<double> seq;
  for (int k = 1; k <= 12; ++k) seq.push_back(std::pow(10.0, -k));
  for (const Regularizer& reg : regs) {
    const bool holds = check_assumption4(reg, seq).holds;
    if (holds != (reg.family() == Family::LPN)) {
      return finish("assumption 4 split", false, reg.name() + ": holds = " + (holds ? "true" : "false"), sw);
    }
  }
  return finish("assumption 4 split", true, "holds exactly for LPN", sw);
}

PropertyResult check_nonexpansiveness(std::size_t tuples, Index dim, std::uint64_t seed) {
  Stopwatch sw;
  Vector z1(dim), z2(dim), w1(dim), w2(dim);
  for (std::size_t s = 0; s < tuples; ++s) {
    StreamRng rng(seed, "nonexpansive", s);
    for (Index i = 0; i < dim; ++i) {
      z1[i] = rng.uniform(-5.0, 5.0);
      z2[i] = rng.uniform(-5.0, 5.0);
      w1[i] = rng.uniform(0.0, 3.0);
      w2[i] = rng.uniform(0.0, 3.0);
    }
    const double lhs = (soft_threshold(z1, w1) - soft_threshold(z2, w2)).norm();
    const double rhs = (z1 - z2).norm() + (w1 - w2).norm() + 1e-12;
    if (lhs > rhs) {
      std::ostringstream os;
      os << "tuple " << s << ": " << lhs << " > " << rhs;
      return finish("nonexpansiveness", false, os.str(), sw);
    }
  }
  return finish("nonexpansiveness", true, std::to_string(tuples) + " tuples, 0 violations", sw);
}

PropertyResult check_descent_telescope(std::uint64_t seed) {
  Stopwatch sw;
  std::size_t runs = 0;
  for (Algorithm alg : {Algorithm::DIRL1, Algorithm::DIRL2}) {
    for (std::size_t r = 0; r < 30; ++r) {
      StreamRng rng(seed, alg == Algorithm::DIRL1 ? "descent1" : "descent2", r);
      const Problem prob = r < 15 ? benchmark2d() : random_problem(rng, 5);
      SolverConfig cfg = default_config(alg);
      cfg.beta = std::max(cfg.beta, prob.lipschitz_gradient());
      cfg.max_iter = 5000;
      Vector x0(prob.dimension());
      for (Index i = 0; i < x0.size(); ++i) x0[i] = rng.uniform(-3.0, 3.0);
      SolveTrace trace;
      try {
        trace = run(cfg, prob, x0);
      } catch (const NumericalFailure& e) {
        return finish("descent telescope", false, std::string(algorithm_name(alg)) + ": " + e.what(), sw);
      }
      const auto& recs = trace.records;
      const double slope = cfg.beta / cfg.alpha - prob.lipschitz_gradient() / 2.0;
      const double gap = recs.front().f_perturbed - recs.back().f_perturbed -
                         slope * recs.back().cumulative_step_sq;
      if (gap < -1e-8 * static_cast<double>(trace.iterations)) {
        std::ostringstream os;
        os << algorithm_name(alg) << " run " << r << ": telescope gap " << gap;
        return finish("descent telescope", false, os.str(), sw);
      }
      ++runs;
    }
  }
  return finish("descent telescope", true, std::to_string(runs) + " runs", sw);
}

PropertyResult check_jacobian_fd(std::uint64_t seed, std::size_t points) {
  Stopwatch sw;
  const double h = 1e-6;
  double worst = 0.0;
  for (Algorithm alg : {Algorithm::DIRL1, Algorithm::DIRL2}) {
    std::size_t accepted = 0;
    for (std::size_t s = 0; accepted < points; ++s) {
      if (s > 100 * points) return finish("jacobian fd", false, "too many rejected samples", sw);
      StreamRng rng(seed, alg == Algorithm::DIRL1 ? "jac1" : "jac2", s);
      const Index n = 1 + static_cast<Index>(rng.next() % 4);
      const Problem prob = s % 3 == 0 ? benchmark2d() : random_problem(rng, n);
      const Index dim = prob.dimension();
      const double alpha = 0.2, beta = std::max(4.0, prob.lipschitz_gradient()), mu = 0.3;
      Vector x(dim), eps(dim);
      for (Index i = 0; i < dim; ++i) {
        x[i] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.1, 3.0);
        eps[i] = rng.uniform(0.1, 1.0);
      }
      if (alg == Algorithm::DIRL1 && dirl1_kink_distance(prob, x, eps, beta) <= 10.0 * h) continue;
      Vector p(2 * dim);
      p << x, eps;
      const Matrix fd = finite_difference_jacobian(fixed_point_map(alg, prob, alpha, beta, mu), p, h);
      const Matrix an = alg == Algorithm::DIRL1 ? dirl1_map_jacobian(prob, x, eps, alpha, beta, mu)
                                                : dirl2_map_jacobian(prob, x, eps, alpha, beta, mu);
      const double dev = (fd - an).cwiseAbs().maxCoeff();
      worst = std::max(worst, dev);
      if (dev > 1e-5) {
        std::ostringstream os;
        os << algorithm_name(alg) << " sample " << s << " (" << prob.regularizer().name()
           << "): max deviation " << dev;
        return finish("jacobian fd", false, os.str(), sw);
      }
      ++accepted;
    }
  }
  std::ostringstream os;
  os << points << " points per algorithm, max deviation " << worst;
  return finish("jacobian fd", true, os.str(), sw);
}

PropertyResult check_eigen_reconstruction(std::uint64_t seed, std::size_t matrices) {
  Stopwatch sw;
  for (std::size_t s = 0; s < matrices; ++s) {
    StreamRng rng(seed, "eigen", s);
    const Index n = 1 + static_cast<Index>(rng.next() % 50);
    const Matrix M = random_symmetric(rng, n);
    const EigenDecomposition eig = symmetric_eigen(M);
    const double scale = std::max(M.norm(), 1e-300);
    const double recon = (M - eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose()).norm();
    const double ortho = (eig.vectors.transpose() * eig.vectors - Matrix::Identity(n, n)).norm();
    const bool ascending = std::is_sorted(eig.values.data(), eig.values.data() + n);
    if (recon > 1e-8 * scale || ortho > 1e-8 || !ascending) {
      std::ostringstream os;
      os << "matrix " << s << " (" << n << "x" << n << "): reconstruction " << recon << ", orthogonality "
         << ortho;
      return finish("eigen reconstruction", false, os.str(), sw);
    }
  }
  return finish("eigen reconstruction", true, std::to_string(matrices) + " matrices", sw);
}

PropertyResult check_sign_preservation(std::uint64_t seed, std::size_t trials) {
  Stopwatch sw;
  std::size_t compared = 0;
  for (std::size_t s = 0; s < trials; ++s) {
    StreamRng rng(seed, "congruence", s);
    const Index n = 1 + static_cast<Index>(rng.next() % 8);
    const Matrix H = random_symmetric(rng, n);
    Vector root_inv(n);
    for (Index i = 0; i < n; ++i) root_inv[i] = 1.0 / std::sqrt(rng.uniform(0.1, 10.0));
    const Matrix C = root_inv.asDiagonal() * H * root_inv.asDiagonal();
    const double lh = symmetric_eigen(H).values[0];
    const double lc = symmetric_eigen(0.5 * (C + C.transpose())).values[0];
    if (std::abs(lh) < 1e-8) continue;
    ++compared;
    if ((lh < 0.0) != (lc < 0.0)) {
      std::ostringstream os;
      os << "trial " << s << ": lambda_min(H) = " << lh << ", congruent " << lc;
      return finish("sign preservation", false, os.str(), sw);
    }
  }
  return finish("sign preservation", true, std::to_string(compared) + " trials", sw);
}

std::vector<PropertyResult> run_selfcheck(std::uint64_t seed) {
  const std::vector<Regularizer> regs = reference_regularizers();
  return {
      check_derivative_consistency(regs, seed),
      check_concavity(regs, seed),
      check_monotone_weight(regs, seed),
      check_classification_consistency(regs),
      check_assumption4_split(regs),
      check_nonexpansiveness(100000, 10, seed),
      check_descent_telescope(seed),
      check_jacobian_fd(seed),
      check_eigen_reconstruction(seed),
      check_sign_preservation(seed),
  };
}

void print_results(std::ostream& out, const std::vector<PropertyResult>& results) {
  for (const PropertyResult& r : results) {
    out << (r.passed ? "PASS" : "FAIL") << "  " << std::left << std::setw(28) << r.name << std::right
        << std::fixed << std::setprecision(3) << std::setw(8) << r.seconds << "s  " << r.detail << "\n";
    out.unsetf(std::ios::fixed);
  }
}

}  // namespace dirl
