#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dirl/jacobian.hpp"
#include "dirl/random.hpp"

using namespace dirl;

namespace {

constexpr double kAlpha = 0.2, kBeta = 4.0, kMu = 0.3;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

double saddle_x2() {
  const double s = (std::sqrt(2.0) - 1.0) / 2.0;
  return s * s;
}

// Central differences on x columns; forward differences on eps columns (eps >= 0).
Matrix stationary_fd(const PointMap& map, const Vector& x, double h) {
  const Index n = x.size();
  Vector p = Vector::Zero(2 * n);
  p.head(n) = x;
  const Vector center = map(p);
  Matrix fd(2 * n, 2 * n);
  for (Index j = 0; j < 2 * n; ++j) {
    Vector plus = p, minus = p;
    plus[j] += h;
    if (j < n) {
      minus[j] -= h;
      fd.col(j) = (map(plus) - map(minus)) / (2 * h);
    } else {
      fd.col(j) = (map(plus) - center) / h;
    }
  }
  return fd;
}

}  // namespace

TEST(FixedPointJacobian, Dirl1AtGlobalMin) {
  const FixedPointJacobian jac = dirl1_jacobian(benchmark2d(), vec({0.0, 1.0}), kAlpha, kBeta, kMu);
  ASSERT_EQ(jac.active, (std::vector<Index>{1}));
  EXPECT_NEAR(jac.diag_block(0, 0), 1.0 - (kAlpha / kBeta) * 1.75, 1e-12);
  EXPECT_EQ(jac.scalar_j, 1.0 - kAlpha);
  EXPECT_NEAR(jac.scalar_eps, 1.0 - kAlpha * (1.0 - kMu), 1e-15);
  // eps enters only through r'(|x| + eps): d/d eps = -(alpha/beta) lambda r''(1).
  EXPECT_NEAR(jac.eps_block(0, 1), -(kAlpha / kBeta) * (-0.25), 1e-12);
  EXPECT_EQ(jac.eps_block(0, 0), 0.0);
  EXPECT_FALSE(unstable_fixed_point_check(jac));
  EXPECT_EQ(jac.spectrum.size(), 4);
  EXPECT_LT(jac.spectrum.cwiseAbs().maxCoeff(), 1.0);
}

TEST(FixedPointJacobian, Dirl1AtSaddleIsUnstable) {
  const FixedPointJacobian jac = dirl1_jacobian(benchmark2d(), vec({0.0, saddle_x2()}), kAlpha, kBeta, kMu);
  const double s = std::sqrt(saddle_x2());
  const double curvature = 2.0 - 0.25 / (s * s * s);
  EXPECT_NEAR(jac.block_eigenvalues[0], 1.0 - (kAlpha / kBeta) * curvature, 1e-9);
  EXPECT_GT(jac.spectrum.cwiseAbs().maxCoeff(), 1.0 + 1e-6);
  EXPECT_TRUE(unstable_fixed_point_check(jac));
}

TEST(FixedPointJacobian, Dirl2AtGlobalMin) {
  const FixedPointJacobian jac = dirl2_jacobian(benchmark2d(), vec({0.0, 1.0}), kAlpha, kBeta, kMu);
  // P = 1 + (lambda/beta) r'(1)/1 = 1.125.
  const double p = 1.0 + 0.25 * 0.5;
  const double h = 1.0 - 1.75 / (kBeta * p);
  EXPECT_NEAR(jac.block_eigenvalues[0], (1.0 - kAlpha) + kAlpha * h, 1e-12);
  EXPECT_NEAR(jac.block_eigenvalues[0], 0.922222222222, 1e-10);
  EXPECT_FALSE(unstable_fixed_point_check(jac));
}

TEST(FixedPointJacobian, Dirl2AtSaddleIsUnstable) {
  const FixedPointJacobian jac = dirl2_jacobian(benchmark2d(), vec({0.0, saddle_x2()}), kAlpha, kBeta, kMu);
  EXPECT_TRUE(unstable_fixed_point_check(jac));
}

TEST(FixedPointJacobian, SpectrumIsBlockTriangularUnion) {
  for (Algorithm alg : {Algorithm::DIRL1, Algorithm::DIRL2}) {
    const FixedPointJacobian jac = fixed_point_jacobian(alg, benchmark2d(), vec({0.0, 1.0}), kAlpha, kBeta, kMu);
    const Matrix full = jac.full();
    Eigen::EigenSolver<Matrix> es(full);
    std::vector<double> mags;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) mags.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(mags.begin(), mags.end());
    std::vector<double> ours;
    for (Index i = 0; i < jac.spectrum.size(); ++i) ours.push_back(std::abs(jac.spectrum[i]));
    std::sort(ours.begin(), ours.end());
    ASSERT_EQ(mags.size(), ours.size());
    for (std::size_t i = 0; i < mags.size(); ++i) EXPECT_NEAR(mags[i], ours[i], 1e-10);
  }
}

TEST(FixedPointJacobian, FullMatchesFiniteDifferencesAtStationaryPoints) {
  const Problem prob = benchmark2d();
  for (Algorithm alg : {Algorithm::DIRL1, Algorithm::DIRL2}) {
    for (const Vector& x : {vec({0.0, 1.0}), vec({0.0, saddle_x2()})}) {
      const Matrix an = fixed_point_jacobian(alg, prob, x, kAlpha, kBeta, kMu).full();
      const Matrix fd = stationary_fd(fixed_point_map(alg, prob, kAlpha, kBeta, kMu), x, 1e-7);
      EXPECT_LE((an - fd).cwiseAbs().maxCoeff(), 1e-5) << algorithm_name(alg) << "\n" << an << "\n\n" << fd;
    }
  }
}

TEST(FixedPointJacobian, RejectsNonStationary) {
  EXPECT_THROW(dirl1_jacobian(benchmark2d(), vec({1.0, 1.0}), kAlpha, kBeta, kMu), PreconditionError);
  EXPECT_THROW(dirl2_jacobian(benchmark2d(), vec({1.0, 1.0}), kAlpha, kBeta, kMu), PreconditionError);
}

TEST(FixedPointJacobian, Dirl2RequiresInfiniteSlopeOnZeroSet) {
  const Problem prob(SmoothTerm::quadratic(Matrix::Identity(2, 2), vec({-0.3, -2.0})), Regularizer(Family::EXP, 1.0),
                     1.0);
  double x = 2.0;
  for (int i = 0; i < 50; ++i) x -= (x - 2.0 + std::exp(-x)) / (1.0 - std::exp(-x));
  EXPECT_NO_THROW(dirl1_jacobian(prob, vec({0.0, x}), kAlpha, kBeta, kMu));
  EXPECT_THROW(dirl2_jacobian(prob, vec({0.0, x}), kAlpha, kBeta, kMu), PreconditionError);
}

TEST(MapJacobian, Dirl1MatchesFiniteDifferences) {
  const Problem prob = benchmark2d();
  StreamRng rng(3, "map1", 0);
  int accepted = 0;
  while (accepted < 20) {
    const Vector x = vec({rng.uniform(-3, 3), rng.uniform(-3, 3)});
    const Vector eps = vec({rng.uniform(0.1, 1), rng.uniform(0.1, 1)});
    if (dirl1_kink_distance(prob, x, eps, kBeta) < 1e-4) continue;
    Vector p(4);
    p << x, eps;
    const Matrix fd = finite_difference_jacobian(fixed_point_map(Algorithm::DIRL1, prob, kAlpha, kBeta, kMu), p);
    const Matrix an = dirl1_map_jacobian(prob, x, eps, kAlpha, kBeta, kMu);
    EXPECT_LE((fd - an).cwiseAbs().maxCoeff(), 1e-6);
    ++accepted;
  }
}

TEST(MapJacobian, Dirl1KinkThrows) {
  const Problem prob = benchmark2d();
  EXPECT_NO_THROW(dirl1_map_jacobian(prob, vec({0.0, 2.0}), vec({0.5, 0.5}), kAlpha, kBeta, kMu));
  // On the first coordinate q = x1 / 2 and tau = 0.125 / sqrt(x1 + eps1); pick eps1 so they meet.
  const double a = 0.3;
  const double eps = std::pow(0.125 / (a / 2.0), 2.0) - a;
  EXPECT_NEAR(dirl1_kink_distance(prob, vec({a, 2.0}), vec({eps, 0.5}), kBeta), 0.0, 1e-12);
  EXPECT_THROW(dirl1_map_jacobian(prob, vec({a, 2.0}), vec({eps, 0.5}), kAlpha, kBeta, kMu), DomainError);
}

TEST(MapJacobian, Dirl2MatchesFiniteDifferences) {
  StreamRng rng(4, "map2", 0);
  for (Family fam : {Family::LPN, Family::EXP, Family::LOG}) {
    const Problem prob(SmoothTerm::quadratic(Matrix::Identity(2, 2) * 1.5, vec({0.2, -1.0})), Regularizer(fam, 0.5),
                       0.7);
    for (int k = 0; k < 20; ++k) {
      const Vector x = vec({rng.uniform(-3, 3), rng.uniform(-3, 3)});
      const Vector eps = vec({rng.uniform(0.1, 1), rng.uniform(0.1, 1)});
      Vector p(4);
      p << x, eps;
      const Matrix fd = finite_difference_jacobian(fixed_point_map(Algorithm::DIRL2, prob, kAlpha, kBeta, kMu), p);
      const Matrix an = dirl2_map_jacobian(prob, x, eps, kAlpha, kBeta, kMu);
      EXPECT_LE((fd - an).cwiseAbs().maxCoeff(), 1e-6) << family_name(fam);
    }
  }
}

TEST(Dirl2Gain, MatchesClosedFormAndDerivative) {
  const Regularizer r(Family::LPN, 0.5);
  const double lam = 1.0, beta = 4.0;
  EXPECT_EQ(dirl2_gain(r, lam, beta, 0.0), 0.0);
  for (double z : {1e-4, 1e-2, 0.5, 2.0}) {
    const double c = lam / beta;
    const double oracle = z / (z + c * 0.5 / std::sqrt(z));
    EXPECT_NEAR(dirl2_gain(r, lam, beta, z), oracle, 1e-14);
    const double h = 1e-6 * z;
    const double fd = (dirl2_gain(r, lam, beta, z + h) - dirl2_gain(r, lam, beta, z - h)) / (2 * h);
    EXPECT_NEAR(dirl2_gain_derivative(r, lam, beta, z), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(FiniteDifference, LinearMapExact) {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  const Matrix fd = finite_difference_jacobian([&m](const Vector& p) { return Vector(m * p); }, vec({0.3, -0.7}));
  EXPECT_LE((fd - m).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FiniteDifference, NonFiniteNamesColumn) {
  const PointMap bad = [](const Vector& p) {
    Vector out = p;
    if (p[1] > 0.5) out[0] = std::nan("");
    return out;
  };
  try {
    finite_difference_jacobian(bad, vec({0.0, 0.5}));
    FAIL();
  } catch (const NumericalFailure& e) {
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos) << e.what();
  }
}

TEST(Equivalence, ConsistentAtKnownPoints) {
  const Problem prob = benchmark2d();
  for (Algorithm alg : {Algorithm::DIRL1, Algorithm::DIRL2}) {
    const EquivalenceReport mn = saddle_unstable_equivalence(prob, vec({0.0, 1.0}), kAlpha, kBeta, kMu, alg);
    EXPECT_TRUE(mn.consistent) << mn.detail;
    EXPECT_TRUE(mn.stability_asserted);
    EXPECT_FALSE(mn.unstable);
    const EquivalenceReport sd = saddle_unstable_equivalence(prob, vec({0.0, saddle_x2()}), kAlpha, kBeta, kMu, alg);
    EXPECT_TRUE(sd.consistent) << sd.detail;
    EXPECT_TRUE(sd.unstable);
  }
}

TEST(Equivalence, EmpiricalRho) {
  const Problem prob = benchmark2d();
  const double s = std::sqrt(saddle_x2());
  const double rho = empirical_rho(prob, {vec({0.0, 1.0}), vec({0.0, saddle_x2()}), vec({1.0, 1.0})});
  EXPECT_NEAR(rho, std::abs(2.0 - 0.25 / (s * s * s)), 1e-9);
  EXPECT_EQ(empirical_rho(prob, {vec({1.0, 1.0})}), 0.0);
}

TEST(SubproblemLipschitz, IdentityLikeProblem) {
  const Problem prob = benchmark2d();
  const LipschitzEstimate est =
      estimate_subproblem_lipschitz(prob, kAlpha, kBeta, {vec({1.0, 1.0}), vec({-2.0, 0.5})}, {vec({0.5, 0.5}), vec({0.2, 1.0})});
  EXPECT_EQ(est.samples, 2u);
  EXPECT_GT(est.l_s, 0.0);
  EXPECT_EQ(est.damping_ok, kAlpha < 1.0 / (1.0 + est.l_s));
}
