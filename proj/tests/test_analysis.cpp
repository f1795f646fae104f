#include <gtest/gtest.h>

#include <cmath>

#include "dirl/analysis.hpp"
#include "dirl/random.hpp"
#include "dirl/solver.hpp"
#include "dirl/symmetric_eigen.hpp"

using namespace dirl;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Small root of 4 s^3 - 5 s + 1 by bisection on [0.1, 0.5].
double saddle_sqrt() {
  double lo = 0.1, hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g = 4 * mid * mid * mid - 5 * mid + 1;
    (g > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Matrix random_symmetric(StreamRng& rng, Index n) {
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.uniform(-1, 1);
  return m;
}

}  // namespace

TEST(Support, PatternAndFingerprint) {
  const SupportPattern p = support(vec({1.0, 0.0, -2.0, 1e-12}));
  EXPECT_EQ(p.active, (std::vector<Index>{0, 2}));
  EXPECT_EQ(p.inactive, (std::vector<Index>{1, 3}));
  EXPECT_EQ(p.fingerprint(), "+0-0");
  EXPECT_EQ(support_fingerprint(vec({-1.0, 1e-3})), "-+");
}

TEST(Stationarity, GlobalMin) {
  const StationarityReport rep = stationarity_residual(benchmark2d(), vec({0.0, 1.0}));
  EXPECT_TRUE(rep.is_stationary);
  EXPECT_NEAR(rep.residual_active, 0.0, 1e-15);
  EXPECT_TRUE(is_infinite(rep.margin_inactive));
}

TEST(Stationarity, NonStationaryResidual) {
  // grad f(1,1) = (2, -0.5); penalty slope 0.5 on both coordinates.
  const StationarityReport rep = stationarity_residual(benchmark2d(), vec({1.0, 1.0}));
  EXPECT_FALSE(rep.is_stationary);
  EXPECT_NEAR(rep.residual_active, 2.5, 1e-15);
}

TEST(Stationarity, FiniteSlopeMargin) {
  // f = 1/2 |x|^2 - <(0.3, 2), x>, EXP p = 1, lambda = 1: zero coordinate has margin 1 - 0.3.
  const Problem prob(SmoothTerm::quadratic(Matrix::Identity(2, 2), vec({-0.3, -2.0})), Regularizer(Family::EXP, 1.0),
                     1.0);
  // Active coordinate solves x - 2 + exp(-x) = 0.
  double x = 2.0;
  for (int i = 0; i < 50; ++i) x -= (x - 2.0 + std::exp(-x)) / (1.0 - std::exp(-x));
  const StationarityReport rep = stationarity_residual(prob, vec({0.0, x}));
  EXPECT_TRUE(rep.is_stationary);
  EXPECT_NEAR(rep.margin_inactive, 0.7, 1e-14);
}

TEST(Classify, GlobalMinLambda) {
  const SaddleReport rep = classify_stationary_point(benchmark2d(), vec({0.0, 1.0}));
  EXPECT_EQ(rep.classification, PointClass::StrictLocalMin);
  EXPECT_NEAR(rep.lambda_min, 2.0 - 0.25, 1e-10);
  EXPECT_FALSE(rep.negative_definite);
}

TEST(Classify, SaddleLambda) {
  const double s = saddle_sqrt();
  const double oracle = 2.0 - 0.25 / (s * s * s);
  const SaddleReport rep = classify_stationary_point(benchmark2d(), vec({0.0, s * s}));
  EXPECT_EQ(rep.classification, PointClass::StrictSaddle);
  EXPECT_NEAR(rep.lambda_min, oracle, 1e-6);
  EXPECT_TRUE(rep.negative_definite);
  EXPECT_NEAR(rep.hessian_norm, std::abs(oracle), 1e-6);
}

TEST(Classify, OriginHasEmptyActiveSet) {
  const SaddleReport rep = classify_stationary_point(benchmark2d(), vec({0.0, 0.0}));
  EXPECT_EQ(rep.classification, PointClass::StrictLocalMin);
  EXPECT_EQ(rep.eigenvalues.size(), 0);
}

TEST(Classify, NotStationaryThrowsWithResidual) {
  try {
    classify_stationary_point(benchmark2d(), vec({1.0, 1.0}));
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NEAR(e.residual(), 2.5, 1e-15);
  }
}

TEST(Classify, DegenerateBand) {
  // f = 1/2 x'Ax with r'' canceling A on the active coordinate: LPN p = 1/2 at x = 1
  // has lambda r''(1) = -lambda / 4, so A = lambda / 4 gives a zero eigenvalue.
  const double lam = 1.0;
  Matrix A = Matrix::Constant(1, 1, lam / 4);
  // Stationarity: A x + lam r'(x) + b = 0 at x = 1 fixes b.
  const Problem prob(SmoothTerm::quadratic(A, vec({-(lam / 4) - lam * 0.5})), Regularizer(Family::LPN, 0.5), lam);
  const SaddleReport rep = classify_stationary_point(prob, vec({1.0}));
  EXPECT_EQ(rep.classification, PointClass::Degenerate);
  EXPECT_NEAR(rep.lambda_min, 0.0, 1e-14);
}

TEST(Classify, RestrictedHessianMatchesFormula) {
  const Problem prob = benchmark2d();
  const Vector x = vec({0.5, 2.0});
  const Matrix h = restricted_hessian(prob, x, support(x));
  EXPECT_NEAR(h(0, 0), 2.0 - 0.25 * std::pow(0.5, -1.5), 1e-14);
  EXPECT_NEAR(h(1, 1), 2.0 - 0.25 * std::pow(2.0, -1.5), 1e-14);
  EXPECT_EQ(h(0, 1), 0.0);
}

TEST(SymmetricEigen, MatchesReferenceAndReconstructs) {
  StreamRng rng(11, "eig", 0);
  for (Index n : {1, 2, 5, 12}) {
    const Matrix m = random_symmetric(rng, n);
    const EigenDecomposition d = symmetric_eigen(m);
    Eigen::SelfAdjointEigenSolver<Matrix> ref(m);
    EXPECT_TRUE(d.values.isApprox(ref.eigenvalues(), 1e-10)) << n;
    const Matrix rec = d.vectors * d.values.asDiagonal() * d.vectors.transpose();
    EXPECT_LE((rec - m).norm(), 1e-10 * std::max(1.0, m.norm()));
    EXPECT_LE((d.vectors.transpose() * d.vectors - Matrix::Identity(n, n)).norm(), 1e-10);
    for (Index i = 1; i < n; ++i) EXPECT_LE(d.values[i - 1], d.values[i]);
  }
}

TEST(SymmetricEigen, RejectsNonsymmetric) {
  Matrix m(2, 2);
  m << 1, 2, 0, 1;
  EXPECT_THROW(symmetric_eigen(m), ArgumentError);
}

TEST(SupportIdentification, ShortTraceThrows) {
  SolveTrace tr;
  tr.records.resize(3);
  EXPECT_THROW(check_support_identification(tr, 5), ArgumentError);
}

TEST(SupportIdentification, DetectsChange) {
  SolveTrace tr;
  tr.records.resize(6);
  for (auto& r : tr.records) r.support = "+0";
  EXPECT_TRUE(check_support_identification(tr, 6));
  tr.records[2].support = "++";
  EXPECT_FALSE(check_support_identification(tr, 6));
  EXPECT_TRUE(check_support_identification(tr, 3));
}

TEST(ExtrapolatedSupport, GeometricTailIsZeroed) {
  std::vector<Vector> tail;
  for (int k = 0; k < 50; ++k) tail.push_back(vec({1e-7 * std::pow(0.86, k), 1.0}));
  const SupportPattern p = extrapolated_support(tail);
  EXPECT_EQ(p.fingerprint(), "0+");
  // Stalled small coordinate stays active.
  std::vector<Vector> flat(50, vec({1e-7, 1.0}));
  EXPECT_EQ(extrapolated_support(flat).fingerprint(), "++");
}
