#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dirl/regularizer.hpp"
#include "dirl/selfcheck.hpp"

using namespace dirl;

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(lo * std::pow(hi / lo, i / double(count - 1)));
  return g;
}

std::vector<double> decades(int from, int to) {
  std::vector<double> s;
  for (int k = from; k <= to; ++k) s.push_back(std::pow(10.0, -k));
  return s;
}

}  // namespace

TEST(Regularizer, TableValues) {
  EXPECT_DOUBLE_EQ(Regularizer(Family::LPN, 0.5).value(4.0), 2.0);
  EXPECT_EQ(Regularizer(Family::EXP, 1.0).value(0.0), 0.0);
  EXPECT_NEAR(Regularizer(Family::LOG, 2.0).value(0.5), std::log(2.0), 1e-15);
}

TEST(Regularizer, TableDerivatives) {
  EXPECT_DOUBLE_EQ(Regularizer(Family::LPN, 0.5).derivative(4.0), 0.25);
  EXPECT_DOUBLE_EQ(Regularizer(Family::TAN, 2.0).derivative(2.0), 0.25);
  EXPECT_DOUBLE_EQ(Regularizer(Family::LPN, 0.5).second_derivative(4.0), -0.03125);
  EXPECT_DOUBLE_EQ(Regularizer(Family::LOG, 1.0).second_derivative(1.0), -0.25);
  // Boundary limits approached from the right.
  EXPECT_NEAR(Regularizer(Family::FRA, 1.0).derivative(1e-12), 1.0, 1e-11);
  EXPECT_NEAR(Regularizer(Family::EXP, 1.0).second_derivative(1e-12), -1.0, 1e-11);
}

TEST(Regularizer, DerivativeAtZero) {
  EXPECT_EQ(Regularizer(Family::EXP, 3.0).derivative_at_zero_plus(), 3.0);
  EXPECT_EQ(Regularizer(Family::LOG, 2.0).derivative_at_zero_plus(), 2.0);
  EXPECT_EQ(Regularizer(Family::FRA, 2.0).derivative_at_zero_plus(), 0.5);
  EXPECT_EQ(Regularizer(Family::TAN, 4.0).derivative_at_zero_plus(), 0.25);
  EXPECT_TRUE(is_infinite(Regularizer(Family::LPN, 0.5).derivative_at_zero_plus()));
}

TEST(Regularizer, Classification) {
  for (Family f : {Family::EXP, Family::LOG, Family::FRA, Family::TAN}) {
    const RegularizerClass c = Regularizer(f, 0.7).classify();
    EXPECT_TRUE(c.lipschitz_at_zero) << family_name(f);
    EXPECT_GT(c.derivative_at_zero, 0.0);
  }
  EXPECT_FALSE(Regularizer(Family::LPN, 0.7).classify().lipschitz_at_zero);
}

TEST(Regularizer, DomainErrors) {
  const Regularizer r(Family::EXP, 1.0);
  EXPECT_THROW(r.value(-1.0), DomainError);
  EXPECT_THROW(r.value(NAN), DomainError);
  EXPECT_THROW(r.derivative(0.0), DomainError);
  EXPECT_THROW(r.second_derivative(-1.0), DomainError);
}

TEST(Regularizer, ParameterValidationNamesP) {
  for (auto bad : {std::pair{Family::LPN, 1.5}, std::pair{Family::LPN, 1.0}, std::pair{Family::EXP, 0.0},
                   std::pair{Family::TAN, -1.0}}) {
    try {
      Regularizer(bad.first, bad.second);
      FAIL() << "accepted p = " << bad.second;
    } catch (const ArgumentError& e) {
      EXPECT_EQ(std::string(e.what()).rfind("p:", 0), 0u) << e.what();
    }
  }
}

TEST(Regularizer, TanCurvatureBoundIsSupremum) {
  const Regularizer r(Family::TAN, 0.8);
  double sup = 0.0;
  for (double t : log_grid(1e-4, 10.0, 20001)) sup = std::max(sup, std::abs(r.second_derivative(t)));
  EXPECT_NEAR(r.curvature_bound(), sup, 1e-6 * sup);
}

TEST(Regularizer, InverseDerivative) {
  for (const Regularizer& r : reference_regularizers()) {
    for (double t : {0.05, 0.7, 3.0}) {
      EXPECT_NEAR(r.inverse_derivative(r.derivative(t)), t, 1e-9 * std::max(1.0, t)) << r.name();
    }
  }
}

TEST(PenaltyShape, HoldsForAllFamilies) {
  const auto grid = log_grid(0.01, 10.0, 200);
  for (const Regularizer& r : reference_regularizers()) {
    EXPECT_TRUE(check_assumption1(r, grid).holds()) << r.name();
  }
}

TEST(PenaltyShape, GridValidation) {
  const Regularizer r(Family::EXP, 1.0);
  EXPECT_THROW(check_assumption1(r, std::vector<double>{}), ArgumentError);
  EXPECT_THROW(check_assumption1(r, std::vector<double>{1.0, 0.5}), ArgumentError);
}

TEST(PenaltyShape, DetectsIncreasingDerivative) {
  // Convex penalty t^2: r' increases, r'' > 0.
  const Regularizer sq = Regularizer::custom({"square", [](double t) { return t * t; },
                                              [](double t) { return 2 * t; }, [](double) { return 2.0; },
                                              1e-300, 2.0});
  const Assumption1Report rep = check_assumption1(sq, log_grid(0.01, 10.0, 50));
  EXPECT_FALSE(rep.nonincreasing_derivative);
  EXPECT_FALSE(rep.nonpositive_curvature);
  EXPECT_FALSE(rep.holds());
}

TEST(SlopeBlowup, LpnRatioMatchesClosedForm) {
  const double p = 0.5;
  const Assumption4Report rep = check_assumption4(Regularizer(Family::LPN, p), decades(1, 12));
  EXPECT_TRUE(rep.holds);
  for (std::size_t i = 0; i < rep.z.size(); ++i) {
    const double oracle = (p - 1.0) / p * std::pow(rep.z[i], 1.0 - p);
    EXPECT_NEAR(rep.curvature_ratio[i], oracle, 1e-12 * std::abs(oracle) + 1e-300);
  }
}

TEST(SlopeBlowup, LpnNearOneAtMicro) {
  const Regularizer r(Family::LPN, 0.9);
  const double z = 1e-6;
  const double ratio = z * r.second_derivative(z) / std::pow(r.derivative(z), 2);
  EXPECT_NEAR(std::abs(ratio), (1.0 / 9.0) * std::pow(10.0, -0.6), 1e-12);
  EXPECT_NEAR(std::abs(ratio), 0.0279, 1e-4);
}

TEST(SlopeBlowup, FiniteSlopeFamiliesFail) {
  for (Family f : {Family::EXP, Family::LOG, Family::FRA, Family::TAN}) {
    const Assumption4Report rep = check_assumption4(Regularizer(f, 1.0), decades(1, 12));
    EXPECT_FALSE(rep.holds) << family_name(f);
    EXPECT_FALSE(rep.derivative_unbounded);
  }
}

TEST(SlopeBlowup, SequenceValidation) {
  const Regularizer r(Family::LPN, 0.5);
  EXPECT_THROW(check_assumption4(r, std::vector<double>{0.1, 0.2}), ArgumentError);
  EXPECT_THROW(check_assumption4(r, std::vector<double>{0.1}), ArgumentError);
}

TEST(Properties, SuitesPassOnBuiltins) {
  const auto regs = reference_regularizers();
  EXPECT_TRUE(check_derivative_consistency(regs, 1).passed);
  EXPECT_TRUE(check_concavity(regs, 1).passed);
  EXPECT_TRUE(check_monotone_weight(regs, 1).passed);
  EXPECT_TRUE(check_classification_consistency(regs).passed);
}

TEST(Properties, SignErrorInSecondDerivativeIsCaught) {
  const double p = 1.0;
  const Regularizer mutated = Regularizer::custom(
      {"EXP-mutant", [p](double t) { return 1.0 - std::exp(-p * t); },
       [p](double t) { return p * std::exp(-p * t); },
       [p](double t) { return +p * p * std::exp(-p * t); },  // sign flipped
       p, p * p});
  const PropertyResult res = check_derivative_consistency({mutated}, 1);
  EXPECT_FALSE(res.passed);
  EXPECT_NE(res.detail.find("r''"), std::string::npos) << res.detail;
}
