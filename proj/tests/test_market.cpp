#include <gtest/gtest.h>

#include <cmath>

#include "reinsopt/market.hpp"

using namespace reinsopt;

namespace {

const MarketParams kTable1Market{0.08, 0.5, 0.5};
const UtilityModel kTable1Utility = SaharaParams{1.0, 1.0, 0.0};
const StatePoint kTable1State{0.0, 1.0, 0.0};

}  // namespace

TEST(Coefficients, ConstantAffineSigmoid) {
  const Coefficient c = 0.3;
  EXPECT_TRUE(c.is_constant());
  EXPECT_EQ(c(0.0, 100.0), 0.3);
  const Coefficient a = AffineCoef{0.1, 0.5, 0.0, 0.4};
  EXPECT_DOUBLE_EQ(a(0.0, 0.2), 0.2);
  EXPECT_EQ(a(0.0, -10.0), 0.0);
  EXPECT_EQ(a(0.0, 10.0), 0.4);
  EXPECT_EQ(a.lower(), 0.0);
  EXPECT_EQ(a.upper(), 0.4);
  const Coefficient s = SigmoidCoef{0.2, 0.6, 1.0, 2.0};
  EXPECT_DOUBLE_EQ(s(0.0, 1.0), 0.4);
  EXPECT_GT(s(0.0, 50.0), 0.599);
  EXPECT_LT(s(0.0, -50.0), 0.201);
  EXPECT_THROW(Coefficient(AffineCoef{0.0, 1.0, 1.0, 0.0}), std::invalid_argument);
}

TEST(Market, ProportionalDriftAndVolatility) {
  const ReinsuranceModel m = Proportional{0.03, 0.05, 0.5};
  EXPECT_DOUBLE_EQ(m.drift(kTable1State, 0.0), -0.02);
  EXPECT_DOUBLE_EQ(m.drift(kTable1State, 1.0), 0.03);
  EXPECT_DOUBLE_EQ(m.volatility(kTable1State, 0.4), 0.2);
  EXPECT_EQ(m.retention_bound(), 1.0);
  EXPECT_THROW(m.drift(kTable1State, 1.1), std::domain_error);
  EXPECT_THROW(m.volatility(kTable1State, -0.1), std::domain_error);
}

TEST(Market, ExcessOfLossDriftAndVolatility) {
  const ReinsuranceModel m = ExcessOfLoss{0.2, 0.1, ExponentialClaims{1.0}};
  EXPECT_TRUE(std::isinf(m.retention_bound()));
  // no reinsurance: eta E[Z]; full reinsurance: -(theta - eta) E[Z]
  EXPECT_NEAR(m.drift(kTable1State, kInf), 0.1, 1e-15);
  EXPECT_NEAR(m.drift(kTable1State, 0.0), -0.1, 1e-15);
  EXPECT_EQ(m.volatility(kTable1State, 0.0), 0.0);
  EXPECT_NEAR(m.volatility(kTable1State, 0.1), std::sqrt(0.009357680320888939), 1e-12);
}

TEST(Market, DerivativesMatchFiniteDifferences) {
  const ReinsuranceModel xl = ExcessOfLoss{0.3, 0.1, ParetoClaims{2.5, 0.5}};
  const ReinsuranceModel pr = Proportional{0.03, 0.05, 0.5};
  for (const ReinsuranceModel* m : {&xl, &pr}) {
    for (double u : {0.05, 0.3, 0.7, 0.95}) {
      const double h = 1e-6;
      const double fm = (m->drift(kTable1State, u + h) - m->drift(kTable1State, u - h)) / (2 * h);
      const double fs = (m->volatility(kTable1State, u + h) - m->volatility(kTable1State, u - h)) / (2 * h);
      EXPECT_NEAR(m->drift_du(kTable1State, u), fm, 1e-7);
      EXPECT_NEAR(m->volatility_du(kTable1State, u), fs, 1e-7);
    }
  }
  EXPECT_EQ(xl.volatility_du(kTable1State, 0.0), 1.0);
}

TEST(Market, ConstructionRejectsInvalidModels) {
  EXPECT_THROW(ReinsuranceModel(Proportional{0.05, 0.05, 0.5}), std::invalid_argument);
  EXPECT_THROW(ReinsuranceModel(Proportional{0.03, 0.05, 0.0}), std::invalid_argument);
  EXPECT_THROW(ReinsuranceModel(ExcessOfLoss{0.05, 0.1, ExponentialClaims{1.0}}), std::invalid_argument);
  EXPECT_THROW(ReinsuranceModel(ExcessOfLoss{0.2, 0.0, ExponentialClaims{1.0}}), std::invalid_argument);
  EXPECT_THROW(ReinsuranceModel(CustomReinsurance{}), std::invalid_argument);
  EXPECT_THROW((MarketParams{0.08, 0.0, 0.0}.validate()), std::invalid_argument);
}

TEST(Market, StateDependentPremiumMustStayCheap) {
  // p(y) crosses q(y) = 0.05 for large y
  const ReinsuranceModel m = Proportional{AffineCoef{0.03, 0.01, 0.0, 0.1}, 0.05, 0.5};
  EXPECT_NO_THROW(m.drift(StatePoint{0, 1, 0.0}, 0.5));
  EXPECT_THROW(m.drift(StatePoint{0, 1, 5.0}, 0.5), std::domain_error);
}

TEST(Market, PsiPinnedAtTable1) {
  const ReinsuranceModel m = Proportional{0.03, 0.05, 0.5};
  EXPECT_NEAR(psi(m, kTable1Market, kTable1Utility, kTable1State, 0.0), -0.01094903320081219, 1e-15);
}

TEST(Market, PsiIsTheInvestmentSupremumOfTheIntegrand) {
  // max over a of m + a mu - A/2 ((sigma + a sigma1)^2 + a^2 sigma2^2), found by dense search
  const ReinsuranceModel m = Proportional{0.03, 0.05, 0.5};
  const MarketAt k = market_at(kTable1Market, kTable1State);
  const double A = kTable1Utility.ara(1.0);
  for (double u : {0.0, 0.25, 0.8}) {
    const double mm = m.drift(kTable1State, u), sg = m.volatility(kTable1State, u);
    double best = -kInf;
    for (double a = -2.0; a <= 2.0; a += 1e-5) {
      const double d1 = sg + a * k.sigma1, d2 = a * k.sigma2;
      best = std::max(best, mm + a * k.mu - 0.5 * A * (d1 * d1 + d2 * d2));
    }
    EXPECT_NEAR(psi(m, kTable1Market, kTable1Utility, kTable1State, u), best, 1e-9);
  }
}

TEST(Market, ConcavityScan) {
  const ReinsuranceModel pr = Proportional{0.03, 0.05, 0.5};
  EXPECT_TRUE(check_concavity(pr, kTable1Market, kTable1Utility, kTable1State, 1001).concave);
  // excess of loss with sigma1 > 0: the correlation term -mu sigma1 sigma(u) is convex, so Psi need not be concave
  const ReinsuranceModel xl = ExcessOfLoss{0.2, 0.1, ExponentialClaims{1.0}};
  EXPECT_FALSE(check_concavity(xl, kTable1Market, kTable1Utility, kTable1State, 1001, 10.0).concave);
  // sigma1 = 0, Exp(1) claims: Psi'' = e^{-u} (A u - A - theta), concave only up to u = 1 + theta / A
  const MarketParams independent{0.08, 0.0, 0.5};
  EXPECT_TRUE(check_concavity(xl, independent, kTable1Utility, kTable1State, 1001, 1.1).concave);
  EXPECT_FALSE(check_concavity(xl, independent, kTable1Utility, kTable1State, 1001, 10.0).concave);
  EXPECT_THROW(check_concavity(xl, kTable1Market, kTable1Utility, kTable1State, 1001), std::invalid_argument);
}

TEST(Market, AdversarialCustomModelIsFlagged) {
  CustomReinsurance c;
  c.m = [](double, double, double u) { return 0.05 * u + 0.02 * std::sin(12.0 * u); };
  c.sigma = [](double, double, double u) { return 0.3 * u; };
  c.bound = 1.0;
  const ReinsuranceModel m = c;
  const auto r = check_concavity(m, kTable1Market, kTable1Utility, kTable1State, 1001);
  EXPECT_FALSE(r.concave);
  ASSERT_TRUE(r.first_violation.has_value());
  EXPECT_GT(*r.first_violation, 0.0);
  EXPECT_LT(*r.first_violation, 1.0);
}
