#include <gtest/gtest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "reinsopt/utility.hpp"

using namespace reinsopt;

namespace {

// -U''/U' by central differences of U'.
double fd_ara(const UtilityModel& m, double x, double h) {
  const double upp = (m.marginal(x + h) - m.marginal(x - h)) / (2.0 * h);
  return -upp / m.marginal(x);
}

}  // namespace

TEST(Utility, AraAtThresholdIsAOverB) {
  const UtilityModel m = SaharaParams{1.0, 1.0, 0.0};
  EXPECT_DOUBLE_EQ(m.ara(0.0), 1.0);
  const UtilityModel m2 = SaharaParams{2.5, 0.5, -1.0};
  EXPECT_DOUBLE_EQ(m2.ara(-1.0), 5.0);
}

TEST(Utility, AraMatchesFiniteDifferenceAtOne) {
  const UtilityModel m = SaharaParams{1.0, 1.0, 0.0};
  const double oracle = fd_ara(m, 1.0, 1e-6);
  EXPECT_NEAR(oracle, 0.7071067811865476, 1e-8);
  EXPECT_NEAR(m.ara(1.0), oracle, 1e-8);
}

TEST(Utility, ExponentialAraIsConstant) {
  const UtilityModel m = ExponentialParams{0.5};
  for (double x : {-3.0, 0.0, 7.0}) EXPECT_EQ(m.ara(x), 0.5);
}

TEST(Utility, AraFiniteDifferenceOnGrid) {
  for (const SaharaParams p : {SaharaParams{1, 1, 0}, SaharaParams{2.5, 0.3, 1.0}, SaharaParams{0.4, 2.0, -1.5}}) {
    const UtilityModel m = p;
    for (double x = -6.0; x <= 6.0; x += 0.25) {
      EXPECT_NEAR(fd_ara(m, x, 1e-5), m.ara(x), 1e-6) << "x=" << x << " a=" << p.a;
    }
  }
}

TEST(Utility, AraSymmetricAboutThreshold) {
  const UtilityModel m = SaharaParams{1.3, 0.7, 0.4};
  for (double delta : {0.1, 1.0, 10.0}) EXPECT_NEAR(m.ara(0.4 + delta), m.ara(0.4 - delta), 1e-12);
}

TEST(Utility, HaraLimitAsScaleVanishes) {
  const UtilityModel m = SaharaParams{1.5, 1e-8, 0.0};
  for (double x : {0.5, 1.0, 3.0}) EXPECT_NEAR(m.ara(x), 1.5 / x, 1e-6);
}

TEST(Utility, MarginalUtilityValues) {
  const UtilityModel m = SaharaParams{1.0, 1.0, 0.0};
  EXPECT_DOUBLE_EQ(m.marginal(0.0), 1.0);
  // oracle: exp(-int_0^1 A) by adaptive Simpson
  const double int_a = oracle::simpson([](double s) { return 1.0 / std::sqrt(1.0 + s * s); }, 0.0, 1.0, 1e-14);
  EXPECT_NEAR(std::exp(-int_a), 1.0 / (1.0 + std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(m.marginal(1.0), std::exp(-int_a), 1e-12);
  const UtilityModel e = ExponentialParams{1.0};
  EXPECT_DOUBLE_EQ(e.marginal(0.0), 1.0);
  EXPECT_NEAR(e.marginal(2.0), std::exp(-2.0), 1e-15);
}

TEST(Utility, UtilityValueNormalization) {
  const UtilityModel m = SaharaParams{1.0, 1.0, 0.0};
  EXPECT_EQ(m.value(0.0), 0.0);
  const UtilityModel e = ExponentialParams{1.0};
  EXPECT_DOUBLE_EQ(e.value(0.0), -1.0);
  EXPECT_GT(m.value(1.0), 0.0);
  EXPECT_LT(m.value(-1.0), 0.0);
  EXPECT_LT(m.value(1.0), -m.value(-1.0));
}

TEST(Utility, UtilityValueMatchesClosedForm) {
  // frozen by 30-digit quadrature: U(2.1) and U(-4) for SAHARA(a=2, b=0.5, d=0.3)
  const UtilityModel m = SaharaParams{2.0, 0.5, 0.3};
  EXPECT_NEAR(m.value(2.1), 0.299045198394607686, 1e-10);
  EXPECT_NEAR(m.value(-4.0), -432.318502294750087, 1e-10 * 432.0);
  for (const SaharaParams p : {SaharaParams{1, 1, 0}, SaharaParams{0.3, 2.0, -1.0}, SaharaParams{3.0, 0.2, 0.5}}) {
    const UtilityModel u = p;
    for (double x : {-400.0, -30.0, -2.2, -0.5, 0.0, 0.01, 0.7, 3.3, 25.0, 300.0}) {
      const double expect = oracle::sahara_u_closed(p.a, p.b, p.d, x);
      EXPECT_NEAR(u.value(x), expect, 1e-10 * std::max(1.0, std::abs(expect))) << "x=" << x << " a=" << p.a;
    }
  }
}

TEST(Utility, MonotoneAndConcaveOnGrid) {
  for (const UtilityModel m : {UtilityModel(SaharaParams{1, 1, 0}), UtilityModel(SaharaParams{2, 0.3, 1}),
                               UtilityModel(ExponentialParams{0.8})}) {
    double prev_u = -INFINITY, prev_mu = INFINITY;
    for (double x = -8.0; x <= 8.0; x += 0.1) {
      const double u = m.value(x), mu = m.marginal(x);
      EXPECT_GT(u, prev_u);
      EXPECT_LT(mu, prev_mu);
      EXPECT_GT(mu, 0.0);
      prev_u = u;
      prev_mu = mu;
    }
  }
}

TEST(Utility, RejectsInvalidParameters) {
  EXPECT_THROW(UtilityModel(SaharaParams{0.0, 1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(UtilityModel(SaharaParams{1.0, -1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(UtilityModel(ExponentialParams{0.0}), std::invalid_argument);
}

TEST(Utility, ConcurrentReadsShareOneTable) {
  const UtilityModel m = SaharaParams{1.7, 0.6, 0.2};
  std::vector<double> results(8);
  {
    std::vector<std::jthread> pool;
    for (int i = 0; i < 8; ++i) pool.emplace_back([&, i] { results[i] = m.value(1.0 + 0.1 * i); });
  }
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(results[i], oracle::sahara_u_closed(1.7, 0.6, 0.2, 1.0 + 0.1 * i), 1e-10);
}
