#include <gtest/gtest.h>

#include <cmath>

#include "reinsopt/verify.hpp"

using namespace reinsopt;

namespace {

const OracleReport& find(const std::vector<OracleReport>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.name == name) return r;
  throw std::runtime_error("no report named " + name);
}

SuiteOptions small_suite() {
  SuiteOptions o;
  o.draws = 100;
  o.joint_draws = 5;
  return o;
}

}  // namespace

TEST(Verify, GridArgmaxAtTable1) {
  const Models m = table1_models();
  const GridMax g = grid_argmax_u(m.reinsurance, m.market, m.utility, table1_state(), 1e-6);
  EXPECT_NEAR(g.u, 0.1131370849898476, 1e-6);
}

TEST(Verify, GridArgmaxA0Configuration) {
  Models m = table1_models();
  m.market.mu = 0.2;
  EXPECT_EQ(grid_argmax_u(m.reinsurance, m.market, m.utility, table1_state(), 1e-4).u, 0.0);
}

TEST(Verify, GridArgmaxRequiresDecreasingTailForUnboundedRetention) {
  Models m = table1_models();
  m.reinsurance = ExcessOfLoss{0.2, 0.1, ExponentialClaims{1.0}};
  EXPECT_THROW(grid_argmax_u(m.reinsurance, m.market, m.utility, table1_state(), 1e-3, 0.05), InconclusiveError);
  EXPECT_NO_THROW(grid_argmax_u(m.reinsurance, m.market, m.utility, table1_state(), 1e-3));
}

TEST(Verify, JointOracleAtTable1) {
  const Models m = table1_models();
  const UaMax j = joint_oracle(m.reinsurance, m.market, m.utility, table1_state());
  EXPECT_NEAR(j.u, 0.1131370849898476, 2e-6);
  EXPECT_NEAR(j.a, 0.1697056274847714, 2e-6);
  EXPECT_LE(j.a_step, 1e-6 * (1.0 + 1e-9));
}

TEST(Verify, JointOracleWidensInvestmentRange) {
  // tiny risk aversion puts a* far outside [-10, 10]
  Models m = table1_models();
  m.utility = SaharaParams{0.01, 1.0, 0.0};
  const StrategyPoint p = optimal_strategy(m, table1_state());
  ASSERT_GT(p.a_star, 10.0);
  const UaMax j = joint_oracle(m.reinsurance, m.market, m.utility, table1_state());
  EXPECT_NEAR(j.a, p.a_star, 1e-4 * std::max(1.0, p.a_star));
}

TEST(Verify, SuitePassesWithClosedForm) {
  for (const auto& r : run_oracle_suite(small_suite())) EXPECT_TRUE(r.pass) << r.name << " diff=" << r.abs_diff;
}

TEST(Verify, SuiteCatchesMutatedFormula) {
  // interior retention with a sign slip in the correlation term
  const ProportionalSolver mutant = [](const MarketAt& k, double q, double sigma0, double ara) {
    StrategyPoint sp = proportional_from(k, q, sigma0, ara);
    if (sp.region == Region::Interior) {
      const double u = (k.s2() * q + k.mu * sigma0 * k.sigma1) / (sigma0 * sigma0 * k.sigma2 * k.sigma2 * ara);
      sp.u_star = std::clamp(u, 0.0, 1.0);
      sp.a_star = investment_from(k, ara, sigma0 * sp.u_star);
    }
    return sp;
  };
  const auto reports = run_oracle_suite(small_suite(), mutant);
  EXPECT_FALSE(find(reports, "proportional_u_star_vs_grid_argmax").pass);
  EXPECT_FALSE(find(reports, "proportional_psi_not_below_grid_max").pass);
  EXPECT_FALSE(find(reports, "table1_u_star_vs_grid").pass);
}

TEST(Verify, SuiteCatchesMutatedInvestment) {
  const ProportionalSolver mutant = [](const MarketAt& k, double q, double sigma0, double ara) {
    StrategyPoint sp = proportional_from(k, q, sigma0, ara);
    sp.a_star = k.mu / (ara * k.s2());  // drops the hedging term
    return sp;
  };
  const auto reports = run_oracle_suite(small_suite(), mutant);
  EXPECT_TRUE(find(reports, "proportional_u_star_vs_grid_argmax").pass);
  EXPECT_FALSE(find(reports, "joint_a_star_vs_hjb_grid").pass);
  EXPECT_FALSE(find(reports, "table1_a_star_vs_hjb_grid").pass);
}

TEST(Verify, DrawsAreReproducibleAndInRange) {
  const auto a = random_proportional_draws(200, 3), b = random_proportional_draws(200, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].state.x, b[i].state.x);
    const double mu = a[i].market.mu(0, 0), q = a[i].reinsurance.q(0, 0);
    EXPECT_GE(mu, 0.0);
    EXPECT_LE(mu, 0.3);
    EXPECT_GE(q, 0.01);
    EXPECT_LE(q, 0.3);
    EXPECT_LT(a[i].reinsurance.p(0, 0), q);
    EXPECT_GE(a[i].utility.a, 0.2);
    EXPECT_LE(a[i].utility.d, 2.0);
  }
}

TEST(Verify, ContinuityDetectsJump) {
  const auto step = [](double p) {
    StrategyPoint s;
    s.u_star = p < 0.5 ? 0.0 : 1.0;
    return s;
  };
  EXPECT_FALSE(boundary_continuity(step, 0.5).pass);
}
