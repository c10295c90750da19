// Optimal strategies at the Table 1 parameters under proportional and
// excess-of-loss reinsurance, and how they move with wealth.
#include <cstdio>

#include "reinsopt/strategy.hpp"

int main() {
  using namespace reinsopt;
  const UtilityModel util = SaharaParams{1.0, 1.0, 0.0};
  const MarketParams mkt{0.08, 0.5, 0.5};
  const ReinsuranceModel prop = Proportional{0.03, 0.05, 0.5};
  const ReinsuranceModel xl = ExcessOfLoss{0.2, 0.1, ExponentialClaims{1.0}};

  std::printf("%6s  %10s %10s  %10s %10s\n", "x", "u*(prop)", "a*(prop)", "u*(XL)", "a*(XL)");
  for (double x = -3.0; x <= 3.0; x += 1.0) {
    const StatePoint s{0.0, x, 0.0};
    const StrategyPoint p = optimal_proportional(mkt, util, prop, s);
    const StrategyPoint q = optimal_xl(mkt, util, xl, s);
    std::printf("%6.2f  %10.6f %10.6f  %10.6f %10.6f\n", x, p.u_star, p.a_star, q.u_star, q.a_star);
  }
  return 0;
}
