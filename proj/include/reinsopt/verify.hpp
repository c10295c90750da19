// Independent oracles for the closed-form strategies: grid maximization of Psi
// and of the full HJB integrand over (u, a), region-boundary continuity scans,
// and the randomized oracle suite behind `reinsopt verify`.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "reinsopt/strategy.hpp"

namespace reinsopt {

struct OracleReport {
  std::string name;
  double closed_form = 0.0;
  double oracle = 0.0;
  double abs_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string grid_spec;
};

inline OracleReport make_report(std::string name, double closed, double oracle, double tol, std::string grid) {
  OracleReport r{std::move(name), closed, oracle, std::abs(closed - oracle), tol, false, std::move(grid)};
  r.pass = r.abs_diff <= r.tolerance;
  return r;
}

/// The grid did not bracket the maximizer.
struct InconclusiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridMax {
  double u = 0.0;
  double value = 0.0;
};

/// Smallest maximizer of Psi over {0, h, 2h, ...} in [0, I] (or [0, u_max]
/// when I = inf, in which case Psi must already be decreasing at u_max).
inline GridMax grid_argmax_u(const ReinsuranceModel& model, const MarketParams& mkt, const UtilityModel& util,
                             const StatePoint& s, double h, double u_max = kInf) {
  if (!(h > 0.0)) throw std::invalid_argument("grid step must be > 0");
  double top = model.retention_bound();
  if (!std::isfinite(top)) {
    if (!std::isfinite(u_max)) {
      const auto* xl = model.get_if<ExcessOfLoss>();
      if (!xl) throw std::invalid_argument("grid_argmax_u needs a finite u_max when I = inf");
      u_max = 50.0 * xl->claims.mean();
    }
    top = u_max;
  } else if (std::isfinite(u_max)) {
    top = std::min(top, u_max);
  }
  const auto n = static_cast<std::size_t>(std::floor(top / h + 1e-9));
  GridMax best{0.0, psi(model, mkt, util, s, 0.0)};
  for (std::size_t i = 1; i <= n; ++i) {
    const double u = std::min(top, double(i) * h);
    const double v = psi(model, mkt, util, s, u);
    if (v > best.value) best = {u, v};
  }
  // a maximizer on the truncation edge says nothing about the unbounded problem
  if (!std::isfinite(model.retention_bound()) && n >= 1 && best.u == std::min(top, double(n) * h)) {
    std::ostringstream os;
    os << "Psi maximized at the truncation edge u_max=" << top << "; enlarge u_max";
    throw InconclusiveError(os.str());
  }
  return best;
}

struct UaGrid {
  double u_lo = 0.0, u_hi = 1.0, u_step = 1e-3;
  double a_lo = -10.0, a_hi = 10.0, a_step = 1e-3;
  int refinements = 3;  // each level: +-5 old steps, step / 10
};

struct UaMax {
  double u = 0.0;
  double a = 0.0;
  double value = 0.0;
  double u_step = 0.0;  // final grid steps
  double a_step = 0.0;
};

/// HJB integrand {m + a mu} U' + 1/2 {(sigma + a sigma1)^2 + a^2 sigma2^2} U''
/// divided by U'(x) > 0, i.e. m + a mu - A/2 {...}. Long double keeps the
/// flat directions of the grid search above rounding noise.
inline long double hjb_integrand(const ReinsuranceModel& model, const MarketAt& k, double ara, const StatePoint& s,
                                 double u, double a) {
  const long double m = model.drift(s, u), sig = model.volatility(s, u);
  const long double la = a;
  const long double d1 = sig + la * k.sigma1, d2 = la * k.sigma2;
  return m + la * k.mu - 0.5L * ara * (d1 * d1 + d2 * d2);
}

inline UaMax grid_argmax_ua(const ReinsuranceModel& model, const MarketParams& mkt, const UtilityModel& util,
                            const StatePoint& s, const UaGrid& g) {
  const MarketAt k = market_at(mkt, s);
  const double ara = util.ara(s.x);
  const double bound = model.retention_bound();

  auto search = [&](double ulo, double uhi, double uh, double alo, double ahi, double ah, bool check_edges) {
    const auto nu = static_cast<std::size_t>(std::floor((uhi - ulo) / uh + 1e-9)) + 1;
    const auto na = static_cast<std::size_t>(std::floor((ahi - alo) / ah + 1e-9)) + 1;
    UaMax best;
    long double bv = -std::numeric_limits<long double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t i = 0; i < nu; ++i) {
      const double u = std::min(uhi, ulo + double(i) * uh);
      const long double m = model.drift(s, u), sig = model.volatility(s, u);
      for (std::size_t j = 0; j < na; ++j) {
        const long double a = alo + double(j) * ah;
        const long double d1 = sig + a * k.sigma1, d2 = a * k.sigma2;
        const long double v = m + a * k.mu - 0.5L * ara * (d1 * d1 + d2 * d2);
        if (v > bv) {
          bv = v;
          best.u = u;
          best.a = double(a);
          best_j = j;
        }
      }
    }
    if (check_edges && (best_j == 0 || best_j + 1 == na)) {
      std::ostringstream os;
      os << "maximizer on the a-grid boundary (a=" << best.a << "); widen the a-grid";
      throw InconclusiveError(os.str());
    }
    best.value = double(bv);
    best.u_step = uh;
    best.a_step = ah;
    return best;
  };

  const double uhi = std::min(g.u_hi, bound);
  if (!std::isfinite(uhi)) throw std::invalid_argument("grid_argmax_ua needs a finite u range");
  UaMax best = search(g.u_lo, uhi, g.u_step, g.a_lo, g.a_hi, g.a_step, true);
  double uh = g.u_step, ah = g.a_step;
  for (int level = 0; level < g.refinements; ++level) {
    const double ulo = std::max(g.u_lo, best.u - 5.0 * uh), uhi2 = std::min(uhi, best.u + 5.0 * uh);
    const double alo = best.a - 5.0 * ah, ahi = best.a + 5.0 * ah;
    uh /= 10.0;
    ah /= 10.0;
    best = search(ulo, uhi2, uh, alo, ahi, ah, false);
  }
  return best;
}

struct ContinuityReport {
  double boundary = 0.0;
  double max_jump = 0.0;
  Region below = Region::Interior;
  Region above = Region::Interior;
  bool pass = false;
};

/// Walks `steps` parameter increments of size `dp` on each side of `boundary`
/// and records the largest change in u* between neighbours.
inline ContinuityReport boundary_continuity(const std::function<StrategyPoint(double)>& along, double boundary,
                                            double dp = 1e-8, int steps = 10, double max_jump = 1e-6) {
  ContinuityReport r;
  r.boundary = boundary;
  StrategyPoint prev = along(boundary - steps * dp);
  r.below = prev.region;
  for (int i = -steps + 1; i <= steps; ++i) {
    const StrategyPoint cur = along(boundary + i * dp);
    r.max_jump = std::max(r.max_jump, std::abs(cur.u_star - prev.u_star));
    prev = cur;
  }
  r.above = prev.region;
  r.pass = r.max_jump <= max_jump;
  return r;
}

// ---------------------------------------------------------------------------
// Randomized suite

struct ProportionalDraw {
  MarketParams market;
  SaharaParams utility;
  Proportional reinsurance;
  StatePoint state;
};

/// mu in [0,0.3], sigma1, sigma2, sigma0 in [0.05,1], q in [0.01,0.3],
/// x in [-5,5], a, b in [0.2,3], d in [-2,2]; p = q / 2.
inline std::vector<ProportionalDraw> random_proportional_draws(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unif = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::vector<ProportionalDraw> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ProportionalDraw d;
    d.market.mu = unif(0.0, 0.3);
    d.market.sigma1 = unif(0.05, 1.0);
    d.market.sigma2 = unif(0.05, 1.0);
    const double sigma0 = unif(0.05, 1.0);
    const double q = unif(0.01, 0.3);
    d.reinsurance = Proportional{0.5 * q, q, sigma0};
    d.state.x = unif(-5.0, 5.0);
    d.utility.a = unif(0.2, 3.0);
    d.utility.b = unif(0.2, 3.0);
    d.utility.d = unif(-2.0, 2.0);
    out.push_back(d);
  }
  return out;
}

/// Proportional solver signature; the suite accepts a replacement so that
/// mutated formulas can be checked to fail.
using ProportionalSolver = std::function<StrategyPoint(const MarketAt&, double q, double sigma0, double ara)>;

struct SuiteOptions {
  std::size_t draws = 1000;
  std::size_t joint_draws = 100;
  std::uint64_t seed = 7;
  double u_step = 1e-3;
};

inline std::string describe_grid(const char* what, double h, std::size_t draws) {
  std::ostringstream os;
  os << what << ", step " << h << ", " << draws << " draws";
  return os.str();
}

/// Worst case over random draws of |u*_closed - grid argmax Psi| and of
/// max_grid Psi - Psi(u*_closed).
inline std::vector<OracleReport> proportional_grid_reports(const std::vector<ProportionalDraw>& draws,
                                                           const ProportionalSolver& solver, double h) {
  double worst_u = 0.0, worst_gap = -kInf;
  double wu_closed = 0.0, wu_oracle = 0.0, wg_closed = 0.0, wg_oracle = 0.0;
  for (const auto& d : draws) {
    const UtilityModel util(d.utility);
    const ReinsuranceModel model(d.reinsurance);
    const MarketAt k = market_at(d.market, d.state);
    const StrategyPoint sp = solver(k, d.reinsurance.q(0, 0), d.reinsurance.sigma0(0, 0), util.ara(d.state.x));
    const GridMax g = grid_argmax_u(model, d.market, util, d.state, h);
    const double diff = std::abs(sp.u_star - g.u);
    if (diff >= worst_u) {
      worst_u = diff;
      wu_closed = sp.u_star;
      wu_oracle = g.u;
    }
    const double u_eval = std::clamp(sp.u_star, 0.0, 1.0);
    const double gap = g.value - psi(model, d.market, util, d.state, u_eval);
    if (gap >= worst_gap) {
      worst_gap = gap;
      wg_closed = psi(model, d.market, util, d.state, u_eval);
      wg_oracle = g.value;
    }
  }
  std::vector<OracleReport> out;
  out.push_back(make_report("proportional_u_star_vs_grid_argmax", wu_closed, wu_oracle, h,
                            describe_grid("argmax Psi on [0,1]", h, draws.size())));
  OracleReport gap = make_report("proportional_psi_not_below_grid_max", wg_closed, wg_oracle, 1e-9,
                                 describe_grid("max Psi on [0,1]", h, draws.size()));
  // one-sided: only a closed-form value below the grid maximum counts
  gap.abs_diff = std::max(0.0, wg_oracle - wg_closed);
  gap.pass = gap.abs_diff <= gap.tolerance;
  out.push_back(gap);
  return out;
}

/// 2-D grid argmax of the HJB integrand, widening the a-range until the
/// maximizer is interior.
inline UaMax joint_oracle(const ReinsuranceModel& model, const MarketParams& mkt, const UtilityModel& util,
                          const StatePoint& s, double final_step = 1e-6) {
  UaGrid g;
  g.u_step = 1e-2;
  g.a_lo = -10.0;
  g.a_hi = 10.0;
  g.a_step = 1e-2;
  for (int widen = 0; widen < 12; ++widen) {
    try {
      g.refinements = int(std::ceil(std::log10(std::max(g.u_step, g.a_step) / final_step) - 1e-9));
      return grid_argmax_ua(model, mkt, util, s, g);
    } catch (const InconclusiveError&) {
      g.a_lo *= 4.0;
      g.a_hi *= 4.0;
      g.a_step *= 4.0;
    }
  }
  throw InconclusiveError("a-grid could not be widened enough");
}

inline std::vector<OracleReport> joint_hjb_reports(const std::vector<ProportionalDraw>& draws,
                                                   const ProportionalSolver& solver, double tol = 1e-4) {
  double worst_u = 0.0, worst_a = 0.0;
  double wu[2] = {0, 0}, wa[2] = {0, 0};
  for (const auto& d : draws) {
    const UtilityModel util(d.utility);
    const ReinsuranceModel model(d.reinsurance);
    const MarketAt k = market_at(d.market, d.state);
    const StrategyPoint sp = solver(k, d.reinsurance.q(0, 0), d.reinsurance.sigma0(0, 0), util.ara(d.state.x));
    const UaMax g = joint_oracle(model, d.market, util, d.state);
    if (std::abs(sp.u_star - g.u) >= worst_u) {
      worst_u = std::abs(sp.u_star - g.u);
      wu[0] = sp.u_star;
      wu[1] = g.u;
    }
    if (std::abs(sp.a_star - g.a) >= worst_a) {
      worst_a = std::abs(sp.a_star - g.a);
      wa[0] = sp.a_star;
      wa[1] = g.a;
    }
  }
  const std::string spec = describe_grid("2-D HJB integrand argmax, refined", 1e-6, draws.size());
  return {make_report("joint_u_star_vs_hjb_grid", wu[0], wu[1], tol, spec),
          make_report("joint_a_star_vs_hjb_grid", wa[0], wa[1], tol, spec)};
}

/// Table 1: mu = 0.08, sigma1 = sigma2 = sigma0 = 0.5, q = 0.05, x = 1, SAHARA(a=1, b=1, d=0).
inline Models table1_models() {
  Models m;
  m.utility = SaharaParams{1.0, 1.0, 0.0};
  m.market = MarketParams{0.08, 0.5, 0.5};
  m.reinsurance = Proportional{0.03, 0.05, 0.5};
  return m;
}

inline StatePoint table1_state() { return StatePoint{0.0, 1.0, 0.0}; }

inline std::vector<OracleReport> run_oracle_suite(const SuiteOptions& opt,
                                                  const ProportionalSolver& solver = proportional_from) {
  std::vector<OracleReport> out;
  const auto draws = random_proportional_draws(opt.draws, opt.seed);
  for (auto& r : proportional_grid_reports(draws, solver, opt.u_step)) out.push_back(std::move(r));

  const auto joint = random_proportional_draws(opt.joint_draws, opt.seed + 1);
  for (auto& r : joint_hjb_reports(joint, solver)) out.push_back(std::move(r));

  // Table 1 point against a fine grid.
  const Models t1 = table1_models();
  const StatePoint s1 = table1_state();
  const MarketAt k1 = market_at(t1.market, s1);
  const StrategyPoint sp1 = solver(k1, 0.05, 0.5, t1.utility.ara(s1.x));
  const GridMax g1 = grid_argmax_u(t1.reinsurance, t1.market, t1.utility, s1, 1e-6);
  out.push_back(make_report("table1_u_star_vs_grid", sp1.u_star, g1.u, 1e-6, "argmax Psi on [0,1], step 1e-06"));
  const UaMax j1 = joint_oracle(t1.reinsurance, t1.market, t1.utility, s1);
  out.push_back(make_report("table1_a_star_vs_hjb_grid", sp1.a_star, j1.a, 1e-6, "2-D HJB argmax, step 1e-06"));

  // Excess of loss, Exp(1) claims, theta = 0.2.
  Models xl = t1;
  xl.reinsurance = ExcessOfLoss{0.2, 0.1, ExponentialClaims{1.0}};
  const StrategyPoint sx = optimal_xl(xl.market, xl.utility, xl.reinsurance, s1);
  out.push_back(make_report("xl_root_residual", sx.residual, 0.0, 1e-10, "bisection on the stationarity equation"));
  const GridMax gx = grid_argmax_u(xl.reinsurance, xl.market, xl.utility, s1, 1e-5, 5.0);
  out.push_back(make_report("xl_root_vs_grid", sx.u_star, gx.u, 1e-4, "argmax Psi on [0,5], step 1e-05"));
  xl.reinsurance = ExcessOfLoss{0.07, 0.05, ExponentialClaims{1.0}};
  const StrategyPoint sx0 = optimal_xl(xl.market, xl.utility, xl.reinsurance, s1);
  out.push_back(make_report("xl_a0_region_zero_retention", sx0.u_star, 0.0, 0.0, "theta = 0.07 <= mu sigma1/(s1^2+s2^2)"));

  // sigma1 = 0 closed forms.
  double worst_p = 0.0, worst_x = 0.0;
  double wp[2] = {0, 0}, wx[2] = {0, 0};
  for (const auto& d : random_proportional_draws(100, opt.seed + 2)) {
    MarketParams mk = d.market;
    mk.sigma1 = 0.0;
    const UtilityModel util(d.utility);
    const double ara = util.ara(d.state.x);
    const double q = d.reinsurance.q(0, 0), s0 = d.reinsurance.sigma0(0, 0);
    const StrategyPoint sp = optimal_independent(mk, util, ReinsuranceModel(d.reinsurance), d.state);
    const double expect_p = std::min(q / (s0 * s0 * ara), 1.0);
    if (std::abs(sp.u_star - expect_p) >= worst_p) {
      worst_p = std::abs(sp.u_star - expect_p);
      wp[0] = sp.u_star;
      wp[1] = expect_p;
    }
    const double theta = 0.05 + q;
    const StrategyPoint sxl = optimal_xl(mk, util, ReinsuranceModel(ExcessOfLoss{theta, 0.05, ExponentialClaims{1.0}}),
                                         d.state);
    if (std::abs(sxl.u_star - theta / ara) >= worst_x) {
      worst_x = std::abs(sxl.u_star - theta / ara);
      wx[0] = sxl.u_star;
      wx[1] = theta / ara;
    }
  }
  out.push_back(make_report("independent_proportional_q_over_sigma0sq_A", wp[0], wp[1], 1e-10, "100 draws"));
  out.push_back(make_report("independent_xl_theta_over_A", wx[0], wx[1], 1e-10, "100 draws"));

  // Wealth symmetry about d and wealth independence under exponential utility.
  double worst_sym = 0.0;
  for (double delta : {0.1, 1.0, 5.0}) {
    const StrategyPoint up = optimal_strategy(t1, StatePoint{0, t1.utility.sahara().d + delta, 0});
    const StrategyPoint dn = optimal_strategy(t1, StatePoint{0, t1.utility.sahara().d - delta, 0});
    worst_sym = std::max({worst_sym, std::abs(up.u_star - dn.u_star), std::abs(up.a_star - dn.a_star)});
  }
  out.push_back(make_report("wealth_symmetry_about_d", worst_sym, 0.0, 1e-12, "delta in {0.1, 1, 5}"));
  Models ex = t1;
  ex.utility = ExponentialParams{1.0 / std::sqrt(2.0)};
  const StrategyPoint lo = optimal_strategy(ex, StatePoint{0, -5.0, 0});
  const StrategyPoint hi = optimal_strategy(ex, StatePoint{0, 5.0, 0});
  out.push_back(make_report("exponential_wealth_independence",
                            std::max(std::abs(lo.u_star - hi.u_star), std::abs(lo.a_star - hi.a_star)), 0.0, 1e-15,
                            "x = -5 vs x = +5"));
  return out;
}

}  // namespace reinsopt
