// Optimal reinsurance-investment strategies.
//
// With V(t,x,y) = U(x) Vt(t,y) the HJB supremum separates: for a fixed
// retention u the optimal investment is
//   a*(u) = (mu - A sigma(u) sigma1) / (A (sigma1^2 + sigma2^2)),
// and u* maximizes Psi(u) over [0, I] (see market.hpp). Strategies depend on
// wealth only through A(x).
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>

#include "reinsopt/market.hpp"

namespace reinsopt {

enum class Region { A0, Interior, A1, AI };

inline std::string_view region_name(Region r) {
  switch (r) {
    case Region::A0: return "A0";
    case Region::Interior: return "Interior";
    case Region::A1: return "A1";
    case Region::AI: return "AI";
  }
  return "?";
}

struct StrategyPoint {
  double u_star = 0.0;
  double a_star = 0.0;
  Region region = Region::Interior;
  bool fallback = false;   // grid maximization used instead of the stationarity condition
  double residual = 0.0;   // |root equation| at u_star, where a root was solved for
};

/// Root bracketing found no sign change.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// More than one sign change: the root equation does not pin down a unique maximizer.
struct AmbiguityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Models {
  UtilityModel utility = SaharaParams{};
  MarketParams market;
  EnvParams environment;
  ReinsuranceModel reinsurance = Proportional{};
};

inline double investment_from(const MarketAt& k, double ara, double sigma) {
  return (k.mu - ara * sigma * k.sigma1) / (ara * k.s2());
}

/// a*(t,x,y) for a given retention u.
inline double optimal_investment(const MarketParams& mkt, const UtilityModel& util, const StatePoint& s,
                                 double u, const ReinsuranceModel& model) {
  return investment_from(market_at(mkt, s), util.ara(s.x), model.volatility(s, u));
}

/// Proportional closed form with risk aversion `ara`.
inline StrategyPoint proportional_from(const MarketAt& k, double q, double sigma0, double ara) {
  if (!(k.sigma2 > 0.0)) throw std::invalid_argument("proportional strategy requires sigma2 > 0");
  StrategyPoint sp;
  const double s2 = k.s2();
  const double lower = k.mu * k.sigma1 * sigma0 / s2;
  const double upper = sigma0 * (k.sigma2 * k.sigma2 * ara * sigma0 + k.mu * k.sigma1) / s2;
  if (q < lower) {
    sp.u_star = 0.0;
    sp.region = Region::A0;
  } else if (q > upper) {
    sp.u_star = 1.0;
    sp.region = Region::A1;
  } else {
    const double u = (s2 * q - k.mu * sigma0 * k.sigma1) / (sigma0 * sigma0 * k.sigma2 * k.sigma2 * ara);
    sp.u_star = std::clamp(u, 0.0, 1.0);
    sp.region = Region::Interior;
  }
  sp.a_star = investment_from(k, ara, sigma0 * sp.u_star);
  return sp;
}

inline StrategyPoint optimal_proportional(const MarketParams& mkt, const UtilityModel& util,
                                          const ReinsuranceModel& model, const StatePoint& s) {
  const auto* p = model.get_if<Proportional>();
  if (!p) throw std::invalid_argument("optimal_proportional needs a proportional reinsurance model");
  return proportional_from(market_at(mkt, s), p->q(s.t, s.y), p->sigma0(s.t, s.y), util.ara(s.x));
}

/// Exponential utility: the proportional closed form with A(x) = beta. Independent of x.
inline StrategyPoint optimal_exponential(const MarketParams& mkt, double beta, const ReinsuranceModel& model,
                                         const StatePoint& s) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  const auto* p = model.get_if<Proportional>();
  if (!p) throw std::invalid_argument("optimal_exponential needs a proportional reinsurance model");
  return proportional_from(market_at(mkt, s), p->q(s.t, s.y), p->sigma0(s.t, s.y), beta);
}

namespace detail {

// Bisection on g with g(lo) < 0 <= g(hi). Stops once the bracket is below
// 1e-14 (relative above 1) or g vanishes.
template <class G>
double bisect(G&& g, double lo, double hi, int max_iter = 200) {
  for (int i = 0; i < max_iter; ++i) {
    if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if (gm < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Scans g at u0 * 2^k, k = 0..60, starting from the limit value g0 at 0+.
// Returns the first bracket; throws if there is none or more than one.
template <class G>
std::pair<double, double> bracket_doubling(G&& g, double g0, const char* what) {
  constexpr double u0 = 1e-6;
  double prev_u = 0.0;
  bool prev_neg = g0 < 0.0;
  int changes = 0;
  std::pair<double, double> first{0.0, 0.0};
  for (int k = 0; k <= 60; ++k) {
    const double u = std::ldexp(u0, k);
    const double gu = g(u);
    if (std::isnan(gu)) throw SolverError(std::string(what) + ": root function is NaN at u=" + std::to_string(u));
    const bool neg = gu < 0.0;
    if (neg != prev_neg) {
      if (changes == 0) first = {prev_u, u};
      ++changes;
    }
    prev_u = u;
    prev_neg = neg;
  }
  if (changes == 0) throw SolverError(std::string(what) + ": no sign change found up to u=" + std::to_string(prev_u));
  if (changes > 1) throw AmbiguityError(std::string(what) + ": root equation changes sign " +
                                        std::to_string(changes) + " times");
  return first;
}

}  // namespace detail

/// Residual of the excess-of-loss stationarity equation dPsi/du = 0,
///   mu sigma1 u / sqrt(int_0^u 2zFbar) + sigma2^2 A u - theta (sigma1^2 + sigma2^2),
/// where dPsi/du = -Fbar(u) / (sigma1^2 + sigma2^2) times this expression.
/// Negative below the root.
inline double xl_root_function(const ExcessOfLoss& xl, const MarketAt& k, double ara, double u) {
  const double s2 = k.s2();
  if (u == 0.0) return k.mu * k.sigma1 - xl.theta * s2;
  const double i2 = xl.claims.int_2z_tail(u);
  const double ratio = std::isinf(i2) ? 0.0 : u / std::sqrt(i2);
  return k.mu * k.sigma1 * ratio + k.sigma2 * k.sigma2 * ara * u - xl.theta * s2;
}

inline StrategyPoint optimal_xl(const MarketParams& mkt, const UtilityModel& util, const ReinsuranceModel& model,
                                const StatePoint& s) {
  const auto* xl = model.get_if<ExcessOfLoss>();
  if (!xl) throw std::invalid_argument("optimal_xl needs an excess-of-loss reinsurance model");
  const MarketAt k = market_at(mkt, s);
  const double ara = util.ara(s.x);
  StrategyPoint sp;
  // A0: Psi is non-increasing from u = 0 when theta <= mu sigma1 / (sigma1^2 + sigma2^2)
  if (xl->theta <= k.mu * k.sigma1 / k.s2()) {
    sp.u_star = 0.0;
    sp.region = Region::A0;
    sp.a_star = investment_from(k, ara, 0.0);
    return sp;
  }
  auto g = [&](double u) { return xl_root_function(*xl, k, ara, u); };
  const auto [lo, hi] = detail::bracket_doubling(g, g(0.0), "excess-of-loss retention");
  sp.u_star = detail::bisect(g, lo, hi);
  sp.residual = std::abs(g(sp.u_star));
  sp.region = Region::Interior;
  sp.a_star = investment_from(k, ara, std::sqrt(xl->claims.int_2z_tail(sp.u_star)));
  return sp;
}

namespace detail {

// Smallest grid maximizer of f on [lo, hi] with n points.
template <class F>
std::pair<double, double> grid_max(F&& f, double lo, double hi, std::size_t n) {
  double best_u = lo, best = f(lo);
  for (std::size_t i = 1; i < n; ++i) {
    const double u = i + 1 == n ? hi : lo + (hi - lo) * double(i) / double(n - 1);
    const double v = f(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  return {best_u, best};
}

// Grid maximization refined around the incumbent; keeps the smallest maximizer at each level.
template <class F>
double refined_grid_argmax(F&& f, double lo, double hi, std::size_t n = 2001, int levels = 4) {
  double u = grid_max(f, lo, hi, n).first;
  double h = (hi - lo) / double(n - 1);
  for (int l = 0; l < levels; ++l) {
    const double a = std::max(lo, u - 2.0 * h), b = std::min(hi, u + 2.0 * h);
    u = grid_max(f, a, b, 401).first;
    h = (b - a) / 400.0;
  }
  return u;
}

}  // namespace detail

/// sigma1 = 0: u* solves dm/du = A sigma dsigma/du on [0, I], a* = mu / (A sigma2^2).
/// If Psi is not known to be concave on [0, I] the stationarity route is
/// replaced by grid maximization and the result is flagged.
inline StrategyPoint optimal_independent(const MarketParams& mkt, const UtilityModel& util,
                                         const ReinsuranceModel& model, const StatePoint& s) {
  const MarketAt k = market_at(mkt, s);
  if (k.sigma1 != 0.0) throw std::invalid_argument("optimal_independent requires sigma1 = 0");
  if (!(k.sigma2 > 0.0)) throw std::invalid_argument("optimal_independent requires sigma2 > 0");
  const double ara = util.ara(s.x);
  const double bound = model.retention_bound();
  StrategyPoint sp;
  sp.a_star = k.mu / (ara * k.sigma2 * k.sigma2);

  // dPsi/du with sigma1 = 0
  auto dpsi = [&](double u) {
    return model.drift_du(s, u) - ara * model.volatility(s, u) * model.volatility_du(s, u);
  };

  // XL: uniqueness is checked by the sign-change scan instead.
  bool concave = model.is<Proportional>() || model.is<ExcessOfLoss>();
  if (const auto* c = model.get_if<CustomReinsurance>()) concave = c->m_concave && c->sigma_convex;
  if (!concave && std::isfinite(bound)) {
    concave = check_concavity(model, mkt, util, s, 2001, bound, 1e-12).concave;
  }

  if (!concave) {
    if (!std::isfinite(bound)) throw std::invalid_argument("non-concave custom model needs a finite bound");
    const double top = bound;
    auto f = [&](double u) { return psi(model, mkt, util, s, u); };
    sp.u_star = detail::refined_grid_argmax(f, 0.0, top);
    sp.fallback = true;
    sp.region = sp.u_star == 0.0 ? Region::A0 : (sp.u_star == bound ? Region::AI : Region::Interior);
    return sp;
  }

  if (dpsi(0.0) <= 0.0) {
    sp.u_star = 0.0;
    sp.region = Region::A0;
    return sp;
  }
  // g = -dPsi is negative below the root
  auto g = [&](double u) { return -dpsi(u); };
  double lo = 0.0, hi = bound;
  if (std::isfinite(bound)) {
    if (dpsi(bound) >= 0.0) {
      sp.u_star = bound;
      sp.region = Region::AI;
      return sp;
    }
  } else {
    std::tie(lo, hi) = detail::bracket_doubling(g, g(0.0), "independent-market retention");
  }
  sp.u_star = detail::bisect(g, lo, hi);
  sp.residual = std::abs(dpsi(sp.u_star));
  sp.region = Region::Interior;
  return sp;
}

/// Numeric maximization of Psi for models without a closed form (custom
/// reinsurance with sigma1 > 0). Always flagged as a fallback.
inline StrategyPoint optimal_numeric(const MarketParams& mkt, const UtilityModel& util,
                                     const ReinsuranceModel& model, const StatePoint& s, double u_max = kInf) {
  const double bound = std::min(model.retention_bound(), u_max);
  if (!std::isfinite(bound)) throw std::invalid_argument("optimal_numeric needs a finite retention range");
  auto f = [&](double u) { return psi(model, mkt, util, s, u); };
  StrategyPoint sp;
  sp.u_star = detail::refined_grid_argmax(f, 0.0, bound);
  sp.fallback = true;
  sp.region = sp.u_star == 0.0 ? Region::A0 : (sp.u_star == bound ? Region::AI : Region::Interior);
  sp.a_star = optimal_investment(mkt, util, s, sp.u_star, model);
  return sp;
}

/// Picks the solver that matches the model family.
inline StrategyPoint optimal_strategy(const Models& m, const StatePoint& s) {
  if (m.reinsurance.is<Proportional>()) {
    if (m.utility.is_exponential()) return optimal_exponential(m.market, m.utility.exponential().beta, m.reinsurance, s);
    return optimal_proportional(m.market, m.utility, m.reinsurance, s);
  }
  if (m.reinsurance.is<ExcessOfLoss>()) return optimal_xl(m.market, m.utility, m.reinsurance, s);
  if (m.market.sigma1(s.t, s.y) == 0.0) return optimal_independent(m.market, m.utility, m.reinsurance, s);
  return optimal_numeric(m.market, m.utility, m.reinsurance, s);
}

}  // namespace reinsopt
