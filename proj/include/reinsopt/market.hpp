// Model coefficients: environment, risky asset, reinsurance families, and the
// pointwise reinsurance criterion Psi obtained after optimizing out the
// investment in the HJB supremum.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include "reinsopt/claims.hpp"
#include "reinsopt/coefficients.hpp"
#include "reinsopt/utility.hpp"

namespace reinsopt {

struct MarketParams {
  Coefficient mu = 0.08;
  Coefficient sigma1 = 0.5;
  Coefficient sigma2 = 0.5;

  void validate() const {
    if (sigma1.lower() < 0.0) throw std::invalid_argument("market.sigma1 must be >= 0");
    if (sigma2.lower() < 0.0) throw std::invalid_argument("market.sigma2 must be >= 0");
    if (!(sigma1.lower() + sigma2.lower() > 0.0))
      throw std::invalid_argument("market.sigma1 + market.sigma2 must be bounded away from 0");
  }
};

struct EnvParams {
  Coefficient mu_y = 0.0;
  Coefficient sigma_y = 0.0;
  double y0 = 0.0;

  void validate() const {
    if (sigma_y.lower() < 0.0) throw std::invalid_argument("environment.sigmaY must be >= 0");
  }
};

struct StatePoint {
  double t = 0.0;
  double x = 1.0;
  double y = 0.0;
};

/// Non-cheap proportional reinsurance: m = p - q + q u, sigma = sigma0 u, I = 1.
struct Proportional {
  Coefficient p = 0.03;
  Coefficient q = 0.05;
  Coefficient sigma0 = 0.5;
};

/// Excess-of-loss: m = theta int_0^u Fbar - (theta - eta) E[Z],
/// sigma = sqrt(int_0^u 2 z Fbar), I = inf.
struct ExcessOfLoss {
  double theta = 0.2;
  double eta = 0.1;
  ClaimDistribution claims = ExponentialClaims{1.0};
};

/// User-supplied m(t,y,u) and sigma(t,y,u) on [0, bound]. Derivatives in u are
/// optional; central differences are used when absent.
struct CustomReinsurance {
  using Fn = std::function<double(double t, double y, double u)>;
  Fn m;
  Fn sigma;
  Fn dm_du;
  Fn dsigma_du;
  double bound = 1.0;
  bool m_concave = false;
  bool sigma_convex = false;
};

class ReinsuranceModel {
 public:
  ReinsuranceModel(Proportional p) : v_(std::move(p)) {
    const auto& m = std::get<Proportional>(v_);
    if (m.sigma0.lower() <= 0.0) throw std::invalid_argument("reinsurance.sigma0 must be > 0");
    if (m.p.is_constant() && m.q.is_constant() && !(m.p.constant() < m.q.constant()))
      throw std::invalid_argument("reinsurance.p must be < reinsurance.q");
  }
  ReinsuranceModel(ExcessOfLoss x) : v_(std::move(x)) {
    const auto& m = std::get<ExcessOfLoss>(v_);
    if (!(m.eta > 0.0)) throw std::invalid_argument("reinsurance.eta must be > 0");
    if (!(m.theta >= m.eta)) throw std::invalid_argument("reinsurance.theta must be >= reinsurance.eta");
  }
  ReinsuranceModel(CustomReinsurance c) : v_(std::move(c)) {
    const auto& m = std::get<CustomReinsurance>(v_);
    if (!m.m || !m.sigma) throw std::invalid_argument("custom reinsurance needs m and sigma");
    if (!(m.bound > 0.0)) throw std::invalid_argument("custom reinsurance bound must be > 0");
  }

  template <class T>
  const T* get_if() const { return std::get_if<T>(&v_); }
  template <class T>
  bool is() const { return std::holds_alternative<T>(v_); }

  /// Upper end I of the retention interval [0, I]; may be +inf.
  double retention_bound() const {
    if (is<Proportional>()) return 1.0;
    if (is<ExcessOfLoss>()) return kInf;
    return std::get<CustomReinsurance>(v_).bound;
  }

  void check_retention(double u) const {
    if (!(u >= 0.0 && u <= retention_bound())) {
      std::ostringstream os;
      os << "retention " << u << " outside [0, " << retention_bound() << "]";
      throw std::domain_error(os.str());
    }
  }

  double drift(const StatePoint& s, double u) const {
    check_retention(u);
    if (auto* p = get_if<Proportional>()) {
      const double pv = p->p(s.t, s.y), qv = p->q(s.t, s.y);
      if (!(pv < qv)) throw std::domain_error("proportional premium requires p < q at this state");
      return pv - qv + qv * u;
    }
    if (auto* x = get_if<ExcessOfLoss>()) {
      return x->theta * x->claims.int_tail(u) - (x->theta - x->eta) * x->claims.mean();
    }
    return std::get<CustomReinsurance>(v_).m(s.t, s.y, u);
  }

  double volatility(const StatePoint& s, double u) const {
    check_retention(u);
    if (auto* p = get_if<Proportional>()) return p->sigma0(s.t, s.y) * u;
    if (auto* x = get_if<ExcessOfLoss>()) return std::sqrt(x->claims.int_2z_tail(u));
    const double v = std::get<CustomReinsurance>(v_).sigma(s.t, s.y, u);
    if (v < 0.0) throw std::domain_error("custom sigma(t,y,u) must be >= 0");
    return v;
  }

  double drift_du(const StatePoint& s, double u) const {
    if (auto* p = get_if<Proportional>()) return p->q(s.t, s.y);
    if (auto* x = get_if<ExcessOfLoss>()) return x->theta * x->claims.tail(u);
    const auto& c = std::get<CustomReinsurance>(v_);
    if (c.dm_du) return c.dm_du(s.t, s.y, u);
    return central_du(c.m, s, u, c.bound);
  }

  double volatility_du(const StatePoint& s, double u) const {
    if (auto* p = get_if<Proportional>()) return p->sigma0(s.t, s.y);
    if (auto* x = get_if<ExcessOfLoss>()) {
      if (u == 0.0) return 1.0;  // sqrt(int_0^u 2z Fbar) ~ u near 0
      return u * x->claims.tail(u) / std::sqrt(x->claims.int_2z_tail(u));
    }
    const auto& c = std::get<CustomReinsurance>(v_);
    if (c.dsigma_du) return c.dsigma_du(s.t, s.y, u);
    return central_du(c.sigma, s, u, c.bound);
  }

 private:
  static double central_du(const CustomReinsurance::Fn& f, const StatePoint& s, double u, double bound) {
    const double h = 1e-6 * std::max(1.0, std::abs(u));
    const double lo = std::max(0.0, u - h), hi = std::min(bound, u + h);
    return (f(s.t, s.y, hi) - f(s.t, s.y, lo)) / (hi - lo);
  }

  std::variant<Proportional, ExcessOfLoss, CustomReinsurance> v_;
};

inline double drift_m(const ReinsuranceModel& model, const StatePoint& s, double u) {
  return model.drift(s, u);
}

inline double vol_sigma(const ReinsuranceModel& model, const StatePoint& s, double u) {
  return model.volatility(s, u);
}

/// Market coefficients frozen at one (t, y).
struct MarketAt {
  double mu;
  double sigma1;
  double sigma2;
  double s2() const { return sigma1 * sigma1 + sigma2 * sigma2; }
};

inline MarketAt market_at(const MarketParams& mkt, const StatePoint& s) {
  return {mkt.mu(s.t, s.y), mkt.sigma1(s.t, s.y), mkt.sigma2(s.t, s.y)};
}

/// Psi(u) = m + [mu^2 - 2 mu sigma sigma1 A - sigma^2 sigma2^2 A^2] / (2 (sigma1^2 + sigma2^2) A)
inline double psi_from(double m, double sigma, const MarketAt& k, double ara) {
  const double num = k.mu * k.mu - 2.0 * k.mu * sigma * k.sigma1 * ara -
                     sigma * sigma * k.sigma2 * k.sigma2 * ara * ara;
  return m + num / (2.0 * k.s2() * ara);
}

inline double psi(const ReinsuranceModel& model, const MarketParams& mkt, const UtilityModel& util,
                  const StatePoint& s, double u) {
  return psi_from(model.drift(s, u), model.volatility(s, u), market_at(mkt, s), util.ara(s.x));
}

struct ConcavityReport {
  bool concave = true;
  double max_second_difference = -kInf;
  std::optional<double> first_violation;  // u at the centre of the first bad stencil
  double u_max = 0.0;
  std::size_t grid_n = 0;
};

/// Scans second differences of Psi on an evenly spaced grid of [0, u_max]
/// (u_max = I unless I is infinite, then the caller's u_max).
inline ConcavityReport check_concavity(const ReinsuranceModel& model, const MarketParams& mkt,
                                       const UtilityModel& util, const StatePoint& s, std::size_t grid_n,
                                       double u_max = kInf, double tol = 1e-12, double u_min = 0.0) {
  if (grid_n < 3) throw std::invalid_argument("check_concavity needs grid_n >= 3");
  const double top = std::min(u_max, model.retention_bound());
  if (!std::isfinite(top)) throw std::invalid_argument("check_concavity needs a finite u_max when I = inf");
  ConcavityReport r;
  r.u_max = top;
  r.grid_n = grid_n;
  const double h = (top - u_min) / double(grid_n - 1);
  auto at = [&](std::size_t i) { return i + 1 == grid_n ? top : u_min + h * double(i); };
  double prev2 = psi(model, mkt, util, s, at(0));
  double prev1 = psi(model, mkt, util, s, at(1));
  for (std::size_t i = 2; i < grid_n; ++i) {
    const double cur = psi(model, mkt, util, s, at(i));
    const double dd = prev2 - 2.0 * prev1 + cur;
    r.max_second_difference = std::max(r.max_second_difference, dd);
    if (dd > tol && r.concave) {
      r.concave = false;
      r.first_violation = at(i - 1);
    }
    prev2 = prev1;
    prev1 = cur;
  }
  return r;
}

}  // namespace reinsopt
