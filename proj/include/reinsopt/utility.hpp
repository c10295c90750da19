// SAHARA and exponential utility families.
//
// A SAHARA utility is fixed by its absolute risk aversion
//   A(x) = a / sqrt(b^2 + (x - d)^2)
// up to a positive affine map. We normalize U'(d) = 1 and U(d) = 0, which gives
//   U'(x) = ((x - d + sqrt(b^2 + (x - d)^2)) / b)^(-a)
// and U(x) = int_d^x U'(s) ds, evaluated by adaptive quadrature against a
// precomputed table of panel integrals.
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace reinsopt {

struct SaharaParams {
  double a = 1.0;  // risk aversion
  double b = 1.0;  // scale
  double d = 0.0;  // threshold wealth
};

struct ExponentialParams {
  double beta = 1.0;
};

namespace detail {

inline double integrate_gk(auto&& f, double lo, double hi) {
  if (lo == hi) return 0.0;
  using gk = boost::math::quadrature::gauss_kronrod<double, 21>;
  double err = 0.0;
  // One panel is enough for short smooth pieces; adaptive refinement on those
  // stalls at the roundoff floor and recurses to full depth.
  const double one = gk::integrate(f, lo, hi, 0, 0.0, &err);
  if (err <= 1e-13 * std::abs(one) + 1e-15) return one;
  return gk::integrate(f, lo, hi, 15, 1e-13, &err);
}

}  // namespace detail

class SaharaUtility {
 public:
  explicit SaharaUtility(SaharaParams p) : p_(p) {
    if (!(p.a > 0.0) || !std::isfinite(p.a)) throw std::invalid_argument("utility.a must be > 0");
    if (!(p.b > 0.0) || !std::isfinite(p.b)) throw std::invalid_argument("utility.b must be > 0");
    if (!std::isfinite(p.d)) throw std::invalid_argument("utility.d must be finite");
  }

  const SaharaParams& params() const { return p_; }

  double ara(double x) const {
    const double s = x - p_.d;
    return p_.a / std::hypot(p_.b, s);
  }

  double marginal(double x) const {
    // (s + sqrt(b^2+s^2))/b = exp(asinh(s/b)); the asinh form avoids cancellation for s << 0.
    return std::exp(-p_.a * std::asinh((x - p_.d) / p_.b));
  }

  double value(double x) const {
    const Table& t = table();
    const double k = std::floor((x - p_.d) / t.step);
    const auto f = [this](double s) { return marginal(s); };
    if (k >= -double(t.half) && k < double(t.half)) {
      const auto idx = static_cast<std::size_t>(k + double(t.half));
      const double left = p_.d + k * t.step;
      return t.cumulative[idx] + detail::integrate_gk(f, left, x);
    }
    const std::size_t edge = k < 0 ? 0 : t.cumulative.size() - 1;
    const double edge_x = p_.d + (double(edge) - double(t.half)) * t.step;
    return t.cumulative[edge] + detail::integrate_gk(f, edge_x, x);
  }

 private:
  // cumulative[i] = U(d + (i - half) * step)
  struct Table {
    double step = 1.0;
    std::size_t half = 0;
    std::vector<double> cumulative;
  };
  // Built on first use of value(); strategies only need ara().
  struct Cache {
    std::once_flag once;
    Table table;
  };

  const Table& table() const {
    std::call_once(cache_->once, [this] { build_table(p_, &cache_->table); });
    return cache_->table;
  }

  static void build_table(const SaharaParams& p, Table* t) {
    t->step = std::clamp(p.b, 0.05, 1.0);
    t->half = 256;
    t->cumulative.assign(2 * t->half + 1, 0.0);
    const auto f = [&p](double x) { return std::exp(-p.a * std::asinh((x - p.d) / p.b)); };
    for (std::size_t i = t->half; i < 2 * t->half; ++i) {
      const double lo = p.d + (double(i) - double(t->half)) * t->step;
      t->cumulative[i + 1] = t->cumulative[i] + detail::integrate_gk(f, lo, lo + t->step);
    }
    for (std::size_t i = t->half; i > 0; --i) {
      const double hi = p.d + (double(i) - double(t->half)) * t->step;
      t->cumulative[i - 1] = t->cumulative[i] - detail::integrate_gk(f, hi - t->step, hi);
    }
  }

  SaharaParams p_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

class ExponentialUtility {
 public:
  explicit ExponentialUtility(ExponentialParams p) : p_(p) {
    if (!(p.beta > 0.0) || !std::isfinite(p.beta)) throw std::invalid_argument("utility.beta must be > 0");
  }
  const ExponentialParams& params() const { return p_; }
  double ara(double) const { return p_.beta; }
  double marginal(double x) const { return p_.beta * std::exp(-p_.beta * x); }
  double value(double x) const { return -std::exp(-p_.beta * x); }

 private:
  ExponentialParams p_;
};

/// Utility model shared by strategies and Monte Carlo evaluation. Copies share
/// the immutable quadrature table, so a model can be read from many threads.
class UtilityModel {
 public:
  UtilityModel(SaharaParams p) : v_(SaharaUtility(p)) {}
  UtilityModel(ExponentialParams p) : v_(ExponentialUtility(p)) {}

  bool is_sahara() const { return std::holds_alternative<SaharaUtility>(v_); }
  bool is_exponential() const { return std::holds_alternative<ExponentialUtility>(v_); }
  const SaharaParams& sahara() const { return std::get<SaharaUtility>(v_).params(); }
  const ExponentialParams& exponential() const { return std::get<ExponentialUtility>(v_).params(); }

  double ara(double x) const {
    return std::visit([x](const auto& u) { return u.ara(x); }, v_);
  }
  double marginal(double x) const {
    return std::visit([x](const auto& u) { return u.marginal(x); }, v_);
  }
  double value(double x) const {
    return std::visit([x](const auto& u) { return u.value(x); }, v_);
  }

 private:
  std::variant<SaharaUtility, ExponentialUtility> v_;
};

inline double ara(const UtilityModel& m, double x) { return m.ara(x); }
inline double marginal_utility(const UtilityModel& m, double x) { return m.marginal(x); }
inline double utility_value(const UtilityModel& m, double x) { return m.value(x); }

}  // namespace reinsopt
