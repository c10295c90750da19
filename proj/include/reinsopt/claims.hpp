// Claim size distributions for the excess-of-loss model.
//
// Everything the XL diffusion needs is the tail Fbar(z) = P(Z > z) and two
// truncated integrals:
//   int_tail(u)    = int_0^u Fbar(z) dz      -> E[Z] as u -> inf
//   int_2z_tail(u) = int_0^u 2 z Fbar(z) dz  -> E[Z^2] as u -> inf
// u = +inf is a legal argument. E[Z^2] may be +inf (Pareto with alpha <= 2).
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace reinsopt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct ExponentialClaims {
  double rate = 1.0;
};

struct ParetoClaims {
  double alpha = 2.0;  // shape, > 1
  double xm = 1.0;     // scale
};

/// Piecewise-linear tail through (z, Fbar) knots starting at (0, 1), with an
/// exponential continuation past the last knot so that Fbar stays positive.
class TabulatedClaims {
 public:
  TabulatedClaims(std::vector<std::pair<double, double>> points, double tail_rate = 0.0)
      : pts_(std::move(points)) {
    if (pts_.size() < 2) throw std::invalid_argument("claims.points needs at least two knots");
    if (pts_.front().first != 0.0 || pts_.front().second != 1.0)
      throw std::invalid_argument("claims.points must start at [0, 1]");
    for (std::size_t i = 1; i < pts_.size(); ++i) {
      if (!(pts_[i].first > pts_[i - 1].first))
        throw std::invalid_argument("claims.points must have strictly increasing z");
      if (pts_[i].second > pts_[i - 1].second)
        throw std::invalid_argument("claims.points must have non-increasing Fbar");
      if (!(pts_[i].second > 0.0)) throw std::invalid_argument("claims.points Fbar must stay > 0");
    }
    if (tail_rate > 0.0) {
      rate_ = tail_rate;
    } else {
      const auto& [z0, f0] = pts_[pts_.size() - 2];
      const auto& [z1, f1] = pts_.back();
      rate_ = std::log(f0 / f1) / (z1 - z0);
      if (!(rate_ > 0.0))
        throw std::invalid_argument("claims.tail_rate required when the last segment is flat");
    }
    cum1_.assign(pts_.size(), 0.0);
    cum2_.assign(pts_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
      const double w = pts_[i + 1].first - pts_[i].first;
      cum1_[i + 1] = cum1_[i] + seg1(i, w);
      cum2_[i + 1] = cum2_[i] + seg2(i, w);
    }
  }

  const std::vector<std::pair<double, double>>& points() const { return pts_; }
  double tail_rate() const { return rate_; }

  double tail(double z) const {
    const std::size_t i = segment(z);
    if (i + 1 == pts_.size()) return pts_.back().second * std::exp(-rate_ * (z - pts_.back().first));
    return pts_[i].second + slope(i) * (z - pts_[i].first);
  }

  double int_tail(double u) const {
    const std::size_t i = segment(u);
    const double w = u - pts_[i].first;
    if (i + 1 < pts_.size()) return cum1_[i] + seg1(i, w);
    const double fn = pts_.back().second;
    const double tail_part = std::isinf(u) ? fn / rate_ : -fn * std::expm1(-rate_ * w) / rate_;
    return cum1_.back() + tail_part;
  }

  double int_2z_tail(double u) const {
    const std::size_t i = segment(u);
    const double w = u - pts_[i].first;
    if (i + 1 < pts_.size()) return cum2_[i] + seg2(i, w);
    const double fn = pts_.back().second;
    const double zn = pts_.back().first;
    const double r = rate_;
    if (std::isinf(u)) return cum2_.back() + 2.0 * fn * (zn / r + 1.0 / (r * r));
    const double rw = r * w;
    const double first = -std::expm1(-rw) / r;
    const double second = (-std::expm1(-rw) - rw * std::exp(-rw)) / (r * r);
    return cum2_.back() + 2.0 * fn * (zn * first + second);
  }

 private:
  std::size_t segment(double z) const {
    std::size_t i = 0;
    while (i + 1 < pts_.size() && z >= pts_[i + 1].first) ++i;
    return i;
  }
  double slope(std::size_t i) const {
    return (pts_[i + 1].second - pts_[i].second) / (pts_[i + 1].first - pts_[i].first);
  }
  // Exact integrals of the linear piece on [z_i, z_i + w].
  double seg1(std::size_t i, double w) const {
    return w * pts_[i].second + 0.5 * slope(i) * w * w;
  }
  double seg2(std::size_t i, double w) const {
    const double zi = pts_[i].first, fi = pts_[i].second, s = slope(i);
    return 2.0 * (zi * fi * w + 0.5 * (zi * s + fi) * w * w + s * w * w * w / 3.0);
  }

  std::vector<std::pair<double, double>> pts_;
  std::vector<double> cum1_, cum2_;
  double rate_ = 0.0;
};

namespace detail {

// 1 - e^{-x}(1 + x) without cancellation near 0.
inline double one_minus_exp_poly1(double x) {
  if (x < 0.5) {
    double term = x * x / 2.0;  // x^k / k! at k = 2
    double sum = 0.0;
    for (int k = 2; k < 40; ++k) {
      const double add = (k % 2 == 0 ? 1.0 : -1.0) * (k - 1) * term;
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      term *= x / (k + 1);
    }
    return sum;
  }
  return -std::expm1(-x) - x * std::exp(-x);
}

}  // namespace detail

class ClaimDistribution {
 public:
  ClaimDistribution(ExponentialClaims e) : v_(e) {
    if (!(e.rate > 0.0) || !std::isfinite(e.rate)) throw std::invalid_argument("claims.lambda must be > 0");
  }
  ClaimDistribution(ParetoClaims p) : v_(p) {
    if (!(p.alpha > 1.0) || !std::isfinite(p.alpha))
      throw std::invalid_argument("claims.alpha must be > 1 (finite mean)");
    if (!(p.xm > 0.0) || !std::isfinite(p.xm)) throw std::invalid_argument("claims.xm must be > 0");
  }
  ClaimDistribution(TabulatedClaims t) : v_(std::move(t)) {}

  template <class T>
  const T* get_if() const { return std::get_if<T>(&v_); }

  double tail(double z) const {
    if (!(z >= 0.0)) throw std::domain_error("claim size must be >= 0");
    return std::visit(Tail{z}, v_);
  }

  double int_tail(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("retention must be >= 0");
    if (u == 0.0) return 0.0;
    return std::visit(IntTail{u}, v_);
  }

  double int_2z_tail(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("retention must be >= 0");
    if (u == 0.0) return 0.0;
    return std::visit(Int2zTail{u}, v_);
  }

  double mean() const { return int_tail(kInf); }
  double second_moment() const { return int_2z_tail(kInf); }

 private:
  struct Tail {
    double z;
    double operator()(const ExponentialClaims& e) const { return std::exp(-e.rate * z); }
    double operator()(const ParetoClaims& p) const { return z <= p.xm ? 1.0 : std::pow(p.xm / z, p.alpha); }
    double operator()(const TabulatedClaims& t) const { return t.tail(z); }
  };
  struct IntTail {
    double u;
    double operator()(const ExponentialClaims& e) const {
      return std::isinf(u) ? 1.0 / e.rate : -std::expm1(-e.rate * u) / e.rate;
    }
    double operator()(const ParetoClaims& p) const {
      if (u <= p.xm) return u;
      const double a = p.alpha, xm = p.xm;
      if (std::isinf(u)) return xm * a / (a - 1.0);
      // xm + int_xm^u (xm/z)^a dz
      return xm + xm * (1.0 - std::pow(xm / u, a - 1.0)) / (a - 1.0);
    }
    double operator()(const TabulatedClaims& t) const { return t.int_tail(u); }
  };
  struct Int2zTail {
    double u;
    double operator()(const ExponentialClaims& e) const {
      const double l = e.rate;
      if (std::isinf(u)) return 2.0 / (l * l);
      return 2.0 / (l * l) * detail::one_minus_exp_poly1(l * u);
    }
    double operator()(const ParetoClaims& p) const {
      const double a = p.alpha, xm = p.xm;
      if (u <= xm) return u * u;
      if (std::isinf(u)) return a > 2.0 ? xm * xm * a / (a - 2.0) : kInf;
      // xm^2 + 2 xm^a int_xm^u z^(1-a) dz
      if (a == 2.0) return xm * xm * (1.0 + 2.0 * std::log(u / xm));
      return xm * xm * (1.0 + 2.0 * (std::pow(u / xm, 2.0 - a) - 1.0) / (2.0 - a));
    }
    double operator()(const TabulatedClaims& t) const { return t.int_2z_tail(u); }
  };

  std::variant<ExponentialClaims, ParetoClaims, TabulatedClaims> v_;
};

inline double tail(const ClaimDistribution& d, double z) { return d.tail(z); }
inline double int_tail(const ClaimDistribution& d, double u) { return d.int_tail(u); }
inline double int_2z_tail(const ClaimDistribution& d, double u) { return d.int_2z_tail(u); }

}  // namespace reinsopt
