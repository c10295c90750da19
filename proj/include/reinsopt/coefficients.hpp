// Bounded parametric coefficient families c(t, y).
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>

namespace reinsopt {

struct ConstantCoef {
  double value = 0.0;
};

// clamp(c0 + c1 * y, lo, hi)
struct AffineCoef {
  double c0 = 0.0;
  double c1 = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// lo + (hi - lo) / (1 + exp(-slope * (y - center)))
struct SigmoidCoef {
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;
  double slope = 1.0;
};

class Coefficient {
 public:
  Coefficient(double c = 0.0) : v_(ConstantCoef{c}) {}
  Coefficient(ConstantCoef c) : v_(c) {}
  Coefficient(AffineCoef c) : v_(c) {
    if (!(c.lo <= c.hi)) throw std::invalid_argument("affine coefficient needs lo <= hi");
  }
  Coefficient(SigmoidCoef c) : v_(c) {
    if (!(c.lo <= c.hi)) throw std::invalid_argument("sigmoid coefficient needs lo <= hi");
  }

  double operator()(double /*t*/, double y) const {
    struct Eval {
      double y;
      double operator()(const ConstantCoef& c) const { return c.value; }
      double operator()(const AffineCoef& c) const { return std::clamp(c.c0 + c.c1 * y, c.lo, c.hi); }
      double operator()(const SigmoidCoef& c) const {
        return c.lo + (c.hi - c.lo) / (1.0 + std::exp(-c.slope * (y - c.center)));
      }
    };
    return std::visit(Eval{y}, v_);
  }

  bool is_constant() const { return std::holds_alternative<ConstantCoef>(v_); }
  double constant() const { return std::get<ConstantCoef>(v_).value; }

  // Range of values over all y.
  double lower() const {
    if (auto* c = std::get_if<ConstantCoef>(&v_)) return c->value;
    if (auto* c = std::get_if<AffineCoef>(&v_)) return c->c1 == 0.0 ? std::clamp(c->c0, c->lo, c->hi) : c->lo;
    return std::get<SigmoidCoef>(v_).lo;
  }
  double upper() const {
    if (auto* c = std::get_if<ConstantCoef>(&v_)) return c->value;
    if (auto* c = std::get_if<AffineCoef>(&v_)) return c->c1 == 0.0 ? std::clamp(c->c0, c->lo, c->hi) : c->hi;
    return std::get<SigmoidCoef>(v_).hi;
  }

  template <class T>
  const T* get_if() const { return std::get_if<T>(&v_); }

 private:
  std::variant<ConstantCoef, AffineCoef, SigmoidCoef> v_;
};

}  // namespace reinsopt
