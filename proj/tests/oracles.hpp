// Test-only oracles, kept independent of the library's numerical routes.
#pragma once

#include <cmath>
#include <functional>

namespace oracle {

namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                          double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50);
}

/// SAHARA U with U(d) = 0, U'(d) = 1, via the substitution x - d = b sinh(t).
inline double sahara_u_closed(double a, double b, double d, double x) {
  const double t = std::asinh((x - d) / b);
  const double second = -std::expm1(-(1.0 + a) * t) / (1.0 + a);
  const double first = a == 1.0 ? t : std::expm1((1.0 - a) * t) / (1.0 - a);
  return 0.5 * b * (first + second);
}

}  // namespace oracle
