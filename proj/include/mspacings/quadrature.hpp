#pragma once

#include <cmath>

namespace mspacings {

namespace detail {

template <typename F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth, int forced) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || (forced <= 0 && std::abs(diff) <= 15.0 * tol)) {
    return left + right + diff / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, forced - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, forced - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance tol.
template <typename F>
double adaptive_simpson(F f, double a, double b, double tol = 1e-12, int max_depth = 40) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // A few forced bisections guard against accidental early agreement.
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth, 4);
}

}  // namespace mspacings
