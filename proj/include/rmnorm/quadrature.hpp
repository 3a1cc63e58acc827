#pragma once

#include <cmath>
#include <stdexcept>

namespace rmnorm {

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double fa, double b, double fb, double m, double fm, double whole,
                    double tol, int depth, int min_depth, int max_depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth >= max_depth || (depth >= min_depth && std::abs(delta) <= 15.0 * tol))
    return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1, min_depth, max_depth) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1, min_depth, max_depth);
}

} // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance abs_tol.
/// Every branch is split at least `min_depth` times so that narrow features
/// between the first five nodes are not missed.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double abs_tol, int min_depth = 5, int max_depth = 50) {
  if (!(abs_tol > 0.0))
    throw std::invalid_argument("adaptive_simpson: tolerance must be positive");
  if (a == b)
    return 0.0;
  if (b < a)
    return -adaptive_simpson(f, b, a, abs_tol, min_depth, max_depth);
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, abs_tol, 0, min_depth, max_depth);
}

} // namespace rmnorm
