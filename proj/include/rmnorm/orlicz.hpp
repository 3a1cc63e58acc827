#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmnorm/error.hpp"
#include "rmnorm/linalg.hpp"
#include "rmnorm/matrix.hpp"
#include "rmnorm/quadrature.hpp"

namespace rmnorm {

// Nondecreasing s -> M(s) on [0, inf) with M(0) = 0. Evaluators capture
// their data by value and are safe to call from several threads.
struct OrliczFn {
  std::function<double(double)> evaluator;
  std::string label;
  std::optional<double> breakpoint;

  double operator()(double s) const { return evaluator(s); }
};

using MusielakFamily = std::vector<OrliczFn>;

// Survival function u -> P(|X| >= u) of a nonnegative random variable.
//
// `support_max`, when set, is a point beyond which the survival function is
// zero. `tail_integral`, when set, evaluates v -> int_v^inf P(|X| >= u) du
// exactly (step tails from samples provide it).
struct TailFn {
  std::function<double(double)> survival;
  bool integrable = true;
  std::optional<double> support_max;
  std::function<double(double)> tail_integral;

  double operator()(double u) const { return survival(u); }
};

inline constexpr double default_orlicz_rel_tol = 1e-10;
inline constexpr double default_quad_tol = 1e-8;
inline constexpr int gauge_iteration_cap = 200;

namespace detail {

// inf{t > 0 : sum(t) <= 1} for a nonincreasing `sum`, by bracketing around
// t0 and bisection. Returns the feasible end of the final bracket.
template <class Sum>
double solve_gauge(const Sum& sum, double t0, double rel_tol) {
  constexpr double huge = 1e300;
  constexpr double tiny = 1e-300;
  double lo;
  double hi;
  if (sum(t0) > 1.0) {
    lo = t0;
    hi = 2.0 * t0;
    while (sum(hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > huge)
        throw UnboundedNormError("Orlicz gauge sum stays above 1 for every t up to 1e300");
    }
  } else {
    hi = t0;
    lo = 0.5 * t0;
    while (sum(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < tiny)
        return 0.0;
    }
  }
  for (int it = 0; it < gauge_iteration_cap && (hi - lo) > rel_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sum(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline double gauge_start(std::span<const double> x) {
  double total = 0.0;
  for (double v : x)
    total += std::abs(v);
  return max_abs(x) + total / static_cast<double>(x.size());
}

inline void check_tol(double tol, const char* who) {
  if (!(tol > 0.0))
    throw std::invalid_argument(std::string(who) + ": tolerance must be positive");
}

} // namespace detail

/// inf{t > 0 : sum_i M(|x_i| / t) <= 1}.
inline double orlicz_norm(const OrliczFn& m, std::span<const double> x, double rel_tol = default_orlicz_rel_tol) {
  detail::check_tol(rel_tol, "orlicz_norm");
  if (max_abs(x) == 0.0)
    return 0.0;
  auto sum = [&](double t) {
    double s = 0.0;
    for (double v : x)
      if (v != 0.0)
        s += m(std::abs(v) / t);
    return s;
  };
  return detail::solve_gauge(sum, detail::gauge_start(x), rel_tol);
}

/// inf{t > 0 : sum_i M_i(|x_i| / t) <= 1}.
inline double musielak_norm(const MusielakFamily& family, std::span<const double> x,
                            double rel_tol = default_orlicz_rel_tol) {
  detail::check_tol(rel_tol, "musielak_norm");
  if (family.size() != x.size())
    throw std::invalid_argument("musielak_norm: " + std::to_string(family.size()) + " functions for a vector of length " +
                                std::to_string(x.size()));
  if (family.empty())
    throw std::invalid_argument("musielak_norm: empty family");
  if (max_abs(x) == 0.0)
    return 0.0;
  auto sum = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] != 0.0)
        s += family[i](std::abs(x[i]) / t);
    return s;
  };
  return detail::solve_gauge(sum, detail::gauge_start(x), rel_tol);
}

inline OrliczFn make_zero_fn() {
  return {[](double) { return 0.0; }, "zero", std::nullopt};
}

/// s -> s^p.
inline OrliczFn make_power_fn(double p) {
  if (!(p >= 1.0) || std::isinf(p))
    throw std::invalid_argument("make_power_fn: p must be a finite value >= 1");
  if (p == 1.0)
    return {[](double s) { return s; }, "power:1", std::nullopt};
  if (p == 2.0)
    return {[](double s) { return s * s; }, "power:2", std::nullopt};
  return {[p](double s) { return std::pow(s, p); }, "power:" + std::to_string(p), std::nullopt};
}

/// M(s) = sqrt(2/pi) int_0^s exp(-1/(2t^2)) dt, the Orlicz function whose norm
/// of the diagonal gives the order of E||diag(d_i g_i)||. Evaluated by adaptive
/// Simpson to absolute error quad_tol.
inline OrliczFn make_diag_gauss_fn(double quad_tol = default_quad_tol) {
  detail::check_tol(quad_tol, "make_diag_gauss_fn");
  const double scale = std::sqrt(2.0 / std::numbers::pi);
  auto eval = [scale, quad_tol](double s) {
    if (s <= 0.0)
      return 0.0;
    auto integrand = [](double t) { return t <= 0.0 ? 0.0 : std::exp(-0.5 / (t * t)); };
    return scale * adaptive_simpson(integrand, 0.0, s, quad_tol / scale);
  };
  return {eval, "diag-gauss", std::nullopt};
}

namespace detail {

// Shared by the row and column builders: with m = max |v_k| and r = ||v||_2,
//   s < 1/r : s m exp(-1/(s^2 m^2))
//   s >= 1/r: (m/r) exp(-r^2/m^2) + (3/e) r (s - 1/r)
inline OrliczFn make_profile_fn(std::span<const double> v, std::string label) {
  const double m = max_abs(v);
  if (m == 0.0) {
    auto z = make_zero_fn();
    z.label = std::move(label) + "(zero)";
    return z;
  }
  const double r = euclid_norm(v);
  const double knee = 1.0 / r;
  const double at_knee = (m / r) * std::exp(-(r * r) / (m * m));
  const double slope = 3.0 / std::numbers::e * r;
  auto eval = [m, knee, at_knee, slope](double s) {
    if (s <= 0.0)
      return 0.0;
    if (s < knee) {
      const double sm = s * m;
      return sm * std::exp(-1.0 / (sm * sm));
    }
    return at_knee + slope * (s - knee);
  };
  return {eval, std::move(label), knee};
}

} // namespace detail

/// Orlicz function built from one row of the coefficient matrix. Its
/// Musielak-Orlicz norm over all rows tracks E max_i ||(a_ij g_ij)_j||_2.
inline OrliczFn make_row_profile_fn(std::span<const double> row) { return detail::make_profile_fn(row, "row"); }

/// Column counterpart of make_row_profile_fn (same formula on column data).
inline OrliczFn make_column_profile_fn(std::span<const double> col) {
  return detail::make_profile_fn(col, "column");
}

/// M(s) = int_0^s ( (1/t) P(|X| >= 1/t) + int_{1/t}^inf P(|X| >= u) du ) dt.
///
/// Both integrals are done by adaptive Simpson. The inner one is truncated
/// at the support bound, or else where the tail drops below
/// quad_tol / (10 max(1, s)). When the tail carries an exact tail integral
/// I(v), the outer integral collapses to s * I(1/s) (its antiderivative).
inline double m_from_tail(const TailFn& tail, double s, double quad_tol = default_quad_tol) {
  detail::check_tol(quad_tol, "m_from_tail");
  if (!tail.integrable)
    throw DivergentIntegralError("m_from_tail: tail is not integrable (infinite first moment)");
  if (s <= 0.0)
    return 0.0;

  if (tail.tail_integral)
    return s * tail.tail_integral(1.0 / s);

  const double range = std::max(1.0, s);
  double upper;
  if (tail.support_max) {
    upper = *tail.support_max;
  } else {
    const double cutoff = quad_tol / (10.0 * range);
    upper = 1.0;
    while (tail(upper) > cutoff) {
      upper *= 2.0;
      if (upper > 1e12)
        throw DivergentIntegralError("m_from_tail: tail does not decay below " + std::to_string(cutoff) +
                                     " before u = 1e12");
    }
  }

  const double inner_tol = quad_tol / (4.0 * range);
  auto inner = [&](double v) {
    if (v >= upper)
      return 0.0;
    return adaptive_simpson(tail.survival, v, upper, inner_tol);
  };
  auto outer = [&](double t) {
    if (t <= 0.0)
      return 0.0;
    const double v = 1.0 / t;
    return v * tail(v) + inner(v);
  };
  return adaptive_simpson(outer, 0.0, s, 0.5 * quad_tol);
}

/// OrliczFn view of m_from_tail.
inline OrliczFn make_tail_fn(TailFn tail, double quad_tol = default_quad_tol, std::string label = "tail") {
  detail::check_tol(quad_tol, "make_tail_fn");
  if (!tail.integrable)
    throw DivergentIntegralError("make_tail_fn: tail is not integrable (infinite first moment)");
  return {[tail = std::move(tail), quad_tol](double s) { return m_from_tail(tail, s, quad_tol); }, std::move(label),
          std::nullopt};
}

struct TailSandwich {
  double lower;
  double upper; // +infinity at x = 0
};

/// sqrt(2/pi) int_x^inf exp(-s^2/2) ds = P(|g| >= x).
inline double gaussian_tail_mass(double x) { return std::erfc(x / std::numbers::sqrt2); }

/// Closed-form bounds around gaussian_tail_mass(x):
///   sqrt(2 pi) / ((pi - 1) x + sqrt(x^2 + 2 pi)) e^{-x^2/2}  <=  mass  <=  sqrt(2/pi) e^{-x^2/2} / x
inline TailSandwich gaussian_tail_bounds(double x) {
  if (!(x >= 0.0))
    throw std::invalid_argument("gaussian_tail_bounds: x must be nonnegative");
  constexpr double pi = std::numbers::pi;
  const double damp = std::exp(-0.5 * x * x);
  const double lower = std::sqrt(2.0 * pi) / ((pi - 1.0) * x + std::sqrt(x * x + 2.0 * pi)) * damp;
  const double upper = x == 0.0 ? std::numeric_limits<double>::infinity() : std::sqrt(2.0 / pi) / x * damp;
  return {lower, upper};
}

struct EquivalenceBand {
  double c1; // largest c with M(c s) <= N(s) on the grid
  double c2; // smallest c with N(s) <= M(c s) on the grid
};

/// Measures the constants of M(c1 s) <= N(s) <= M(c2 s) on a grid by solving
/// M(c s) = N(s) for c at every grid point.
inline EquivalenceBand equivalence_probe(const OrliczFn& m, const OrliczFn& n, std::span<const double> grid) {
  if (grid.empty())
    throw std::invalid_argument("equivalence_probe: empty grid");
  double c1 = std::numeric_limits<double>::infinity();
  double c2 = 0.0;
  for (double s : grid) {
    if (!(s > 0.0))
      throw std::invalid_argument("equivalence_probe: grid points must be positive");
    const double target = n(s);
    if (!(target > 0.0) || !std::isfinite(target))
      throw RootFindError("equivalence_probe: N(s) is not a positive finite value at s = " + std::to_string(s), s);
    auto f = [&](double c) { return m(c * s) - target; };
    double lo = 1.0;
    double hi = 1.0;
    if (f(1.0) < 0.0) {
      while (f(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12)
          throw RootFindError("equivalence_probe: M(c s) never reaches N(s) at s = " + std::to_string(s), s);
      }
    } else {
      while (f(lo) >= 0.0) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-12)
          throw RootFindError("equivalence_probe: M(c s) never drops below N(s) at s = " + std::to_string(s), s);
      }
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (f(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double c = 0.5 * (lo + hi);
    c1 = std::min(c1, c);
    c2 = std::max(c2, c);
  }
  return {c1, c2};
}

inline MusielakFamily row_profile_family(const CoeffMatrix& a) {
  MusielakFamily f;
  f.reserve(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    f.push_back(make_row_profile_fn(a.row(i)));
  return f;
}

inline MusielakFamily column_profile_family(const CoeffMatrix& a) {
  MusielakFamily f;
  f.reserve(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const RealVector c = a.column(j);
    f.push_back(make_column_profile_fn(c));
  }
  return f;
}

/// ||(1,...,1)|| in the row-profile Musielak-Orlicz norm plus the same in the
/// column-profile norm. Equivalent, up to absolute constants, to
/// E(max_i ||(a_ij g_ij)_j||_2 + max_j ||(a_ij g_ij)_i||_2).
inline double lower_expression_surrogate(const CoeffMatrix& a, double rel_tol = default_orlicz_rel_tol) {
  if (a.is_zero())
    return 0.0;
  const RealVector row_ones(a.rows(), 1.0);
  const RealVector col_ones(a.cols(), 1.0);
  return musielak_norm(row_profile_family(a), row_ones, rel_tol) +
         musielak_norm(column_profile_family(a), col_ones, rel_tol);
}

struct OrliczFnCheck {
  bool zero_at_origin = false;
  bool nondecreasing = false;
  bool convex = false;
  bool continuous_at_breakpoint = true;
};

/// Samples the OrliczFn invariants on a sorted grid of nonnegative points.
inline OrliczFnCheck check_orlicz_fn(const OrliczFn& m, std::span<const double> grid, double slack = 1e-12) {
  OrliczFnCheck out;
  out.zero_at_origin = m(0.0) == 0.0;
  std::vector<double> vals(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    vals[k] = m(grid[k]);
  out.nondecreasing = true;
  for (std::size_t k = 1; k < vals.size(); ++k)
    if (vals[k] < vals[k - 1] - slack * std::max(1.0, std::abs(vals[k - 1])))
      out.nondecreasing = false;
  out.convex = true;
  for (std::size_t k = 1; k + 1 < vals.size(); ++k) {
    const double h0 = grid[k] - grid[k - 1];
    const double h1 = grid[k + 1] - grid[k];
    const double left = (vals[k] - vals[k - 1]) / h0;
    const double right = (vals[k + 1] - vals[k]) / h1;
    if (right < left - slack * std::max(1.0, std::abs(left)))
      out.convex = false;
  }
  if (m.breakpoint && *m.breakpoint > 0.0) {
    const double b = *m.breakpoint;
    const double left = m(std::nextafter(b, 0.0));
    const double at = m(b);
    out.continuous_at_breakpoint = std::abs(left - at) <= 1e-12 * std::max(1.0, std::abs(at));
  }
  return out;
}

} // namespace rmnorm
