#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rmnorm/error.hpp"
#include "rmnorm/linalg.hpp"
#include "rmnorm/matrix.hpp"

namespace rmnorm {

/// sqrt(3 pi^3 / 4), the explicit tail-threshold constant (about 4.8223).
inline const double tail_threshold_constant = std::sqrt(3.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi / 4.0);

inline double max_row_norm(const CoeffMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    m = std::max(m, euclid_norm(a.row(i)));
  return m;
}

inline double max_col_norm(const CoeffMatrix& a) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    m = std::max(m, euclid_norm(a.column(j)));
  return m;
}

/// max_i ||row_i||_2 + max_j ||col_j||_2
inline double bound_trivial(const CoeffMatrix& a) { return max_row_norm(a) + max_col_norm(a); }

/// ||a||_2 ||b||_inf + ||a||_inf ||b||_2, for coefficients a_ij = a_i b_j.
inline double bound_chevet(std::span<const double> a, std::span<const double> b) {
  return euclid_norm(a) * max_abs(b) + max_abs(a) * euclid_norm(b);
}

/// Row/column maxima plus the entrywise l_4 norm.
inline double bound_latala(const CoeffMatrix& a) { return bound_trivial(a) + entry_p_norm(a, 4.0); }

/// ln(e ||A||_1 / ||A||_inf) with entrywise norms; always >= 1.
inline double log_factor(const CoeffMatrix& a) {
  const double linf = entry_p_norm(a, std::numeric_limits<double>::infinity());
  if (linf == 0.0)
    throw std::invalid_argument("log_factor: zero matrix");
  return 1.0 + std::log(entry_p_norm(a, 1.0) / linf);
}

/// log_factor^{3/2} times the row/column maxima (the deterministic variant).
inline double bound_log_three_halves(const CoeffMatrix& a) {
  if (a.is_zero())
    return 0.0;
  return std::pow(log_factor(a), 1.5) * bound_trivial(a);
}

/// (1 + sqrt(3 pi^3/4) ln(e n)) e_lower: an upper bound for E||G|| given an
/// estimate e_lower of E(max row + max col) of the Gaussian-weighted matrix.
inline double expectation_threshold(std::size_t n, double e_lower) {
  if (n == 0)
    throw std::invalid_argument("expectation_threshold: n must be at least 1");
  if (!(e_lower >= 0.0))
    throw std::invalid_argument("expectation_threshold: e_lower must be nonnegative");
  return (1.0 + tail_threshold_constant * (1.0 + std::log(static_cast<double>(n)))) * e_lower;
}

/// sqrt(3 pi^3/4) ln(e n) e_lower: ||G|| exceeds this with probability <= 1/n^2.
inline double tail_threshold(std::size_t n, double e_lower) {
  if (n == 0)
    throw std::invalid_argument("tail_threshold: n must be at least 1");
  if (!(e_lower >= 0.0))
    throw std::invalid_argument("tail_threshold: e_lower must be nonnegative");
  return tail_threshold_constant * (1.0 + std::log(static_cast<double>(n))) * e_lower;
}

// Entries of one dyadic level, all equal to 2^-k after normalization.
struct DyadicLevel {
  double value = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> positions;

  CoeffMatrix dense(std::size_t rows, std::size_t cols) const {
    CoeffMatrix m(rows, cols);
    for (auto [i, j] : positions)
      m.set(i, j, value);
    return m;
  }
};

struct DyadicDecomposition {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double norm_inf = 0.0;   // max |a_ij|
  double mass = 0.0;       // ||a||_1 / ||a||_inf  (= 2^gamma)
  double gamma = 0.0;      // log2(mass)
  std::size_t k_max = 0;
  std::map<int, DyadicLevel> levels;
  // Entries with |a_ij| / ||a||_inf <= 2^-k_max.
  std::vector<std::pair<std::size_t, std::size_t>> remainder;
  double remainder_mass = 0.0;

  std::size_t phi(int k) const {
    auto it = levels.find(k);
    return it == levels.end() ? 0 : it->second.positions.size();
  }
};

/// The level index k with 2^-k < r <= 2^-(k-1), for r in (0, 1].
inline int dyadic_level_of(double r) {
  int e = 0;
  const double f = std::frexp(r, &e); // r = f 2^e, f in [1/2, 1)
  return f == 0.5 ? 2 - e : 1 - e;
}

/// Bins |a_ij| / ||a||_inf into half-open dyadic shells (2^-k, 2^-(k-1)],
/// k = 1..k_max; everything smaller goes to the remainder.
inline DyadicDecomposition dyadic_decompose(const CoeffMatrix& a, std::size_t k_max = 64) {
  if (k_max < 1)
    throw std::invalid_argument("dyadic_decompose: k_max must be at least 1");
  const double linf = entry_p_norm(a, std::numeric_limits<double>::infinity());
  if (linf == 0.0)
    throw std::invalid_argument("dyadic_decompose: zero matrix");

  DyadicDecomposition d;
  d.rows = a.rows();
  d.cols = a.cols();
  d.norm_inf = linf;
  d.k_max = k_max;
  double mass = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double v = std::abs(a(i, j));
      if (v == 0.0)
        continue;
      const double r = v / linf;
      mass += r;
      const int k = dyadic_level_of(r);
      if (k > static_cast<int>(k_max)) {
        d.remainder.emplace_back(i, j);
        d.remainder_mass += r;
        continue;
      }
      auto& level = d.levels[k];
      level.value = std::ldexp(1.0, -k);
      level.positions.emplace_back(i, j);
    }
  }
  d.mass = mass;
  d.gamma = std::log2(mass);
  return d;
}

} // namespace rmnorm
