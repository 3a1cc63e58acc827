#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmnorm/error.hpp"
#include "rmnorm/matrix.hpp"

namespace rmnorm {

// A point of the net S_T: `level` coordinates equal to sign/sqrt(level),
// every other coordinate zero.
struct NetVector {
  std::vector<std::size_t> support; // increasing
  std::vector<int> signs;           // +1 or -1, parallel to support
  std::size_t level = 0;

  RealVector dense(std::size_t n) const {
    RealVector x(n, 0.0);
    const double v = 1.0 / std::sqrt(static_cast<double>(level));
    for (std::size_t k = 0; k < support.size(); ++k)
      x[support[k]] = signs[k] * v;
    return x;
  }
};

struct RowColNorms {
  RealVector rows;
  RealVector cols;
};

inline double euclid_norm(std::span<const double> x) {
  // scaled accumulation keeps huge/tiny entries from over/underflowing
  double scale = 0.0;
  for (double v : x)
    scale = std::max(scale, std::abs(v));
  if (scale == 0.0)
    return 0.0;
  double sum = 0.0;
  for (double v : x) {
    const double r = v / scale;
    sum += r * r;
  }
  return scale * std::sqrt(sum);
}

inline double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x)
    m = std::max(m, std::abs(v));
  return m;
}

/// |x| sorted nonincreasing.
inline RealVector decreasing_rearrangement(std::span<const double> x) {
  RealVector r(x.size());
  std::transform(x.begin(), x.end(), r.begin(), [](double v) { return std::abs(v); });
  std::stable_sort(r.begin(), r.end(), std::greater<>{});
  return r;
}

/// The norm whose unit ball is the convex hull of S_T:
/// sum_k x*_k (sqrt(k) - sqrt(k-1)) over the decreasing rearrangement x*.
inline double t_norm(std::span<const double> x) {
  const RealVector r = decreasing_rearrangement(x);
  double sum = 0.0;
  for (std::size_t k = 1; k <= r.size(); ++k) {
    const double weight = 1.0 / (std::sqrt(static_cast<double>(k)) + std::sqrt(static_cast<double>(k - 1)));
    sum += r[k - 1] * weight;
  }
  return sum;
}

inline constexpr std::size_t max_net_dimension = 12;

/// Every vector with exactly l coordinates equal to +-1/sqrt(l), l = 1..n.
/// The set has 3^n - 1 elements, so n is capped at max_net_dimension.
inline std::vector<NetVector> enumerate_st_net(std::size_t n) {
  if (n == 0)
    throw std::invalid_argument("enumerate_st_net: n must be at least 1");
  if (n > max_net_dimension)
    throw SizeGuardError("enumerate_st_net: n = " + std::to_string(n) + " exceeds the limit of " +
                         std::to_string(max_net_dimension) + " (net has 3^n - 1 points)");

  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k)
    total *= 3;
  std::vector<NetVector> net;
  net.reserve(total - 1);

  const std::uint32_t subsets = std::uint32_t{1} << n;
  for (std::size_t level = 1; level <= n; ++level) {
    for (std::uint32_t mask = 1; mask < subsets; ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != level)
        continue;
      std::vector<std::size_t> support;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (std::uint32_t{1} << i))
          support.push_back(i);
      for (std::uint32_t signmask = 0; signmask < (std::uint32_t{1} << level); ++signmask) {
        NetVector v;
        v.support = support;
        v.level = level;
        v.signs.resize(level);
        for (std::size_t k = 0; k < level; ++k)
          v.signs[k] = (signmask & (std::uint32_t{1} << k)) ? -1 : 1;
        net.push_back(std::move(v));
      }
    }
  }
  return net;
}

namespace detail {

// y = A x, dense or compressed depending on fill.
class MatVec {
public:
  explicit MatVec(const CoeffMatrix& a) : a_(a), rows_(a.rows()), cols_(a.cols()) {
    sparse_ = a.nonzeros() * 4 <= a.size();
    if (sparse_) {
      row_start_.reserve(rows_ + 1);
      row_start_.push_back(0);
      for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
          const double v = a(i, j);
          if (v != 0.0) {
            col_index_.push_back(j);
            values_.push_back(v);
          }
        }
        row_start_.push_back(values_.size());
      }
    }
  }

  void apply(std::span<const double> x, std::span<double> y) const {
    if (sparse_) {
      for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k)
          s += values_[k] * x[col_index_[k]];
        y[i] = s;
      }
      return;
    }
    const auto e = a_.entries();
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = e.data() + i * cols_;
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j)
        s += row[j] * x[j];
      y[i] = s;
    }
  }

  void apply_transposed(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    if (sparse_) {
      for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k)
          y[col_index_[k]] += values_[k] * x[i];
      return;
    }
    const auto e = a_.entries();
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = e.data() + i * cols_;
      const double xi = x[i];
      for (std::size_t j = 0; j < cols_; ++j)
        y[j] += row[j] * xi;
    }
  }

private:
  const CoeffMatrix& a_;
  std::size_t rows_;
  std::size_t cols_;
  bool sparse_ = false;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> col_index_;
  RealVector values_;
};

} // namespace detail

inline constexpr double default_singular_rel_tol = 1e-9;
inline constexpr std::size_t singular_iteration_cap = 100000;

namespace detail {

// max(max row norm, max column norm), a lower bound on sigma_max.
inline double row_col_floor(const CoeffMatrix& a) {
  RealVector col_sq(a.cols(), 0.0);
  double row_sq = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      r += v * v;
      col_sq[j] += v * v;
    }
    row_sq = std::max(row_sq, r);
  }
  return std::sqrt(std::max(row_sq, *std::max_element(col_sq.begin(), col_sq.end())));
}

// Power iteration; also returns as soon as an iterate exceeds stop_above.
// The result is at least row_col_floor, which matters when the top of the
// spectrum is nearly degenerate and the iterates creep up slowly.
inline double power_iteration(const CoeffMatrix& a, double rel_tol, double stop_above) {
  const double lower = row_col_floor(a);
  if (lower > stop_above)
    return lower;
  const detail::MatVec op(a);
  const std::size_t n = a.cols();
  constexpr double golden = 0.6180339887498948482;

  RealVector v(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = static_cast<double>(j + 1) * golden;
    v[j] = 1.0 + (w - std::floor(w));
  }
  RealVector av(a.rows());
  RealVector atav(n);

  auto normalize = [](RealVector& x) {
    const double nrm = euclid_norm(x);
    for (auto& xi : x)
      xi /= nrm;
    return nrm;
  };

  normalize(v);
  op.apply(v, av);
  double sigma = euclid_norm(av);
  if (sigma > stop_above)
    return std::max(sigma, lower);
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(a.rows() + a.cols());

  for (std::size_t it = 0; it < singular_iteration_cap; ++it) {
    op.apply_transposed(av, atav);
    if (euclid_norm(atav) == 0.0)
      return std::max(sigma, lower);
    v.swap(atav);
    normalize(v);
    op.apply(v, av);
    const double next = euclid_norm(av);
    // exact iterates never decrease; a drop means rounding noise dominates
    if (next <= sigma)
      return std::max(sigma, lower);
    const double step = next - sigma;
    sigma = next;
    if (step <= std::max(rel_tol, floor) * sigma || sigma > stop_above)
      return std::max(sigma, lower);
  }
  throw ConvergenceError("largest_singular_value: no convergence within " + std::to_string(singular_iteration_cap) +
                             " iterations",
                         sigma);
}

} // namespace detail

/// sigma_max(A) by power iteration on A^T A.
///
/// The start vector is all-ones plus a golden-ratio Weyl jitter in [0, 1), so
/// it is deterministic and never exactly orthogonal to a top singular space
/// that has some sign symmetry (e.g. [[2,-2,0],[0,0,1]]). The iterates
/// sqrt(v^T A^T A v) increase monotonically; iteration stops when the last
/// increment is at most rel_tol * sigma, or when it reaches rounding level.
/// The result is never below the largest row or column norm.
inline double largest_singular_value(const CoeffMatrix& a, double rel_tol = default_singular_rel_tol) {
  if (!(rel_tol > 0.0))
    throw std::invalid_argument("largest_singular_value: rel_tol must be positive");
  if (a.is_zero())
    return 0.0;
  return detail::power_iteration(a, rel_tol, std::numeric_limits<double>::infinity());
}

/// Whether sigma_max(A) > threshold. Decided without iterating when the
/// Frobenius norm or sqrt(max col sum * max row sum) is already at most the
/// threshold; otherwise iterates until an iterate (a lower bound) crosses it.
inline bool operator_norm_exceeds(const CoeffMatrix& a, double threshold,
                                  double rel_tol = default_singular_rel_tol) {
  if (!(rel_tol > 0.0))
    throw std::invalid_argument("operator_norm_exceeds: rel_tol must be positive");
  if (a.is_zero())
    return 0.0 > threshold;
  RealVector col_sum(a.cols(), 0.0);
  double row_max = 0.0;
  double frob_sq = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      r += std::abs(v);
      col_sum[j] += std::abs(v);
      frob_sq += v * v;
    }
    row_max = std::max(row_max, r);
  }
  const double col_max = *std::max_element(col_sum.begin(), col_sum.end());
  // both upper bounds carry a small allowance for rounding
  const double upper = std::min(std::sqrt(frob_sq), std::sqrt(col_max * row_max)) * (1.0 + 1e-12);
  if (upper <= threshold)
    return false;
  return detail::power_iteration(a, rel_tol, threshold) > threshold;
}

/// ||A x||_2 for a dense x.
inline double apply_norm(const CoeffMatrix& a, std::span<const double> x) {
  RealVector y(a.rows());
  detail::MatVec(a).apply(x, y);
  return euclid_norm(y);
}

inline RowColNorms row_col_euclid_norms(const CoeffMatrix& a) {
  RowColNorms out{RealVector(a.rows()), RealVector(a.cols())};
  for (std::size_t i = 0; i < a.rows(); ++i)
    out.rows[i] = euclid_norm(a.row(i));
  for (std::size_t j = 0; j < a.cols(); ++j)
    out.cols[j] = euclid_norm(a.column(j));
  return out;
}

/// l_p norm of the flattened entry magnitudes; p = infinity gives max |a_ij|.
inline double entry_p_norm(const CoeffMatrix& a, double p) {
  if (!(p >= 1.0))
    throw std::invalid_argument("entry_p_norm: p must be >= 1 or infinity");
  const auto e = a.entries();
  const double m = max_abs(e);
  if (std::isinf(p) || m == 0.0)
    return m;
  if (p == 1.0) {
    double s = 0.0;
    for (double v : e)
      s += std::abs(v);
    return s;
  }
  if (p == 2.0)
    return euclid_norm(e);
  double s = 0.0;
  for (double v : e)
    s += std::pow(std::abs(v) / m, p);
  return m * std::pow(s, 1.0 / p);
}

} // namespace rmnorm
