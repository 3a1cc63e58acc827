#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rmnorm/linalg.hpp"
#include "rmnorm/matrix.hpp"
#include "rmnorm/orlicz.hpp"
#include "rmnorm/rng.hpp"

namespace rmnorm {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double ci95 = 0.0; // 1.96 * std_error
};

/// Mean and standard error of `values`, reduced in index order.
inline McEstimate summarize(std::span<const double> values, std::uint64_t seed) {
  if (values.size() < 2)
    throw std::invalid_argument("summarize: need at least 2 samples");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values)
    sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values)
    ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (n - 1.0) / n);
  return {mean, se, values.size(), seed, 1.96 * se};
}

struct McOptions {
  std::size_t workers = 0; // 0: hardware concurrency
  double rel_tol = default_singular_rel_tol;
};

namespace detail {

inline std::size_t resolve_workers(std::size_t requested, std::size_t tasks) {
  std::size_t w = requested == 0 ? std::max<std::size_t>(1, std::thread::hardware_concurrency()) : requested;
  return std::max<std::size_t>(1, std::min(w, tasks));
}

// Runs body(index) for index in [0, count) on `workers` threads. Each index
// is written by exactly one worker, so results placed by index do not depend
// on the worker count.
template <class Body>
void parallel_for(std::size_t count, std::size_t workers, const Body& body) {
  workers = resolve_workers(workers, count);
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k)
      body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = w; k < count; k += workers)
            body(k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

inline void check_samples(std::size_t samples, std::size_t minimum, const char* who) {
  if (samples < minimum)
    throw std::invalid_argument(std::string(who) + ": need at least " + std::to_string(minimum) + " samples");
}

} // namespace detail

/// (a_ij X_ij) with X_ij drawn from the counter stream (seed, index, i, j).
inline CoeffMatrix sample_weighted_matrix(const CoeffMatrix& a, const EntryDistribution& dist, std::uint64_t seed,
                                          std::uint64_t index) {
  RealVector e(a.size());
  const std::size_t cols = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double c = a(i, j);
      e[i * cols + j] = c == 0.0 ? 0.0
                                 : c * dist.draw(seed, index, static_cast<std::uint32_t>(i),
                                                 static_cast<std::uint32_t>(j));
    }
  }
  return CoeffMatrix(a.rows(), a.cols(), std::move(e));
}

// Per-draw values from one pass over the sample stream.
struct NormDraws {
  std::vector<double> opnorm;
  std::vector<double> max_row;
  std::vector<double> max_col;
};

/// For each draw G: ||G||_{2->2}, max_i ||row_i(G)||_2 and max_j ||col_j(G)||_2.
inline NormDraws sample_norm_draws(const CoeffMatrix& a, const EntryDistribution& dist, std::size_t samples,
                                   std::uint64_t seed, const McOptions& opts = {}, bool with_opnorm = true) {
  NormDraws d{std::vector<double>(with_opnorm ? samples : 0), std::vector<double>(samples),
              std::vector<double>(samples)};
  detail::parallel_for(samples, opts.workers, [&](std::size_t k) {
    const CoeffMatrix g = sample_weighted_matrix(a, dist, seed, k);
    const RowColNorms rc = row_col_euclid_norms(g);
    d.max_row[k] = *std::max_element(rc.rows.begin(), rc.rows.end());
    d.max_col[k] = *std::max_element(rc.cols.begin(), rc.cols.end());
    if (with_opnorm)
      d.opnorm[k] = largest_singular_value(g, opts.rel_tol);
  });
  return d;
}

/// E ||(a_ij X_ij)||_{2->2}.
inline McEstimate estimate_opnorm_expectation(const CoeffMatrix& a, const EntryDistribution& dist,
                                              std::size_t samples, std::uint64_t seed, const McOptions& opts = {}) {
  detail::check_samples(samples, 2, "estimate_opnorm_expectation");
  std::vector<double> v(samples);
  detail::parallel_for(samples, opts.workers, [&](std::size_t k) {
    v[k] = largest_singular_value(sample_weighted_matrix(a, dist, seed, k), opts.rel_tol);
  });
  return summarize(v, seed);
}

struct MaxRowColEstimate {
  McEstimate row;
  McEstimate col;
  McEstimate sum; // per-draw max row + max col, then averaged
};

inline MaxRowColEstimate summarize_rowcol(const NormDraws& d, std::uint64_t seed) {
  std::vector<double> s(d.max_row.size());
  for (std::size_t k = 0; k < s.size(); ++k)
    s[k] = d.max_row[k] + d.max_col[k];
  return {summarize(d.max_row, seed), summarize(d.max_col, seed), summarize(s, seed)};
}

/// E max_i ||(a_ij X_ij)_j||_2, E max_j ||(a_ij X_ij)_i||_2 and their sum.
inline MaxRowColEstimate estimate_maxrowcol_expectation(const CoeffMatrix& a, const EntryDistribution& dist,
                                                        std::size_t samples, std::uint64_t seed,
                                                        const McOptions& opts = {}) {
  detail::check_samples(samples, 2, "estimate_maxrowcol_expectation");
  return summarize_rowcol(sample_norm_draws(a, dist, samples, seed, opts, false), seed);
}

struct TailFrequency {
  double frequency = 0.0;
  std::size_t exceedances = 0;
  std::size_t samples = 0;
};

/// Fraction of draws with ||G||_{2->2} > threshold.
inline TailFrequency tail_violation_frequency(const CoeffMatrix& a, double threshold, std::size_t samples,
                                              std::uint64_t seed,
                                              const EntryDistribution& dist = EntryDistribution::gaussian(),
                                              const McOptions& opts = {}) {
  detail::check_samples(samples, 1, "tail_violation_frequency");
  if (std::isinf(threshold) && threshold > 0.0)
    return {0.0, 0, samples};
  std::vector<char> hit(samples, 0);
  detail::parallel_for(samples, opts.workers, [&](std::size_t k) {
    hit[k] = operator_norm_exceeds(sample_weighted_matrix(a, dist, seed, k), threshold, opts.rel_tol);
  });
  const auto count = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  return {static_cast<double>(count) / static_cast<double>(samples), count, samples};
}

/// E max_i |x_i X_i| with X_i drawn from dists[i] on stream (seed, index, i, 0).
inline McEstimate estimate_weighted_max(std::span<const double> x, std::span<const EntryDistribution> dists,
                                        std::size_t samples, std::uint64_t seed, const McOptions& opts = {}) {
  detail::check_samples(samples, 2, "estimate_weighted_max");
  if (dists.size() != x.size() && dists.size() != 1)
    throw std::invalid_argument("estimate_weighted_max: need one distribution, or one per coordinate");
  std::vector<double> v(samples);
  detail::parallel_for(samples, opts.workers, [&](std::size_t k) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto& d = dists.size() == 1 ? dists[0] : dists[i];
      m = std::max(m, std::abs(x[i] * d.draw(seed, k, static_cast<std::uint32_t>(i), 0)));
    }
    v[k] = m;
  });
  return summarize(v, seed);
}

/// Step survival function u -> #{k : sample_k >= u} / N, with its exact tail
/// integral int_v^inf P(|X| >= u) du = mean((sample - v)_+).
inline TailFn make_step_tail(std::vector<double> samples) {
  if (samples.empty())
    throw std::invalid_argument("make_step_tail: no samples");
  for (double& s : samples)
    s = std::abs(s);
  std::sort(samples.begin(), samples.end());
  // suffix[k] = sum of samples[k..N)
  std::vector<double> suffix(samples.size() + 1, 0.0);
  for (std::size_t k = samples.size(); k-- > 0;)
    suffix[k] = suffix[k + 1] + samples[k];
  auto data = std::make_shared<const std::pair<std::vector<double>, std::vector<double>>>(std::move(samples),
                                                                                           std::move(suffix));
  const double n = static_cast<double>(data->first.size());

  TailFn t;
  t.survival = [data, n](double u) {
    const auto& s = data->first;
    const auto first = std::lower_bound(s.begin(), s.end(), u);
    return static_cast<double>(s.end() - first) / n;
  };
  t.tail_integral = [data, n](double v) {
    const auto& s = data->first;
    const auto first = std::upper_bound(s.begin(), s.end(), v);
    const auto k = static_cast<std::size_t>(first - s.begin());
    const double count = static_cast<double>(s.size() - k);
    return (data->second[k] - count * v) / n;
  };
  t.support_max = data->first.back();
  t.integrable = true;
  return t;
}

/// Empirical survival function of ||(a_j g_j)_j||_2 for one coefficient row,
/// from `samples` Gaussian draws on stream (seed, index, 0, j).
inline TailFn empirical_tail(std::span<const double> row, std::size_t samples, std::uint64_t seed,
                             const McOptions& opts = {}) {
  detail::check_samples(samples, 1000, "empirical_tail");
  const auto g = EntryDistribution::gaussian();
  std::vector<double> norms(samples);
  detail::parallel_for(samples, opts.workers, [&](std::size_t k) {
    std::vector<double> w(row.size());
    for (std::size_t j = 0; j < row.size(); ++j)
      w[j] = row[j] == 0.0 ? 0.0 : row[j] * g.draw(seed, k, 0, static_cast<std::uint32_t>(j));
    norms[k] = euclid_norm(w);
  });
  return make_step_tail(std::move(norms));
}

/// Smallest k with P(Binomial(n, p) <= k) >= confidence. Used as the
/// one-sided acceptance envelope for an exceedance count.
inline std::size_t binomial_upper_envelope(std::size_t n, double p, double confidence = 0.99) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binomial_upper_envelope: p must lie in [0, 1]");
  if (p == 0.0)
    return 0;
  if (p == 1.0)
    return n;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  double cdf = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double log_pmf = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                           std::lgamma(static_cast<double>(n - k) + 1.0) + static_cast<double>(k) * log_p +
                           static_cast<double>(n - k) * log_q;
    cdf += std::exp(log_pmf);
    if (cdf >= confidence)
      return k;
  }
  return n;
}

} // namespace rmnorm
