#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rmnorm/bounds.hpp"
#include "rmnorm/config.hpp"
#include "rmnorm/ensembles.hpp"
#include "rmnorm/linalg.hpp"
#include "rmnorm/montecarlo.hpp"
#include "rmnorm/orlicz.hpp"
#include "rmnorm/quadrature.hpp"
#include "rmnorm/report.hpp"

namespace rmnorm {

// A generated coefficient matrix and the description it was built from.
struct Subject {
  EnsembleSpec spec;
  CoeffMatrix matrix;
};

/// Matrices for every (family, size) pair in order, then the explicit
/// ensembles. Invalid specs, unreadable files and zero matrices are
/// configuration errors.
inline std::vector<Subject> build_subjects(const ExperimentConfig& c) {
  std::vector<EnsembleSpec> specs;
  for (const auto& f : c.families)
    for (std::size_t n : c.sizes) {
      try {
        specs.push_back(preset_ensemble(f, n, c.seed));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  specs.insert(specs.end(), c.ensembles.begin(), c.ensembles.end());

  std::vector<Subject> out;
  out.reserve(specs.size());
  for (auto& s : specs) {
    CoeffMatrix a(1, 1);
    try {
      a = generate(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    if (a.is_zero())
      throw ConfigError(s.name + " (n=" + std::to_string(a.rows()) + "): zero coefficient matrix");
    out.push_back({std::move(s), std::move(a)});
  }
  return out;
}

/// (left, right) for product-family specs.
inline std::optional<std::pair<RealVector, RealVector>> chevet_vectors(const EnsembleSpec& s) {
  if (s.family != Family::product)
    return std::nullopt;
  return std::pair{s.left.empty() ? default_product_vector(s.rows) : s.left,
                   s.right.empty() ? default_product_vector(s.col_count()) : s.right};
}

/// Deterministic columns of a report row.
inline BoundReport compute_bounds(const Subject& subj, const ExperimentConfig& c) {
  const CoeffMatrix& a = subj.matrix;
  BoundReport r;
  r.family = subj.spec.name;
  r.n = a.rows();
  r.m = a.cols();
  r.seed = c.seed;
  r.trivial = bound_trivial(a);
  if (auto v = chevet_vectors(subj.spec))
    r.chevet = bound_chevet(v->first, v->second);
  r.latala = bound_latala(a);
  r.log_factor = log_factor(a);
  r.log_three_halves = bound_log_three_halves(a);
  r.surrogate = lower_expression_surrogate(a, c.orlicz_rel_tol);
  return r;
}

inline McOptions mc_options(const ExperimentConfig& c) { return {c.workers, c.rel_tol}; }

/// Fills the Monte Carlo columns and the ratios.
inline void attach_monte_carlo(BoundReport& r, const CoeffMatrix& a, const EntryDistribution& dist,
                               const ExperimentConfig& c) {
  const NormDraws d = sample_norm_draws(a, dist, c.samples, c.seed, mc_options(c), true);
  r.samples = c.samples;
  r.dist = to_string(dist);
  r.mc_opnorm = summarize(d.opnorm, c.seed);
  r.mc_lower = summarize_rowcol(d, c.seed).sum;
  r.expectation_threshold = expectation_threshold(std::max(r.n, r.m), r.mc_lower->mean);
  const double op = r.mc_opnorm->mean;
  const double lower = r.mc_lower->mean;
  auto ratio = [](double num, double den) -> std::optional<double> {
    if (!(den > 0.0))
      return std::nullopt;
    return num / den;
  };
  r.ratio_op_lower = ratio(op, lower);
  r.ratio_op_logxlower = ratio(op, r.log_factor * lower);
  r.ratio_op_surrogate = ratio(op, r.surrogate);
  r.ratio_lower_surrogate = ratio(lower, r.surrogate);
}

/// One row per matrix; no sampling.
inline std::vector<BoundReport> cmd_bounds(const ExperimentConfig& c) {
  validate(c);
  std::vector<BoundReport> rows;
  for (const auto& s : build_subjects(c))
    rows.push_back(compute_bounds(s, c));
  return rows;
}

/// One row per (matrix, distribution) with Monte Carlo columns.
inline std::vector<BoundReport> cmd_sweep(const ExperimentConfig& c) {
  validate(c);
  std::vector<BoundReport> rows;
  for (const auto& s : build_subjects(c)) {
    const BoundReport base = compute_bounds(s, c);
    for (const auto& dist : c.distributions) {
      BoundReport r = base;
      attach_monte_carlo(r, s.matrix, dist, c);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Verification checks. Each returns rows that pass when lhs <= rhs.

inline constexpr double exact_slack = 1e-12;

inline std::string size_label(const CoeffMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

/// ||x||_2 <= t_norm(x) <= sqrt(ln(e n)) ||x||_2 on `count` vectors in R^n:
/// Gaussian vectors, Gaussian vectors on a random-length prefix, and random
/// sign vectors (where the lower side is attained).
inline std::vector<CheckResult> check_tnorm_sandwich(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n == 0 || count == 0)
    throw std::invalid_argument("check_tnorm_sandwich: n and count must be positive");
  const auto g = EntryDistribution::gaussian();
  const auto r = EntryDistribution::rademacher();
  const double root_log = std::sqrt(1.0 + std::log(static_cast<double>(n)));
  double worst_upper = 0.0;
  double worst_lower = 0.0;
  RealVector x(n);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t len = k % 3 == 1 ? 1 + (k / 3) % n : n;
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < len; ++i)
      x[i] = (k % 3 == 2 ? r : g).draw(seed, k, static_cast<std::uint32_t>(i), 0);
    const double e = euclid_norm(x);
    if (e == 0.0)
      continue;
    const double t = t_norm(x);
    worst_upper = std::max(worst_upper, t / (root_log * e));
    worst_lower = std::max(worst_lower, e / t);
  }
  const std::string subject = "n=" + std::to_string(n);
  return {{"tnorm-sandwich", subject + " upper", n, count, worst_upper, 1.0 + exact_slack,
           worst_upper <= 1.0 + exact_slack, "max t(x) / (sqrt(ln(en)) |x|)"},
          {"tnorm-sandwich", subject + " lower", n, count, worst_lower, 1.0 + exact_slack,
           worst_lower <= 1.0 + exact_slack, "max |x| / t(x)"}};
}

/// ||A|| <= sqrt(ln(e m)) max over the net of ||A x||, m = cols <= 12.
inline CheckResult check_net_bound(const CoeffMatrix& a, const std::string& label, double rel_tol) {
  const std::size_t m = a.cols();
  double best = 0.0;
  for (const auto& v : enumerate_st_net(m))
    best = std::max(best, apply_norm(a, v.dense(m)));
  const double sigma = largest_singular_value(a, rel_tol);
  const double rhs = std::sqrt(1.0 + std::log(static_cast<double>(m))) * best * (1.0 + exact_slack);
  return {"net-bound", label, m, 0, sigma, rhs, sigma <= rhs, "sigma_max vs sqrt(ln(em)) max_net |Ax|"};
}

/// Closed-form lower and upper bounds around P(|g| >= x) for x = 0.1 .. 8.0,
/// against adaptive quadrature of the density. The slack is relative.
inline CheckResult check_gaussian_tail() {
  double worst = 0.0;
  double worst_x = 0.0;
  for (int k = 1; k <= 80; ++k) {
    const double x = 0.1 * k;
    // everything is divided by e^{-x^2/2}: the mass becomes
    // sqrt(2/pi) int_0^inf e^{-xs - s^2/2} ds, truncated at s = 12 (below e^-72)
    const auto b = gaussian_tail_bounds(x);
    const double damp = std::exp(-0.5 * x * x);
    auto density = [x](double s) { return std::exp(-x * s - 0.5 * s * s); };
    const double mass = std::sqrt(2.0 / std::numbers::pi) * adaptive_simpson(density, 0.0, 12.0, 1e-15 / (1.0 + x));
    const double ratio = std::max(b.lower / damp / mass, mass / (b.upper / damp));
    if (ratio > worst) {
      worst = ratio;
      worst_x = x;
    }
  }
  return {"gaussian-tail",  "x=0.1..8.0", 0, 0, worst, 1.0 + exact_slack, worst <= 1.0 + exact_slack,
          "worst at x=" + format_real(worst_x)};
}

/// E|g| = sqrt(2/pi) for the 1x1 matrix [1], within 3 standard errors.
inline CheckResult check_one_dim(std::size_t samples, std::uint64_t seed, const McOptions& opts = {}) {
  const auto e = estimate_opnorm_expectation(CoeffMatrix::identity(1), EntryDistribution::gaussian(), samples, seed,
                                             opts);
  const double dev = std::abs(e.mean - std::sqrt(2.0 / std::numbers::pi));
  return {"one-dim", "1x1", 1, samples, dev, 3.0 * e.std_error, dev <= 3.0 * e.std_error,
          "mean=" + format_real(e.mean)};
}

// Gaussian draws shared by the expectation checks of one matrix.
struct ExpectationDraws {
  McEstimate opnorm;
  McEstimate lower;
  McEstimate max_row;
  McEstimate max_col;
};

inline ExpectationDraws draw_expectations(const CoeffMatrix& a, std::size_t samples, std::uint64_t seed,
                                          const McOptions& opts) {
  const NormDraws d = sample_norm_draws(a, EntryDistribution::gaussian(), samples, seed, opts, true);
  const auto rc = summarize_rowcol(d, seed);
  return {summarize(d.opnorm, seed), rc.sum, rc.row, rc.col};
}

/// E||G|| - 3se <= (1 + c ln(en)) (E lower + 3se), n = max(rows, cols).
inline CheckResult check_expectation_bound(const ExpectationDraws& e, std::size_t n, const std::string& label) {
  const double lhs = e.opnorm.mean - 3.0 * e.opnorm.std_error;
  const double rhs = expectation_threshold(n, e.lower.mean + 3.0 * e.lower.std_error);
  return {"expectation-bound", label, n, e.opnorm.samples, lhs, rhs, lhs <= rhs,
          "ratio=" + format_real(e.opnorm.mean / e.lower.mean)};
}

/// Exceedances of scale * c ln(en) E(lower) in `samples` fresh draws, against
/// the 99% binomial envelope for p = 1/n^2.
inline CheckResult check_tail_bound(const CoeffMatrix& a, double e_lower, std::size_t samples, std::uint64_t seed,
                                     double scale, const std::string& label, const McOptions& opts) {
  const std::size_t n = std::max(a.rows(), a.cols());
  const double threshold = scale * tail_threshold(n, e_lower);
  const auto f = tail_violation_frequency(a, threshold, samples, seed, EntryDistribution::gaussian(), opts);
  const double nn = static_cast<double>(n);
  const auto envelope = binomial_upper_envelope(samples, std::min(1.0, 1.0 / (nn * nn)), 0.99);
  return {"tail-bound",
          label,
          n,
          samples,
          static_cast<double>(f.exceedances),
          static_cast<double>(envelope),
          f.exceedances <= envelope,
          "threshold=" + format_real(threshold)};
}

/// sqrt(2/pi) max_j ||col_j|| - 3se <= E max_j ||col_j o g||, and the row analogue.
inline std::vector<CheckResult> check_floors(const CoeffMatrix& a, const ExpectationDraws& e, const std::string& label) {
  const double c = std::sqrt(2.0 / std::numbers::pi);
  const double col_lhs = c * max_col_norm(a) - 3.0 * e.max_col.std_error;
  const double row_lhs = c * max_row_norm(a) - 3.0 * e.max_row.std_error;
  const std::size_t n = std::max(a.rows(), a.cols());
  return {{"col-floor", label, n, e.max_col.samples, col_lhs, e.max_col.mean, col_lhs <= e.max_col.mean, ""},
          {"row-floor", label, n, e.max_row.samples, row_lhs, e.max_row.mean, row_lhs <= e.max_row.mean, ""}};
}

// Stream offset separating the tail draws from the expectation draws.
inline constexpr std::uint64_t tail_seed_offset = 0x9E3779B97F4A7C15ull;

inline VerifyReport cmd_verify(const ExperimentConfig& c) {
  validate(c);
  auto enabled = [&](std::string_view name) {
    return c.checks.empty() || std::find(c.checks.begin(), c.checks.end(), name) != c.checks.end();
  };
  const McOptions opts = mc_options(c);
  const auto subjects = build_subjects(c);
  VerifyReport rep;
  rep.seed = c.seed;
  auto add = [&](std::vector<CheckResult> v) {
    for (auto& r : v)
      rep.checks.push_back(std::move(r));
  };

  if (enabled("tnorm-sandwich")) {
    std::vector<std::size_t> sizes = c.sizes;
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    for (std::size_t n : sizes)
      add(check_tnorm_sandwich(n, 1000, c.seed));
  }
  if (enabled("net-bound"))
    for (const auto& s : subjects)
      if (s.matrix.cols() <= 8)
        add({check_net_bound(s.matrix, s.spec.name + " " + size_label(s.matrix), c.rel_tol)});
  if (enabled("gaussian-tail"))
    add({check_gaussian_tail()});
  if (enabled("one-dim"))
    add({check_one_dim(c.samples, c.seed, opts)});

  const bool need_draws = enabled("expectation-bound") || enabled("tail-bound") || enabled("col-floor") || enabled("row-floor");
  if (need_draws) {
    for (const auto& s : subjects) {
      const std::string label = s.spec.name + " " + size_label(s.matrix);
      const std::size_t n = std::max(s.matrix.rows(), s.matrix.cols());
      const auto e = draw_expectations(s.matrix, c.samples, c.seed, opts);
      if (enabled("expectation-bound"))
        add({check_expectation_bound(e, n, label)});
      if (enabled("tail-bound"))
        add({check_tail_bound(s.matrix, e.lower.mean, c.tail_samples, c.seed ^ tail_seed_offset, c.threshold_scale,
                               label, opts)});
      if (enabled("col-floor") || enabled("row-floor")) {
        for (auto& r : check_floors(s.matrix, e, label))
          if (enabled(r.check))
            rep.checks.push_back(std::move(r));
      }
    }
  }
  return rep;
}

/// Builds a named Orlicz function: "power:P", "diag-gauss", or "row-profile" /
/// "column-profile" from the given coefficient vector.
inline OrliczFn parse_orlicz_function(std::string_view spec, const RealVector& profile = {},
                                      double quad_tol = default_quad_tol) {
  if (spec.starts_with("power:")) {
    const std::string v(spec.substr(6));
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size())
      throw ConfigError("invalid power exponent: '" + v + "'");
    try {
      return make_power_fn(p);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (spec == "diag-gauss")
    return make_diag_gauss_fn(quad_tol);
  if (spec == "row-profile" || spec == "column-profile") {
    if (profile.empty())
      throw ConfigError(std::string(spec) + " needs a coefficient vector (--row)");
    return spec == "row-profile" ? make_row_profile_fn(profile) : make_column_profile_fn(profile);
  }
  throw ConfigError("unknown Orlicz function: '" + std::string(spec) + "'");
}

} // namespace rmnorm
