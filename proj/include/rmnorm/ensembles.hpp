#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rmnorm/matrix.hpp"
#include "rmnorm/matrix_io.hpp"
#include "rmnorm/rng.hpp"

namespace rmnorm {

enum class Family { diagonal, all_ones, product, toeplitz, band, sparse_bernoulli, power_decay, file };

// Description of one coefficient matrix. Empty parameter vectors take the
// family default; `cols` = 0 means square.
struct EnsembleSpec {
  Family family = Family::diagonal;
  std::string name;        // label carried into reports
  std::size_t rows = 1;
  std::size_t cols = 0;
  RealVector diag;         // diagonal: default all ones
  RealVector left, right;  // product a_i b_j: default (1..n), (1..m)
  RealVector symbol;       // toeplitz: default s_k = 1/(1+k)
  bool circulant = true;   // toeplitz: wrap indices mod n (square only)
  std::size_t bandwidth = 1;
  double sparsity = 0.1;   // sparse-bernoulli: P(a_ij = 1)
  double decay = 1.0;      // power-decay: a_ij = (1 + i + j)^-decay
  std::string path;        // file
  MatrixFormat format = MatrixFormat::csv;
  std::uint64_t seed = 0;

  std::size_t col_count() const { return cols == 0 ? rows : cols; }
};

inline std::string to_string(Family f) {
  switch (f) {
  case Family::diagonal:
    return "diagonal";
  case Family::all_ones:
    return "all-ones";
  case Family::product:
    return "product";
  case Family::toeplitz:
    return "toeplitz";
  case Family::band:
    return "band";
  case Family::sparse_bernoulli:
    return "sparse-bernoulli";
  case Family::power_decay:
    return "power-decay";
  case Family::file:
    return "file";
  }
  return "unknown";
}

inline Family parse_family(std::string_view s) {
  for (Family f : {Family::diagonal, Family::all_ones, Family::product, Family::toeplitz, Family::band,
                   Family::sparse_bernoulli, Family::power_decay, Family::file})
    if (s == to_string(f))
      return f;
  throw std::invalid_argument("unknown family: " + std::string(s));
}

/// Named presets used by the CLI. Besides the family names this accepts
/// "identity" (diagonal of ones), "circulant" (wrapped toeplitz), "toeplitz"
/// (unwrapped) and "sparse" (sparse-bernoulli, p = 0.1).
inline EnsembleSpec preset_ensemble(std::string_view name, std::size_t n, std::uint64_t seed = 0) {
  EnsembleSpec s;
  s.name = std::string(name);
  s.rows = n;
  s.seed = seed;
  if (name == "identity" || name == "diagonal") {
    s.family = Family::diagonal;
  } else if (name == "all-ones") {
    s.family = Family::all_ones;
  } else if (name == "product") {
    s.family = Family::product;
  } else if (name == "circulant") {
    s.family = Family::toeplitz;
    s.circulant = true;
  } else if (name == "toeplitz") {
    s.family = Family::toeplitz;
    s.circulant = false;
  } else if (name == "band") {
    s.family = Family::band;
  } else if (name == "sparse" || name == "sparse-bernoulli") {
    s.family = Family::sparse_bernoulli;
  } else if (name == "power-decay") {
    s.family = Family::power_decay;
  } else {
    throw std::invalid_argument("unknown ensemble preset: " + std::string(name));
  }
  return s;
}

inline RealVector default_product_vector(std::size_t n) {
  RealVector v(n);
  for (std::size_t k = 0; k < n; ++k)
    v[k] = static_cast<double>(k + 1);
  return v;
}

inline RealVector default_toeplitz_symbol(std::size_t n) {
  RealVector s(n);
  for (std::size_t k = 0; k < n; ++k)
    s[k] = 1.0 / static_cast<double>(k + 1);
  return s;
}

/// Throws std::invalid_argument describing the first inconsistency.
inline void validate(const EnsembleSpec& s) {
  auto bad = [&](const std::string& msg) { throw std::invalid_argument(to_string(s.family) + ": " + msg); };
  if (s.family == Family::file) {
    if (s.path.empty())
      bad("a file path is required");
    return;
  }
  if (s.rows == 0)
    bad("n must be at least 1");
  const std::size_t m = s.col_count();
  switch (s.family) {
  case Family::diagonal:
    if (s.cols != 0 && s.cols != s.rows)
      bad("diagonal matrices are square");
    if (!s.diag.empty() && s.diag.size() != s.rows)
      bad("diagonal has " + std::to_string(s.diag.size()) + " entries, expected " + std::to_string(s.rows));
    break;
  case Family::product:
    if (!s.left.empty() && s.left.size() != s.rows)
      bad("left vector length must equal n");
    if (!s.right.empty() && s.right.size() != m)
      bad("right vector length must equal m");
    break;
  case Family::toeplitz:
    if (s.circulant && m != s.rows)
      bad("circulant matrices are square");
    if (!s.symbol.empty() && s.symbol.size() != std::max(s.rows, m))
      bad("symbol length must equal max(n, m)");
    break;
  case Family::sparse_bernoulli:
    if (!(s.sparsity >= 0.0 && s.sparsity <= 1.0))
      bad("sparsity must lie in [0, 1]");
    break;
  case Family::power_decay:
    if (!(s.decay > 0.0) || !std::isfinite(s.decay))
      bad("decay exponent must be positive");
    break;
  default:
    break;
  }
  for (const RealVector* v : {&s.diag, &s.left, &s.right, &s.symbol})
    for (double x : *v)
      if (!std::isfinite(x))
        bad("parameters must be finite");
}

/// Deterministic in (spec, seed).
inline CoeffMatrix generate(const EnsembleSpec& s) {
  validate(s);
  if (s.family == Family::file)
    return load_matrix(s.path, s.format);

  const std::size_t n = s.rows;
  const std::size_t m = s.col_count();
  CoeffMatrix a(n, m);
  switch (s.family) {
  case Family::diagonal:
    for (std::size_t i = 0; i < n; ++i)
      a.set(i, i, s.diag.empty() ? 1.0 : s.diag[i]);
    break;
  case Family::all_ones:
    a = CoeffMatrix::ones(n, m);
    break;
  case Family::product: {
    const RealVector l = s.left.empty() ? default_product_vector(n) : s.left;
    const RealVector r = s.right.empty() ? default_product_vector(m) : s.right;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        a.set(i, j, l[i] * r[j]);
    break;
  }
  case Family::toeplitz: {
    const RealVector sym = s.symbol.empty() ? default_toeplitz_symbol(std::max(n, m)) : s.symbol;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t k = s.circulant ? (j + n - i) % n : (i > j ? i - j : j - i);
        a.set(i, j, sym[k]);
      }
    break;
  }
  case Family::band:
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if ((i > j ? i - j : j - i) <= s.bandwidth)
          a.set(i, j, 1.0);
    break;
  case Family::sparse_bernoulli: {
    // stream index 2^63 keeps these draws apart from sample streams
    constexpr std::uint64_t stream = std::uint64_t{1} << 63;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const auto bits = random_block(s.seed, stream, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        if (uniform_open01(bits[0], bits[1]) < s.sparsity)
          a.set(i, j, 1.0);
      }
    if (a.is_zero() && s.sparsity > 0.0)
      a.set(0, 0, 1.0);
    break;
  }
  case Family::power_decay:
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        a.set(i, j, std::pow(1.0 + static_cast<double>(i + j), -s.decay));
    break;
  case Family::file:
    break;
  }
  return a;
}

} // namespace rmnorm
