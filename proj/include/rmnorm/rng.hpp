#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rmnorm {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// A stateless bijection of a 128-bit counter under a 64-bit key.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t mul0 = 0xD2511F53u;
  static constexpr std::uint32_t mul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t weyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t weyl1 = 0xBB67AE85u;
  static constexpr int rounds = 10;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int r = 0; r < rounds; ++r) {
      if (r > 0) {
        key[0] += weyl0;
        key[1] += weyl1;
      }
      const std::uint64_t p0 = std::uint64_t{mul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{mul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

/// 128 random bits addressed by (seed, sample index, i, j).
inline Philox4x32::Counter random_block(std::uint64_t seed, std::uint64_t index, std::uint32_t i, std::uint32_t j) {
  return Philox4x32::generate(
      {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), i, j},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
}

/// Uniform on the open interval (0, 1) from the top 52 bits of two words.
/// With 53 bits the largest value would round up to 1.
inline double uniform_open01(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t{hi} << 32 | lo) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Inverse of the standard normal CDF on (0, 1).
///
/// Acklam's rational approximation (relative error 1.15e-9) followed by one
/// Halley step against erfc, which brings the error to a few ulp.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement; the residual is taken on the smaller tail to keep
  // relative precision for p near 1.
  const double e = p < 0.5 ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

enum class DistKind { gaussian, rademacher, uniform_centered, exponential_centered, constant };

// Law of the entries X_ij. Every kind except `constant` has mean 0 and
// variance 1.
struct EntryDistribution {
  DistKind kind = DistKind::gaussian;
  double constant_value = 1.0;

  static EntryDistribution gaussian() { return {DistKind::gaussian, 1.0}; }
  static EntryDistribution rademacher() { return {DistKind::rademacher, 1.0}; }
  static EntryDistribution uniform_centered() { return {DistKind::uniform_centered, 1.0}; }
  static EntryDistribution exponential_centered() { return {DistKind::exponential_centered, 1.0}; }
  static EntryDistribution constant(double v) { return {DistKind::constant, v}; }

  double draw(const Philox4x32::Counter& bits) const {
    switch (kind) {
    case DistKind::gaussian:
      return normal_quantile(uniform_open01(bits[0], bits[1]));
    case DistKind::rademacher:
      return (bits[0] & 1u) ? 1.0 : -1.0;
    case DistKind::uniform_centered:
      return std::numbers::sqrt3 * (2.0 * uniform_open01(bits[0], bits[1]) - 1.0);
    case DistKind::exponential_centered:
      return -std::log(uniform_open01(bits[0], bits[1])) - 1.0;
    case DistKind::constant:
      return constant_value;
    }
    return 0.0;
  }

  double draw(std::uint64_t seed, std::uint64_t index, std::uint32_t i, std::uint32_t j) const {
    if (kind == DistKind::constant)
      return constant_value;
    return draw(random_block(seed, index, i, j));
  }

  friend bool operator==(const EntryDistribution&, const EntryDistribution&) = default;
};

inline std::string to_string(DistKind k) {
  switch (k) {
  case DistKind::gaussian:
    return "gaussian";
  case DistKind::rademacher:
    return "rademacher";
  case DistKind::uniform_centered:
    return "uniform-centered";
  case DistKind::exponential_centered:
    return "exponential-centered";
  case DistKind::constant:
    return "constant";
  }
  return "unknown";
}

inline std::string to_string(const EntryDistribution& d) {
  if (d.kind == DistKind::constant) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "constant:%.17g", d.constant_value);
    return buf;
  }
  return to_string(d.kind);
}

/// Accepts the names produced by to_string, plus "constant:<value>".
inline EntryDistribution parse_distribution(std::string_view name) {
  if (name == "gaussian")
    return EntryDistribution::gaussian();
  if (name == "rademacher")
    return EntryDistribution::rademacher();
  if (name == "uniform-centered")
    return EntryDistribution::uniform_centered();
  if (name == "exponential-centered")
    return EntryDistribution::exponential_centered();
  if (name == "constant")
    return EntryDistribution::constant(1.0);
  if (name.starts_with("constant:")) {
    const std::string value(name.substr(9));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty() || !std::isfinite(v))
      throw std::invalid_argument("invalid constant distribution value: " + value);
    return EntryDistribution::constant(v);
  }
  throw std::invalid_argument("unknown distribution: " + std::string(name));
}

} // namespace rmnorm
