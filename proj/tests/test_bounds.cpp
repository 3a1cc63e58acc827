#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "rmnorm/bounds.hpp"

using namespace rmnorm;

namespace {

CoeffMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  CoeffMatrix a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      if (u(rng) < 0.6)
        a.set(i, j, g(rng) * std::exp2(-20.0 * u(rng)));
  if (a.is_zero())
    a.set(0, 0, 1.0);
  return a;
}

} // namespace

TEST(TrivialBound, Examples) {
  for (std::size_t n : {1u, 4u, 25u}) {
    EXPECT_DOUBLE_EQ(bound_trivial(CoeffMatrix::identity(n)), 2.0);
    EXPECT_NEAR(bound_trivial(CoeffMatrix::ones(n, n)), 2.0 * std::sqrt(static_cast<double>(n)), 1e-13 * n);
  }
  EXPECT_NEAR(bound_trivial(CoeffMatrix::from_rows({{1, 2}, {3, 4}})), 5.0 + std::sqrt(20.0), 1e-14);
}

TEST(ChevetBound, Examples) {
  for (std::size_t n : {1u, 9u}) {
    const RealVector ones(n, 1.0);
    EXPECT_NEAR(bound_chevet(ones, ones), 2.0 * std::sqrt(static_cast<double>(n)), 1e-14 * n);
  }
  const RealVector b{0.5, -3.0, 2.0};
  EXPECT_NEAR(bound_chevet(RealVector{1, 0, 0, 0}, b), 3.0 + std::sqrt(13.25), 1e-14);
  EXPECT_NEAR(bound_chevet(RealVector{1, 2}, RealVector{3, 4}), 4.0 * std::sqrt(5.0) + 10.0, 1e-13);
}

TEST(ChevetBound, EqualsTrivialOnProducts) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    RealVector a(1 + k % 7), b(1 + (k * 3) % 5);
    for (auto& v : a)
      v = g(rng);
    for (auto& v : b)
      v = g(rng);
    CoeffMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        m.set(i, j, a[i] * b[j]);
    EXPECT_NEAR(bound_trivial(m), bound_chevet(a, b), 1e-12 * bound_chevet(a, b));
  }
}

TEST(LatalaBound, Examples) {
  for (std::size_t n : {1u, 16u, 81u}) {
    const double dn = static_cast<double>(n);
    EXPECT_NEAR(bound_latala(CoeffMatrix::identity(n)), 2.0 + std::pow(dn, 0.25), 1e-13 * dn);
    EXPECT_NEAR(bound_latala(CoeffMatrix::ones(n, n)), 3.0 * std::sqrt(dn), 1e-13 * dn);
  }
  EXPECT_NEAR(bound_latala(CoeffMatrix::from_rows({{-2.5}})), 7.5, 1e-15);
}

TEST(LogFactor, Examples) {
  CoeffMatrix single(3, 4);
  single.set(1, 2, -7.0);
  EXPECT_DOUBLE_EQ(log_factor(single), 1.0);
  for (std::size_t n : {2u, 16u}) {
    const double dn = static_cast<double>(n);
    EXPECT_NEAR(log_factor(CoeffMatrix::identity(n)), std::log(std::numbers::e * dn), 1e-14);
    EXPECT_NEAR(log_factor(CoeffMatrix::ones(n, n)), std::log(std::numbers::e * dn * dn), 1e-14);
  }
  EXPECT_THROW(log_factor(CoeffMatrix(2, 2)), std::invalid_argument);
}

TEST(LogThreeHalves, Examples) {
  CoeffMatrix single(2, 2);
  single.set(0, 1, 3.0);
  EXPECT_DOUBLE_EQ(bound_log_three_halves(single), 6.0);
  for (std::size_t n : {3u, 20u}) {
    const double dn = static_cast<double>(n);
    EXPECT_NEAR(bound_log_three_halves(CoeffMatrix::identity(n)), std::pow(std::log(std::numbers::e * dn), 1.5) * 2.0,
                1e-12);
    EXPECT_NEAR(bound_log_three_halves(CoeffMatrix::ones(n, n)),
                std::pow(std::log(std::numbers::e * dn * dn), 1.5) * 2.0 * std::sqrt(dn), 1e-11 * dn);
  }
  EXPECT_EQ(bound_log_three_halves(CoeffMatrix(2, 3)), 0.0);
}

TEST(Bounds, HomogeneityAndOrdering) {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 30; ++k) {
    const auto a = random_matrix(rng, 1 + k % 6, 1 + (k * 7) % 9);
    const double lambda = 0.37 + k;
    const auto b = a.scaled(lambda);
    EXPECT_NEAR(bound_trivial(b), lambda * bound_trivial(a), 1e-12 * lambda * bound_trivial(a));
    EXPECT_NEAR(bound_latala(b), lambda * bound_latala(a), 1e-12 * lambda * bound_latala(a));
    EXPECT_NEAR(bound_log_three_halves(b), lambda * bound_log_three_halves(a), 1e-11 * lambda * bound_log_three_halves(a));
    EXPECT_NEAR(log_factor(b), log_factor(a), 1e-12 * log_factor(a));
    EXPECT_GE(bound_latala(a), bound_trivial(a));
    EXPECT_GE(log_factor(a), 1.0);
    const RealVector u{1.0, -2.0, 0.5};
    const RealVector v{3.0, 0.25};
    const RealVector lu{lambda, -2.0 * lambda, 0.5 * lambda};
    EXPECT_NEAR(bound_chevet(lu, v), lambda * bound_chevet(u, v), 1e-12 * lambda * bound_chevet(u, v));
  }
}

TEST(Thresholds, ConstantsAndExamples) {
  // sqrt(3 pi^3 / 4) to 30 digits: 4.82231350186037418846
  EXPECT_NEAR(tail_threshold_constant, 4.82231350186037419, 1e-14);
  const double e_lower = 2.0 * std::sqrt(2.0 / std::numbers::pi);
  EXPECT_NEAR(expectation_threshold(1, e_lower), 9.29106810257691529, 1e-13);
  EXPECT_NEAR(tail_threshold(1, 1.7), tail_threshold_constant * 1.7, 1e-14);
  EXPECT_EQ(expectation_threshold(10, 0.0), 0.0);
  EXPECT_EQ(tail_threshold(10, 0.0), 0.0);
  for (std::size_t n : {1u, 3u, 64u, 1000u}) {
    EXPECT_GT(expectation_threshold(2 * n, 1.0), expectation_threshold(n, 1.0));
    EXPECT_GT(tail_threshold(2 * n, 1.0), tail_threshold(n, 1.0));
    EXPECT_NEAR(expectation_threshold(n, 2.0) - tail_threshold(n, 2.0), 2.0, 1e-12);
    EXPECT_NEAR(tail_threshold(n, 3.0), 3.0 * tail_threshold(n, 1.0), 1e-12);
  }
  EXPECT_THROW(expectation_threshold(0, 1.0), std::invalid_argument);
  EXPECT_THROW(tail_threshold(4, -1.0), std::invalid_argument);
}

TEST(DyadicLevel, HalfOpenShells) {
  EXPECT_EQ(dyadic_level_of(1.0), 1);
  EXPECT_EQ(dyadic_level_of(0.6), 1);
  EXPECT_EQ(dyadic_level_of(0.5), 2);
  EXPECT_EQ(dyadic_level_of(std::nextafter(0.5, 1.0)), 1);
  EXPECT_EQ(dyadic_level_of(0.3), 2);
  EXPECT_EQ(dyadic_level_of(0.25), 3);
  EXPECT_EQ(dyadic_level_of(0.2), 3);
  EXPECT_EQ(dyadic_level_of(std::ldexp(1.0, -40)), 41);
}

TEST(DyadicDecompose, AllEntriesEqual) {
  const auto d = dyadic_decompose(CoeffMatrix::ones(3, 5).scaled(-4.0));
  ASSERT_EQ(d.levels.size(), 1u);
  EXPECT_EQ(d.levels.begin()->first, 1);
  EXPECT_EQ(d.levels.at(1).value, 0.5);
  EXPECT_EQ(d.phi(1), 15u);
  EXPECT_NEAR(d.gamma, std::log2(15.0), 1e-14);
  EXPECT_EQ(d.norm_inf, 4.0);
}

TEST(DyadicDecompose, BinningExample) {
  const auto d = dyadic_decompose(CoeffMatrix::from_rows({{1.0, 0.6}, {0.3, 0.2}}));
  ASSERT_EQ(d.levels.size(), 3u);
  using P = std::pair<std::size_t, std::size_t>;
  EXPECT_EQ(d.levels.at(1).positions, (std::vector<P>{{0, 0}, {0, 1}}));
  EXPECT_EQ(d.levels.at(2).positions, (std::vector<P>{{1, 0}}));
  EXPECT_EQ(d.levels.at(3).positions, (std::vector<P>{{1, 1}}));
  EXPECT_EQ(d.phi(4), 0u);
}

TEST(DyadicDecompose, RemainderBeyondKMax) {
  const auto d = dyadic_decompose(CoeffMatrix::from_rows({{1.0, 1e-3, 1e-30}}), 8);
  EXPECT_EQ(d.remainder.size(), 2u);
  EXPECT_NEAR(d.remainder_mass, 1e-3 + 1e-30, 1e-18);
  EXPECT_EQ(d.phi(1), 1u);
  EXPECT_THROW(dyadic_decompose(CoeffMatrix::identity(2), 0), std::invalid_argument);
  EXPECT_THROW(dyadic_decompose(CoeffMatrix(2, 2)), std::invalid_argument);
}

TEST(DyadicDecompose, InvariantsOnRandomMatrices) {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 60; ++k) {
    const auto a = random_matrix(rng, 1 + k % 17, 1 + (k * 5) % 23);
    const auto d = dyadic_decompose(a);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [level, lv] : d.levels) {
      EXPECT_EQ(lv.value, std::ldexp(1.0, -level));
      EXPECT_LE(static_cast<double>(d.phi(level)), std::ldexp(d.mass, level));
      for (auto [i, j] : lv.positions) {
        const double r = std::abs(a(i, j)) / d.norm_inf;
        EXPECT_LT(lv.value, r);
        EXPECT_LE(r, 2.0 * lv.value);
        EXPECT_TRUE(seen.insert({i, j}).second);
      }
    }
    for (auto p : d.remainder)
      EXPECT_TRUE(seen.insert(p).second);
    EXPECT_EQ(seen.size(), a.nonzeros());
  }
}
