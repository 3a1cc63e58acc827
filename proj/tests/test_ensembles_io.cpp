#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "rmnorm/ensembles.hpp"
#include "rmnorm/linalg.hpp"
#include "rmnorm/matrix_io.hpp"

using namespace rmnorm;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rmnorm_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

void expect_parse_error(std::string_view text, bool json, std::size_t line) {
  try {
    if (json)
      parse_matrix_json(text);
    else
      parse_matrix_csv(text);
    FAIL() << "expected ParseError for: " << text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
  }
}

} // namespace

TEST(Generate, Examples) {
  auto d = preset_ensemble("diagonal", 2);
  d.diag = {1, 1};
  EXPECT_EQ(generate(d), CoeffMatrix::identity(2));
  auto p = preset_ensemble("product", 2);
  p.left = {1, 2};
  p.right = {3, 4};
  EXPECT_EQ(generate(p), CoeffMatrix::from_rows({{3, 4}, {6, 8}}));
  auto c = preset_ensemble("circulant", 4);
  c.symbol = {1, 0, 0, 0};
  EXPECT_EQ(generate(c), CoeffMatrix::identity(4));
}

TEST(Generate, DefaultFamilies) {
  EXPECT_EQ(generate(preset_ensemble("identity", 3)), CoeffMatrix::identity(3));
  EXPECT_EQ(generate(preset_ensemble("all-ones", 3)), CoeffMatrix::ones(3, 3));
  EXPECT_EQ(generate(preset_ensemble("product", 3))(2, 1), 6.0);
  const auto t = generate(preset_ensemble("toeplitz", 4));
  EXPECT_EQ(t(0, 3), 0.25);
  EXPECT_EQ(t(3, 0), 0.25);
  const auto band = generate(preset_ensemble("band", 5));
  EXPECT_EQ(band.nonzeros(), 13u);
  const auto pd = generate(preset_ensemble("power-decay", 3));
  EXPECT_DOUBLE_EQ(pd(2, 2), 0.2);
  auto rect = preset_ensemble("product", 2);
  rect.cols = 3;
  EXPECT_EQ(generate(rect).cols(), 3u);
}

TEST(Generate, CirculantHasEqualProfiles) {
  for (std::size_t n : {3u, 8u, 31u}) {
    auto s = preset_ensemble("circulant", n);
    std::mt19937_64 rng(n);
    std::normal_distribution<double> g;
    s.symbol.resize(n);
    for (auto& v : s.symbol)
      v = g(rng);
    const auto a = generate(s);
    const auto rc = row_col_euclid_norms(a);
    const double m = max_abs(a.row(0));
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_NEAR(rc.rows[k], rc.rows[0], 1e-12);
      EXPECT_NEAR(rc.cols[k], rc.rows[0], 1e-12);
      EXPECT_EQ(max_abs(a.row(k)), m);
      EXPECT_EQ(max_abs(a.column(k)), m);
    }
  }
}

TEST(Generate, SparseIsDeterministicPerSeed) {
  auto s = preset_ensemble("sparse", 40, 7);
  const auto a = generate(s);
  EXPECT_EQ(a, generate(s));
  s.seed = 8;
  EXPECT_NE(a, generate(s));
  const double fill = static_cast<double>(a.nonzeros()) / a.size();
  EXPECT_NEAR(fill, 0.1, 0.03);
  for (double v : a.entries())
    EXPECT_TRUE(v == 0.0 || v == 1.0);
  auto tiny = preset_ensemble("sparse", 1, 3);
  tiny.sparsity = 1e-9;
  EXPECT_FALSE(generate(tiny).is_zero());
}

TEST(Generate, ValidationErrors) {
  auto d = preset_ensemble("diagonal", 3);
  d.diag = {1, 2};
  EXPECT_THROW(generate(d), std::invalid_argument);
  auto s = preset_ensemble("sparse", 3);
  s.sparsity = 1.5;
  EXPECT_THROW(generate(s), std::invalid_argument);
  auto p = preset_ensemble("power-decay", 3);
  p.decay = 0.0;
  EXPECT_THROW(generate(p), std::invalid_argument);
  auto c = preset_ensemble("circulant", 3);
  c.cols = 4;
  EXPECT_THROW(generate(c), std::invalid_argument);
  auto z = preset_ensemble("identity", 0);
  EXPECT_THROW(generate(z), std::invalid_argument);
  auto f = preset_ensemble("identity", 2);
  f.family = Family::file;
  EXPECT_THROW(generate(f), std::invalid_argument);
  EXPECT_THROW(preset_ensemble("wishart", 3), std::invalid_argument);
  EXPECT_EQ(parse_family(to_string(Family::sparse_bernoulli)), Family::sparse_bernoulli);
  EXPECT_THROW(parse_family("nope"), std::invalid_argument);
}

TEST(MatrixCsv, Examples) {
  EXPECT_EQ(parse_matrix_csv("1,0\n0,1"), CoeffMatrix::identity(2));
  EXPECT_EQ(parse_matrix_csv("1, 0\r\n\n0 ,1\n"), CoeffMatrix::identity(2));
  expect_parse_error("1,2\n3", false, 2);
  expect_parse_error("1,2\n3,x\n", false, 2);
  expect_parse_error("1,nan", false, 1);
  expect_parse_error("1,2\n\n4,inf", false, 3);
  expect_parse_error("", false, 1);
  expect_parse_error("1,,2", false, 1);
  try {
    parse_matrix_csv("1,2,3\n4,5,oops\n");
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 3u);
  }
}

TEST(MatrixJson, ParseAndErrors) {
  EXPECT_EQ(parse_matrix_json(R"({"rows": 2, "cols": 2, "entries": [1, 0, 0, 1]})"), CoeffMatrix::identity(2));
  expect_parse_error(R"({"rows": 2, "cols": 2, "entries": [1, 0, 0]})", true, 1);
  expect_parse_error(R"({"rows": 2, "cols": 2, "entries": [1, 0, "a", 1]})", true, 2);
  expect_parse_error(R"({"rows": 1, "cols": 1, "entries": [1], "extra": 0})", true, 1);
  expect_parse_error("{\n\"rows\": 1,\n oops}", true, 3);
}

TEST_F(TempDir, RoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  CoeffMatrix a(7, 5);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      a.set(i, j, g(rng) * std::exp(30.0 * g(rng)));
  a.set(0, 0, 0.1);
  a.set(1, 1, -0.0);
  a.set(2, 2, 5e-324);
  for (auto fmt : {MatrixFormat::csv, MatrixFormat::json}) {
    const auto path = dir_ / (fmt == MatrixFormat::csv ? "a.csv" : "a.json");
    save_matrix(a, path, fmt);
    EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
    const auto b = load_matrix(path, fmt);
    ASSERT_EQ(b.rows(), a.rows());
    for (std::size_t k = 0; k < a.size(); ++k)
      EXPECT_EQ(std::bit_cast<std::uint64_t>(b.entries()[k]), std::bit_cast<std::uint64_t>(a.entries()[k]));
  }
}

TEST_F(TempDir, ZeroAndOneByOne) {
  for (const auto& a : {CoeffMatrix(3, 2), CoeffMatrix::from_rows({{-4.25}})}) {
    for (auto fmt : {MatrixFormat::csv, MatrixFormat::json}) {
      const auto path = dir_ / "m";
      save_matrix(a, path, fmt);
      EXPECT_EQ(load_matrix(path, fmt), a);
    }
  }
}

TEST_F(TempDir, SaveOverwritesAndFileFamilyLoads) {
  const auto path = dir_ / "m.csv";
  save_matrix(CoeffMatrix::ones(2, 2), path, MatrixFormat::csv);
  save_matrix(CoeffMatrix::identity(3), path, MatrixFormat::csv);
  EXPECT_EQ(load_matrix(path, MatrixFormat::csv), CoeffMatrix::identity(3));
  EnsembleSpec s;
  s.family = Family::file;
  s.path = path.string();
  s.format = matrix_format_for(path);
  EXPECT_EQ(generate(s), CoeffMatrix::identity(3));
  EXPECT_THROW(load_matrix(dir_ / "missing.csv", MatrixFormat::csv), Error);
  EXPECT_EQ(matrix_format_for("x.json"), MatrixFormat::json);
  EXPECT_EQ(matrix_format_for("x.txt"), MatrixFormat::csv);
}
