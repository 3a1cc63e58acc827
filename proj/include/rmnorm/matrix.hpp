#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rmnorm {

using RealVector = std::vector<double>;

// Dense real coefficient array (a_ij), row-major. Entries are always finite
// and the shape is at least 1x1.
class CoeffMatrix {
public:
  CoeffMatrix(std::size_t rows, std::size_t cols) : CoeffMatrix(rows, cols, RealVector(rows * cols, 0.0)) {}

  CoeffMatrix(std::size_t rows, std::size_t cols, RealVector entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0)
      throw std::invalid_argument("CoeffMatrix: rows and cols must be at least 1");
    if (entries_.size() != rows_ * cols_)
      throw std::invalid_argument("CoeffMatrix: expected " + std::to_string(rows_ * cols_) + " entries, got " +
                                  std::to_string(entries_.size()));
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (!std::isfinite(entries_[k]))
        throw std::invalid_argument("CoeffMatrix: non-finite entry at (" + std::to_string(k / cols_) + "," +
                                    std::to_string(k % cols_) + ")");
    }
  }

  static CoeffMatrix identity(std::size_t n) {
    CoeffMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      a.entries_[i * n + i] = 1.0;
    return a;
  }

  static CoeffMatrix ones(std::size_t rows, std::size_t cols) {
    return CoeffMatrix(rows, cols, RealVector(rows * cols, 1.0));
  }

  static CoeffMatrix diagonal(std::span<const double> d) {
    CoeffMatrix a(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
      a.set(i, i, d[i]);
    return a;
  }

  static CoeffMatrix from_rows(const std::vector<RealVector>& rows) {
    if (rows.empty())
      throw std::invalid_argument("CoeffMatrix::from_rows: no rows");
    RealVector flat;
    for (const auto& r : rows) {
      if (r.size() != rows.front().size())
        throw std::invalid_argument("CoeffMatrix::from_rows: ragged rows");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return CoeffMatrix(rows.size(), rows.front().size(), std::move(flat));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return entries_.size(); }

  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  void set(std::size_t i, std::size_t j, double v) {
    if (!std::isfinite(v))
      throw std::invalid_argument("CoeffMatrix::set: non-finite value");
    entries_[i * cols_ + j] = v;
  }

  std::span<const double> entries() const noexcept { return entries_; }
  std::span<const double> row(std::size_t i) const { return {entries_.data() + i * cols_, cols_}; }

  RealVector column(std::size_t j) const {
    RealVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      c[i] = entries_[i * cols_ + j];
    return c;
  }

  bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](double v) { return v == 0.0; });
  }

  std::size_t nonzeros() const {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](double v) { return v != 0.0; }));
  }

  CoeffMatrix scaled(double lambda) const {
    RealVector e(entries_);
    for (auto& v : e)
      v *= lambda;
    return CoeffMatrix(rows_, cols_, std::move(e));
  }

  CoeffMatrix transposed() const {
    CoeffMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        t.entries_[j * rows_ + i] = entries_[i * cols_ + j];
    return t;
  }

  friend bool operator==(const CoeffMatrix&, const CoeffMatrix&) = default;

private:
  std::size_t rows_;
  std::size_t cols_;
  RealVector entries_;
};

} // namespace rmnorm
