#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace wmt {

using Integer = mpz_class;
using Rational = mpq_class;

/// Dense integer matrix, row-major, arbitrary precision entries.
class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix zero(std::size_t rows, std::size_t cols) { return IntMatrix(rows, cols); }
  /// Columns given as vectors of equal length `rows`.
  static IntMatrix from_columns(std::size_t rows, const std::vector<std::vector<Integer>>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  bool is_square() const { return rows_ == cols_; }

  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Integer> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Integer> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<Integer> column(std::size_t c) const;

  IntMatrix transpose() const;
  IntMatrix columns(std::size_t first, std::size_t count) const;
  IntMatrix rows_range(std::size_t first, std::size_t count) const;
  bool is_zero() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  /// row[dst] += k * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const Integer& k);
  /// col[dst] += k * col[src]
  void add_col_multiple(std::size_t dst, std::size_t src, const Integer& k);
  void negate_row(std::size_t r);
  void negate_col(std::size_t c);

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
IntMatrix operator+(const IntMatrix& a, const IntMatrix& b);
IntMatrix operator-(const IntMatrix& a, const IntMatrix& b);
IntMatrix operator*(const Integer& k, const IntMatrix& a);
std::vector<Integer> operator*(const IntMatrix& a, std::span<const Integer> x);

IntMatrix hstack(const IntMatrix& a, const IntMatrix& b);
IntMatrix vstack(const IntMatrix& a, const IntMatrix& b);
IntMatrix block_diagonal(const std::vector<IntMatrix>& blocks);
IntMatrix power(const IntMatrix& a, unsigned e);

/// Fraction-free (Bareiss) determinant.
Integer determinant(const IntMatrix& a);

/// gcd of all entries; zero for the zero matrix.
Integer content(const IntMatrix& a);

std::ostream& operator<<(std::ostream& os, const IntMatrix& m);
std::string to_string(const IntMatrix& m);

}  // namespace wmt
