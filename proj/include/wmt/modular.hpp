#pragma once

#include "wmt/matrix.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace wmt {

/// Arithmetic in F_ell for a prime ell < 2^31; elements are kept in [0, ell).
struct Fp {
  std::uint64_t ell;

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return (a + b) % ell; }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return (a + ell - b) % ell; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return (a * b) % ell; }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : ell - a; }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
  std::uint64_t inv(std::uint64_t a) const;
  std::uint64_t reduce(const Integer& x) const;
  std::uint64_t from_signed(long long x) const;
};

/// Dense matrix over F_ell.
class FpMatrix {
public:
  FpMatrix() = default;
  FpMatrix(std::uint64_t ell, std::size_t rows, std::size_t cols)
      : ell_(ell), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static FpMatrix identity(std::uint64_t ell, std::size_t n);
  static FpMatrix reduce(const IntMatrix& m, std::uint64_t ell);

  std::uint64_t ell() const { return ell_; }
  Fp field() const { return Fp{ell_}; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::uint64_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool is_zero() const;
  bool is_identity() const;
  FpMatrix transpose() const;
  FpMatrix columns(std::size_t first, std::size_t count) const;
  std::vector<std::uint64_t> column(std::size_t c) const;
  std::size_t rank() const;
  /// Column basis of the null space.
  FpMatrix kernel() const;
  std::optional<FpMatrix> inverse() const;
  FpMatrix scaled(std::uint64_t k) const;

  friend bool operator==(const FpMatrix&, const FpMatrix&) = default;

private:
  std::uint64_t ell_ = 2;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint64_t> data_;
};

FpMatrix operator*(const FpMatrix& a, const FpMatrix& b);
FpMatrix operator+(const FpMatrix& a, const FpMatrix& b);
FpMatrix operator-(const FpMatrix& a, const FpMatrix& b);
FpMatrix power(const FpMatrix& a, unsigned e);
FpMatrix hstack(const FpMatrix& a, const FpMatrix& b);

/// A subspace of F_ell^ambient stored by its reduced row echelon basis (rows), so equality
/// of subspaces is equality of the stored matrices.
class Subspace {
public:
  Subspace() = default;
  /// Spanned by the columns of `generators`.
  Subspace(std::uint64_t ell, std::size_t ambient, const FpMatrix& generators);

  static Subspace zero(std::uint64_t ell, std::size_t ambient);
  static Subspace full(std::uint64_t ell, std::size_t ambient);

  std::uint64_t ell() const { return ell_; }
  std::size_t ambient() const { return ambient_; }
  std::size_t dim() const { return rref_.rows(); }
  /// Basis vectors as columns.
  FpMatrix basis() const { return rref_.transpose(); }
  bool contains(const std::vector<std::uint64_t>& v) const;
  bool contains(const Subspace& other) const;

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ambient_ == b.ambient_ && a.rref_ == b.rref_;
  }

private:
  std::uint64_t ell_ = 2;
  std::size_t ambient_ = 0;
  FpMatrix rref_;
};

Subspace operator+(const Subspace& a, const Subspace& b);

/// Row-reduces in place and returns pivot columns.
std::vector<std::size_t> row_reduce(FpMatrix& m);

/// Solves B x = y for a basis B (full column rank); nullopt when y is outside the span.
std::optional<std::vector<std::uint64_t>> solve_mod(const FpMatrix& basis, const std::vector<std::uint64_t>& y);

}  // namespace wmt
