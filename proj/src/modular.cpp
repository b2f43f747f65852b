#include "wmt/modular.hpp"

#include <stdexcept>

namespace wmt {

std::uint64_t Fp::pow(std::uint64_t a, std::uint64_t e) const {
  std::uint64_t r = 1 % ell;
  a %= ell;
  while (e) {
    if (e & 1u) r = mul(r, a);
    a = mul(a, a);
    e >>= 1u;
  }
  return r;
}

std::uint64_t Fp::inv(std::uint64_t a) const {
  if (a % ell == 0) throw std::domain_error("inverse of zero in F_ell");
  return pow(a, ell - 2);
}

std::uint64_t Fp::reduce(const Integer& x) const {
  Integer r;
  mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), ell);
  return r.get_ui();
}

std::uint64_t Fp::from_signed(long long x) const {
  long long m = static_cast<long long>(ell);
  long long r = x % m;
  return static_cast<std::uint64_t>(r < 0 ? r + m : r);
}

FpMatrix FpMatrix::identity(std::uint64_t ell, std::size_t n) {
  FpMatrix m(ell, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1 % ell;
  return m;
}

FpMatrix FpMatrix::reduce(const IntMatrix& a, std::uint64_t ell) {
  if (ell < 2 || ell >= (1ull << 31)) throw std::invalid_argument("modulus must lie in [2, 2^31)");
  Fp f{ell};
  FpMatrix m(ell, a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = f.reduce(a(i, j));
  return m;
}

bool FpMatrix::is_zero() const {
  for (auto x : data_)
    if (x) return false;
  return true;
}

bool FpMatrix::is_identity() const { return rows_ == cols_ && *this == identity(ell_, rows_); }

FpMatrix FpMatrix::transpose() const {
  FpMatrix t(ell_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

FpMatrix FpMatrix::columns(std::size_t first, std::size_t count) const {
  FpMatrix m(ell_, rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) m(i, j) = (*this)(i, first + j);
  return m;
}

std::vector<std::uint64_t> FpMatrix::column(std::size_t c) const {
  std::vector<std::uint64_t> v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
  return v;
}

std::vector<std::size_t> row_reduce(FpMatrix& m) {
  Fp f = m.field();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    std::uint64_t inv = f.inv(m(r, c));
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) = f.mul(m(r, j), inv);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      std::uint64_t k = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) = f.sub(m(i, j), f.mul(k, m(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::size_t FpMatrix::rank() const {
  FpMatrix t = *this;
  return row_reduce(t).size();
}

FpMatrix FpMatrix::kernel() const {
  FpMatrix t = *this;
  auto pivots = row_reduce(t);
  Fp f = field();
  std::vector<bool> is_pivot(cols_, false);
  for (auto p : pivots) is_pivot[p] = true;
  FpMatrix k(ell_, cols_, cols_ - pivots.size());
  std::size_t out = 0;
  for (std::size_t free = 0; free < cols_; ++free) {
    if (is_pivot[free]) continue;
    k(free, out) = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) k(pivots[r], out) = f.neg(t(r, free));
    ++out;
  }
  return k;
}

std::optional<FpMatrix> FpMatrix::inverse() const {
  if (rows_ != cols_) return std::nullopt;
  FpMatrix aug = hstack(*this, identity(ell_, rows_));
  auto pivots = row_reduce(aug);
  if (pivots.size() < rows_ || (rows_ > 0 && pivots.back() >= rows_)) return std::nullopt;
  return aug.columns(rows_, rows_);
}

FpMatrix FpMatrix::scaled(std::uint64_t k) const {
  FpMatrix m = *this;
  Fp f = field();
  for (auto& x : m.data_) x = f.mul(x, k % ell_);
  return m;
}

FpMatrix operator*(const FpMatrix& a, const FpMatrix& b) {
  if (a.cols() != b.rows() || a.ell() != b.ell()) throw std::invalid_argument("F_ell product mismatch");
  Fp f = a.field();
  FpMatrix m(a.ell(), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      std::uint64_t x = a(i, k);
      if (!x) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) = f.add(m(i, j), f.mul(x, b(k, j)));
    }
  return m;
}

FpMatrix operator+(const FpMatrix& a, const FpMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("F_ell sum mismatch");
  Fp f = a.field();
  FpMatrix m(a.ell(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = f.add(a(i, j), b(i, j));
  return m;
}

FpMatrix operator-(const FpMatrix& a, const FpMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("F_ell difference mismatch");
  Fp f = a.field();
  FpMatrix m(a.ell(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = f.sub(a(i, j), b(i, j));
  return m;
}

FpMatrix power(const FpMatrix& a, unsigned e) {
  FpMatrix r = FpMatrix::identity(a.ell(), a.rows());
  FpMatrix base = a;
  while (e) {
    if (e & 1u) r = r * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return r;
}

FpMatrix hstack(const FpMatrix& a, const FpMatrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("F_ell hstack mismatch");
  FpMatrix m(a.ell(), a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
  }
  return m;
}

Subspace::Subspace(std::uint64_t ell, std::size_t ambient, const FpMatrix& generators)
    : ell_(ell), ambient_(ambient) {
  if (generators.cols() == 0) {
    rref_ = FpMatrix(ell, 0, ambient);
    return;
  }
  if (generators.rows() != ambient) throw std::invalid_argument("subspace generators have wrong ambient dimension");
  FpMatrix t = generators.transpose();
  auto pivots = row_reduce(t);
  FpMatrix r(ell, pivots.size(), ambient);
  for (std::size_t i = 0; i < pivots.size(); ++i)
    for (std::size_t j = 0; j < ambient; ++j) r(i, j) = t(i, j);
  rref_ = r;
}

Subspace Subspace::zero(std::uint64_t ell, std::size_t ambient) {
  return Subspace(ell, ambient, FpMatrix(ell, ambient, 0));
}

Subspace Subspace::full(std::uint64_t ell, std::size_t ambient) {
  return Subspace(ell, ambient, FpMatrix::identity(ell, ambient));
}

bool Subspace::contains(const std::vector<std::uint64_t>& v) const {
  FpMatrix g(ell_, ambient_, 1);
  for (std::size_t i = 0; i < ambient_; ++i) g(i, 0) = v[i] % ell_;
  return (*this + Subspace(ell_, ambient_, g)).dim() == dim();
}

bool Subspace::contains(const Subspace& other) const { return (*this + other).dim() == dim(); }

Subspace operator+(const Subspace& a, const Subspace& b) {
  if (a.ambient() != b.ambient()) throw std::invalid_argument("sum of subspaces in different spaces");
  return Subspace(a.ell(), a.ambient(), hstack(a.basis(), b.basis()));
}

std::optional<std::vector<std::uint64_t>> solve_mod(const FpMatrix& basis, const std::vector<std::uint64_t>& y) {
  const std::size_t n = basis.rows(), k = basis.cols();
  FpMatrix aug(basis.ell(), n, k + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) aug(i, j) = basis(i, j);
    aug(i, k) = y[i] % basis.ell();
  }
  auto pivots = row_reduce(aug);
  if (!pivots.empty() && pivots.back() == k) return std::nullopt;
  if (pivots.size() != k) throw std::invalid_argument("solve_mod: basis is not independent");
  std::vector<std::uint64_t> x(k);
  for (std::size_t r = 0; r < k; ++r) x[pivots[r]] = aug(r, k);
  return x;
}

}  // namespace wmt
