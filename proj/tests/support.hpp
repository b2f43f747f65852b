#pragma once
// Shared generators and independent reference computations for the test suites.
// Nothing here calls into the library's normal-form, filtration or Sturm code.

#include "wmt/matrix.hpp"
#include "wmt/modular.hpp"
#include "wmt/polynomial.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace testing_support {

using wmt::Integer;
using wmt::IntMatrix;
using wmt::IntPoly;
using wmt::Rational;

inline Integer ipow(const Integer& b, unsigned e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

/// Rank over Q by fraction-based Gaussian elimination.
inline std::size_t rank_over_q(const IntMatrix& m) {
  std::vector<std::vector<Rational>> a(m.rows(), std::vector<Rational>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && a[p][c] == 0) ++p;
    if (p == m.rows()) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Rational f = a[i][c] / a[r][c];
      for (std::size_t j = c; j < m.cols(); ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

/// Rank mod a small prime with signed 64-bit arithmetic.
inline std::size_t rank_mod(const IntMatrix& m, std::int64_t ell) {
  std::vector<std::vector<std::int64_t>> a(m.rows(), std::vector<std::int64_t>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Integer x = m(i, j) % Integer(static_cast<long>(ell));
      if (x < 0) x += static_cast<long>(ell);
      a[i][j] = x.get_si();
    }
  const auto inv = [ell](std::int64_t x) {
    std::int64_t r = 1, b = x, e = ell - 2;
    while (e) {
      if (e & 1) r = r * b % ell;
      b = b * b % ell;
      e >>= 1;
    }
    return r;
  };
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && a[p][c] == 0) ++p;
    if (p == m.rows()) continue;
    std::swap(a[p], a[r]);
    const std::int64_t iv = inv(a[r][c]);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      const std::int64_t f = a[i][c] * iv % ell;
      for (std::size_t j = c; j < m.cols(); ++j) a[i][j] = ((a[i][j] - f * a[r][j]) % ell + ell) % ell;
    }
    ++r;
  }
  return r;
}

inline Integer det_over_q(const std::vector<std::vector<Integer>>& rows) {
  const std::size_t n = rows.size();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = rows[i][j];
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      const Rational f = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return det.get_num();
}

inline void subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  if (k > n) return;
  while (true) {
    out.push_back(pick);
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

/// Elementary divisors from determinantal divisors: D_k = gcd of k x k minors, d_k = D_k / D_{k-1}.
/// Returns the nonzero divisors only. Exponential; meant for matrices up to about 5 x 5.
inline std::vector<Integer> divisors_by_minors(const IntMatrix& m) {
  std::vector<Integer> out;
  Integer prev = 1;
  for (std::size_t k = 1; k <= std::min(m.rows(), m.cols()); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    subsets(m.rows(), k, rs);
    subsets(m.cols(), k, cs);
    Integer g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        std::vector<std::vector<Integer>> sub(k, std::vector<Integer>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) sub[i][j] = m(r[i], c[j]);
        Integer d = det_over_q(sub);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      }
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

/// A random unimodular matrix as a product of elementary operations with multipliers in [-2, 2].
inline IntMatrix random_unimodular(std::size_t n, std::mt19937_64& rng, int ops) {
  IntMatrix u = IntMatrix::identity(n);
  if (n < 2) return u;
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  std::uniform_int_distribution<int> mult(-2, 2);
  for (int k = 0; k < ops; ++k) {
    const std::size_t a = idx(rng), b = idx(rng);
    if (a == b) continue;
    u.add_row_multiple(a, b, Integer(mult(rng)));
  }
  return u;
}

/// Inverse of a unimodular matrix by exact rational elimination (independent of the Smith code).
inline IntMatrix inverse_unimodular(const IntMatrix& u) {
  const std::size_t n = u.rows();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = u(i, j);
    a[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (a[p][c] == 0) ++p;
    std::swap(a[p], a[c]);
    const Rational piv = a[c][c];
    for (auto& x : a[c]) x /= piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      const Rational f = a[i][c];
      for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  IntMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = a[i][n + j].get_num();
  return out;
}

inline Integer max_abs_entry(const IntMatrix& m) {
  Integer best = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) best = std::max<Integer>(best, abs(m(i, j)));
  return best;
}

/// A nilpotent matrix in Jordan-like form: blocks of the given sizes with superdiagonal
/// entries drawn from [1, max_entry].
inline IntMatrix jordan_form(const std::vector<std::size_t>& blocks, std::mt19937_64& rng, int max_entry) {
  std::size_t n = 0;
  for (auto b : blocks) n += b;
  IntMatrix m(n, n);
  std::uniform_int_distribution<int> entry(1, max_entry);
  std::size_t at = 0;
  for (auto b : blocks) {
    for (std::size_t k = 1; k < b; ++k) m(at + k - 1, at + k) = entry(rng);
    at += b;
  }
  return m;
}

struct NilpotentSample {
  IntMatrix matrix;
  std::vector<std::size_t> blocks;
};

/// Random nilpotent integer matrix of size <= max_size with entries bounded by max_abs, built by
/// conjugating a Jordan form by a unimodular matrix. Block sizes are recorded for oracles.
inline NilpotentSample random_nilpotent(std::mt19937_64& rng, std::size_t max_size = 8, int max_abs = 20) {
  std::uniform_int_distribution<std::size_t> size_dist(1, max_size);
  const std::size_t n = size_dist(rng);
  std::vector<std::size_t> blocks;
  std::size_t left = n;
  while (left > 0) {
    std::uniform_int_distribution<std::size_t> b(1, left);
    blocks.push_back(b(rng));
    left -= blocks.back();
  }
  std::uniform_int_distribution<int> unit_or_not(0, 2);
  const int max_entry = unit_or_not(rng) == 0 ? 1 : 6;
  const IntMatrix j = jordan_form(blocks, rng, max_entry);
  for (int ops = static_cast<int>(2 * n); ops >= 0; --ops) {
    const IntMatrix u = random_unimodular(n, rng, ops);
    const IntMatrix m = u * j * inverse_unimodular(u);
    if (max_abs_entry(m) <= max_abs) return {m, blocks};
  }
  return {j, blocks};
}

/// Graded ranks at i = -d..d from Jordan block sizes: a block of size s contributes to
/// i = -(s-1), -(s-3), ..., s-1.
inline std::vector<std::size_t> jordan_graded_ranks(const std::vector<std::size_t>& blocks, int d) {
  std::vector<std::size_t> out(static_cast<std::size_t>(2 * d + 1), 0);
  for (auto s : blocks)
    for (int i = -static_cast<int>(s) + 1; i <= static_cast<int>(s) - 1; i += 2) ++out[static_cast<std::size_t>(i + d)];
  return out;
}

/// gcd of two polynomials over F_ell (coefficients low degree first); returns the degree of the gcd,
/// with -1 meaning both are zero.
inline int gcd_degree_mod(const IntPoly& a, const IntPoly& b, std::uint64_t ell) {
  const wmt::Fp F{ell};
  const auto reduce = [&](const IntPoly& p) {
    std::vector<std::uint64_t> c;
    for (const auto& x : p.coeffs()) c.push_back(F.reduce(x));
    while (!c.empty() && c.back() == 0) c.pop_back();
    return c;
  };
  std::vector<std::uint64_t> x = reduce(a), y = reduce(b);
  while (!y.empty()) {
    // x mod y
    const std::uint64_t inv = F.inv(y.back());
    while (x.size() >= y.size()) {
      const std::uint64_t f = F.mul(x.back(), inv);
      const std::size_t shift = x.size() - y.size();
      for (std::size_t i = 0; i < y.size(); ++i) x[shift + i] = F.sub(x[shift + i], F.mul(f, y[i]));
      while (!x.empty() && x.back() == 0) x.pop_back();
      if (x.empty()) break;
    }
    std::swap(x, y);
  }
  return static_cast<int>(x.size()) - 1;
}

}  // namespace testing_support
