#include "wmt/normal_form.hpp"

#include <algorithm>
#include <optional>
#include <utility>

namespace wmt {

namespace {
int cmpabs(const Integer& a, const Integer& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }
}  // namespace

std::vector<Integer> SmithForm::diagonal() const {
  const std::size_t n = std::min(D.rows(), D.cols());
  std::vector<Integer> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = D(i, i);
  return d;
}

namespace {

struct SmithWorker {
  SmithForm f;

  void row_swap(std::size_t a, std::size_t b) {
    f.D.swap_rows(a, b);
    f.U.swap_rows(a, b);
    f.U_inv.swap_cols(a, b);
  }
  void col_swap(std::size_t a, std::size_t b) {
    f.D.swap_cols(a, b);
    f.V.swap_cols(a, b);
    f.V_inv.swap_rows(a, b);
  }
  // row[dst] += k row[src]
  void row_add(std::size_t dst, std::size_t src, const Integer& k) {
    f.D.add_row_multiple(dst, src, k);
    f.U.add_row_multiple(dst, src, k);
    f.U_inv.add_col_multiple(src, dst, -k);
  }
  // col[dst] += k col[src]
  void col_add(std::size_t dst, std::size_t src, const Integer& k) {
    f.D.add_col_multiple(dst, src, k);
    f.V.add_col_multiple(dst, src, k);
    f.V_inv.add_row_multiple(src, dst, -k);
  }
  void row_negate(std::size_t r) {
    f.D.negate_row(r);
    f.U.negate_row(r);
    f.U_inv.negate_col(r);
  }

  // Smallest |entry| in the trailing block starting at (t, t); first in row-major order.
  std::optional<std::pair<std::size_t, std::size_t>> min_entry(std::size_t t) const {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t i = t; i < f.D.rows(); ++i)
      for (std::size_t j = t; j < f.D.cols(); ++j) {
        const Integer& x = f.D(i, j);
        if (sgn(x) == 0) continue;
        if (!best || cmpabs(x, f.D(best->first, best->second)) < 0) best = {{i, j}};
      }
    return best;
  }

  // Smallest |entry| among row t and column t (trailing parts), used after a failed clear.
  std::pair<std::size_t, std::size_t> min_in_cross(std::size_t t) const {
    std::pair<std::size_t, std::size_t> best{t, t};
    for (std::size_t i = t; i < f.D.rows(); ++i)
      if (sgn(f.D(i, t)) != 0 && (sgn(f.D(best.first, best.second)) == 0 ||
                                  cmpabs(f.D(i, t), f.D(best.first, best.second)) < 0))
        best = {i, t};
    for (std::size_t j = t; j < f.D.cols(); ++j)
      if (sgn(f.D(t, j)) != 0 && cmpabs(f.D(t, j), f.D(best.first, best.second)) < 0) best = {t, j};
    return best;
  }

  void run() {
    const std::size_t m = f.D.rows(), n = f.D.cols();
    std::size_t t = 0;
    for (; t < std::min(m, n); ++t) {
      auto pivot = min_entry(t);
      if (!pivot) break;
      row_swap(t, pivot->first);
      col_swap(t, pivot->second);
      for (;;) {
        bool clean = true;
        for (std::size_t i = t + 1; i < m; ++i) {
          if (sgn(f.D(i, t)) == 0) continue;
          Integer q;
          mpz_tdiv_q(q.get_mpz_t(), f.D(i, t).get_mpz_t(), f.D(t, t).get_mpz_t());
          row_add(i, t, -q);
          if (sgn(f.D(i, t)) != 0) clean = false;
        }
        for (std::size_t j = t + 1; j < n; ++j) {
          if (sgn(f.D(t, j)) == 0) continue;
          Integer q;
          mpz_tdiv_q(q.get_mpz_t(), f.D(t, j).get_mpz_t(), f.D(t, t).get_mpz_t());
          col_add(j, t, -q);
          if (sgn(f.D(t, j)) != 0) clean = false;
        }
        if (!clean) {
          auto [pi, pj] = min_in_cross(t);
          row_swap(t, pi);
          col_swap(t, pj);
          continue;
        }
        // Row and column are cleared; enforce divisibility on the trailing block.
        std::optional<std::size_t> offending;
        for (std::size_t i = t + 1; i < m && !offending; ++i)
          for (std::size_t j = t + 1; j < n; ++j)
            if (!mpz_divisible_p(f.D(i, j).get_mpz_t(), f.D(t, t).get_mpz_t())) {
              offending = i;
              break;
            }
        if (!offending) break;
        row_add(t, *offending, 1);
      }
      if (sgn(f.D(t, t)) < 0) row_negate(t);
    }
    f.rank = t;
  }
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a) {
  SmithWorker w;
  w.f.U = IntMatrix::identity(a.rows());
  w.f.U_inv = IntMatrix::identity(a.rows());
  w.f.V = IntMatrix::identity(a.cols());
  w.f.V_inv = IntMatrix::identity(a.cols());
  w.f.D = a;
  w.run();
  return std::move(w.f);
}

IntMatrix column_hermite_form(const IntMatrix& generators) {
  // Row HNF of the transpose: rows generate the lattice.
  IntMatrix h = generators.transpose();
  const std::size_t k = h.rows(), n = h.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < k; ++c) {
    for (;;) {
      std::optional<std::size_t> best;
      for (std::size_t i = r; i < k; ++i)
        if (sgn(h(i, c)) != 0 && (!best || cmpabs(h(i, c), h(*best, c)) < 0)) best = i;
      if (!best) break;
      h.swap_rows(r, *best);
      bool alone = true;
      for (std::size_t i = r + 1; i < k; ++i) {
        if (sgn(h(i, c)) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), h(i, c).get_mpz_t(), h(r, c).get_mpz_t());
        h.add_row_multiple(i, r, -q);
        if (sgn(h(i, c)) != 0) alone = false;
      }
      if (alone) break;
    }
    if (sgn(h(r, c)) == 0) continue;
    if (sgn(h(r, c)) < 0) h.negate_row(r);
    for (std::size_t i = 0; i < r; ++i) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), h(i, c).get_mpz_t(), h(r, c).get_mpz_t());
      h.add_row_multiple(i, r, -q);
    }
    ++r;
  }
  return h.rows_range(0, r).transpose();
}

}  // namespace wmt
