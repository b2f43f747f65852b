#include "wmt/linalg.hpp"

#include "wmt/errors.hpp"
#include "wmt/modular.hpp"

#include <algorithm>
#include <stdexcept>

namespace wmt {

LatticeMap::LatticeMap(IntMatrix matrix)
    : source_{matrix.cols(), {}}, target_{matrix.rows(), {}}, matrix_(std::move(matrix)) {}

LatticeMap::LatticeMap(Lattice source, Lattice target, IntMatrix matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != target_.rank || matrix_.cols() != source_.rank)
    throw PreconditionError("lattice map shape does not match source/target ranks");
}

bool ElementaryDivisors::all_units() const {
  return std::all_of(divisors.begin(), divisors.end(), [](const Integer& d) { return d == 1; });
}

bool ElementaryDivisors::torsion_free() const {
  return std::all_of(divisors.begin(), divisors.end(),
                     [](const Integer& d) { return sgn(d) == 0 || d == 1; });
}

std::size_t ElementaryDivisors::zero_count() const {
  return static_cast<std::size_t>(
      std::count_if(divisors.begin(), divisors.end(), [](const Integer& d) { return sgn(d) == 0; }));
}

Sublattice::Sublattice(std::size_t ambient, const IntMatrix& generators) : ambient_(ambient) {
  if (generators.rows() != ambient && !(generators.cols() == 0))
    throw std::invalid_argument("sublattice generators have wrong ambient dimension");
  basis_ = generators.cols() == 0 ? IntMatrix(ambient, 0) : column_hermite_form(generators);
}

Sublattice Sublattice::zero(std::size_t ambient) { return Sublattice(ambient, IntMatrix(ambient, 0)); }

Sublattice Sublattice::full(std::size_t ambient) {
  return Sublattice(ambient, IntMatrix::identity(ambient));
}

bool Sublattice::contains(std::span<const Integer> v) const { return coordinates(v).has_value(); }

bool Sublattice::contains(const Sublattice& other) const {
  if (other.ambient_ != ambient_) return false;
  BasisSolver solver(basis_);
  for (std::size_t j = 0; j < other.rank(); ++j) {
    auto col = other.basis_.column(j);
    if (!solver.solve(col)) return false;
  }
  return true;
}

std::optional<std::vector<Integer>> Sublattice::coordinates(std::span<const Integer> v) const {
  return solve_in_basis(basis_, v);
}

Sublattice operator+(const Sublattice& a, const Sublattice& b) {
  if (a.ambient() != b.ambient()) throw std::invalid_argument("sum of sublattices in different lattices");
  return Sublattice(a.ambient(), hstack(a.basis(), b.basis()));
}

BasisSolver::BasisSolver(IntMatrix basis) : basis_(std::move(basis)), snf_(smith_normal_form(basis_)) {
  if (snf_.rank != basis_.cols()) throw std::invalid_argument("BasisSolver requires full column rank");
}

std::optional<std::vector<Integer>> BasisSolver::solve(std::span<const Integer> y) const {
  const std::size_t n = basis_.rows(), k = basis_.cols();
  if (y.size() != n) throw std::invalid_argument("solve: vector length mismatch");
  std::vector<Integer> z = snf_.U * y;
  std::vector<Integer> w(k);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < k) {
      if (!mpz_divisible_p(z[i].get_mpz_t(), snf_.D(i, i).get_mpz_t())) return std::nullopt;
      mpz_divexact(w[i].get_mpz_t(), z[i].get_mpz_t(), snf_.D(i, i).get_mpz_t());
    } else if (sgn(z[i]) != 0) {
      return std::nullopt;
    }
  }
  return snf_.V * std::span<const Integer>(w);
}

std::optional<std::vector<Integer>> solve_in_basis(const IntMatrix& basis, std::span<const Integer> y) {
  return BasisSolver(basis).solve(y);
}

IntMatrix solve_columns(const IntMatrix& basis, const IntMatrix& y) {
  IntMatrix x(basis.cols(), y.cols());
  if (y.cols() == 0) return x;
  BasisSolver solver(basis);
  for (std::size_t j = 0; j < y.cols(); ++j) {
    auto col = y.column(j);
    auto sol = solver.solve(col);
    if (!sol) throw AssertionFailure("vector expected in lattice span is not an integer combination");
    for (std::size_t i = 0; i < x.rows(); ++i) x(i, j) = (*sol)[i];
  }
  return x;
}

SmithForm smith_normal_form(const LatticeMap& m) { return smith_normal_form(m.matrix()); }

Sublattice kernel(const LatticeMap& m) {
  const auto& a = m.matrix();
  const std::size_t n = m.source().rank;
  if (a.rows() == 0) return Sublattice::full(n);
  SmithForm f = smith_normal_form(a);
  return Sublattice(n, f.V.columns(f.rank, n - f.rank));
}

Sublattice image(const LatticeMap& m) { return Sublattice(m.target().rank, m.matrix()); }

Sublattice saturate(const Sublattice& s) {
  if (s.rank() == 0) return s;
  SmithForm f = smith_normal_form(s.basis());
  return Sublattice(s.ambient(), f.U_inv.columns(0, f.rank));
}

bool is_saturated(const Sublattice& s) { return saturate(s) == s; }

ElementaryDivisors cokernel_invariants(const LatticeMap& m) {
  const std::size_t rows = m.target().rank;
  ElementaryDivisors e;
  e.divisors.assign(rows, Integer(0));
  if (m.matrix().cols() == 0 || rows == 0) return e;
  SmithForm f = smith_normal_form(m.matrix());
  for (std::size_t i = 0; i < f.rank; ++i) e.divisors[i] = f.D(i, i);
  return e;
}

PrimeSet torsion_primes(const ElementaryDivisors& e) {
  PrimeSet s;
  for (const auto& d : e.divisors) {
    if (sgn(d) == 0 || d == 1) continue;
    auto p = prime_divisors(d);
    s.insert(p.begin(), p.end());
  }
  return s;
}

std::size_t rational_rank(const IntMatrix& m) {
  if (m.empty()) return 0;
  // Fraction-free elimination; only the rank is needed.
  IntMatrix a = m;
  std::size_t r = 0;
  Integer prev = 1;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = r;
    while (p < a.rows() && sgn(a(p, c)) == 0) ++p;
    if (p == a.rows()) continue;
    a.swap_rows(r, p);
    for (std::size_t i = r + 1; i < a.rows(); ++i) {
      for (std::size_t j = c + 1; j < a.cols(); ++j) {
        Integer t = a(r, c) * a(i, j) - a(i, c) * a(r, j);
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        a(i, j) = std::move(t);
      }
      a(i, c) = 0;
    }
    prev = a(r, c);
    ++r;
  }
  return r;
}

std::size_t rank_mod_ell(const LatticeMap& m, std::uint64_t ell) {
  return FpMatrix::reduce(m.matrix(), ell).rank();
}

AdaptedBasis adapted_basis(const Sublattice& inner, const Sublattice& outer) {
  const std::size_t k = outer.rank(), b = inner.rank();
  AdaptedBasis out;
  if (b == 0) {
    out.inner = IntMatrix(outer.ambient(), 0);
    out.complement = outer.basis();
    return out;
  }
  IntMatrix coords = solve_columns(outer.basis(), inner.basis());
  SmithForm f = smith_normal_form(coords);
  for (std::size_t i = 0; i < f.rank; ++i)
    if (f.D(i, i) != 1) throw AssertionFailure("adapted_basis: inner sublattice is not saturated in outer");
  IntMatrix change = outer.basis() * f.U_inv;
  out.inner = change.columns(0, b);
  out.complement = change.columns(b, k - b);
  return out;
}

}  // namespace wmt
