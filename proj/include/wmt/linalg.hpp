#pragma once

#include "wmt/matrix.hpp"
#include "wmt/normal_form.hpp"
#include "wmt/primes.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wmt {

/// The standard integer module Z^rank; models a torsion-free cohomology group.
struct Lattice {
  std::size_t rank = 0;
  std::string label;

  friend bool operator==(const Lattice& a, const Lattice& b) { return a.rank == b.rank; }
};

/// An integer matrix of shape (target.rank x source.rank).
class LatticeMap {
public:
  LatticeMap() = default;
  LatticeMap(IntMatrix matrix);  // NOLINT: shapes define the lattices
  LatticeMap(Lattice source, Lattice target, IntMatrix matrix);

  const Lattice& source() const { return source_; }
  const Lattice& target() const { return target_; }
  const IntMatrix& matrix() const { return matrix_; }

private:
  Lattice source_;
  Lattice target_;
  IntMatrix matrix_;
};

/// d_1 | d_2 | ... | d_r followed by zeros for the rank defect.
struct ElementaryDivisors {
  std::vector<Integer> divisors;

  bool all_units() const;
  /// No nonzero divisor exceeds 1, i.e. the cokernel is torsion-free.
  bool torsion_free() const;
  std::size_t zero_count() const;
  friend bool operator==(const ElementaryDivisors&, const ElementaryDivisors&) = default;
};

/// A sublattice of Z^ambient stored by its column Hermite basis (full column rank),
/// so equality of sublattices is equality of the stored matrices.
class Sublattice {
public:
  Sublattice() = default;
  /// Canonicalizes: `generators` may be dependent.
  Sublattice(std::size_t ambient, const IntMatrix& generators);

  static Sublattice zero(std::size_t ambient);
  static Sublattice full(std::size_t ambient);

  std::size_t ambient() const { return ambient_; }
  std::size_t rank() const { return basis_.cols(); }
  const IntMatrix& basis() const { return basis_; }

  bool contains(std::span<const Integer> v) const;
  bool contains(const Sublattice& other) const;
  /// Integer coordinates of v in basis(), if v lies in the sublattice.
  std::optional<std::vector<Integer>> coordinates(std::span<const Integer> v) const;

  friend bool operator==(const Sublattice& a, const Sublattice& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }

private:
  std::size_t ambient_ = 0;
  IntMatrix basis_;
};

Sublattice operator+(const Sublattice& a, const Sublattice& b);

SmithForm smith_normal_form(const LatticeMap& m);
/// Saturated kernel in the source lattice.
Sublattice kernel(const LatticeMap& m);
/// Image in the target lattice (not saturated).
Sublattice image(const LatticeMap& m);
/// {x : k x in s for some k >= 1}.
Sublattice saturate(const Sublattice& s);
bool is_saturated(const Sublattice& s);
/// Invariants of target / image, one entry per target coordinate.
ElementaryDivisors cokernel_invariants(const LatticeMap& m);
/// Primes dividing some divisor not in {0, 1}.
PrimeSet torsion_primes(const ElementaryDivisors& e);
/// Rank over Q.
std::size_t rational_rank(const IntMatrix& m);
/// Rank of the reduction modulo a prime ell < 2^31.
std::size_t rank_mod_ell(const LatticeMap& m, std::uint64_t ell);

/// Basis of `outer` split as (basis of `inner`, complement). Both must be saturated and
/// inner contained in outer. The concatenation is a basis of outer.
struct AdaptedBasis {
  IntMatrix inner;
  IntMatrix complement;
  IntMatrix full() const { return hstack(inner, complement); }
};
AdaptedBasis adapted_basis(const Sublattice& inner, const Sublattice& outer);

/// Solves B x = y over Z for a fixed B of full column rank; the Smith form is computed once.
class BasisSolver {
public:
  explicit BasisSolver(IntMatrix basis);
  std::optional<std::vector<Integer>> solve(std::span<const Integer> y) const;
  const IntMatrix& basis() const { return basis_; }

private:
  IntMatrix basis_;
  SmithForm snf_;
};

/// Exact integer solution x of B x = y for B of full column rank, if one exists.
std::optional<std::vector<Integer>> solve_in_basis(const IntMatrix& basis, std::span<const Integer> y);

/// Solves B X = Y column by column; throws AssertionFailure if some column is not in the span.
IntMatrix solve_columns(const IntMatrix& basis, const IntMatrix& y);

}  // namespace wmt
