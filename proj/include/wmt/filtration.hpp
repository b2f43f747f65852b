#pragma once

#include "wmt/execution.hpp"
#include "wmt/linalg.hpp"

#include <map>
#include <vector>

namespace wmt {

/// A nilpotent endomorphism N of Z^r with its nilpotency index d: N^(d+1) = 0 and
/// either d = 0 or N^d != 0. Validated at construction.
class NilpotentOperator {
public:
  explicit NilpotentOperator(IntMatrix n);

  const Lattice& space() const { return space_; }
  const IntMatrix& matrix() const { return n_; }
  LatticeMap map() const { return LatticeMap(space_, space_, n_); }
  int nilpotency_index() const { return index_; }
  std::size_t rank() const { return space_.rank; }

private:
  Lattice space_;
  IntMatrix n_;
  int index_ = 0;
};

/// Increasing chain of saturated sublattices M_i for i in [i_min, i_max];
/// M_i = 0 below the window and M_i = whole lattice from i_max on.
class MonodromyFiltration {
public:
  MonodromyFiltration() = default;
  MonodromyFiltration(std::size_t rank, int i_min, std::vector<Sublattice> steps);

  std::size_t rank() const { return rank_; }
  int i_min() const { return i_min_; }
  int i_max() const { return i_min_ + static_cast<int>(steps_.size()) - 1; }
  /// M_i for any integer i, clamped outside the window.
  const Sublattice& step(int i) const;
  std::size_t graded_rank(int i) const { return step(i).rank() - step(i - 1).rank(); }

  friend bool operator==(const MonodromyFiltration& a, const MonodromyFiltration& b) {
    return a.rank_ == b.rank_ && a.i_min_ == b.i_min_ && a.steps_ == b.steps_;
  }

private:
  std::size_t rank_ = 0;
  int i_min_ = 0;
  std::vector<Sublattice> steps_;
  Sublattice zero_;
  Sublattice full_;
};

/// The monodromy filtration of N over Q, returned as its saturated integral steps.
/// Window [-d, d] where d is the nilpotency index.
MonodromyFiltration monodromy_filtration_rational(const NilpotentOperator& op);

/// Matrix of N^i : Gr_i -> Gr_{-i} in the deterministic graded bases.
IntMatrix graded_map(const NilpotentOperator& op, const MonodromyFiltration& fil, int i);

/// Elementary divisors of N^i : Gr_i -> Gr_{-i}; empty outside the window.
ElementaryDivisors graded_map_invariants(const NilpotentOperator& op, const MonodromyFiltration& fil, int i);

/// i -> invariants of coker(N^i) on the whole lattice, for 0 <= i <= d + 1
/// (the entry d + 1 stands for every larger i, where N^i = 0).
std::map<int, ElementaryDivisors> cokernel_torsion_freeness(const NilpotentOperator& op,
                                                            Execution exec = Execution::sequential);

struct BadPrimeWitness {
  Integer prime;
  int level = 0;
  Integer divisor;
  enum class Source { cokernel, graded } source = Source::cokernel;
};

struct NilpotentBadPrimes {
  PrimeSet primes;
  std::vector<BadPrimeWitness> provenance;
};

/// Primes at which some coker(N^i) has torsion. The same set is recomputed from the graded
/// maps N^i : Gr_i -> Gr_{-i}; a disagreement raises AssertionFailure.
NilpotentBadPrimes bad_primes_of_nilpotent(const NilpotentOperator& op, Execution exec = Execution::sequential);

}  // namespace wmt
