#pragma once

#include "wmt/descriptor.hpp"
#include "wmt/execution.hpp"
#include "wmt/linalg.hpp"
#include "wmt/modular.hpp"
#include "wmt/weil.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace wmt {

/// Differential signs: the restriction D_I -> D_{I+k} and the Gysin map D_{I+k} -> D_I both carry
/// (-1)^#{x in I : x < k}.
inline constexpr const char* kSignConvention = "alternating-position-v1";
/// Bases: summands by increasing twist i, strata lexicographic, E2 free parts by the complement of
/// the saturated boundaries in the Smith-adapted kernel basis.
inline constexpr const char* kBasisConvention = "lex-strata-smith-complement-v1";

using Bidegree = std::pair<int, int>;  // (v, w)

/// H^degree(Y^(level))(-twist) inside an E1 entry; twist = i.
struct E1Summand {
  int twist = 0;
  int level = 0;
  int degree = 0;
  std::size_t offset = 0;
  std::size_t rank = 0;
};

struct E1Entry {
  Bidegree at;
  Lattice lattice;
  std::vector<E1Summand> summands;
};

/// The first page: entries on the window -d <= v <= d, 0 <= w <= 2d and the differentials
/// E1^{v,w} -> E1^{v+1,w}. Tate twists are erased; each summand keeps its twist.
struct SpectralPage {
  int relative_dimension = 0;
  std::map<Bidegree, E1Entry> entries;
  std::map<Bidegree, LatticeMap> differentials;

  /// Zero entry outside the window.
  E1Entry entry(int v, int w) const;
  std::size_t rank(int v, int w) const { return entry(v, w).lattice.rank; }
  /// d1 out of (v, w); the zero map where nothing is stored.
  IntMatrix d1(int v, int w) const;
  bool in_window(int v, int w) const;
};

/// Entries only.
SpectralPage assemble_E1(const DegenerationDescriptor& desc);
/// Fills page.differentials from the descriptor's maps. Throws DescriptorError naming the offending
/// square if d1 o d1 != 0, or if d1 does not commute with the twisted frobenius when one is given.
void assemble_d1(const DegenerationDescriptor& desc, SpectralPage& page);
/// validate + assemble_E1 + assemble_d1.
SpectralPage assemble_page(const DegenerationDescriptor& desc);

/// The monodromy operator E1^{v,w} -> E1^{v+2,w-2}: identity from summand i to summand i-1, zero on i = 0.
IntMatrix monodromy_shift(const SpectralPage& page, int v, int w);
/// Checks shift o d1 = d1 o shift on every entry.
bool shift_commutes_with_d1(const SpectralPage& page);

/// E2^{v,w} over Z: ker d1 / im d1 split as free part plus torsion.
struct E2Entry {
  Bidegree at;
  std::size_t e1_rank = 0;
  std::size_t free_rank = 0;
  /// Torsion elementary divisors (all > 1).
  std::vector<Integer> torsion;
  PrimeSet torsion_primes;
  /// Primes at which dim E2 over F_ell exceeds the free rank: torsion of this entry and of the
  /// next one in the row (universal coefficients).
  PrimeSet reduction_primes;
  /// Kernel of the outgoing d1 (columns, E1 coordinates).
  IntMatrix cycles;
  /// Saturation of the incoming image, as coordinates in `cycles`.
  IntMatrix boundaries_in_cycles;
  /// Complement of the saturated boundaries, as coordinates in `cycles`.
  IntMatrix free_in_cycles;
  /// cycles * free_in_cycles: representatives of a basis of the free part.
  IntMatrix free_basis;
};

using E2Page = std::map<Bidegree, E2Entry>;

E2Page compute_E2(const SpectralPage& page, Execution exec = Execution::sequential);

/// E2^{v,w} over F_ell, ell < 2^31 prime.
struct E2ModEntry {
  Bidegree at;
  std::uint64_t ell = 0;
  std::size_t dim = 0;
  FpMatrix cycles;
  /// Basis of the boundaries followed by a complement: a basis of the cycles.
  FpMatrix adapted;
  std::size_t boundary_dim = 0;
};

using E2ModPage = std::map<Bidegree, E2ModEntry>;

E2ModPage compute_E2_mod(const SpectralPage& page, std::uint64_t ell, Execution exec = Execution::sequential);

struct VerdictPrime {
  Integer prime;
  std::string reason;
  /// dim E2 over F_ell of source and target, rank of the induced map (when ell < 2^31).
  std::size_t source_dim = 0;
  std::size_t target_dim = 0;
  std::size_t map_rank = 0;
  bool checked_mod_ell = false;
};

struct MonodromyLevel {
  int i = 0;
  Bidegree source;
  Bidegree target;
  std::size_t source_rank = 0;
  std::size_t target_rank = 0;
  /// Both sides are zero.
  bool trivial = false;
  bool rational_iso = false;
  /// The induced map on the free parts, in the E2 bases.
  IntMatrix matrix;
  ElementaryDivisors divisors;
  PrimeSet bad_primes;
  std::vector<VerdictPrime> provenance;
};

struct MonodromyVerdict {
  int w = 0;
  std::vector<MonodromyLevel> levels;
  std::string sign_convention = kSignConvention;
  std::string basis_convention = kBasisConvention;

  bool rational_iso() const;
  PrimeSet bad_primes() const;
};

/// N^i : E2^{-i,w+i} -> E2^{i,w-i} for 0 <= i <= d. Bad primes are those ell where the map on E2
/// over F_ell is not an isomorphism; candidates come from the divisors and the torsion of both
/// ends and each candidate is checked exactly.
MonodromyVerdict monodromy_on_E2(const SpectralPage& page, const E2Page& e2, int w,
                                 Execution exec = Execution::sequential);
MonodromyVerdict monodromy_on_E2(const DegenerationDescriptor& desc, int w, Execution exec = Execution::sequential);

struct RankConsistency {
  struct Degree {
    int n = 0;
    std::size_t computed = 0;
    std::size_t claimed = 0;
    bool consistent = false;
  };
  std::vector<Degree> degrees;
  bool consistent() const;
};

/// Sum over v + w = n of rank E2^{v,w} against the claimed Betti numbers (missing claims count as 0).
RankConsistency total_rank_consistency(const E2Page& e2, const std::map<int, std::size_t>& claimed);

/// Row-by-row weight certification from the stratum frobenii (twisted by q^i).
struct RowWeight {
  int w = 0;
  IntPoly characteristic;
  WeilCertificate certificate;
};

struct D2Vanishing {
  /// d2 : E2^{v,w} -> E2^{v+2,w-1}.
  int w = 0;
  bool certified = false;
  PrimeSet exceptional;
};

struct WeightReport {
  bool available = false;
  std::string reason;
  std::vector<RowWeight> rows;
  std::vector<D2Vanishing> d2;
};

/// Twisted frobenius on E1^{v,w}; requires frobenius data on every nonzero group.
IntMatrix e1_frobenius(const DegenerationDescriptor& desc, const SpectralPage& page, int v, int w);
WeightReport weight_report(const DegenerationDescriptor& desc, const SpectralPage& page);

}  // namespace wmt
