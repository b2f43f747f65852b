#pragma once

#include "wmt/matrix.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wmt {

/// Components are numbered 1..m; a stratum is the sorted list I of components meeting in D_I.
using MultiIndex = std::vector<int>;

/// H^degree of one stratum piece: a free module of the given rank, optionally with frobenius.
struct CohomologyGroup {
  int degree = 0;
  std::size_t rank = 0;
  std::optional<IntMatrix> frobenius;

  friend bool operator==(const CohomologyGroup&, const CohomologyGroup&) = default;
};

struct Stratum {
  MultiIndex components;
  std::vector<CohomologyGroup> cohomology;

  /// Rank of H^j, 0 when not listed.
  std::size_t rank(int j) const;
  const CohomologyGroup* group(int j) const;
  friend bool operator==(const Stratum&, const Stratum&) = default;
};

/// A restriction H^j(D_I) -> H^j(D_{I+k}) or a Gysin map H^j(D_{I+k}) -> H^{j+2}(D_I).
/// `from`/`to` name the strata; `degree` is the source degree j. Matrices are the geometric maps;
/// the alternating signs of the differential are applied at assembly.
struct BoundaryMap {
  MultiIndex from;
  MultiIndex to;
  int degree = 0;
  IntMatrix matrix;

  friend bool operator==(const BoundaryMap&, const BoundaryMap&) = default;
};

/// Combinatorial and cohomological data of a strictly semistable degeneration: components,
/// nonempty intersections, free cohomology of each piece and the maps between them.
struct DegenerationDescriptor {
  std::string name;
  int relative_dimension = 0;
  int components = 0;
  std::vector<Stratum> strata;
  std::vector<BoundaryMap> restrictions;
  std::vector<BoundaryMap> gysin;
  /// Residue field size; needed only for weight certification of rows.
  std::optional<Integer> q;
  /// Optional Betti numbers of the generic fiber, degree -> rank.
  std::map<int, std::size_t> claimed_total_ranks;

  /// Dimension of D_I: d - |I| + 1.
  int dimension(const MultiIndex& i) const { return relative_dimension - static_cast<int>(i.size()) + 1; }
  const Stratum* find(const MultiIndex& i) const;
  /// Strata with |I| = level + 1, sorted lexicographically.
  std::vector<const Stratum*> level(int level) const;
  const BoundaryMap* find_restriction(const MultiIndex& from, const MultiIndex& to, int degree) const;
  const BoundaryMap* find_gysin(const MultiIndex& from, const MultiIndex& to, int degree) const;
  bool has_frobenius() const;

  friend bool operator==(const DegenerationDescriptor&, const DegenerationDescriptor&) = default;
};

/// Structural validation; throws DescriptorError with a field path. Does not check d1 o d1 = 0,
/// which assembly does.
void validate(const DegenerationDescriptor& d);

std::string to_string(const MultiIndex& i);

}  // namespace wmt
