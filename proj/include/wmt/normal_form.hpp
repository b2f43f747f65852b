#pragma once

#include "wmt/matrix.hpp"

#include <vector>

namespace wmt {

/// U * A * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ... | d_r, then zeros.
/// The inverses are tracked alongside so callers never invert a unimodular matrix.
struct SmithForm {
  IntMatrix U, U_inv;
  IntMatrix D;
  IntMatrix V, V_inv;
  std::size_t rank = 0;

  /// Diagonal of D, length min(rows, cols).
  std::vector<Integer> diagonal() const;
};

/// Deterministic pivoting: the smallest nonzero entry in absolute value, first in row-major
/// order among ties, is moved to the pivot position.
SmithForm smith_normal_form(const IntMatrix& a);

/// Column Hermite normal form of the lattice spanned by the columns of `generators`.
/// The result has full column rank; as rows of its transpose it is in echelon form with
/// strictly increasing pivot positions, positive pivots, and entries above each pivot
/// reduced into [0, pivot). Two generator sets span the same lattice iff the results are equal.
IntMatrix column_hermite_form(const IntMatrix& generators);

}  // namespace wmt
