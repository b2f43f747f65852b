#pragma once

#include "wmt/polynomial.hpp"

#include <utility>
#include <vector>

namespace wmt {

/// p = unit * prod f_i^(m_i), each f_i primitive, irreducible over Q, with positive leading coefficient.
struct Factorization {
  Integer unit;  // signed content
  std::vector<std::pair<IntPoly, unsigned>> factors;

  IntPoly expand() const;
};

/// Yun's decomposition: primitive square-free parts with their multiplicities (content dropped).
std::vector<std::pair<IntPoly, unsigned>> square_free_decomposition(const IntPoly& p);

/// Irreducible factors of a primitive square-free polynomial (Zassenhaus: Berlekamp-free
/// Cantor-Zassenhaus mod a small prime, Hensel lifting, subset recombination).
std::vector<IntPoly> factor_square_free(const IntPoly& p);

/// Complete factorization over Q. Factors are sorted by degree, then coefficients.
Factorization factor(const IntPoly& p);

}  // namespace wmt
