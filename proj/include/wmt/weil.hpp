#pragma once

#include "wmt/execution.hpp"
#include "wmt/linalg.hpp"
#include "wmt/polynomial.hpp"
#include "wmt/primes.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wmt {

/// What the Sturm stage saw for one irreducible factor f of degree e.
struct FactorTranscript {
  IntPoly factor;
  unsigned multiplicity = 1;
  /// f(T) divides T^e f(q^w / T).
  bool symmetric = false;
  /// Res_x(f(x), x^2 - T x + q^w): its roots are alpha + q^w / alpha.
  IntPoly trace_polynomial;
  IntPoly trace_square_free;
  std::size_t real_roots = 0;
  /// Roots of the square-free trace polynomial at exactly +-2 sqrt(q^w).
  std::size_t boundary_roots = 0;
  /// Final rational brackets inner < 2 sqrt(q^w) <= outer (equal when q^w is a square).
  Rational inner;
  Rational outer;
  std::size_t roots_within_inner = 0;
  std::size_t roots_within_outer = 0;
  std::size_t refinements = 0;
  bool certified = false;

  std::string describe() const;
};

/// Why a polynomial is not Weil: the factor and the failing stage.
struct WeilWitness {
  enum class Kind { not_self_reciprocal, nonreal_trace, trace_outside_band };
  Kind kind = Kind::not_self_reciprocal;
  IntPoly factor;
  /// For trace_outside_band: (lo, hi] isolates a trace root with |t| > 2 sqrt(q^w); the matching
  /// root alpha of the factor is real and alpha^2 != q^w.
  std::optional<std::pair<Rational, Rational>> interval;
  /// For nonreal_trace: number of non-real roots of the square-free trace polynomial.
  std::size_t nonreal_count = 0;

  std::string describe() const;
};

struct WeilCertificate {
  enum class Status { certified, refuted };

  IntPoly polynomial;
  Integer q;
  int w = 0;
  Status status = Status::refuted;
  std::vector<FactorTranscript> factors;
  std::optional<WeilWitness> witness;

  bool certified() const { return status == Status::certified; }
  /// q^w
  Integer target_modulus_squared() const;
};

const char* to_string(WeilCertificate::Status s);
const char* to_string(WeilWitness::Kind k);

/// Decides exactly whether every complex root of the monic polynomial p has |root|^2 = q^w.
/// Rejects non-monic input, q that is not a prime power, and w < 0 with PreconditionError.
WeilCertificate certify_weil(const IntPoly& p, const Integer& q, int w, Execution exec = Execution::sequential);

/// One irreducible factor run through the symmetry and Sturm stages; target = q^w.
FactorTranscript certify_factor(const IntPoly& f, const Integer& target, WeilWitness* witness = nullptr);

/// prod over roots alpha of (T^(fn) - alpha^n) = Res_x(p(x), T^(fn) - x^n), monic. Requires p monic, f, n >= 1.
IntPoly finite_extension_transform(const IntPoly& p, int f, int n);

/// Primes outside which p1 and p2 generate the unit ideal mod ell: denominators of the Bezout
/// cofactors, plus primes dividing both leading coefficients. Throws PreconditionError
/// ("not relatively prime") when gcd(p1, p2) is non-constant over Q.
PrimeSet bezout_bad_primes(const IntPoly& p1, const IntPoly& p2);

struct Annihilation {
  /// p(frob) == 0 over Z.
  bool integral = false;
  /// gcd of the entries of p(frob); 0 when integral.
  Integer content;
  /// Primes modulo which p(frob) vanishes, when not integral (the primes of the content).
  PrimeSet primes;
  IntMatrix value;

  std::string describe() const;
};

Annihilation annihilation_exceptional_primes(const LatticeMap& frob, const IntPoly& p);

}  // namespace wmt
