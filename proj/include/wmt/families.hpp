#pragma once

#include "wmt/errors.hpp"
#include "wmt/execution.hpp"
#include "wmt/linalg.hpp"
#include "wmt/modular.hpp"
#include "wmt/weil.hpp"

#include <map>
#include <optional>
#include <string>

namespace wmt {

/// Explicit fiber at one prime, replacing the reduction of the integral model there.
struct FiberOverride {
  std::size_t dimension = 0;
  std::map<std::string, FpMatrix> operators;

  friend bool operator==(const FiberOverride&, const FiberOverride&) = default;
};

/// A weight declared for a family, with the certificate backing it and the annihilation record.
struct DeclaredWeight {
  int w = 0;
  WeilCertificate certificate;
  Annihilation annihilation;
};

/// Mod-ell data for every prime ell, given by one integral model with finitely many explicit
/// exceptions. Fibers away from the exceptions are model (x) F_ell with reduced operators.
class IntegralFamily {
public:
  IntegralFamily() = default;
  /// Requires a square "frobenius" of the model's rank; every operator must be square of that rank.
  /// Overrides must be keyed by primes < 2^31 and carry square operators of their dimension.
  IntegralFamily(Lattice model, std::map<std::string, LatticeMap> operators,
                 std::map<std::uint64_t, FiberOverride> exceptions = {});

  const Lattice& model() const { return model_; }
  const LatticeMap& frobenius() const { return operators_.at("frobenius"); }
  const std::map<std::string, LatticeMap>& operators() const { return operators_; }
  const std::map<std::uint64_t, FiberOverride>& exceptions() const { return exceptions_; }
  const std::optional<DeclaredWeight>& declared_weight() const { return declared_; }

  /// Attaches a weight; requires a certified certificate for w. Records p(frobenius).
  void declare_weight(int w, WeilCertificate certificate);

  std::size_t fiber_dimension(std::uint64_t ell) const;
  /// The named operator on the fiber at ell.
  FpMatrix fiber_operator(const std::string& name, std::uint64_t ell) const;

private:
  Lattice model_;
  std::map<std::string, LatticeMap> operators_;
  std::map<std::uint64_t, FiberOverride> exceptions_;
  std::optional<DeclaredWeight> declared_;
};

/// A map of families commuting with frobenius on the model, with optional per-prime overrides.
class FamilyMap {
public:
  /// Throws PreconditionError when shapes disagree or the model map is not frobenius-equivariant
  /// (exactly over Z; overrides are checked over F_ell against the fiber frobenii).
  FamilyMap(IntegralFamily source, IntegralFamily target, LatticeMap model_map,
            std::map<std::uint64_t, FpMatrix> overrides = {});

  const IntegralFamily& source() const { return source_; }
  const IntegralFamily& target() const { return target_; }
  const LatticeMap& model_map() const { return model_map_; }
  const std::map<std::uint64_t, FpMatrix>& overrides() const { return overrides_; }

  FpMatrix fiber_map(std::uint64_t ell) const;
  /// Primes where some fiber differs from the reduction of the model.
  std::set<std::uint64_t> exceptional_primes() const;

private:
  IntegralFamily source_;
  IntegralFamily target_;
  LatticeMap model_map_;
  std::map<std::uint64_t, FpMatrix> overrides_;
};

/// Raised when no candidate was supplied and the characteristic polynomial of frobenius is not a
/// Weil q^w-polynomial. Carries the refutation.
class NotOfWeight : public Error {
public:
  NotOfWeight(const std::string& what, WeilCertificate certificate)
      : Error(what), certificate_(std::move(certificate)) {}
  const WeilCertificate& certificate() const { return certificate_; }

private:
  WeilCertificate certificate_;
};

struct WeightCertification {
  WeilCertificate certificate;
  /// P(frobenius) on the integral model.
  Annihilation annihilation;
  /// Certified and P(frobenius) = 0 over Z.
  bool succeeded = false;
  /// Exception primes whose override frobenius is not killed by P.
  std::set<std::uint64_t> exceptional;
  /// Only the supplied fibers are checked; "every closed point" is not.
  std::string scope_note;
};

/// Validates `candidate` (or, when absent, the characteristic polynomial of frobenius).
WeightCertification weight_certify_family(const IntegralFamily& fam, const Integer& q, int w,
                                          const std::optional<IntPoly>& candidate = std::nullopt);

struct IsoVerdict {
  enum class Kind {
    /// Fibers are isomorphisms outside `bad`.
    almost_all,
    /// The model map is not rationally invertible, so no fiber outside the exceptions is.
    no_ell,
    /// Source and target ranks differ.
    rank_mismatch
  };
  Kind kind = Kind::almost_all;
  PrimeSet bad;
  /// Why each bad prime is bad.
  std::map<Integer, std::string> provenance;
  ElementaryDivisors divisors;
  /// Exception primes whose explicit fiber map is an isomorphism (removed from the bad set).
  std::set<std::uint64_t> rescued;
};

const char* to_string(IsoVerdict::Kind k);

/// Finite set outside which the fiber maps are isomorphisms.
IsoVerdict almost_all_iso(const FamilyMap& f);

struct VanishingReport {
  PrimeSet exceptional;
  PrimeSet bezout;
  IntPoly source_polynomial;
  IntPoly target_polynomial;
  std::set<std::uint64_t> certificate_exceptions;
  /// Primes <= verify_up_to outside `exceptional` at which the fiber map was checked to be zero.
  std::vector<std::uint64_t> verified;
};

/// Maps between families of distinct weights vanish outside a finite set. Uses the declared
/// weights when present, else certifies the characteristic polynomials. Throws PreconditionError
/// for equal weights and AssertionFailure if the model map is not rationally zero or some fiber
/// map outside the set is nonzero.
VanishingReport vanishing_for_almost_all(const FamilyMap& f, int w1, int w2, const Integer& q,
                                         std::uint64_t verify_up_to = 100,
                                         Execution exec = Execution::sequential);

}  // namespace wmt
