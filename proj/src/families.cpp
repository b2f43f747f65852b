#include "wmt/families.hpp"

#include "wmt/errors.hpp"

#include <omp.h>

#include <sstream>

namespace wmt {

namespace {

FpMatrix evaluate_mod(const IntPoly& p, const FpMatrix& a) {
  const Fp f = a.field();
  FpMatrix r(a.ell(), a.rows(), a.cols());
  for (int i = p.degree(); i >= 0; --i) {
    r = r * a;
    const std::uint64_t c = f.reduce(p.coeffs()[static_cast<std::size_t>(i)]);
    for (std::size_t k = 0; k < a.rows(); ++k) r(k, k) = f.add(r(k, k), c);
  }
  return r;
}

bool is_invertible_mod(const FpMatrix& m) { return m.rows() == m.cols() && m.rank() == m.rows(); }

void check_square(const FpMatrix& m, std::size_t n, const std::string& what) {
  if (m.rows() != n || m.cols() != n) throw PreconditionError(what + " must be " + std::to_string(n) + "x" + std::to_string(n));
}

// Certification used by the vanishing check: the declared weight when it matches, else the
// characteristic polynomial.
WeightCertification certify_side(const IntegralFamily& fam, const Integer& q, int w, const char* side) {
  const auto& declared = fam.declared_weight();
  WeightCertification c;
  if (declared && declared->w == w && declared->certificate.q == q)
    c = weight_certify_family(fam, q, w, declared->certificate.polynomial);
  else
    c = weight_certify_family(fam, q, w);
  if (!c.succeeded) throw PreconditionError(std::string(side) + " family is not certified of weight " + std::to_string(w));
  return c;
}

}  // namespace

IntegralFamily::IntegralFamily(Lattice model, std::map<std::string, LatticeMap> operators,
                               std::map<std::uint64_t, FiberOverride> exceptions)
    : model_(std::move(model)), operators_(std::move(operators)), exceptions_(std::move(exceptions)) {
  if (!operators_.count("frobenius")) throw PreconditionError("family needs a frobenius operator");
  for (const auto& [name, op] : operators_) {
    const IntMatrix& m = op.matrix();
    if (m.rows() != model_.rank || m.cols() != model_.rank)
      throw PreconditionError("operator " + name + " must be square of the model rank");
  }
  for (const auto& [ell, fiber] : exceptions_) {
    if (ell >= (1ULL << 31) || !is_prime(ell)) throw PreconditionError("exception key must be a prime below 2^31");
    if (!fiber.operators.count("frobenius")) throw PreconditionError("override needs a frobenius operator");
    for (const auto& [name, op] : fiber.operators) {
      if (op.ell() != ell) throw PreconditionError("override operator " + name + " has the wrong field");
      check_square(op, fiber.dimension, "override operator " + name);
    }
  }
}

void IntegralFamily::declare_weight(int w, WeilCertificate certificate) {
  if (!certificate.certified()) throw PreconditionError("declared weight needs a certified polynomial");
  if (certificate.w != w) throw PreconditionError("certificate is for a different weight");
  DeclaredWeight d;
  d.w = w;
  d.annihilation = annihilation_exceptional_primes(frobenius(), certificate.polynomial);
  d.certificate = std::move(certificate);
  declared_ = std::move(d);
}

std::size_t IntegralFamily::fiber_dimension(std::uint64_t ell) const {
  auto it = exceptions_.find(ell);
  return it == exceptions_.end() ? model_.rank : it->second.dimension;
}

FpMatrix IntegralFamily::fiber_operator(const std::string& name, std::uint64_t ell) const {
  auto it = exceptions_.find(ell);
  if (it != exceptions_.end()) {
    auto op = it->second.operators.find(name);
    if (op == it->second.operators.end()) throw PreconditionError("override at " + std::to_string(ell) + " lacks " + name);
    return op->second;
  }
  auto op = operators_.find(name);
  if (op == operators_.end()) throw PreconditionError("family has no operator " + name);
  return FpMatrix::reduce(op->second.matrix(), ell);
}

FamilyMap::FamilyMap(IntegralFamily source, IntegralFamily target, LatticeMap model_map,
                     std::map<std::uint64_t, FpMatrix> overrides)
    : source_(std::move(source)), target_(std::move(target)), model_map_(std::move(model_map)),
      overrides_(std::move(overrides)) {
  const IntMatrix& m = model_map_.matrix();
  if (m.rows() != target_.model().rank || m.cols() != source_.model().rank)
    throw PreconditionError("model map shape does not match the families");
  if (!(target_.frobenius().matrix() * m == m * source_.frobenius().matrix()))
    throw PreconditionError("model map does not commute with frobenius");
  for (const auto& [ell, map] : overrides_) {
    if (map.ell() != ell) throw PreconditionError("map override has the wrong field");
    if (map.rows() != target_.fiber_dimension(ell) || map.cols() != source_.fiber_dimension(ell))
      throw PreconditionError("map override at " + std::to_string(ell) + " has the wrong shape");
    if (!(target_.fiber_operator("frobenius", ell) * map == map * source_.fiber_operator("frobenius", ell)))
      throw PreconditionError("map override at " + std::to_string(ell) + " does not commute with frobenius");
  }
  // Exceptional fibers of different dimension need an explicit map.
  for (auto ell : exceptional_primes())
    if (!overrides_.count(ell) && (source_.fiber_dimension(ell) != source_.model().rank ||
                                   target_.fiber_dimension(ell) != target_.model().rank))
      throw PreconditionError("fiber at " + std::to_string(ell) + " changes dimension; supply a map override");
}

FpMatrix FamilyMap::fiber_map(std::uint64_t ell) const {
  auto it = overrides_.find(ell);
  if (it != overrides_.end()) return it->second;
  return FpMatrix::reduce(model_map_.matrix(), ell);
}

std::set<std::uint64_t> FamilyMap::exceptional_primes() const {
  std::set<std::uint64_t> out;
  for (const auto& [ell, _] : source_.exceptions()) out.insert(ell);
  for (const auto& [ell, _] : target_.exceptions()) out.insert(ell);
  for (const auto& [ell, _] : overrides_) out.insert(ell);
  return out;
}

WeightCertification weight_certify_family(const IntegralFamily& fam, const Integer& q, int w,
                                          const std::optional<IntPoly>& candidate) {
  WeightCertification out;
  out.scope_note = "checked on the integral model and the listed exceptional fibers only";
  const IntPoly p = candidate ? *candidate : characteristic_polynomial(fam.frobenius().matrix());
  out.certificate = certify_weil(p, q, w);
  if (!out.certificate.certified()) {
    if (!candidate) {
      std::ostringstream os;
      os << "not of weight " << w << ": characteristic polynomial " << to_string(p) << " is not a Weil q^w-polynomial";
      if (out.certificate.witness) os << " (" << out.certificate.witness->describe() << ")";
      throw NotOfWeight(os.str(), out.certificate);
    }
    return out;
  }
  out.annihilation = annihilation_exceptional_primes(fam.frobenius(), p);
  out.succeeded = out.annihilation.integral;
  if (!out.succeeded) return out;
  for (const auto& [ell, fiber] : fam.exceptions())
    if (!evaluate_mod(p, fiber.operators.at("frobenius")).is_zero()) out.exceptional.insert(ell);
  return out;
}

const char* to_string(IsoVerdict::Kind k) {
  switch (k) {
    case IsoVerdict::Kind::almost_all: return "almost_all";
    case IsoVerdict::Kind::no_ell: return "no_ell";
    case IsoVerdict::Kind::rank_mismatch: return "rank_mismatch";
  }
  return "?";
}

IsoVerdict almost_all_iso(const FamilyMap& f) {
  IsoVerdict out;
  const IntMatrix& m = f.model_map().matrix();
  if (m.rows() != m.cols()) {
    out.kind = IsoVerdict::Kind::rank_mismatch;
    return out;
  }
  out.divisors = cokernel_invariants(f.model_map());
  if (out.divisors.zero_count() > 0) {
    out.kind = IsoVerdict::Kind::no_ell;
  } else {
    for (const auto& p : torsion_primes(out.divisors)) {
      out.bad.insert(p);
      out.provenance[p] = "divides an elementary divisor of the model map";
    }
  }
  // Explicit fibers replace the reduction wherever they exist.
  for (auto ell : f.exceptional_primes()) {
    const Integer p(static_cast<unsigned long>(ell));
    if (is_invertible_mod(f.fiber_map(ell))) {
      if (out.bad.erase(p) > 0) out.provenance.erase(p);
      out.rescued.insert(ell);
    } else {
      out.bad.insert(p);
      out.provenance[p] = "explicit fiber map is not an isomorphism";
    }
  }
  return out;
}

VanishingReport vanishing_for_almost_all(const FamilyMap& f, int w1, int w2, const Integer& q,
                                         std::uint64_t verify_up_to, Execution exec) {
  if (w1 == w2) throw PreconditionError("vanishing needs distinct weights");
  const WeightCertification c1 = certify_side(f.source(), q, w1, "source");
  const WeightCertification c2 = certify_side(f.target(), q, w2, "target");

  VanishingReport out;
  out.source_polynomial = c1.certificate.polynomial;
  out.target_polynomial = c2.certificate.polynomial;
  out.bezout = bezout_bad_primes(out.source_polynomial, out.target_polynomial);
  out.exceptional = out.bezout;
  for (auto ell : c1.exceptional) out.certificate_exceptions.insert(ell);
  for (auto ell : c2.exceptional) out.certificate_exceptions.insert(ell);
  for (auto ell : out.certificate_exceptions) out.exceptional.insert(Integer(static_cast<unsigned long>(ell)));

  // M P1(F1) = P1(F2) M and P1(F2) is invertible over Q, so an equivariant M vanishes.
  if (!f.model_map().matrix().is_zero())
    throw AssertionFailure("equivariant model map between distinct certified weights is not zero");

  std::vector<std::uint64_t> primes;
  for (auto ell : primes_in_range(2, verify_up_to))
    if (!out.exceptional.count(Integer(static_cast<unsigned long>(ell)))) primes.push_back(ell);
  std::vector<char> zero(primes.size(), 0);
  const long count = static_cast<long>(primes.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i)
      zero[static_cast<std::size_t>(i)] = f.fiber_map(primes[static_cast<std::size_t>(i)]).is_zero();
  } else {
    for (long i = 0; i < count; ++i)
      zero[static_cast<std::size_t>(i)] = f.fiber_map(primes[static_cast<std::size_t>(i)]).is_zero();
  }
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (!zero[i]) throw AssertionFailure("fiber map at " + std::to_string(primes[i]) + " is nonzero outside the exceptional set");
    out.verified.push_back(primes[i]);
  }
  return out;
}

}  // namespace wmt
