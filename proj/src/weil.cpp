#include "wmt/weil.hpp"

#include "wmt/errors.hpp"
#include "wmt/factor.hpp"

#include <omp.h>

#include <sstream>

namespace wmt {

namespace {

Integer integer_power(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// Roots of s in the closed interval [-x, x], x > 0 rational.
std::size_t count_closed(const SturmSequence& sturm, const IntPoly& s, const Rational& x) {
  std::size_t n = sturm.count_half_open(-x, x);
  if (sgn(s.eval(Rational(-x))) == 0) ++n;
  return n;
}

// Isolates a root of s lying outside [-x, x] by bisection on (-B, -x) or (x, B].
std::pair<Rational, Rational> isolate_outside(const SturmSequence& sturm, const IntPoly& s, const Rational& x) {
  const Rational bound(cauchy_root_bound(s));
  Rational lo, hi;
  if (sturm.count_half_open(x, bound) > 0) {
    lo = x;
    hi = bound;
  } else {
    // The root is in [-B, -x). Bisection keeps the leftmost root, which is that one.
    lo = -bound - 1;
    hi = -x;
  }
  while (sturm.count_half_open(lo, hi) > 1) {
    Rational mid = (lo + hi) / 2;
    if (sturm.count_half_open(lo, mid) > 0)
      hi = mid;
    else
      lo = mid;
  }
  return {lo, hi};
}

}  // namespace

Integer WeilCertificate::target_modulus_squared() const { return integer_power(q, static_cast<unsigned long>(w)); }

const char* to_string(WeilCertificate::Status s) { return s == WeilCertificate::Status::certified ? "certified" : "refuted"; }

const char* to_string(WeilWitness::Kind k) {
  switch (k) {
    case WeilWitness::Kind::not_self_reciprocal: return "not_self_reciprocal";
    case WeilWitness::Kind::nonreal_trace: return "nonreal_trace";
    case WeilWitness::Kind::trace_outside_band: return "trace_outside_band";
  }
  return "?";
}

std::string FactorTranscript::describe() const {
  std::ostringstream os;
  os << "factor " << to_string(factor) << " (mult " << multiplicity << "): ";
  if (!symmetric) {
    os << "roots do not pair under alpha -> q^w/alpha";
    return os.str();
  }
  os << "trace " << to_string(trace_square_free) << ", " << real_roots << " real of "
     << trace_square_free.degree() << ", " << boundary_roots << " on the boundary, "
     << roots_within_inner << " within +-" << inner << ", " << roots_within_outer << " within +-" << outer
     << " after " << refinements << " refinements -> " << (certified ? "certified" : "refuted");
  return os.str();
}

std::string WeilWitness::describe() const {
  std::ostringstream os;
  os << "factor " << to_string(factor) << ": ";
  switch (kind) {
    case Kind::not_self_reciprocal:
      os << "not divisible into T^e f(q^w/T), so some root has |alpha|^2 != q^w";
      break;
    case Kind::nonreal_trace:
      os << nonreal_count << " non-real values of alpha + q^w/alpha, so some |alpha|^2 != q^w";
      break;
    case Kind::trace_outside_band:
      os << "alpha + q^w/alpha has a real value in (" << interval->first << ", " << interval->second
         << "] outside [-2 sqrt(q^w), 2 sqrt(q^w)]";
      break;
  }
  return os.str();
}

FactorTranscript certify_factor(const IntPoly& f, const Integer& target, WeilWitness* witness) {
  FactorTranscript t;
  t.factor = f;
  const int e = f.degree();
  if (e < 1) throw PreconditionError("certify_factor needs a nonconstant factor");

  // (a) alpha -> q^w / alpha permutes the roots: f divides T^e f(q^w / T).
  t.symmetric = divides_exactly(f, f.reciprocal_scaled(target));
  if (!t.symmetric) {
    if (witness) *witness = WeilWitness{WeilWitness::Kind::not_self_reciprocal, f, std::nullopt, 0};
    return t;
  }

  // (b) The trace polynomial, by resultant in x with T as an integer parameter.
  t.trace_polynomial = parametric_resultant(
      f, [&](const Integer& x) { return IntPoly(std::vector<Integer>{target, -x, Integer(1)}); },
      static_cast<std::size_t>(e));
  const IntPoly s = square_free_part(t.trace_polynomial);
  t.trace_square_free = s;
  const std::size_t deg_s = static_cast<std::size_t>(s.degree());
  const SturmSequence sturm(s);
  t.real_roots = sturm.count_real();

  // (c) Every root of s must be real.
  if (t.real_roots != deg_s) {
    if (witness) *witness = WeilWitness{WeilWitness::Kind::nonreal_trace, f, std::nullopt, deg_s - t.real_roots};
    return t;
  }

  // ...and inside [-2R, 2R] with R^2 = q^w, i.e. t^2 <= 4 q^w.
  const Integer four_q = 4 * target;
  t.boundary_roots = static_cast<std::size_t>(
      std::max(0, gcd_primitive(s, IntPoly(std::vector<Integer>{-four_q, Integer(0), Integer(1)})).degree()));
  Integer root;
  mpz_sqrt(root.get_mpz_t(), four_q.get_mpz_t());
  if (root * root == four_q) {
    // 2R is an integer: the closed count is exact.
    t.inner = t.outer = Rational(root);
    t.roots_within_inner = t.roots_within_outer = count_closed(sturm, s, t.inner);
    t.certified = t.roots_within_inner == deg_s;
  } else {
    // 2R is irrational. Bracket it by a_k < 2R < b_k = a_k + 2^-k with a_k = floor(2^k 2R) / 2^k.
    // Roots strictly inside the band eventually land in [-a_k, a_k]; roots outside eventually
    // leave [-b_k, b_k]; roots at exactly +-2R are the boundary count from the exact gcd. Since
    // b_k - a_k -> 0 and s has finitely many roots, one of the two decisive tests fires.
    for (unsigned k = 0;; ++k) {
      Integer scaled;
      Integer radicand = four_q * integer_power(Integer(4), k);
      mpz_sqrt(scaled.get_mpz_t(), radicand.get_mpz_t());
      const Integer denom = integer_power(Integer(2), k);
      t.inner = Rational(scaled, denom);
      t.outer = Rational(scaled + 1, denom);
      t.inner.canonicalize();
      t.outer.canonicalize();
      t.refinements = k;
      t.roots_within_inner = count_closed(sturm, s, t.inner);
      t.roots_within_outer = count_closed(sturm, s, t.outer);
      if (t.roots_within_inner + t.boundary_roots == deg_s) {
        t.certified = true;
        break;
      }
      if (t.roots_within_outer < deg_s) {
        t.certified = false;
        break;
      }
    }
  }
  if (!t.certified && witness) {
    *witness = WeilWitness{WeilWitness::Kind::trace_outside_band, f, isolate_outside(sturm, s, t.outer), 0};
  }
  return t;
}

WeilCertificate certify_weil(const IntPoly& p, const Integer& q, int w, Execution exec) {
  if (!p.is_monic()) throw PreconditionError("certify_weil: polynomial must be monic");
  Integer base;
  unsigned exponent = 0;
  if (!prime_power_base(q, base, exponent)) throw PreconditionError("certify_weil: q must be a prime power");
  if (w < 0) throw PreconditionError("certify_weil: w must be non-negative so that q^w is an integer");

  WeilCertificate cert;
  cert.polynomial = p;
  cert.q = q;
  cert.w = w;
  const Integer target = cert.target_modulus_squared();
  const Factorization fac = factor(p);

  const std::size_t count = fac.factors.size();
  std::vector<FactorTranscript> transcripts(count);
  std::vector<std::optional<WeilWitness>> witnesses(count);
  const auto work = [&](std::size_t i) {
    WeilWitness wit;
    transcripts[i] = certify_factor(fac.factors[i].first, target, &wit);
    transcripts[i].multiplicity = fac.factors[i].second;
    if (!transcripts[i].certified) witnesses[i] = wit;
  };
  if (exec == Execution::parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(count); ++i) {
      try {
        work(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::size_t i = 0; i < count; ++i) work(i);
  }

  cert.status = WeilCertificate::Status::certified;
  for (std::size_t i = 0; i < count; ++i)
    if (!transcripts[i].certified) {
      cert.status = WeilCertificate::Status::refuted;
      cert.witness = witnesses[i];
      break;
    }
  cert.factors = std::move(transcripts);
  return cert;
}

IntPoly finite_extension_transform(const IntPoly& p, int f, int n) {
  if (f < 1 || n < 1) throw PreconditionError("finite_extension_transform: f and n must be positive");
  if (!p.is_monic()) throw PreconditionError("finite_extension_transform: polynomial must be monic");
  // R(U) = Res_x(p(x), U - x^n) = prod (U - alpha^n); then U = T^(fn).
  const std::size_t m = static_cast<std::size_t>(p.degree());
  IntPoly r = parametric_resultant(
      p,
      [&](const Integer& u) {
        std::vector<Integer> c(static_cast<std::size_t>(n) + 1);
        c[0] = u;
        c[static_cast<std::size_t>(n)] -= 1;
        return IntPoly(std::move(c));
      },
      m);
  if (!r.is_zero() && sgn(r.lead()) < 0) r = -r;
  if (!r.is_monic()) throw AssertionFailure("finite_extension_transform: result is not monic");
  return r.substitute_power(static_cast<unsigned>(f * n));
}

PrimeSet bezout_bad_primes(const IntPoly& p1, const IntPoly& p2) {
  RatPoly g, s, t;
  extended_gcd(RatPoly(p1), RatPoly(p2), g, s, t);
  if (g.degree() != 0) throw PreconditionError("bezout_bad_primes: not relatively prime");
  PrimeSet out;
  for (const RatPoly* cof : {&s, &t})
    for (const auto& c : cof->coeffs())
      for (const auto& prime : prime_divisors(c.get_den())) out.insert(prime);
  if (!p1.is_zero() && !p2.is_zero()) {
    Integer lead_gcd;
    mpz_gcd(lead_gcd.get_mpz_t(), p1.lead().get_mpz_t(), p2.lead().get_mpz_t());
    for (const auto& prime : prime_divisors(lead_gcd)) out.insert(prime);
  }
  return out;
}

std::string Annihilation::describe() const {
  if (integral) return "annihilates integrally";
  std::ostringstream os;
  os << "content " << content << ", annihilates mod ";
  if (primes.empty()) {
    os << "no prime";
  } else {
    bool first = true;
    for (const auto& p : primes) {
      os << (first ? "" : ", ") << p;
      first = false;
    }
  }
  return os.str();
}

Annihilation annihilation_exceptional_primes(const LatticeMap& frob, const IntPoly& p) {
  if (!frob.matrix().is_square()) throw PreconditionError("frobenius must be an endomorphism");
  Annihilation out;
  out.value = evaluate_at_matrix(p, frob.matrix());
  out.content = content(out.value);
  out.integral = sgn(out.content) == 0;
  if (!out.integral) out.primes = prime_divisors(out.content);
  return out;
}

}  // namespace wmt
