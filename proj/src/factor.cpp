#include "wmt/factor.hpp"

#include "wmt/modular.hpp"
#include "wmt/primes.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace wmt {

namespace {

// ---- polynomials over F_p, low degree first, trimmed ----

using Poly = std::vector<std::uint64_t>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

Poly reduce_poly(const IntPoly& p, const Fp& f) {
  Poly out(p.coeffs().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.reduce(p.coeffs()[i]);
  trim(out);
  return out;
}

Poly sub(const Poly& a, const Poly& b, const Fp& f) {
  Poly out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = f.sub(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(out);
  return out;
}

Poly add(const Poly& a, const Poly& b, const Fp& f) {
  Poly out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = f.add(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(out);
  return out;
}

Poly mul(const Poly& a, const Poly& b, const Fp& f) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
  trim(out);
  return out;
}

Poly scale(const Poly& a, std::uint64_t k, const Fp& f) {
  Poly out(a);
  for (auto& x : out) x = f.mul(x, k);
  trim(out);
  return out;
}

void divmod(const Poly& a, const Poly& b, const Fp& f, Poly& q, Poly& r) {
  if (b.empty()) throw std::invalid_argument("division by zero polynomial mod p");
  r = a;
  if (deg(a) < deg(b)) {
    q.clear();
    return;
  }
  q.assign(static_cast<std::size_t>(deg(a) - deg(b) + 1), 0);
  const std::uint64_t inv = f.inv(b.back());
  for (int k = deg(a) - deg(b); k >= 0; --k) {
    const std::uint64_t c = f.mul(r[static_cast<std::size_t>(k + deg(b))], inv);
    q[static_cast<std::size_t>(k)] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto& slot = r[static_cast<std::size_t>(k) + j];
      slot = f.sub(slot, f.mul(c, b[j]));
    }
  }
  trim(q);
  trim(r);
}

Poly rem(const Poly& a, const Poly& b, const Fp& f) {
  Poly q, r;
  divmod(a, b, f, q, r);
  return r;
}

Poly monic(const Poly& a, const Fp& f) { return a.empty() ? a : scale(a, f.inv(a.back()), f); }

Poly gcd(Poly a, Poly b, const Fp& f) {
  while (!b.empty()) {
    Poly r = rem(a, b, f);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, f);
}

// s a + t b = 1 for coprime a, b.
void bezout(const Poly& a, const Poly& b, const Fp& f, Poly& s, Poly& t) {
  Poly r0 = a, r1 = b, s0{1}, s1, t0, t1{1};
  while (!r1.empty()) {
    Poly q, r;
    divmod(r0, r1, f, q, r);
    Poly s2 = sub(s0, mul(q, s1, f), f), t2 = sub(t0, mul(q, t1, f), f);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (deg(r0) != 0) throw std::logic_error("Hensel factors are not coprime mod p");
  const std::uint64_t inv = f.inv(r0[0]);
  s = scale(s0, inv, f);
  t = scale(t0, inv, f);
}

Poly powmod(Poly base, const Integer& e, const Poly& m, const Fp& f) {
  Poly result{1};
  base = rem(base, m, f);
  const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t i = bits; i-- > 0;) {
    result = rem(mul(result, result, f), m, f);
    if (mpz_tstbit(e.get_mpz_t(), i)) result = rem(mul(result, base, f), m, f);
  }
  return result;
}

Poly derivative(const Poly& a, const Fp& f) {
  if (a.size() <= 1) return {};
  Poly d(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = f.mul(a[i], i % f.ell);
  trim(d);
  return d;
}

// Equal-degree splitting of a monic squarefree product of degree-d irreducibles (p odd).
void equal_degree(const Poly& g, int d, const Fp& f, std::mt19937_64& rng, std::vector<Poly>& out) {
  if (deg(g) == d) {
    out.push_back(g);
    return;
  }
  Integer e;
  mpz_ui_pow_ui(e.get_mpz_t(), f.ell, static_cast<unsigned long>(d));
  e = (e - 1) / 2;
  std::uniform_int_distribution<std::uint64_t> coin(0, f.ell - 1);
  for (;;) {
    Poly a(static_cast<std::size_t>(deg(g)));
    for (auto& x : a) x = coin(rng);
    trim(a);
    if (deg(a) < 1) continue;
    Poly b = sub(powmod(a, e, g, f), Poly{1}, f);
    Poly h = gcd(g, b, f);
    if (deg(h) > 0 && deg(h) < deg(g)) {
      Poly q, r;
      divmod(g, h, f, q, r);
      equal_degree(h, d, f, rng, out);
      equal_degree(monic(q, f), d, f, rng, out);
      return;
    }
  }
}

// Monic irreducible factors of a monic squarefree polynomial mod an odd prime.
std::vector<Poly> factor_mod(const Poly& g, const Fp& f) {
  std::vector<Poly> out;
  std::mt19937_64 rng(0x5eed5eedULL);
  Poly rest = g;
  const Poly x{0, 1};
  Poly h = x;
  const Integer p(static_cast<unsigned long>(f.ell));
  for (int d = 1; 2 * d <= deg(rest); ++d) {
    h = powmod(h, p, rest, f);
    Poly common = gcd(rest, sub(h, x, f), f);
    if (deg(common) > 0) {
      equal_degree(common, d, f, rng, out);
      Poly q, r;
      divmod(rest, common, f, q, r);
      rest = monic(q, f);
      h = rem(h, rest, f);
    }
  }
  if (deg(rest) > 0) out.push_back(rest);
  return out;
}

// ---- polynomials over Z / p^k, as integer coefficient vectors ----

std::vector<Integer> to_integers(const Poly& a) {
  std::vector<Integer> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = Integer(static_cast<unsigned long>(a[i]));
  return out;
}

std::vector<Integer> mul_mod(const std::vector<Integer>& a, const std::vector<Integer>& b, const Integer& m) {
  if (a.empty() || b.empty()) return {};
  std::vector<Integer> out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  for (auto& x : out) mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return out;
}

Poly reduce_vector(const std::vector<Integer>& a, const Fp& f) {
  Poly out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f.reduce(a[i]);
  trim(out);
  return out;
}

// Lifts g = a b mod p (a monic) to g = A B mod p^k, where g is given modulo p^k.
void hensel_lift(const std::vector<Integer>& g, const Poly& a0, const Poly& b0, const Fp& f, unsigned k,
                 std::vector<Integer>& a, std::vector<Integer>& b) {
  Poly s, t;
  bezout(a0, b0, f, s, t);
  a = to_integers(a0);
  b = to_integers(b0);
  const Integer p(static_cast<unsigned long>(f.ell));
  Integer pj = p;
  for (unsigned j = 1; j < k; ++j) {
    const Integer next = pj * p;
    std::vector<Integer> prod = mul_mod(a, b, next);
    std::vector<Integer> e(std::max(g.size(), prod.size()));
    for (std::size_t i = 0; i < e.size(); ++i) {
      Integer gi = i < g.size() ? g[i] : Integer(0);
      Integer pi = i < prod.size() ? prod[i] : Integer(0);
      Integer diff = gi - pi;
      mpz_fdiv_r(diff.get_mpz_t(), diff.get_mpz_t(), next.get_mpz_t());
      mpz_divexact(e[i].get_mpz_t(), diff.get_mpz_t(), pj.get_mpz_t());
    }
    const Poly ep = reduce_vector(e, f);
    Poly q, da;
    divmod(mul(t, ep, f), a0, f, q, da);
    const Poly db = add(mul(ep, s, f), mul(q, b0, f), f);
    const auto bump = [&](std::vector<Integer>& v, const Poly& d) {
      if (v.size() < d.size()) v.resize(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) v[i] += pj * Integer(static_cast<unsigned long>(d[i]));
    };
    bump(a, da);
    bump(b, db);
    pj = next;
  }
}

Integer symmetric(const Integer& x, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  if (2 * r > m) r -= m;
  return r;
}

// Bound on the coefficients of any integer factor of p (Mignotte-style: binomial times the 2-norm).
Integer factor_coefficient_bound(const IntPoly& p) {
  Integer norm2 = 0;
  for (const auto& c : p.coeffs()) norm2 += c * c;
  Integer root;
  mpz_sqrt(root.get_mpz_t(), norm2.get_mpz_t());
  root += 1;
  Integer two_n;
  mpz_ui_pow_ui(two_n.get_mpz_t(), 2, static_cast<unsigned long>(p.degree()));
  return two_n * root;
}

void for_each_subset(std::size_t n, std::size_t size, std::size_t start, std::vector<std::size_t>& chosen,
                     const std::function<bool(const std::vector<std::size_t>&)>& visit, bool& stop) {
  if (stop) return;
  if (chosen.size() == size) {
    stop = visit(chosen);
    return;
  }
  for (std::size_t i = start; i < n && !stop; ++i) {
    chosen.push_back(i);
    for_each_subset(n, size, i + 1, chosen, visit, stop);
    chosen.pop_back();
  }
}

bool poly_less(const IntPoly& a, const IntPoly& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (int i = a.degree(); i >= 0; --i) {
    const auto& x = a.coeffs()[static_cast<std::size_t>(i)];
    const auto& y = b.coeffs()[static_cast<std::size_t>(i)];
    if (x != y) return x < y;
  }
  return false;
}

}  // namespace

IntPoly Factorization::expand() const {
  IntPoly out = IntPoly(std::vector<Integer>{unit});
  for (const auto& [f, m] : factors) out = out * pow(f, m);
  return out;
}

std::vector<std::pair<IntPoly, unsigned>> square_free_decomposition(const IntPoly& p) {
  std::vector<std::pair<IntPoly, unsigned>> out;
  if (p.degree() <= 0) return out;
  // Yun: a_1 a_2^2 a_3^3 ... from b = p / gcd(p, p'), c = p' / gcd(p, p').
  const RatPoly f(p.primitive_part());
  RatPoly g = gcd(f, f.derivative());
  RatPoly b, c, d, r;
  divmod(f, g, b, r);
  divmod(f.derivative(), g, c, r);
  d = c - b.derivative();
  for (unsigned i = 1; b.degree() > 0; ++i) {
    RatPoly a = gcd(b, d);
    RatPoly nb, nc;
    divmod(b, a, nb, r);
    divmod(d, a, nc, r);
    if (a.degree() > 0) out.emplace_back(a.to_primitive_int(), i);
    b = nb;
    c = nc;
    d = c - b.derivative();
  }
  return out;
}

std::vector<IntPoly> factor_square_free(const IntPoly& input) {
  IntPoly g = input.primitive_part();
  if (g.degree() <= 1) return g.degree() == 1 ? std::vector<IntPoly>{g} : std::vector<IntPoly>{};

  // Pick a prime keeping the degree and squarefreeness; among the first few, the one with the fewest
  // modular factors makes recombination cheapest.
  std::uint64_t best_p = 0;
  std::vector<Poly> best_factors;
  int good = 0;
  for (std::uint64_t p = 3; good < 5 && p < (1ULL << 20); p += 2) {
    if (!is_prime(p)) continue;
    Fp f{p};
    if (f.reduce(g.lead()) == 0) continue;
    Poly gp = reduce_poly(g, f);
    if (deg(gcd(gp, derivative(gp, f), f)) != 0) continue;
    ++good;
    auto fs = factor_mod(monic(gp, f), f);
    if (best_p == 0 || fs.size() < best_factors.size()) {
      best_p = p;
      best_factors = std::move(fs);
    }
    if (best_factors.size() == 1) break;
  }
  if (best_p == 0) throw std::logic_error("no suitable prime for factorization");
  if (best_factors.size() == 1) return {g};

  const Fp f{best_p};
  const Integer p(static_cast<unsigned long>(best_p));
  const Integer bound = 2 * abs(g.lead()) * factor_coefficient_bound(g) + 1;
  unsigned k = 1;
  Integer modulus = p;
  while (modulus <= bound) {
    modulus *= p;
    ++k;
  }

  // Peel factors off one by one: g = lc * f1 * rest mod p, lift, continue on the lifted rest.
  std::vector<std::vector<Integer>> lifted;
  std::vector<Integer> current(g.coeffs());
  for (auto& c : current) mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), modulus.get_mpz_t());
  for (std::size_t i = 0; i + 1 < best_factors.size(); ++i) {
    Poly rest{f.reduce(g.lead())};
    for (std::size_t j = i + 1; j < best_factors.size(); ++j) rest = mul(rest, best_factors[j], f);
    std::vector<Integer> a, b;
    hensel_lift(current, best_factors[i], rest, f, k, a, b);
    for (auto& c : a) mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), modulus.get_mpz_t());
    for (auto& c : b) mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), modulus.get_mpz_t());
    lifted.push_back(std::move(a));
    current = std::move(b);
  }
  {
    // The last factor is `current` divided by its (unit) leading coefficient mod p^k.
    Integer inv;
    mpz_invert(inv.get_mpz_t(), current.back().get_mpz_t(), modulus.get_mpz_t());
    for (auto& c : current) {
      c *= inv;
      mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), modulus.get_mpz_t());
    }
    lifted.push_back(std::move(current));
  }

  // Recombination by subsets of increasing size.
  std::vector<IntPoly> result;
  std::vector<bool> used(lifted.size(), false);
  std::size_t remaining = lifted.size();
  for (std::size_t size = 1; 2 * size <= remaining; ++size) {
    bool again = true;
    while (again && 2 * size <= remaining) {
      again = false;
      std::vector<std::size_t> live;
      for (std::size_t i = 0; i < lifted.size(); ++i)
        if (!used[i]) live.push_back(i);
      std::vector<std::size_t> chosen;
      bool stop = false;
      for_each_subset(live.size(), size, 0, chosen,
                      [&](const std::vector<std::size_t>& pick) {
                        std::vector<Integer> prod{g.lead()};
                        for (auto idx : pick) prod = mul_mod(prod, lifted[live[idx]], modulus);
                        for (auto& c : prod) c = symmetric(c, modulus);
                        IntPoly candidate = IntPoly(prod).primitive_part();
                        IntPoly quotient;
                        if (candidate.degree() < 1 || !divides_exactly(candidate, g, &quotient)) return false;
                        result.push_back(candidate);
                        g = quotient.primitive_part();
                        for (auto idx : pick) used[live[idx]] = true;
                        remaining -= pick.size();
                        return true;
                      },
                      stop);
      again = stop;
    }
  }
  if (g.degree() > 0) result.push_back(g);
  std::sort(result.begin(), result.end(), poly_less);
  return result;
}

Factorization factor(const IntPoly& p) {
  if (p.is_zero()) throw std::invalid_argument("cannot factor the zero polynomial");
  Factorization out;
  out.unit = p.content();
  if (sgn(p.lead()) < 0) out.unit = -out.unit;
  for (const auto& [part, mult] : square_free_decomposition(p))
    for (auto& irreducible : factor_square_free(part)) out.factors.emplace_back(std::move(irreducible), mult);
  std::sort(out.factors.begin(), out.factors.end(), [](const auto& a, const auto& b) {
    if (poly_less(a.first, b.first)) return true;
    if (poly_less(b.first, a.first)) return false;
    return a.second < b.second;
  });
  return out;
}

}  // namespace wmt
