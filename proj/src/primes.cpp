#include "wmt/primes.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace wmt {

namespace {

constexpr unsigned long kTrialBound = 10000;

// Brent's variant of Pollard rho; n is odd, composite and not a perfect power of a small prime.
Integer pollard_rho(const Integer& n) {
  for (unsigned long c = 1;; ++c) {
    Integer x = 2, y = 2, d = 1, q = 1, ys;
    const auto step = [&](Integer& v) {
      v = v * v + c;
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    std::size_t r = 1;
    const std::size_t m = 64;
    do {
      x = y;
      for (std::size_t i = 0; i < r; ++i) step(y);
      std::size_t k = 0;
      do {
        ys = y;
        for (std::size_t i = 0; i < std::min(m, r - k); ++i) {
          step(y);
          Integer diff = x - y;
          q = q * abs(diff);
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        mpz_gcd(d.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
      } while (k < r && d == 1);
      r *= 2;
    } while (d == 1);
    if (d == n) {
      do {
        step(ys);
        Integer diff = x - ys;
        mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      } while (d == 1);
    }
    if (d != n) return d;
  }
}

void split(const Integer& n, std::map<Integer, unsigned>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  Integer d = pollard_rho(n);
  split(d, out);
  split(Integer(n / d), out);
}

}  // namespace

bool is_prime(const Integer& n) {
  if (n < 2) return false;
  // 50 Miller-Rabin rounds after GMP's BPSW pre-test; exact below 2^64.
  return mpz_probab_prime_p(n.get_mpz_t(), 50) != 0;
}

bool is_prime(std::uint64_t n) { return is_prime(Integer(static_cast<unsigned long>(n))); }

std::vector<std::pair<Integer, unsigned>> factorize(const Integer& value) {
  if (sgn(value) == 0) throw std::invalid_argument("factorize(0)");
  Integer n = abs(value);
  std::map<Integer, unsigned> found;
  for (unsigned long p = 2; p <= kTrialBound && n > 1; p += (p == 2 ? 1 : 2)) {
    if (Integer(p) * p > n) break;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      n /= p;
      ++found[Integer(p)];
    }
  }
  if (n > 1) split(n, found);
  return {found.begin(), found.end()};
}

PrimeSet prime_divisors(const Integer& n) {
  PrimeSet s;
  if (sgn(n) == 0 || abs(n) == 1) return s;
  for (auto& [p, e] : factorize(n)) s.insert(p);
  return s;
}

std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  if (hi < 2) return out;
  std::vector<bool> sieve(hi + 1, true);
  sieve[0] = sieve[1] = false;
  for (std::uint64_t i = 2; i * i <= hi; ++i)
    if (sieve[i])
      for (std::uint64_t j = i * i; j <= hi; j += i) sieve[j] = false;
  for (std::uint64_t i = std::max<std::uint64_t>(lo, 2); i <= hi; ++i)
    if (sieve[i]) out.push_back(i);
  return out;
}

std::vector<std::uint64_t> primes_from(std::uint64_t lo, std::size_t count) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = std::max<std::uint64_t>(lo, 2); out.size() < count; ++p)
    if (is_prime(p)) out.push_back(p);
  return out;
}

bool prime_power_base(const Integer& q, Integer& base, unsigned& exponent) {
  if (q < 2) return false;
  auto f = factorize(q);
  if (f.size() != 1) return false;
  base = f[0].first;
  exponent = f[0].second;
  return true;
}

}  // namespace wmt
