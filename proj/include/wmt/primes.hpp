#pragma once

#include "wmt/matrix.hpp"

#include <cstdint>
#include <set>
#include <vector>

namespace wmt {

using PrimeSet = std::set<Integer>;

bool is_prime(const Integer& n);
bool is_prime(std::uint64_t n);

/// Distinct prime divisors of |n|; empty for 0 and +-1.
PrimeSet prime_divisors(const Integer& n);

/// Prime factorization of |n| as (prime, exponent) pairs in increasing order. n != 0.
std::vector<std::pair<Integer, unsigned>> factorize(const Integer& n);

/// All primes p with lo <= p <= hi.
std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi);

/// The first `count` primes that are >= lo.
std::vector<std::uint64_t> primes_from(std::uint64_t lo, std::size_t count);

/// If q = p^k with p prime and k >= 1, returns p.
bool prime_power_base(const Integer& q, Integer& base, unsigned& exponent);

}  // namespace wmt
