#include "doctest.h"

#include "support.hpp"
#include "wmt/errors.hpp"
#include "wmt/factor.hpp"
#include "wmt/weil.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace wmt;
namespace ts = testing_support;

namespace {

const std::vector<long> kQs{2, 3, 4, 5, 7, 8, 9};

// Floating-point roots from the companion matrix; a non-certifying oracle.
std::vector<std::complex<double>> float_roots(const IntPoly& p) {
  const int n = p.degree();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) c(i, i - 1) = 1;
  for (int i = 0; i < n; ++i) c(i, n - 1) = -p.coeff(static_cast<std::size_t>(i)).get_d();
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

enum class FloatVerdict { on_circle, off_circle, unclear };

FloatVerdict float_verdict(const IntPoly& p, long q, int w) {
  const double target = std::pow(static_cast<double>(q), w);
  double worst = 0;
  for (const auto& z : float_roots(p)) worst = std::max(worst, std::abs(std::norm(z) / target - 1));
  if (worst < 1e-6) return FloatVerdict::on_circle;
  if (worst > 1e-2) return FloatVerdict::off_circle;
  return FloatVerdict::unclear;
}

IntPoly quadratic(const Integer& a, const Integer& c) { return IntPoly(std::vector<Integer>{c, -a, 1}); }

// A random Weil q^w-polynomial of degree 1 or 2.
IntPoly random_weil_piece(std::mt19937_64& rng, long q, int w) {
  const Integer qw = ts::ipow(Integer(q), static_cast<unsigned>(w));
  Integer root;
  if (mpz_perfect_square_p(qw.get_mpz_t()) && rng() % 4 == 0) {
    mpz_sqrt(root.get_mpz_t(), qw.get_mpz_t());
    return IntPoly::linear(rng() % 2 ? root : Integer(-root));
  }
  Integer bound;
  mpz_sqrt(bound.get_mpz_t(), Integer(4 * qw).get_mpz_t());
  std::uniform_int_distribution<long> a(-bound.get_si(), bound.get_si());
  return quadratic(a(rng), qw);
}

IntPoly random_poly(std::mt19937_64& rng, int degree, int bound, bool monic) {
  std::uniform_int_distribution<int> e(-bound, bound);
  std::vector<Integer> c(static_cast<std::size_t>(degree) + 1);
  for (auto& x : c) x = e(rng);
  if (monic) c.back() = 1;
  while (c.back() == 0) c.back() = e(rng);
  return IntPoly(c);
}

}  // namespace

TEST_SUITE("weil") {
  TEST_CASE("polynomial text round trip") {
    for (const char* s : {"T^2 - T + 2", "T^4 + 7*T^2 + 9", "-3*T^3 + T - 1", "T", "5"}) CHECK(to_string(parse_polynomial(s)) == s);
    CHECK(parse_polynomial("T^2-T+2") == IntPoly{2, -1, 1});
    CHECK_THROWS_AS(parse_polynomial("T^2 + x"), std::invalid_argument);
  }

  TEST_CASE("linear polynomial of weight two") {
    for (long q : kQs) CHECK(certify_weil(IntPoly::linear(q), q, 2).certified());
  }

  TEST_CASE("every quadratic T^2 - aT + q with a^2 <= 4q is certified at weight one") {
    std::size_t count = 0;
    for (long q : kQs)
      for (long a = -6; a <= 6; ++a) {
        if (a * a > 4 * q) continue;
        const WeilCertificate c = certify_weil(quadratic(a, q), q, 1);
        CHECK_MESSAGE(c.certified(), "a=" << a << " q=" << q);
        ++count;
      }
    CHECK(count == 65);
  }

  TEST_CASE("split quadratic (T-1)(T-q) is refuted") {
    for (long q : kQs) {
      const WeilCertificate c = certify_weil(quadratic(q + 1, q), q, 1);
      CHECK_FALSE(c.certified());
      REQUIRE(c.witness);
      CHECK(c.witness->kind == WeilWitness::Kind::not_self_reciprocal);
    }
  }

  TEST_CASE("real roots paired by q/alpha but off the circle give an isolating interval") {
    const WeilCertificate c = certify_weil(IntPoly{2, -5, 1}, 2, 1);
    CHECK_FALSE(c.certified());
    REQUIRE(c.witness);
    CHECK(c.witness->kind == WeilWitness::Kind::trace_outside_band);
    REQUIRE(c.witness->interval);
    const auto [lo, hi] = *c.witness->interval;
    // the trace 5 lies in (lo, hi], outside [-2 sqrt 2, 2 sqrt 2]
    CHECK(lo < 5);
    CHECK(5 <= hi);
    CHECK(lo * lo >= 8);
  }

  TEST_CASE("non-real traces are detected") {
    const WeilCertificate c = certify_weil(IntPoly{9, 0, 7, 0, 1}, 3, 1);
    CHECK_FALSE(c.certified());
    REQUIRE(c.witness);
    CHECK(c.witness->kind == WeilWitness::Kind::nonreal_trace);
    CHECK(c.witness->nonreal_count == 2);
  }

  TEST_CASE("roots exactly at +-sqrt(q^w) are handled by the boundary test") {
    CHECK(certify_weil(IntPoly{-4, 0, 1}, 2, 2).certified());             // +-2
    CHECK(certify_weil(IntPoly{-2, 0, 1}, 2, 1).certified());             // +-sqrt 2
    CHECK(certify_weil(IntPoly{-2, 0, 1} * IntPoly{2, -1, 1}, 2, 1).certified());
    CHECK_FALSE(certify_weil(IntPoly{-3, 0, 1}, 2, 1).certified());       // +-sqrt 3
  }

  TEST_CASE("preconditions") {
    CHECK_THROWS_AS(certify_weil(IntPoly{1, 2}, 2, 1), PreconditionError);
    CHECK_THROWS_AS(certify_weil(IntPoly{2, -1, 1}, 6, 1), PreconditionError);
    CHECK_THROWS_AS(certify_weil(IntPoly{2, -1, 1}, 1, 1), PreconditionError);
    CHECK_THROWS_AS(certify_weil(IntPoly{2, -1, 1}, 2, -1), PreconditionError);
    CHECK(certify_weil(IntPoly{1}, 2, 1).certified());
  }

  TEST_CASE("products of certified pieces are certified, and one bad factor refutes") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 200; ++t) {
      const long q = kQs[rng() % kQs.size()];
      const int w = static_cast<int>(rng() % 4);
      const IntPoly a = random_weil_piece(rng, q, w), b = random_weil_piece(rng, q, w);
      CHECK(certify_weil(a * b, q, w).certified() == (certify_weil(a, q, w).certified() && certify_weil(b, q, w).certified()));
      CHECK(certify_weil(a * b, q, w).certified());
      const IntPoly bad = IntPoly{-1, 1} * IntPoly::linear(ts::ipow(q, static_cast<unsigned>(w)) + 1);
      CHECK_FALSE(certify_weil(a * bad, q, w).certified());
    }
  }

  TEST_CASE("agreement with a floating-point root oracle") {
    std::mt19937_64 rng(42);
    std::size_t off = 0, on = 0;
    for (int t = 0; t < 1000; ++t) {
      const long q = kQs[rng() % kQs.size()];
      const int w = static_cast<int>(rng() % 4);
      const IntPoly p = random_poly(rng, 1 + static_cast<int>(rng() % 8), 50, true);
      const FloatVerdict f = float_verdict(p, q, w);
      if (f == FloatVerdict::unclear) continue;
      CHECK_MESSAGE(certify_weil(p, q, w).certified() == (f == FloatVerdict::on_circle), to_string(p));
      ++off;
    }
    for (int t = 0; t < 300; ++t) {
      const long q = kQs[rng() % kQs.size()];
      const int w = static_cast<int>(rng() % 4);
      IntPoly p{1};
      const int pieces = 1 + static_cast<int>(rng() % 4);
      for (int k = 0; k < pieces; ++k) p = p * random_weil_piece(rng, q, w);
      CHECK(float_verdict(p, q, w) != FloatVerdict::off_circle);
      CHECK_MESSAGE(certify_weil(p, q, w).certified(), to_string(p));
      ++on;
    }
    CHECK(off > 900);
    CHECK(on == 300);
  }

  TEST_CASE("serial and parallel certification agree") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 40; ++t) {
      const long q = kQs[rng() % kQs.size()];
      IntPoly p = random_weil_piece(rng, q, 1) * random_weil_piece(rng, q, 1) * random_weil_piece(rng, q, 1);
      if (t % 3 == 0) p = p * IntPoly{-1, 1};
      const WeilCertificate s = certify_weil(p, q, 1, Execution::sequential);
      const WeilCertificate par = certify_weil(p, q, 1, Execution::parallel);
      CHECK(s.status == par.status);
      REQUIRE(s.factors.size() == par.factors.size());
      for (std::size_t i = 0; i < s.factors.size(); ++i) CHECK(s.factors[i].describe() == par.factors[i].describe());
    }
  }

  TEST_CASE("finite extension transform examples") {
    // p = T - q^f maps to T^(fn) - q^(fn)
    for (int f = 1; f <= 3; ++f)
      for (int n = 1; n <= 3; ++n) {
        const Integer qf = ts::ipow(3, static_cast<unsigned>(f));
        const IntPoly out = finite_extension_transform(IntPoly::linear(qf), f, n);
        CHECK(out == IntPoly::monomial(1, static_cast<std::size_t>(f * n)) - IntPoly{ts::ipow(3, static_cast<unsigned>(f * n)).get_si()});
      }
    const IntPoly p{2, -1, 1};
    CHECK(finite_extension_transform(p, 1, 1) == p);
    const IntPoly p2 = quadratic(3, 4);  // Weil 2^2-polynomial of weight 1
    CHECK(finite_extension_transform(p2, 2, 1) == p2.substitute_power(2));
    CHECK_THROWS_AS(finite_extension_transform(p, 0, 1), PreconditionError);
  }

  TEST_CASE("finite extension transform matches charpoly of a companion power, and keeps the weight") {
    std::mt19937_64 rng(44);
    for (int t = 0; t < 60; ++t) {
      const long q = 2 + static_cast<long>(rng() % 2);
      const int f = 1 + static_cast<int>(rng() % 2), n = 1 + static_cast<int>(rng() % 3);
      const Integer qf = ts::ipow(q, static_cast<unsigned>(f));
      IntPoly p = random_weil_piece(rng, qf.get_si(), 1) * random_weil_piece(rng, qf.get_si(), 1);
      const IntPoly out = finite_extension_transform(p, f, n);
      const IntPoly oracle =
          characteristic_polynomial(power(companion_matrix(p), static_cast<unsigned>(n))).substitute_power(static_cast<unsigned>(f * n));
      CHECK(out == oracle);
      CHECK(certify_weil(out, q, 1).certified());
    }
  }

  TEST_CASE("Bezout bad primes examples") {
    const PrimeSet s = bezout_bad_primes(IntPoly{-1, 1}, IntPoly{1, 1});
    CHECK(s == PrimeSet{2});
    CHECK(bezout_bad_primes(IntPoly{0, 1}, IntPoly{-1, 1}).empty());
    CHECK_THROWS_AS(bezout_bad_primes(IntPoly{2, -1, 1}, IntPoly{2, -1, 1}), PreconditionError);
    CHECK_THROWS_AS(bezout_bad_primes(IntPoly{-1, 1} * IntPoly{1, 1}, IntPoly{-1, 1} * IntPoly{3, 1}), PreconditionError);
    // T - 1 and T - q: the difference is the constant q - 1
    CHECK(bezout_bad_primes(IntPoly{-1, 1}, IntPoly{-7, 1}) == PrimeSet{2, 3});
  }

  TEST_CASE("Bezout bad primes divide the resultant and cover every failure up to 100") {
    std::mt19937_64 rng(45);
    const auto ells = primes_in_range(2, 100);
    int tested = 0;
    while (tested < 500) {
      const IntPoly a = random_poly(rng, 1 + static_cast<int>(rng() % 6), 9, false);
      const IntPoly b = random_poly(rng, 1 + static_cast<int>(rng() % 6), 9, false);
      const Integer res = resultant(a, b);
      if (res == 0) continue;
      ++tested;
      const PrimeSet s = bezout_bad_primes(a, b);
      const PrimeSet rp = prime_divisors(res);
      for (const auto& p : s) CHECK(rp.count(p) == 1);
      for (auto ell : ells) {
        if (s.count(Integer(static_cast<unsigned long>(ell)))) continue;
        CHECK_MESSAGE(ts::gcd_degree_mod(a, b, ell) == 0, to_string(a) << " , " << to_string(b) << " mod " << ell);
      }
    }
  }

  TEST_CASE("annihilation examples") {
    const long q = 5;
    {
      const Annihilation a = annihilation_exceptional_primes(LatticeMap(Integer(q) * IntMatrix::identity(2)), IntPoly::linear(q));
      CHECK(a.integral);
    }
    {
      const Annihilation a = annihilation_exceptional_primes(LatticeMap(IntMatrix{{q, 1}, {0, q}}), IntPoly::linear(q));
      CHECK_FALSE(a.integral);
      CHECK(a.content == 1);
      CHECK(a.primes.empty());
    }
    {
      const Annihilation a =
          annihilation_exceptional_primes(LatticeMap(IntMatrix{{q, 6}, {0, q}}), pow(IntPoly::linear(q), 2));
      CHECK(a.integral);
    }
    {
      const Annihilation a = annihilation_exceptional_primes(LatticeMap(IntMatrix{{q, 6}, {0, q}}), IntPoly::linear(q));
      CHECK(a.content == 6);
      CHECK(a.primes == PrimeSet{2, 3});
    }
  }

  TEST_CASE("equivariant maps between distinct weights vanish outside the Bezout set") {
    // Enumerate every F_ell-matrix X with X F1 = F2 X.
    struct Case {
      IntPoly p1, p2;
    };
    const long q = 2;
    const std::vector<Case> cases{{IntPoly{2, -1, 1}, IntPoly::linear(2)},
                                  {IntPoly{2, 1, 1}, IntPoly{4, -3, 1}},
                                  {IntPoly::linear(1), IntPoly{2, -2, 1}},
                                  {IntPoly{4, 0, 1}, IntPoly{2, 0, 1}}};
    for (const auto& c : cases) {
      const PrimeSet bad = bezout_bad_primes(c.p1, c.p2);
      const IntMatrix f1 = companion_matrix(c.p1), f2 = companion_matrix(c.p2);
      for (std::uint64_t ell : {3, 5, 7}) {
        const FpMatrix a = FpMatrix::reduce(f1, ell), b = FpMatrix::reduce(f2, ell);
        const std::size_t rows = f2.rows(), cols = f1.rows(), cells = rows * cols;
        std::size_t nonzero_solutions = 0;
        std::vector<std::uint64_t> x(cells, 0);
        while (true) {
          FpMatrix X(ell, rows, cols);
          for (std::size_t k = 0; k < cells; ++k) X(k / cols, k % cols) = x[k];
          if (X * a == b * X && !X.is_zero()) ++nonzero_solutions;
          std::size_t k = 0;
          while (k < cells && x[k] == ell - 1) x[k++] = 0;
          if (k == cells) break;
          ++x[k];
        }
        if (!bad.count(Integer(static_cast<unsigned long>(ell)))) CHECK(nonzero_solutions == 0);
      }
      (void)q;
    }
  }

  TEST_CASE("factorization reconstructs its input") {
    std::mt19937_64 rng(46);
    for (int t = 0; t < 200; ++t) {
      IntPoly p{1};
      const int k = 1 + static_cast<int>(rng() % 4);
      for (int i = 0; i < k; ++i) p = p * random_poly(rng, 1 + static_cast<int>(rng() % 3), 6, false);
      const Factorization f = factor(p);
      CHECK(f.expand() == p);
      for (const auto& [g, m] : f.factors) {
        CHECK(g.lead() > 0);
        CHECK(g.content() == 1);
        CHECK(m >= 1);
      }
    }
  }

  TEST_CASE("factorization of known polynomials") {
    const auto degrees = [](const IntPoly& p) {
      std::vector<int> d;
      for (const auto& [g, m] : factor(p).factors)
        for (unsigned i = 0; i < m; ++i) d.push_back(g.degree());
      return d;
    };
    CHECK(degrees(IntPoly{1, 0, 0, 0, 1}) == std::vector<int>{4});                  // T^4 + 1
    CHECK(degrees(IntPoly{1, 0, -10, 0, 1}) == std::vector<int>{4});                // sqrt2 + sqrt3
    CHECK(degrees(IntPoly{-1, 0, 0, 0, 0, 0, 1}) == std::vector<int>{1, 1, 2, 2});  // T^6 - 1
    CHECK(degrees(pow(IntPoly{2, -1, 1}, 3) * IntPoly{-1, 1}) == std::vector<int>{1, 2, 2, 2});
    CHECK(factor(IntPoly{-6, 0, 6}).unit == 6);
  }

  TEST_CASE("resultants and Sturm counts") {
    CHECK(resultant(IntPoly{-1, 1}, IntPoly{1, 1}) == 2);
    CHECK(abs(resultant(IntPoly{2, -1, 1}, IntPoly{0, 1})) == 2);
    CHECK(SturmSequence(IntPoly{-2, 0, 1}).count_real() == 2);
    CHECK(SturmSequence(IntPoly{2, 0, 1}).count_real() == 0);
    CHECK(SturmSequence(IntPoly{0, -1, 0, 1}).count_half_open(Rational(-1, 2), Rational(2)) == 2);  // 0 and 1
    const IntPoly p{9, 0, 7, 0, 1};
    const IntPoly r = parametric_resultant(
        p, [](const Integer& t) { return IntPoly(std::vector<Integer>{3, -t, 1}); }, 4);
    for (long t = -5; t <= 5; ++t) CHECK(r.eval(Integer(t)) == resultant(p, IntPoly(std::vector<Integer>{3, -t, 1})));
  }
}
