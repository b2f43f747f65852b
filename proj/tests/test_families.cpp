#include "doctest.h"

#include "support.hpp"
#include "wmt/errors.hpp"
#include "wmt/families.hpp"

using namespace wmt;
namespace ts = testing_support;

namespace {

IntegralFamily family(const IntMatrix& frob, std::map<std::uint64_t, FiberOverride> exceptions = {}) {
  return IntegralFamily(Lattice{frob.rows(), ""}, {{"frobenius", LatticeMap(frob)}}, std::move(exceptions));
}

IntMatrix scalar(std::size_t n, long c) { return Integer(c) * IntMatrix::identity(n); }

IntMatrix companion_of_quadratic(long a, long q) { return companion_matrix(IntPoly{q, -a, 1}); }

// An invertible-mod-ell check written from scratch (rank by elimination in the support header).
bool invertible_mod(const IntMatrix& m, std::uint64_t ell) {
  return ts::rank_mod(m, static_cast<std::int64_t>(ell)) == m.rows();
}

IntMatrix random_square(std::mt19937_64& rng, std::size_t n, int bound) {
  std::uniform_int_distribution<int> e(-bound, bound);
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = e(rng);
  return m;
}

}  // namespace

TEST_SUITE("families") {
  TEST_CASE("rank one frobenius q has weight two") {
    for (long q : {2L, 3L, 4L, 9L}) {
      const WeightCertification c = weight_certify_family(family(scalar(1, q)), q, 2);
      CHECK(c.succeeded);
      CHECK(c.certificate.certified());
      CHECK(c.exceptional.empty());
      CHECK_FALSE(c.scope_note.empty());
    }
  }

  TEST_CASE("companion matrices of Weil quadratics have weight one") {
    for (long q : {2L, 3L, 5L, 7L})
      for (long a = -4; a <= 4; ++a) {
        if (a * a > 4 * q) continue;
        CHECK(weight_certify_family(family(companion_of_quadratic(a, q)), q, 1).succeeded);
      }
  }

  TEST_CASE("mixed weights without a candidate raise NotOfWeight with a refutation") {
    const IntMatrix frob{{1, 0}, {0, 3}};
    try {
      (void)weight_certify_family(family(frob), 3, 1);
      FAIL("expected NotOfWeight");
    } catch (const NotOfWeight& e) {
      CHECK_FALSE(e.certificate().certified());
      REQUIRE(e.certificate().witness);
      CHECK(e.certificate().witness->kind == WeilWitness::Kind::not_self_reciprocal);
    }
  }

  TEST_CASE("a certified candidate that does not kill frobenius is reported, not thrown") {
    const IntMatrix frob{{3, 1}, {0, 3}};
    const WeightCertification c = weight_certify_family(family(frob), 3, 2, IntPoly::linear(3));
    CHECK(c.certificate.certified());
    CHECK_FALSE(c.succeeded);
    CHECK_FALSE(c.annihilation.integral);
    CHECK(weight_certify_family(family(frob), 3, 2).succeeded);  // (T-3)^2 does kill it
  }

  TEST_CASE("exceptional fibers whose frobenius is not killed are listed") {
    FiberOverride odd{1, {{"frobenius", FpMatrix::reduce(IntMatrix{{1}}, 5)}}};
    FiberOverride fine{1, {{"frobenius", FpMatrix::reduce(IntMatrix{{2}}, 7)}}};
    const WeightCertification c = weight_certify_family(family(scalar(1, 2), {{5, odd}, {7, fine}}), 2, 2);
    CHECK(c.succeeded);
    CHECK(c.exceptional == std::set<std::uint64_t>{5});
  }

  TEST_CASE("family constructor preconditions") {
    CHECK_THROWS_AS(IntegralFamily(Lattice{2, ""}, {}), PreconditionError);
    CHECK_THROWS_AS(family(IntMatrix(2, 3)), PreconditionError);
    FiberOverride bad_key{1, {{"frobenius", FpMatrix::reduce(IntMatrix{{1}}, 3)}}};
    CHECK_THROWS_AS(family(scalar(1, 2), {{4, bad_key}}), PreconditionError);
    FiberOverride wrong_field{1, {{"frobenius", FpMatrix::reduce(IntMatrix{{1}}, 3)}}};
    CHECK_THROWS_AS(family(scalar(1, 2), {{5, wrong_field}}), PreconditionError);
    IntegralFamily f = family(scalar(1, 2));
    CHECK_THROWS_AS(f.declare_weight(1, certify_weil(IntPoly{-1, 1}, 2, 1)), PreconditionError);
  }

  TEST_CASE("almost all iso examples") {
    {
      const IsoVerdict v = almost_all_iso(FamilyMap(family(scalar(2, 3)), family(scalar(2, 3)), LatticeMap(IntMatrix::identity(2))));
      CHECK(v.kind == IsoVerdict::Kind::almost_all);
      CHECK(v.bad.empty());
    }
    {
      const IsoVerdict v = almost_all_iso(FamilyMap(family(scalar(1, 5)), family(scalar(1, 5)), LatticeMap(IntMatrix{{6}})));
      CHECK(v.kind == IsoVerdict::Kind::almost_all);
      CHECK(v.bad == PrimeSet{2, 3});
      CHECK(v.provenance.size() == 2);
    }
    {
      const IsoVerdict v = almost_all_iso(FamilyMap(family(scalar(2, 5)), family(scalar(2, 5)), LatticeMap(IntMatrix{{1, 2}, {2, 4}})));
      CHECK(v.kind == IsoVerdict::Kind::no_ell);
    }
    {
      const IsoVerdict v = almost_all_iso(FamilyMap(family(scalar(2, 5)), family(scalar(1, 5)), LatticeMap(IntMatrix{{1, 0}})));
      CHECK(v.kind == IsoVerdict::Kind::rank_mismatch);
    }
  }

  TEST_CASE("almost all iso is sound and complete on random equivariant maps") {
    std::mt19937_64 rng(51);
    const auto small = primes_in_range(2, 200);
    const auto large = primes_in_range(1000003, 1000400);
    REQUIRE(large.size() >= 20);
    int checked = 0;
    for (int t = 0; t < 150; ++t) {
      // Scalar frobenius makes every map equivariant.
      const std::size_t n = 1 + rng() % 4;
      const IntMatrix m = random_square(rng, n, 6);
      const IsoVerdict v = almost_all_iso(FamilyMap(family(scalar(n, 4)), family(scalar(n, 4)), LatticeMap(m)));
      if (v.kind == IsoVerdict::Kind::no_ell) {
        CHECK(ts::rank_over_q(m) < n);
        continue;
      }
      ++checked;
      REQUIRE(v.kind == IsoVerdict::Kind::almost_all);
      for (auto ell : small) CHECK(invertible_mod(m, ell) == (v.bad.count(Integer(static_cast<unsigned long>(ell))) == 0));
      for (std::size_t k = 0; k < 20; ++k) CHECK(invertible_mod(m, large[k]));
      for (const auto& p : v.bad) CHECK_FALSE(invertible_mod(m, p.get_ui()));
    }
    CHECK(checked > 100);
  }

  TEST_CASE("explicit fiber maps rescue or condemn their prime") {
    // Model map 3 on rank one; at 3 an explicit fiber map 1 is an isomorphism.
    const FamilyMap rescued(family(scalar(1, 2)), family(scalar(1, 2)), LatticeMap(IntMatrix{{3}}),
                            {{3, FpMatrix::identity(3, 1)}});
    const IsoVerdict v = almost_all_iso(rescued);
    CHECK(v.bad.empty());
    CHECK(v.rescued == std::set<std::uint64_t>{3});

    // Model map 1; at 5 the explicit map is zero.
    const FamilyMap condemned(family(scalar(1, 2)), family(scalar(1, 2)), LatticeMap(IntMatrix{{1}}),
                              {{5, FpMatrix(5, 1, 1)}});
    CHECK(almost_all_iso(condemned).bad == PrimeSet{5});

    // A fiber of different dimension without a map override is rejected.
    FiberOverride jump{2, {{"frobenius", FpMatrix::reduce(scalar(2, 2), 7)}}};
    CHECK_THROWS_AS(FamilyMap(family(scalar(1, 2), {{7, jump}}), family(scalar(1, 2)), LatticeMap(IntMatrix{{1}})),
                    PreconditionError);
  }

  TEST_CASE("map preconditions") {
    CHECK_THROWS_AS(FamilyMap(family(scalar(1, 2)), family(scalar(2, 2)), LatticeMap(IntMatrix{{1}})), PreconditionError);
    // not equivariant
    CHECK_THROWS_AS(FamilyMap(family(IntMatrix{{1, 1}, {0, 1}}), family(scalar(2, 1)), LatticeMap(IntMatrix{{1, 0}, {0, 2}})),
                    PreconditionError);
    // override not equivariant with the fiber frobenii
    CHECK_THROWS_AS(FamilyMap(family(scalar(1, 1)), family(scalar(1, 2)), LatticeMap(IntMatrix{{0}}),
                              {{5, FpMatrix::identity(5, 1)}}),
                    PreconditionError);
  }

  TEST_CASE("maps from weight zero to weight two vanish away from primes of q - 1") {
    for (long q : {2L, 3L, 4L, 5L, 7L, 8L, 9L, 13L}) {
      const FamilyMap f(family(scalar(1, 1)), family(scalar(1, q)), LatticeMap(IntMatrix{{0}}));
      const VanishingReport r = vanishing_for_almost_all(f, 0, 2, q);
      CHECK(r.exceptional == prime_divisors(Integer(q - 1)));
      CHECK(r.bezout == prime_divisors(Integer(q - 1)));
      for (auto ell : r.verified) CHECK(r.exceptional.count(Integer(static_cast<unsigned long>(ell))) == 0);
      CHECK(r.verified.size() + r.exceptional.size() == primes_in_range(2, 100).size());
    }
  }

  TEST_CASE("vanishing preconditions") {
    const FamilyMap same(family(scalar(1, 3)), family(scalar(1, 3)), LatticeMap(IntMatrix{{1}}));
    CHECK_THROWS_AS(vanishing_for_almost_all(same, 2, 2, 3), PreconditionError);
    // An equivariant nonzero model map between distinct weights cannot be built.
    CHECK_THROWS_AS(FamilyMap(family(scalar(1, 1)), family(scalar(1, 3)), LatticeMap(IntMatrix{{1}})), PreconditionError);
    // a side that is not of the requested weight
    const FamilyMap wrong(family(scalar(1, 3)), family(scalar(1, 9)), LatticeMap(IntMatrix{{0}}));
    CHECK_THROWS_AS(vanishing_for_almost_all(wrong, 0, 4, 3), NotOfWeight);
    CHECK_NOTHROW(vanishing_for_almost_all(wrong, 2, 4, 3));
  }

  TEST_CASE("a nonzero override at an exceptional fiber is tolerated, outside it is not") {
    // Source weight 0 (frob 1), target weight 2 at q = 4 (frob 4). Mod 3 the two coincide.
    const FamilyMap f(family(scalar(1, 1)), family(scalar(1, 4)), LatticeMap(IntMatrix{{0}}),
                      {{3, FpMatrix::identity(3, 1)}});
    const VanishingReport r = vanishing_for_almost_all(f, 0, 2, 4);
    CHECK(r.exceptional == PrimeSet{3});

    // At 11 the target fiber is replaced by one with frobenius 1, which breaks its weight.
    FiberOverride fake{1, {{"frobenius", FpMatrix::identity(11, 1)}}};
    const FamilyMap g(family(scalar(1, 1)), family(scalar(1, 4), {{11, fake}}), LatticeMap(IntMatrix{{0}}),
                      {{11, FpMatrix::identity(11, 1)}});
    const VanishingReport rg = vanishing_for_almost_all(g, 0, 2, 4);
    CHECK(rg.certificate_exceptions == std::set<std::uint64_t>{11});
    CHECK(rg.exceptional == PrimeSet{3, 11});
  }

  TEST_CASE("declared weights are used for the vanishing check") {
    IntegralFamily src = family(companion_of_quadratic(1, 2));
    src.declare_weight(1, certify_weil(IntPoly{2, -1, 1}, 2, 1));
    IntegralFamily dst = family(scalar(1, 2));
    dst.declare_weight(2, certify_weil(IntPoly::linear(2), 2, 2));
    const VanishingReport r = vanishing_for_almost_all(FamilyMap(src, dst, LatticeMap(IntMatrix(1, 2))), 1, 2, 2);
    CHECK(r.source_polynomial == IntPoly{2, -1, 1});
    CHECK(r.target_polynomial == IntPoly::linear(2));
    // Res(T^2 - T + 2, T - 2) = 4
    CHECK(r.bezout == PrimeSet{2});
  }

  TEST_CASE("vanishing is stable under passing to powers of frobenius") {
    std::mt19937_64 rng(52);
    for (int t = 0; t < 30; ++t) {
      const long q = rng() % 2 ? 2 : 3;
      const long bound = q == 2 ? 2 : 3;
      std::uniform_int_distribution<long> ad(-bound, bound);
      const long a = ad(rng);
      const IntPoly p1{q, -a, 1};
      const IntPoly p2 = IntPoly::linear(q);
      const PrimeSet base = bezout_bad_primes(p1, p2);
      for (int n = 1; n <= 3; ++n) {
        const long qn = ts::ipow(q, static_cast<unsigned>(n)).get_si();
        const IntMatrix f1 = power(companion_matrix(p1), static_cast<unsigned>(n));
        const IntMatrix f2 = power(companion_matrix(p2), static_cast<unsigned>(n));
        const FamilyMap fm(family(f1), family(f2), LatticeMap(IntMatrix(f2.rows(), f1.rows())));
        const VanishingReport r = vanishing_for_almost_all(fm, 1, 2, qn);
        CHECK(certify_weil(finite_extension_transform(p1, 1, n), q, 1).certified());
        // The exceptional set can only grow under base change.
        for (const auto& p : base) CHECK(r.exceptional.count(p) == 1);
      }
    }
  }

  TEST_CASE("serial and parallel vanishing checks agree") {
    for (long q : {2L, 5L, 7L}) {
      const FamilyMap f(family(companion_of_quadratic(1, q)), family(scalar(1, q)), LatticeMap(IntMatrix(1, 2)));
      const VanishingReport s = vanishing_for_almost_all(f, 1, 2, q, 500, Execution::sequential);
      const VanishingReport p = vanishing_for_almost_all(f, 1, 2, q, 500, Execution::parallel);
      CHECK(s.exceptional == p.exceptional);
      CHECK(s.verified == p.verified);
    }
  }
}
