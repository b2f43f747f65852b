#include "doctest.h"

#include "support.hpp"
#include "wmt/errors.hpp"
#include "wmt/filtration.hpp"

#include <functional>

using namespace wmt;
namespace ts = testing_support;

namespace {

// M_k = saturate( sum_{j >= max(0,-k)} N^j ker N^(k+2j+1) ), a closed formula independent of the
// inductive construction.
Sublattice formula_step(const IntMatrix& n, int k, int d) {
  const std::size_t r = n.rows();
  IntMatrix gens(r, 0);
  for (int j = std::max(0, -k); j <= d; ++j) {
    const int e = k + 2 * j + 1;
    if (e <= 0) continue;
    const Sublattice ker = kernel(LatticeMap(power(n, static_cast<unsigned>(e))));
    gens = hstack(gens, power(n, static_cast<unsigned>(j)) * ker.basis());
  }
  return saturate(Sublattice(r, gens));
}

// Does the chain steps[0..] = M_{-d}, ..., M_d satisfy the two characterizing properties over Q?
bool characterizes(const IntMatrix& n, const std::vector<Sublattice>& steps, int d) {
  const std::size_t r = n.rows();
  const auto M = [&](int i) -> Sublattice {
    if (i < -d) return Sublattice::zero(r);
    if (i > d) return Sublattice::full(r);
    return steps[static_cast<std::size_t>(i + d)];
  };
  if (M(d) != Sublattice::full(r)) return false;
  for (int i = -d; i <= d; ++i) {
    if (!saturate(M(i)).contains(M(i - 1))) return false;
    // N(M_i) inside M_{i-2}, rationally
    const IntMatrix image = n * M(i).basis();
    if (ts::rank_over_q(hstack(M(i - 2).basis(), image)) != M(i - 2).rank()) return false;
  }
  for (int i = 1; i <= d; ++i) {
    const std::size_t gi = M(i).rank() - M(i - 1).rank();
    const std::size_t gm = M(-i).rank() - M(-i - 1).rank();
    if (gi != gm) return false;
    const IntMatrix ni_b = power(n, static_cast<unsigned>(i)) * M(i).basis();
    const IntMatrix c = M(-i - 1).basis();
    const std::size_t pre = ni_b.cols() + c.cols() - ts::rank_over_q(hstack(ni_b, c));
    if (pre != M(i - 1).rank()) return false;
  }
  return true;
}

std::vector<Sublattice> steps_of(const MonodromyFiltration& f, int d) {
  std::vector<Sublattice> out;
  for (int i = -d; i <= d; ++i) out.push_back(f.step(i));
  return out;
}

bool all_cokernels_torsion_free(const NilpotentOperator& op) {
  for (const auto& [i, e] : cokernel_torsion_freeness(op))
    if (!e.torsion_free()) return false;
  return true;
}

bool all_graded_units(const NilpotentOperator& op, const MonodromyFiltration& fil) {
  for (int i = 0; i <= op.nilpotency_index(); ++i)
    if (!graded_map_invariants(op, fil, i).all_units()) return false;
  return true;
}

std::vector<std::vector<std::size_t>> partitions(std::size_t n, std::size_t max_part) {
  if (n == 0) return {{}};
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t p = std::min(n, max_part); p >= 1; --p)
    for (auto rest : partitions(n - p, p)) {
      rest.insert(rest.begin(), p);
      out.push_back(rest);
    }
  return out;
}

}  // namespace

TEST_SUITE("filtration") {
  TEST_CASE("nilpotency index is validated") {
    CHECK(NilpotentOperator(IntMatrix(3, 3)).nilpotency_index() == 0);
    CHECK(NilpotentOperator(IntMatrix{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}).nilpotency_index() == 2);
    CHECK_THROWS_AS(NilpotentOperator(IntMatrix{{1, 0}, {0, 0}}), PreconditionError);
    CHECK_THROWS_AS(NilpotentOperator(IntMatrix(2, 3)), PreconditionError);
    CHECK(NilpotentOperator(IntMatrix(0, 0)).rank() == 0);
  }

  TEST_CASE("zero operator has one graded piece in degree zero") {
    const NilpotentOperator op(IntMatrix(3, 3));
    const MonodromyFiltration f = monodromy_filtration_rational(op);
    CHECK(f.step(-1).rank() == 0);
    CHECK(f.step(0) == Sublattice::full(3));
    CHECK(f.graded_rank(0) == 3);
  }

  TEST_CASE("single Jordan block of size two") {
    const IntMatrix n{{0, 5}, {0, 0}};
    const NilpotentOperator op(n);
    const MonodromyFiltration f = monodromy_filtration_rational(op);
    CHECK(f.graded_rank(-1) == 1);
    CHECK(f.graded_rank(0) == 0);
    CHECK(f.graded_rank(1) == 1);
    CHECK(f.step(-1) == saturate(image(LatticeMap(n))));
  }

  TEST_CASE("Jordan blocks of sizes three and one") {
    const IntMatrix n{{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
    const MonodromyFiltration f = monodromy_filtration_rational(NilpotentOperator(n));
    std::vector<std::size_t> ranks;
    for (int i = -2; i <= 2; ++i) ranks.push_back(f.graded_rank(i));
    CHECK(ranks == std::vector<std::size_t>{1, 0, 2, 0, 1});
  }

  TEST_CASE("graded map invariants examples") {
    {
      const NilpotentOperator op(IntMatrix(2, 2));
      const ElementaryDivisors e = graded_map_invariants(op, monodromy_filtration_rational(op), 0);
      CHECK(e.divisors == std::vector<Integer>{1, 1});
    }
    for (long n : {1L, 7L, 12L}) {
      const NilpotentOperator op(IntMatrix{{0, n}, {0, 0}});
      const ElementaryDivisors e = graded_map_invariants(op, monodromy_filtration_rational(op), 1);
      CHECK(e.divisors == std::vector<Integer>{n});
    }
    const NilpotentOperator op(IntMatrix{{0, 3}, {0, 0}});
    CHECK(graded_map_invariants(op, monodromy_filtration_rational(op), 4).divisors.empty());
  }

  TEST_CASE("cokernel report examples") {
    {
      const auto rep = cokernel_torsion_freeness(NilpotentOperator(IntMatrix(2, 2)));
      CHECK(rep.at(1).divisors == std::vector<Integer>{0, 0});
    }
    {
      const auto rep = cokernel_torsion_freeness(NilpotentOperator(IntMatrix{{0, 9}, {0, 0}}));
      CHECK(rep.at(1).divisors == std::vector<Integer>{9, 0});
      CHECK(rep.at(2).divisors == std::vector<Integer>{0, 0});
      CHECK(rep.size() == 3);
    }
    {
      const auto rep = cokernel_torsion_freeness(NilpotentOperator(IntMatrix{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}));
      for (const auto& [i, e] : rep) CHECK(e.torsion_free());
    }
  }

  TEST_CASE("bad primes examples") {
    CHECK(bad_primes_of_nilpotent(NilpotentOperator(IntMatrix(3, 3))).primes.empty());
    CHECK(bad_primes_of_nilpotent(NilpotentOperator(IntMatrix{{0, 12}, {0, 0}})).primes == PrimeSet{2, 3});
    const IntMatrix sum{{0, 2, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 3}, {0, 0, 0, 0}};
    const NilpotentBadPrimes b = bad_primes_of_nilpotent(NilpotentOperator(sum));
    CHECK(b.primes == PrimeSet{2, 3});
    bool saw_cokernel = false, saw_graded = false;
    for (const auto& w : b.provenance) {
      saw_cokernel = saw_cokernel || w.source == BadPrimeWitness::Source::cokernel;
      saw_graded = saw_graded || w.source == BadPrimeWitness::Source::graded;
      CHECK(w.divisor % w.prime == 0);
    }
    CHECK(saw_cokernel);
    CHECK(saw_graded);
  }

  TEST_CASE("random nilpotents: characterization, Jordan ranks and closed formula") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 200; ++t) {
      const auto sample = ts::random_nilpotent(rng);
      const NilpotentOperator op(sample.matrix);
      const int d = op.nilpotency_index();
      const MonodromyFiltration f = monodromy_filtration_rational(op);
      REQUIRE(characterizes(sample.matrix, steps_of(f, d), d));
      const auto expected = ts::jordan_graded_ranks(sample.blocks, d);
      for (int i = -d; i <= d; ++i) {
        CHECK(f.graded_rank(i) == expected[static_cast<std::size_t>(i + d)]);
        CHECK(f.step(i) == formula_step(sample.matrix, i, d));
        CHECK(is_saturated(f.step(i)));
      }
    }
  }

  TEST_CASE("perturbing any proper step breaks the characterization") {
    std::mt19937_64 rng(22);
    int perturbed = 0;
    for (int t = 0; t < 80; ++t) {
      const auto sample = ts::random_nilpotent(rng, 6);
      const NilpotentOperator op(sample.matrix);
      const int d = op.nilpotency_index();
      if (d == 0) continue;
      const MonodromyFiltration f = monodromy_filtration_rational(op);
      const std::size_t r = op.rank();
      for (int i = -d; i < d; ++i) {
        for (std::size_t e = 0; e < r; ++e) {
          std::vector<Integer> v(r, 0);
          v[e] = 1;
          if (f.step(i).contains(v)) continue;
          auto steps = steps_of(f, d);
          IntMatrix unit(r, 1);
          unit(e, 0) = 1;
          steps[static_cast<std::size_t>(i + d)] = saturate(Sublattice(r, hstack(f.step(i).basis(), unit)));
          CHECK_FALSE(characterizes(sample.matrix, steps, d));
          ++perturbed;
          break;
        }
      }
    }
    CHECK(perturbed > 50);
  }

  TEST_CASE("cokernels torsion-free iff graded maps unimodular, exhaustive over small Jordan forms") {
    std::size_t checked = 0;
    for (std::size_t n = 1; n <= 6; ++n)
      for (const auto& blocks : partitions(n, n)) {
        std::vector<std::pair<std::size_t, std::size_t>> slots;  // superdiagonal positions
        std::size_t at = 0;
        for (auto b : blocks) {
          for (std::size_t k = 1; k < b; ++k) slots.emplace_back(at + k - 1, at + k);
          at += b;
        }
        std::vector<int> entries(slots.size(), 1);
        while (true) {
          IntMatrix m(n, n);
          for (std::size_t s = 0; s < slots.size(); ++s) m(slots[s].first, slots[s].second) = entries[s];
          const NilpotentOperator op(m);
          const MonodromyFiltration f = monodromy_filtration_rational(op);
          REQUIRE(all_cokernels_torsion_free(op) == all_graded_units(op, f));
          ++checked;
          std::size_t k = 0;
          while (k < entries.size() && entries[k] == 6) entries[k++] = 1;
          if (k == entries.size()) break;
          ++entries[k];
        }
      }
    CHECK(checked > 10000);
  }

  TEST_CASE("equivalence survives unimodular conjugation") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 300; ++t) {
      const auto sample = ts::random_nilpotent(rng, 6);
      const NilpotentOperator op(sample.matrix);
      CHECK(all_cokernels_torsion_free(op) == all_graded_units(op, monodromy_filtration_rational(op)));
    }
  }

  TEST_CASE("conjugation moves the filtration and keeps the bad primes") {
    std::mt19937_64 rng(24);
    for (int t = 0; t < 100; ++t) {
      const auto sample = ts::random_nilpotent(rng, 6);
      const std::size_t r = sample.matrix.rows();
      const IntMatrix u = ts::random_unimodular(r, rng, 5);
      const IntMatrix conj = u * sample.matrix * ts::inverse_unimodular(u);
      const NilpotentOperator a(sample.matrix), b(conj);
      const MonodromyFiltration fa = monodromy_filtration_rational(a), fb = monodromy_filtration_rational(b);
      for (int i = -a.nilpotency_index(); i <= a.nilpotency_index(); ++i)
        CHECK(fb.step(i) == Sublattice(r, u * fa.step(i).basis()));
      CHECK(bad_primes_of_nilpotent(a).primes == bad_primes_of_nilpotent(b).primes);
    }
  }

  TEST_CASE("scaling by c keeps the filtration and scales level-i divisors by c^i") {
    std::mt19937_64 rng(25);
    for (int t = 0; t < 100; ++t) {
      const auto sample = ts::random_nilpotent(rng, 6);
      for (long c : {2L, -3L, 10L}) {
        const NilpotentOperator a(sample.matrix), b(Integer(c) * sample.matrix);
        const MonodromyFiltration fa = monodromy_filtration_rational(a), fb = monodromy_filtration_rational(b);
        CHECK(fa == fb);
        for (int i = 0; i <= a.nilpotency_index(); ++i) {
          auto da = graded_map_invariants(a, fa, i).divisors;
          for (auto& x : da) x *= abs(ts::ipow(Integer(c), static_cast<unsigned>(i)));
          CHECK(graded_map_invariants(b, fb, i).divisors == da);
        }
      }
    }
  }

  TEST_CASE("serial and parallel reports agree") {
    std::mt19937_64 rng(26);
    for (int t = 0; t < 50; ++t) {
      const NilpotentOperator op(ts::random_nilpotent(rng).matrix);
      CHECK(cokernel_torsion_freeness(op, Execution::sequential) == cokernel_torsion_freeness(op, Execution::parallel));
      const auto s = bad_primes_of_nilpotent(op, Execution::sequential);
      const auto p = bad_primes_of_nilpotent(op, Execution::parallel);
      CHECK(s.primes == p.primes);
      CHECK(s.provenance.size() == p.provenance.size());
    }
  }
}
