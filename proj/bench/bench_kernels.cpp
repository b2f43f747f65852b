// Serial reference against the OpenMP kernels on the same inputs; results must agree.

#include "wmt/corpus.hpp"
#include "wmt/families.hpp"
#include "wmt/filtration.hpp"
#include "wmt/modl.hpp"
#include "wmt/specseq.hpp"
#include "wmt/weil.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace wmt;

namespace {

double seconds(const std::function<void()>& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

bool all_agree = true;

template <class Result>
void row(const char* name, const std::function<Result(Execution)>& kernel, int reps = 3) {
  Result serial, parallel;
  const double ts = seconds([&] { serial = kernel(Execution::sequential); }, reps);
  const double tp = seconds([&] { parallel = kernel(Execution::parallel); }, reps);
  const bool same = serial == parallel;
  all_agree = all_agree && same;
  std::printf("%-34s %10.4f %10.4f %8.2fx  %s\n", name, ts, tp, ts / tp, same ? "same" : "DIFFERENT");
}

// An 8x8 nilpotent with large entries: a Jordan chain scaled by products of small primes.
IntMatrix chain(std::size_t n) {
  IntMatrix m(n, n);
  const long scale[] = {6, 10, 15, 21, 35, 14, 22, 33, 26, 39};
  for (std::size_t k = 1; k < n; ++k) m(k - 1, k) = scale[k % 10];
  return m;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-34s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

  const NilpotentOperator op(chain(8));
  const auto primes = primes_in_range(2, 4000);
  row<std::vector<std::string>>("property (t-f) scan, 550 primes", [&](Execution e) {
    std::vector<std::string> out;
    for (const auto& c : property_tf_scan(op, primes, e)) out.push_back(c.describe());
    return out;
  });

  row<PrimeSet>("bad primes of a 10x10 chain", [&](Execution e) {
    return bad_primes_of_nilpotent(NilpotentOperator(chain(10)), e).primes;
  });

  const SpectralPage big = assemble_page(two_components_descriptor(40, 6, 10));
  row<std::vector<std::size_t>>("E2 of two surfaces, genus 40", [&](Execution e) {
    std::vector<std::size_t> out;
    for (const auto& [at, x] : compute_E2(big, e)) out.push_back(x.free_rank);
    return out;
  });

  const DegenerationDescriptor cycle = i_n_descriptor(120);
  row<PrimeSet>("monodromy verdict, cycle of 120", [&](Execution e) { return monodromy_on_E2(cycle, 1, e).bad_primes(); });

  IntPoly weil_product{1};
  for (long a = -4; a <= 4; ++a) weil_product = weil_product * IntPoly{5, -a, 1};
  row<std::string>("Weil certification, 9 factors", [&](Execution e) {
    return std::string(to_string(certify_weil(weil_product, 5, 1, e).status));
  });

  const IntegralFamily src(Lattice{2, ""}, {{"frobenius", LatticeMap(companion_matrix(IntPoly{2, -1, 1}))}});
  const IntegralFamily dst(Lattice{1, ""}, {{"frobenius", LatticeMap(IntMatrix{{2}})}});
  const FamilyMap gap(src, dst, LatticeMap(IntMatrix(1, 2)));
  row<std::vector<std::uint64_t>>("vanishing verified up to 200000", [&](Execution e) {
    return vanishing_for_almost_all(gap, 1, 2, 2, 200000, e).verified;
  });

  std::printf("%s\n", all_agree ? "serial and parallel results agree" : "MISMATCH between serial and parallel");
  return all_agree ? 0 : 1;
}
