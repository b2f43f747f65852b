#include "wmt/filtration.hpp"

#include "wmt/errors.hpp"

#include <omp.h>

#include <algorithm>

namespace wmt {

namespace {

int nilpotency_index_of(const IntMatrix& n) {
  if (!n.is_square()) throw PreconditionError("nilpotent operator must be square");
  const std::size_t r = n.rows();
  if (r == 0 || n.is_zero()) return 0;
  IntMatrix p = n;
  for (std::size_t d = 1; d <= r; ++d) {
    p = p * n;  // N^(d+1)
    if (p.is_zero()) return static_cast<int>(d);
  }
  throw PreconditionError("matrix is not nilpotent");
}

// Steps of the filtration of N on Z^r for the window [-d, d], d the nilpotency index.
struct Steps {
  int d = 0;
  std::vector<Sublattice> steps;  // index k + d

  const Sublattice& at(int k, const Sublattice& zero, const Sublattice& full) const {
    if (k < -d) return zero;
    if (k >= d) return full;
    return steps[static_cast<std::size_t>(k + d)];
  }
};

// Deligne's induction: M_d = H, M_{d-1} = ker N^d, M_{-d} = im N^d (saturated), and the middle
// steps are preimages of the filtration of the induced operator on ker N^d / im N^d.
// Every intermediate lattice is saturated, so the quotient stays free.
Steps deligne(const IntMatrix& n) {
  const std::size_t r = n.rows();
  Steps out;
  out.d = nilpotency_index_of(n);
  if (out.d == 0) {
    out.steps.push_back(Sublattice::full(r));
    return out;
  }
  const int d = out.d;
  IntMatrix top = power(n, static_cast<unsigned>(d));
  Sublattice ker = kernel(LatticeMap(top));
  Sublattice img = saturate(image(LatticeMap(top)));
  AdaptedBasis split = adapted_basis(img, ker);
  const IntMatrix full_basis = split.full();
  const std::size_t b = split.inner.cols();
  const std::size_t q = split.complement.cols();

  // Induced operator on the free quotient ker / img in the complement coordinates.
  IntMatrix induced(q, q);
  if (q > 0) {
    IntMatrix coords = solve_columns(full_basis, n * split.complement);
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < q; ++j) induced(i, j) = coords(b + i, j);
  }
  Steps sub = deligne(induced);
  const Sublattice sub_zero = Sublattice::zero(q), sub_full = Sublattice::full(q);

  out.steps.reserve(static_cast<std::size_t>(2 * d + 1));
  for (int k = -d; k <= d; ++k) {
    if (k == d) {
      out.steps.push_back(Sublattice::full(r));
      continue;
    }
    const Sublattice& lower = sub.at(k, sub_zero, sub_full);
    IntMatrix lifted = split.complement * lower.basis();
    out.steps.emplace_back(r, hstack(split.inner, lifted));
  }
  return out;
}

IntMatrix graded_map_matrix(const IntMatrix& n, const MonodromyFiltration& fil, int i) {
  const AdaptedBasis src = adapted_basis(fil.step(i - 1), fil.step(i));
  const AdaptedBasis dst = adapted_basis(fil.step(-i - 1), fil.step(-i));
  const std::size_t rows = dst.complement.cols(), cols = src.complement.cols();
  IntMatrix m(rows, cols);
  if (rows == 0 || cols == 0) return m;
  IntMatrix images = power(n, static_cast<unsigned>(i)) * src.complement;
  IntMatrix coords = solve_columns(dst.full(), images);
  const std::size_t offset = dst.inner.cols();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = coords(offset + r, c);
  return m;
}

}  // namespace

NilpotentOperator::NilpotentOperator(IntMatrix n)
    : space_{n.rows(), {}}, n_(std::move(n)), index_(nilpotency_index_of(n_)) {}

MonodromyFiltration::MonodromyFiltration(std::size_t rank, int i_min, std::vector<Sublattice> steps)
    : rank_(rank), i_min_(i_min), steps_(std::move(steps)), zero_(Sublattice::zero(rank)),
      full_(Sublattice::full(rank)) {
  if (steps_.empty()) throw std::invalid_argument("filtration needs at least one step");
}

const Sublattice& MonodromyFiltration::step(int i) const {
  if (i < i_min_) return zero_;
  if (i >= i_max()) return full_;
  return steps_[static_cast<std::size_t>(i - i_min_)];
}

MonodromyFiltration monodromy_filtration_rational(const NilpotentOperator& op) {
  Steps s = deligne(op.matrix());
  return MonodromyFiltration(op.rank(), -s.d, std::move(s.steps));
}

IntMatrix graded_map(const NilpotentOperator& op, const MonodromyFiltration& fil, int i) {
  if (i < 0) throw PreconditionError("graded map level must be non-negative");
  return graded_map_matrix(op.matrix(), fil, i);
}

ElementaryDivisors graded_map_invariants(const NilpotentOperator& op, const MonodromyFiltration& fil, int i) {
  IntMatrix m = graded_map(op, fil, i);
  if (m.rows() == 0) return {};
  return cokernel_invariants(LatticeMap(m));
}

std::map<int, ElementaryDivisors> cokernel_torsion_freeness(const NilpotentOperator& op, Execution exec) {
  const int levels = op.nilpotency_index() + 2;
  std::vector<ElementaryDivisors> out(static_cast<std::size_t>(levels));
  const auto compute = [&](int i) {
    IntMatrix p = power(op.matrix(), static_cast<unsigned>(i));
    out[static_cast<std::size_t>(i)] = cokernel_invariants(LatticeMap(op.space(), op.space(), p));
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < levels; ++i) compute(i);
  } else {
    for (int i = 0; i < levels; ++i) compute(i);
  }
  std::map<int, ElementaryDivisors> report;
  for (int i = 0; i < levels; ++i) report.emplace(i, std::move(out[static_cast<std::size_t>(i)]));
  return report;
}

NilpotentBadPrimes bad_primes_of_nilpotent(const NilpotentOperator& op, Execution exec) {
  NilpotentBadPrimes result;
  auto cokernels = cokernel_torsion_freeness(op, exec);
  for (const auto& [i, e] : cokernels)
    for (const auto& d : e.divisors) {
      if (sgn(d) == 0 || d == 1) continue;
      for (const auto& p : prime_divisors(d)) {
        result.primes.insert(p);
        result.provenance.push_back({p, i, d, BadPrimeWitness::Source::cokernel});
      }
    }

  const MonodromyFiltration fil = monodromy_filtration_rational(op);
  const int d = op.nilpotency_index();
  std::vector<ElementaryDivisors> graded(static_cast<std::size_t>(d + 1));
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i <= d; ++i) graded[static_cast<std::size_t>(i)] = graded_map_invariants(op, fil, i);
  } else {
    for (int i = 0; i <= d; ++i) graded[static_cast<std::size_t>(i)] = graded_map_invariants(op, fil, i);
  }
  PrimeSet graded_primes;
  for (int i = 0; i <= d; ++i) {
    const auto& e = graded[static_cast<std::size_t>(i)];
    if (e.zero_count() != 0) throw AssertionFailure("graded map N^i is not a rational isomorphism");
    for (const auto& dv : e.divisors) {
      if (dv == 1) continue;
      for (const auto& p : prime_divisors(dv)) {
        graded_primes.insert(p);
        result.provenance.push_back({p, i, dv, BadPrimeWitness::Source::graded});
      }
    }
  }
  if (graded_primes != result.primes)
    throw AssertionFailure("cokernel and graded-map bad prime sets disagree");
  return result;
}

}  // namespace wmt
