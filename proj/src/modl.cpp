#include "wmt/modl.hpp"

#include "wmt/errors.hpp"

#include <omp.h>

#include <sstream>

namespace wmt {

namespace {

int nilpotency_index_mod(const FpMatrix& n) {
  const std::size_t r = n.rows();
  if (r == 0 || n.is_zero()) return 0;
  FpMatrix p = n;
  for (std::size_t d = 1; d <= r; ++d) {
    p = p * n;
    if (p.is_zero()) return static_cast<int>(d);
  }
  throw PreconditionError("matrix is not nilpotent over F_ell");
}

FpMatrix minus_identity(const FpMatrix& u) { return u - FpMatrix::identity(u.ell(), u.rows()); }

struct FieldSteps {
  int d = 0;
  std::vector<Subspace> steps;
};

FieldSteps deligne_mod(const FpMatrix& n) {
  const std::uint64_t ell = n.ell();
  const std::size_t r = n.rows();
  FieldSteps out;
  out.d = nilpotency_index_mod(n);
  if (out.d == 0) {
    out.steps.push_back(Subspace::full(ell, r));
    return out;
  }
  const int d = out.d;
  FpMatrix top = power(n, static_cast<unsigned>(d));
  FpMatrix ker = top.kernel();
  FpMatrix img = Subspace(ell, r, top).basis();

  // Extend a basis of im N^d to one of ker N^d, greedily over the kernel basis.
  FpMatrix basis = img;
  std::size_t current = img.cols();
  for (std::size_t j = 0; j < ker.cols(); ++j) {
    FpMatrix trial = hstack(basis, ker.columns(j, 1));
    if (trial.rank() > current) {
      basis = trial;
      ++current;
    }
  }
  const std::size_t b = img.cols(), q = basis.cols() - b;
  FpMatrix complement = basis.columns(b, q);

  FpMatrix induced(ell, q, q);
  for (std::size_t j = 0; j < q; ++j) {
    FpMatrix image_col = n * complement.columns(j, 1);
    auto coords = solve_mod(basis, image_col.column(0));
    if (!coords) throw AssertionFailure("N does not preserve ker N^d over F_ell");
    for (std::size_t i = 0; i < q; ++i) induced(i, j) = (*coords)[b + i];
  }
  FieldSteps sub = deligne_mod(induced);

  for (int k = -d; k <= d; ++k) {
    if (k == d) {
      out.steps.push_back(Subspace::full(ell, r));
      continue;
    }
    FpMatrix lower = k < -sub.d   ? FpMatrix(ell, q, 0)
                     : k >= sub.d ? FpMatrix::identity(ell, q)
                                  : sub.steps[static_cast<std::size_t>(k + sub.d)].basis();
    out.steps.emplace_back(ell, r, hstack(img, complement * lower));
  }
  return out;
}

TfCheck tf_check_with(const NilpotentOperator& op, const MonodromyFiltration& fil,
                      const std::map<int, ElementaryDivisors>& cokernels, std::uint64_t ell) {
  TfCheck out;
  out.ell = ell;

  const FpMatrix reduced_n = FpMatrix::reduce(op.matrix(), ell);
  const FpMatrix sigma = reduced_n + FpMatrix::identity(ell, op.rank());
  const ModlFiltration modl = filtration_mod_ell(ModlOperator(sigma, ModlOperator::Kind::unipotent));
  const ModlFiltration reduced = reduce_filtration(fil, ell);
  out.filtration_matches = true;
  const int lo = std::min(modl.i_min(), reduced.i_min()) - 1;
  const int hi = std::max(modl.i_max(), reduced.i_max());
  for (int k = lo; k <= hi; ++k)
    if (!(modl.step(k) == reduced.step(k))) {
      out.filtration_matches = false;
      out.mismatch_step = k;
      break;
    }

  out.cokernels_torsion_free = true;
  for (const auto& [i, e] : cokernels) {
    for (const auto& dv : e.divisors)
      if (sgn(dv) != 0 && dv != 1 && mpz_divisible_ui_p(dv.get_mpz_t(), ell)) {
        out.cokernels_torsion_free = false;
        out.torsion_witness = std::make_pair(i, dv);
        break;
      }
    if (!out.cokernels_torsion_free) break;
  }

  if (out.filtration_matches != out.cokernels_torsion_free) {
    std::ostringstream os;
    os << "property (t-f) routes disagree at ell = " << ell << ": " << out.describe();
    throw AssertionFailure(os.str());
  }
  out.holds = out.filtration_matches;
  return out;
}

}  // namespace

ModlOperator::ModlOperator(FpMatrix matrix, Kind kind) : matrix_(std::move(matrix)), kind_(kind) {
  if (matrix_.rows() != matrix_.cols()) throw PreconditionError("mod-ell operator must be square");
  const FpMatrix shifted = kind_ == Kind::unipotent ? minus_identity(matrix_) : matrix_;
  if (!power(shifted, static_cast<unsigned>(matrix_.rows())).is_zero())
    throw PreconditionError(kind_ == Kind::unipotent ? "operator is not unipotent" : "operator is not nilpotent");
}

ModlOperator log_unipotent(const ModlOperator& u) {
  if (u.kind() != ModlOperator::Kind::unipotent) throw PreconditionError("log expects a unipotent operator");
  const std::size_t n = u.dim();
  const std::uint64_t ell = u.ell();
  if (ell < n) throw PreconditionError("log requires ell >= n");
  Fp f{ell};
  const FpMatrix x = minus_identity(u.matrix());
  FpMatrix sum(ell, n, n);
  FpMatrix term = x;
  for (std::size_t i = 1; i < n; ++i) {
    std::uint64_t coeff = f.inv(i % ell);
    if (i % 2 == 0) coeff = f.neg(coeff);
    sum = sum + term.scaled(coeff);
    term = term * x;
  }
  return ModlOperator(sum, ModlOperator::Kind::nilpotent);
}

ModlOperator exp_nilpotent(const ModlOperator& m) {
  if (m.kind() != ModlOperator::Kind::nilpotent) throw PreconditionError("exp expects a nilpotent operator");
  const std::size_t n = m.dim();
  const std::uint64_t ell = m.ell();
  if (ell < n) throw PreconditionError("exp requires ell >= n");
  Fp f{ell};
  FpMatrix sum = FpMatrix::identity(ell, n);
  FpMatrix term = FpMatrix::identity(ell, n);
  std::uint64_t factorial = 1;
  for (std::size_t i = 1; i < n; ++i) {
    term = term * m.matrix();
    factorial = f.mul(factorial, i % ell);
    sum = sum + term.scaled(f.inv(factorial));
  }
  return ModlOperator(sum, ModlOperator::Kind::unipotent);
}

ModlFiltration::ModlFiltration(std::uint64_t ell, std::size_t dim, int i_min, std::vector<Subspace> steps)
    : ell_(ell), dim_(dim), i_min_(i_min), steps_(std::move(steps)), zero_(Subspace::zero(ell, dim)),
      full_(Subspace::full(ell, dim)) {
  if (steps_.empty()) throw std::invalid_argument("filtration needs at least one step");
}

const Subspace& ModlFiltration::step(int i) const {
  if (i < i_min_) return zero_;
  if (i >= i_max()) return full_;
  return steps_[static_cast<std::size_t>(i - i_min_)];
}

ModlFiltration nilpotent_filtration_mod_ell(const FpMatrix& n) {
  FieldSteps s = deligne_mod(n);
  return ModlFiltration(n.ell(), n.rows(), -s.d, std::move(s.steps));
}

ModlFiltration filtration_mod_ell(const ModlOperator& u) {
  if (u.kind() != ModlOperator::Kind::unipotent) throw PreconditionError("filtration_mod_ell expects a unipotent operator");
  return nilpotent_filtration_mod_ell(minus_identity(u.matrix()));
}

ModlFiltration filtration_mod_ell_via_log(const ModlOperator& u) {
  return nilpotent_filtration_mod_ell(log_unipotent(u).matrix());
}

ModlFiltration reduce_filtration(const MonodromyFiltration& fil, std::uint64_t ell) {
  std::vector<Subspace> steps;
  for (int k = fil.i_min(); k <= fil.i_max(); ++k) {
    const Sublattice& s = fil.step(k);
    Subspace reduced(ell, fil.rank(), FpMatrix::reduce(s.basis(), ell));
    if (reduced.dim() != s.rank()) throw AssertionFailure("reduction of a saturated step lost rank");
    steps.push_back(std::move(reduced));
  }
  return ModlFiltration(ell, fil.rank(), fil.i_min(), std::move(steps));
}

std::string TfCheck::describe() const {
  std::ostringstream os;
  os << "ell=" << ell << (holds ? " holds" : " fails");
  if (mismatch_step) os << "; filtration differs at M_" << *mismatch_step;
  if (torsion_witness) os << "; coker(N^" << torsion_witness->first << ") has divisor " << torsion_witness->second;
  return os.str();
}

TfCheck property_tf_check(const NilpotentOperator& op, std::uint64_t ell) {
  if (!is_prime(ell)) throw PreconditionError("ell must be prime");
  return tf_check_with(op, monodromy_filtration_rational(op), cokernel_torsion_freeness(op), ell);
}

std::vector<TfCheck> property_tf_scan(const NilpotentOperator& op, const std::vector<std::uint64_t>& primes,
                                      Execution exec) {
  for (auto ell : primes)
    if (!is_prime(ell)) throw PreconditionError("ell must be prime");
  const MonodromyFiltration fil = monodromy_filtration_rational(op);
  const auto cokernels = cokernel_torsion_freeness(op);
  std::vector<TfCheck> out(primes.size());
  const long count = static_cast<long>(primes.size());
  if (exec == Execution::parallel) {
    // Exceptions cannot leave an OpenMP region; capture the first and rethrow.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < count; ++k) {
      try {
        out[static_cast<std::size_t>(k)] = tf_check_with(op, fil, cokernels, primes[static_cast<std::size_t>(k)]);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (long k = 0; k < count; ++k)
      out[static_cast<std::size_t>(k)] = tf_check_with(op, fil, cokernels, primes[static_cast<std::size_t>(k)]);
  }
  return out;
}

}  // namespace wmt
