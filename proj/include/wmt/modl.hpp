#pragma once

#include "wmt/execution.hpp"
#include "wmt/filtration.hpp"
#include "wmt/modular.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wmt {

/// An operator on F_ell^n that is either unipotent ((A - 1)^n = 0) or nilpotent (A^n = 0).
class ModlOperator {
public:
  enum class Kind { unipotent, nilpotent };

  /// Validates the kind; throws PreconditionError otherwise.
  ModlOperator(FpMatrix matrix, Kind kind);

  std::uint64_t ell() const { return matrix_.ell(); }
  std::size_t dim() const { return matrix_.rows(); }
  Kind kind() const { return kind_; }
  const FpMatrix& matrix() const { return matrix_; }

  friend bool operator==(const ModlOperator&, const ModlOperator&) = default;

private:
  FpMatrix matrix_;
  Kind kind_;
};

/// log(U) = sum_{1 <= i <= n-1} (-1)^(i+1)/i (U - 1)^i. Requires ell >= n.
ModlOperator log_unipotent(const ModlOperator& u);
/// exp(N) = sum_{0 <= i <= n-1} N^i / i!. Requires ell >= n.
ModlOperator exp_nilpotent(const ModlOperator& n);

/// Filtration over F_ell by subspaces; same clamping conventions as MonodromyFiltration.
class ModlFiltration {
public:
  ModlFiltration() = default;
  ModlFiltration(std::uint64_t ell, std::size_t dim, int i_min, std::vector<Subspace> steps);

  std::uint64_t ell() const { return ell_; }
  std::size_t dim() const { return dim_; }
  int i_min() const { return i_min_; }
  int i_max() const { return i_min_ + static_cast<int>(steps_.size()) - 1; }
  const Subspace& step(int i) const;
  std::size_t graded_dim(int i) const { return step(i).dim() - step(i - 1).dim(); }

  friend bool operator==(const ModlFiltration& a, const ModlFiltration& b) {
    return a.ell_ == b.ell_ && a.dim_ == b.dim_ && a.i_min_ == b.i_min_ && a.steps_ == b.steps_;
  }

private:
  std::uint64_t ell_ = 2;
  std::size_t dim_ = 0;
  int i_min_ = 0;
  std::vector<Subspace> steps_;
  Subspace zero_;
  Subspace full_;
};

/// Monodromy filtration of the nilpotent operator sigma - 1 over F_ell.
ModlFiltration filtration_mod_ell(const ModlOperator& u);

/// Monodromy filtration of log(sigma); only for ell >= n. Equals filtration_mod_ell then.
ModlFiltration filtration_mod_ell_via_log(const ModlOperator& u);

/// Monodromy filtration of an arbitrary nilpotent matrix over F_ell.
ModlFiltration nilpotent_filtration_mod_ell(const FpMatrix& n);

/// Reduction M_i (x) F_ell of a saturated integral filtration.
ModlFiltration reduce_filtration(const MonodromyFiltration& fil, std::uint64_t ell);

struct TfCheck {
  std::uint64_t ell = 0;
  bool holds = false;
  /// (i): the reduction of the integral filtration equals the F_ell filtration of 1 + N.
  bool filtration_matches = false;
  /// (ii): every coker(N^i) is ell-torsion-free.
  bool cokernels_torsion_free = false;
  /// First index where the two filtrations differ, when they do.
  std::optional<int> mismatch_step;
  /// First (i, divisor) with ell | divisor, when one exists.
  std::optional<std::pair<int, Integer>> torsion_witness;

  std::string describe() const;
};

/// Checks property (t-f) at one prime both ways and requires the two answers to agree
/// (AssertionFailure otherwise).
TfCheck property_tf_check(const NilpotentOperator& op, std::uint64_t ell);

/// property_tf_check over many primes; the OpenMP path returns the same vector as the serial one.
std::vector<TfCheck> property_tf_scan(const NilpotentOperator& op, const std::vector<std::uint64_t>& primes,
                                      Execution exec = Execution::sequential);

}  // namespace wmt
