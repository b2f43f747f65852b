#include "wmt/specseq.hpp"

#include "wmt/errors.hpp"

#include <omp.h>

#include <sstream>

namespace wmt {

namespace {

// (-1)^#{x in small : x < k}
int position_sign(const MultiIndex& small, int k) {
  int below = 0;
  for (int x : small)
    if (x < k) ++below;
  return below % 2 == 0 ? 1 : -1;
}

std::string bidegree(int v, int w) { return "E1^{" + std::to_string(v) + "," + std::to_string(w) + "}"; }

// Where each stratum piece of each summand sits inside an E1 entry.
struct Block {
  int twist;
  int level;
  int degree;
  const Stratum* stratum;
  std::size_t offset;
  std::size_t rank;
};

std::vector<Block> layout(const DegenerationDescriptor& desc, int v, int w) {
  std::vector<Block> out;
  const int d = desc.relative_dimension;
  if (v < -d || v > d) return out;
  std::size_t offset = 0;
  for (int i = std::max(0, -v);; ++i) {
    const int s = v + 2 * i, j = w - 2 * i;
    if (s > d || j < 0) break;
    for (const Stratum* st : desc.level(s)) {
      const std::size_t r = st->rank(j);
      out.push_back({i, s, j, st, offset, r});
      offset += r;
    }
  }
  return out;
}

const Block* find_block(const std::vector<Block>& blocks, int twist, const MultiIndex& i) {
  for (const auto& b : blocks)
    if (b.twist == twist && b.stratum->components == i) return &b;
  return nullptr;
}

void place(IntMatrix& m, std::size_t row, std::size_t col, const IntMatrix& block, int sign) {
  for (std::size_t r = 0; r < block.rows(); ++r)
    for (std::size_t c = 0; c < block.cols(); ++c) m(row + r, col + c) += sign * block(r, c);
}

IntMatrix build_d1(const DegenerationDescriptor& desc, const SpectralPage& page, int v, int w) {
  const std::vector<Block> src = layout(desc, v, w);
  const std::vector<Block> dst = layout(desc, v + 1, w);
  IntMatrix m(page.rank(v + 1, w), page.rank(v, w));
  for (const Block& b : src) {
    if (b.rank == 0) continue;
    const MultiIndex& I = b.stratum->components;
    // Restrictions into the same twist, one level up.
    for (const Block& t : dst) {
      if (t.twist != b.twist || t.level != b.level + 1 || t.rank == 0) continue;
      const MultiIndex& J = t.stratum->components;
      if (!std::includes(J.begin(), J.end(), I.begin(), I.end())) continue;
      int k = 0;
      for (int x : J)
        if (!std::binary_search(I.begin(), I.end(), x)) k = x;
      const BoundaryMap* map = desc.find_restriction(I, J, b.degree);
      if (!map) throw DescriptorError("restrictions", "missing map " + to_string(I) + " -> " + to_string(J));
      place(m, t.offset, b.offset, map->matrix, position_sign(I, k));
    }
    // Gysin maps into twist - 1, one level down.
    if (b.twist < 1) continue;
    for (std::size_t drop = 0; drop < I.size(); ++drop) {
      MultiIndex J = I;
      const int k = J[drop];
      J.erase(J.begin() + static_cast<long>(drop));
      const Block* t = find_block(dst, b.twist - 1, J);
      if (!t || t->rank == 0) continue;
      const BoundaryMap* map = desc.find_gysin(I, J, b.degree);
      if (!map) throw DescriptorError("gysin", "missing map " + to_string(I) + " -> " + to_string(J));
      place(m, t->offset, b.offset, map->matrix, position_sign(J, k));
    }
  }
  return m;
}

IntMatrix shift_power(const SpectralPage& page, int v, int w, int i) {
  IntMatrix m = IntMatrix::identity(page.rank(v, w));
  for (int step = 0; step < i; ++step) m = monodromy_shift(page, v + 2 * step, w - 2 * step) * m;
  return m;
}

E2Entry e2_entry(const SpectralPage& page, int v, int w) {
  E2Entry e;
  e.at = {v, w};
  e.e1_rank = page.rank(v, w);
  const std::size_t n = e.e1_rank;
  const IntMatrix out = page.d1(v, w);
  const IntMatrix in = page.d1(v - 1, w);
  e.cycles = kernel(LatticeMap(Lattice{n, {}}, Lattice{out.rows(), {}}, out)).basis();
  const std::size_t k = e.cycles.cols();
  // Boundaries in cycle coordinates; they are cycles because d1 o d1 = 0.
  const IntMatrix b = k == 0 ? IntMatrix(0, in.cols()) : solve_columns(e.cycles, in);
  const SmithForm snf = smith_normal_form(b);
  for (const auto& dv : snf.diagonal())
    if (sgn(dv) != 0 && dv != 1) {
      e.torsion.push_back(dv);
      for (const auto& p : prime_divisors(dv)) e.torsion_primes.insert(p);
    }
  e.free_rank = k - snf.rank;
  const Sublattice boundary = saturate(Sublattice(k, b));
  const AdaptedBasis split = adapted_basis(boundary, Sublattice::full(k));
  e.boundaries_in_cycles = split.inner;
  e.free_in_cycles = split.complement;
  e.free_basis = k == 0 ? IntMatrix(n, 0) : e.cycles * split.complement;
  return e;
}

FpMatrix extend_to_basis(const FpMatrix& inner, const FpMatrix& outer) {
  FpMatrix basis = inner;
  std::size_t current = inner.cols();
  for (std::size_t j = 0; j < outer.cols(); ++j) {
    FpMatrix trial = hstack(basis, outer.columns(j, 1));
    if (trial.rank() > current) {
      basis = trial;
      ++current;
    }
  }
  return basis;
}

E2ModEntry e2_mod_entry(const SpectralPage& page, std::uint64_t ell, int v, int w) {
  E2ModEntry e;
  e.at = {v, w};
  e.ell = ell;
  const std::size_t n = page.rank(v, w);
  const FpMatrix out = FpMatrix::reduce(page.d1(v, w), ell);
  const FpMatrix in = FpMatrix::reduce(page.d1(v - 1, w), ell);
  e.cycles = out.rows() == 0 ? FpMatrix::identity(ell, n) : out.kernel();
  const FpMatrix boundary = Subspace(ell, n, in).basis();
  e.boundary_dim = boundary.cols();
  e.adapted = extend_to_basis(boundary, e.cycles);
  if (e.adapted.cols() != e.cycles.cols()) throw AssertionFailure("boundaries are not contained in cycles mod ell");
  e.dim = e.cycles.cols() - e.boundary_dim;
  return e;
}

// The map N^i on E2 over F_ell: (source dim, target dim, rank).
std::tuple<std::size_t, std::size_t, std::size_t> verdict_mod(const SpectralPage& page, std::uint64_t ell, int w, int i) {
  const E2ModEntry s = e2_mod_entry(page, ell, -i, w + i);
  const E2ModEntry t = e2_mod_entry(page, ell, i, w - i);
  if (s.dim == 0 || t.dim == 0) return {s.dim, t.dim, 0};
  const FpMatrix shift = FpMatrix::reduce(shift_power(page, -i, w + i, i), ell);
  const FpMatrix images = shift * s.adapted.columns(s.boundary_dim, s.dim);
  FpMatrix m(ell, t.dim, s.dim);
  for (std::size_t c = 0; c < s.dim; ++c) {
    auto coords = solve_mod(t.adapted, images.column(c));
    if (!coords) throw AssertionFailure("monodromy does not map cycles to cycles mod ell");
    for (std::size_t r = 0; r < t.dim; ++r) m(r, c) = (*coords)[t.boundary_dim + r];
  }
  return {s.dim, t.dim, m.rank()};
}

template <typename F>
void for_each_index(long count, Execution exec, F&& body) {
  if (exec == Execution::parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < count; ++k) {
      try {
        body(k);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (long k = 0; k < count; ++k) body(k);
  }
}

MonodromyLevel verdict_level(const SpectralPage& page, const E2Page& e2, int w, int i) {
  MonodromyLevel lv;
  lv.i = i;
  lv.source = {-i, w + i};
  lv.target = {i, w - i};
  const auto lookup = [&](Bidegree b) -> const E2Entry* {
    auto it = e2.find(b);
    return it == e2.end() ? nullptr : &it->second;
  };
  const E2Entry* s = lookup(lv.source);
  const E2Entry* t = lookup(lv.target);
  lv.source_rank = s ? s->free_rank : 0;
  lv.target_rank = t ? t->free_rank : 0;
  lv.trivial = (!s || s->e1_rank == 0) && (!t || t->e1_rank == 0);
  lv.matrix = IntMatrix(lv.target_rank, lv.source_rank);
  if (lv.trivial) {
    lv.rational_iso = true;
    return lv;
  }
  if (lv.source_rank > 0 && lv.target_rank > 0) {
    const IntMatrix images = shift_power(page, -i, w + i, i) * s->free_basis;
    const IntMatrix in_cycles = solve_columns(t->cycles, images);
    const IntMatrix coords = solve_columns(hstack(t->boundaries_in_cycles, t->free_in_cycles), in_cycles);
    const std::size_t offset = t->boundaries_in_cycles.cols();
    for (std::size_t r = 0; r < lv.target_rank; ++r)
      for (std::size_t c = 0; c < lv.source_rank; ++c) lv.matrix(r, c) = coords(offset + r, c);
  }
  if (lv.target_rank > 0) lv.divisors = cokernel_invariants(LatticeMap(lv.matrix));
  lv.rational_iso = lv.source_rank == lv.target_rank && lv.divisors.zero_count() == 0;
  if (!lv.rational_iso) return lv;

  std::map<Integer, std::string> candidates;
  for (const auto& dv : lv.divisors.divisors)
    for (const auto& p : prime_divisors(dv)) candidates.emplace(p, "divides the elementary divisor " + dv.get_str());
  const auto torsion_note = [&](const E2Entry* e, const char* side) {
    if (!e) return;
    for (const auto& p : e->reduction_primes)
      candidates.emplace(p, std::string("torsion affects E2 over F_ell at the ") + side);
  };
  torsion_note(s, "source");
  torsion_note(t, "target");
  for (const auto& [p, reason] : candidates) {
    VerdictPrime vp;
    vp.prime = p;
    vp.reason = reason;
    if (p < Integer(1UL << 31)) {
      auto [sd, td, rk] = verdict_mod(page, p.get_ui(), w, i);
      vp.source_dim = sd;
      vp.target_dim = td;
      vp.map_rank = rk;
      vp.checked_mod_ell = true;
      if (sd == td && rk == sd) continue;  // isomorphism over F_ell after all
    } else {
      vp.reason += " (too large to recheck over F_ell; kept)";
    }
    lv.bad_primes.insert(p);
    lv.provenance.push_back(std::move(vp));
  }
  return lv;
}

}  // namespace

E1Entry SpectralPage::entry(int v, int w) const {
  auto it = entries.find({v, w});
  if (it != entries.end()) return it->second;
  E1Entry e;
  e.at = {v, w};
  return e;
}

IntMatrix SpectralPage::d1(int v, int w) const {
  auto it = differentials.find({v, w});
  if (it != differentials.end()) return it->second.matrix();
  return IntMatrix(rank(v + 1, w), rank(v, w));
}

bool SpectralPage::in_window(int v, int w) const {
  return v >= -relative_dimension && v <= relative_dimension && w >= 0 && w <= 2 * relative_dimension;
}

SpectralPage assemble_E1(const DegenerationDescriptor& desc) {
  SpectralPage page;
  const int d = desc.relative_dimension;
  page.relative_dimension = d;
  for (int v = -d; v <= d; ++v)
    for (int w = 0; w <= 2 * d; ++w) {
      E1Entry e;
      e.at = {v, w};
      std::size_t total = 0;
      for (const Block& b : layout(desc, v, w)) {
        if (e.summands.empty() || e.summands.back().twist != b.twist)
          e.summands.push_back({b.twist, b.level, b.degree, b.offset, 0});
        e.summands.back().rank += b.rank;
        total += b.rank;
      }
      e.lattice = Lattice{total, bidegree(v, w)};
      page.entries.emplace(e.at, std::move(e));
    }
  return page;
}

void assemble_d1(const DegenerationDescriptor& desc, SpectralPage& page) {
  const int d = desc.relative_dimension;
  page.differentials.clear();
  for (int v = -d - 1; v <= d; ++v)
    for (int w = 0; w <= 2 * d; ++w) {
      IntMatrix m = build_d1(desc, page, v, w);
      page.differentials.emplace(Bidegree{v, w}, LatticeMap(Lattice{m.cols(), bidegree(v, w)},
                                                            Lattice{m.rows(), bidegree(v + 1, w)}, m));
    }
  for (int v = -d - 1; v <= d; ++v)
    for (int w = 0; w <= 2 * d; ++w) {
      const IntMatrix square = page.d1(v + 1, w) * page.d1(v, w);
      if (!square.is_zero()) {
        std::ostringstream os;
        os << "d1 o d1 != 0 on " << bidegree(v, w) << " -> " << bidegree(v + 2, w) << ": " << to_string(square);
        throw DescriptorError("gysin", os.str());
      }
    }
  if (desc.q && desc.has_frobenius()) {
    for (int v = -d - 1; v <= d; ++v)
      for (int w = 0; w <= 2 * d; ++w) {
        const IntMatrix f_src = e1_frobenius(desc, page, v, w);
        const IntMatrix f_dst = e1_frobenius(desc, page, v + 1, w);
        const IntMatrix m = page.d1(v, w);
        if (!(f_dst * m == m * f_src))
          throw DescriptorError("strata", "frobenius does not commute with d1 on " + bidegree(v, w));
      }
  }
}

SpectralPage assemble_page(const DegenerationDescriptor& desc) {
  validate(desc);
  SpectralPage page = assemble_E1(desc);
  assemble_d1(desc, page);
  return page;
}

IntMatrix monodromy_shift(const SpectralPage& page, int v, int w) {
  const E1Entry src = page.entry(v, w);
  const E1Entry dst = page.entry(v + 2, w - 2);
  IntMatrix m(dst.lattice.rank, src.lattice.rank);
  for (const auto& s : src.summands) {
    if (s.twist < 1 || s.rank == 0) continue;
    for (const auto& t : dst.summands)
      if (t.twist == s.twist - 1) {
        if (t.rank != s.rank || t.level != s.level || t.degree != s.degree)
          throw AssertionFailure("monodromy shift between mismatched summands");
        for (std::size_t k = 0; k < s.rank; ++k) m(t.offset + k, s.offset + k) = 1;
      }
  }
  return m;
}

bool shift_commutes_with_d1(const SpectralPage& page) {
  const int d = page.relative_dimension;
  for (int v = -d - 2; v <= d; ++v)
    for (int w = 0; w <= 2 * d + 2; ++w) {
      const IntMatrix lhs = monodromy_shift(page, v + 1, w) * page.d1(v, w);
      const IntMatrix rhs = page.d1(v + 2, w - 2) * monodromy_shift(page, v, w);
      if (!(lhs == rhs)) return false;
    }
  return true;
}

E2Page compute_E2(const SpectralPage& page, Execution exec) {
  std::vector<Bidegree> keys;
  for (const auto& [k, _] : page.entries) keys.push_back(k);
  std::vector<E2Entry> out(keys.size());
  for_each_index(static_cast<long>(keys.size()), exec, [&](long n) {
    const auto [v, w] = keys[static_cast<std::size_t>(n)];
    out[static_cast<std::size_t>(n)] = e2_entry(page, v, w);
  });
  E2Page e2;
  for (std::size_t n = 0; n < keys.size(); ++n) e2.emplace(keys[n], std::move(out[n]));
  for (auto& [k, e] : e2) {
    e.reduction_primes = e.torsion_primes;
    auto next = e2.find({k.first + 1, k.second});
    if (next != e2.end()) e.reduction_primes.insert(next->second.torsion_primes.begin(), next->second.torsion_primes.end());
  }
  return e2;
}

E2ModPage compute_E2_mod(const SpectralPage& page, std::uint64_t ell, Execution exec) {
  if (ell >= (1ULL << 31) || !is_prime(ell)) throw PreconditionError("ell must be a prime below 2^31");
  std::vector<Bidegree> keys;
  for (const auto& [k, _] : page.entries) keys.push_back(k);
  std::vector<E2ModEntry> out(keys.size());
  for_each_index(static_cast<long>(keys.size()), exec, [&](long n) {
    const auto [v, w] = keys[static_cast<std::size_t>(n)];
    out[static_cast<std::size_t>(n)] = e2_mod_entry(page, ell, v, w);
  });
  E2ModPage e2;
  for (std::size_t n = 0; n < keys.size(); ++n) e2.emplace(keys[n], std::move(out[n]));
  return e2;
}

bool MonodromyVerdict::rational_iso() const {
  for (const auto& l : levels)
    if (!l.rational_iso) return false;
  return true;
}

PrimeSet MonodromyVerdict::bad_primes() const {
  PrimeSet out;
  for (const auto& l : levels) out.insert(l.bad_primes.begin(), l.bad_primes.end());
  return out;
}

MonodromyVerdict monodromy_on_E2(const SpectralPage& page, const E2Page& e2, int w, Execution exec) {
  MonodromyVerdict verdict;
  verdict.w = w;
  const int d = page.relative_dimension;
  verdict.levels.resize(static_cast<std::size_t>(d + 1));
  for_each_index(d + 1, exec, [&](long i) {
    verdict.levels[static_cast<std::size_t>(i)] = verdict_level(page, e2, w, static_cast<int>(i));
  });
  return verdict;
}

MonodromyVerdict monodromy_on_E2(const DegenerationDescriptor& desc, int w, Execution exec) {
  const SpectralPage page = assemble_page(desc);
  return monodromy_on_E2(page, compute_E2(page, exec), w, exec);
}

bool RankConsistency::consistent() const {
  for (const auto& d : degrees)
    if (!d.consistent) return false;
  return true;
}

RankConsistency total_rank_consistency(const E2Page& e2, const std::map<int, std::size_t>& claimed) {
  std::map<int, std::size_t> computed;
  for (const auto& [k, e] : e2) computed[k.first + k.second] += e.free_rank;
  for (const auto& [n, _] : claimed) computed.emplace(n, 0);
  RankConsistency out;
  for (const auto& [n, total] : computed) {
    auto it = claimed.find(n);
    const std::size_t c = it == claimed.end() ? 0 : it->second;
    out.degrees.push_back({n, total, c, total == c});
  }
  return out;
}

IntMatrix e1_frobenius(const DegenerationDescriptor& desc, const SpectralPage& page, int v, int w) {
  if (!desc.q) throw PreconditionError("frobenius on E1 needs q");
  const std::size_t n = page.rank(v, w);
  IntMatrix f(n, n);
  for (const Block& b : layout(desc, v, w)) {
    if (b.rank == 0) continue;
    const CohomologyGroup* g = b.stratum->group(b.degree);
    if (!g || !g->frobenius) throw PreconditionError("missing frobenius on H^" + std::to_string(b.degree) + "(" +
                                                     to_string(b.stratum->components) + ")");
    Integer scale;
    mpz_pow_ui(scale.get_mpz_t(), desc.q->get_mpz_t(), static_cast<unsigned long>(b.twist));
    place(f, b.offset, b.offset, scale * *g->frobenius, 1);
  }
  return f;
}

WeightReport weight_report(const DegenerationDescriptor& desc, const SpectralPage& page) {
  WeightReport out;
  if (!desc.q) {
    out.reason = "no q in the descriptor";
    return out;
  }
  if (!desc.has_frobenius()) {
    out.reason = "frobenius not given on every nonzero group";
    return out;
  }
  out.available = true;
  const int d = desc.relative_dimension;
  for (int w = 0; w <= 2 * d; ++w) {
    RowWeight row;
    row.w = w;
    row.characteristic = IntPoly{1};
    for (int v = -d; v <= d; ++v)
      row.characteristic = row.characteristic * characteristic_polynomial(e1_frobenius(desc, page, v, w));
    row.certificate = certify_weil(row.characteristic, *desc.q, w);
    out.rows.push_back(std::move(row));
  }
  for (int w = 1; w <= 2 * d; ++w) {
    const RowWeight& hi = out.rows[static_cast<std::size_t>(w)];
    const RowWeight& lo = out.rows[static_cast<std::size_t>(w - 1)];
    D2Vanishing v;
    v.w = w;
    v.certified = hi.certificate.certified() && lo.certificate.certified();
    if (v.certified) v.exceptional = bezout_bad_primes(hi.characteristic, lo.characteristic);
    out.d2.push_back(std::move(v));
  }
  return out;
}

}  // namespace wmt
