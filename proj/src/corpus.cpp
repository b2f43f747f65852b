#include "wmt/corpus.hpp"

#include "wmt/errors.hpp"
#include "wmt/polynomial.hpp"

namespace wmt {

namespace {

IntMatrix scalar(const Integer& x) {
  IntMatrix m(1, 1);
  m(0, 0) = x;
  return m;
}

CohomologyGroup group(int degree, std::size_t rank, std::optional<IntMatrix> frob) {
  CohomologyGroup g;
  g.degree = degree;
  g.rank = rank;
  g.frobenius = std::move(frob);
  return g;
}

// Rank-one group whose frobenius is q^k, present only when q is.
CohomologyGroup line_group(int degree, const std::optional<Integer>& q, unsigned k) {
  std::optional<IntMatrix> frob;
  if (q) {
    Integer v;
    mpz_pow_ui(v.get_mpz_t(), q->get_mpz_t(), k);
    frob = scalar(v);
  }
  return group(degree, 1, std::move(frob));
}

BoundaryMap boundary(MultiIndex from, MultiIndex to, int degree, IntMatrix m) {
  return BoundaryMap{std::move(from), std::move(to), degree, std::move(m)};
}

}  // namespace

DegenerationDescriptor i_n_descriptor(int n, std::optional<Integer> q) {
  if (n < 3) throw PreconditionError("i_n needs n >= 3");
  DegenerationDescriptor d;
  d.name = "i_n(" + std::to_string(n) + ")";
  d.relative_dimension = 1;
  d.components = n;
  d.q = q;
  for (int c = 1; c <= n; ++c) d.strata.push_back(Stratum{{c}, {line_group(0, q, 0), line_group(2, q, 1)}});
  std::vector<MultiIndex> points;
  for (int c = 1; c < n; ++c) points.push_back({c, c + 1});
  points.push_back({1, n});
  for (const auto& p : points) {
    d.strata.push_back(Stratum{p, {line_group(0, q, 0)}});
    for (int c : p) {
      d.restrictions.push_back(boundary({c}, p, 0, scalar(1)));
      d.gysin.push_back(boundary(p, {c}, 0, scalar(1)));
    }
  }
  d.claimed_total_ranks = {{0, 1}, {1, 2}, {2, 1}};
  validate(d);
  return d;
}

DegenerationDescriptor good_reduction_descriptor(const Integer& a, const Integer& q) {
  if (a * a > 4 * q) throw PreconditionError("good_reduction needs a^2 <= 4q");
  DegenerationDescriptor d;
  d.name = "good_reduction(a=" + a.get_str() + ",q=" + q.get_str() + ")";
  d.relative_dimension = 1;
  d.components = 1;
  d.q = q;
  d.strata.push_back(Stratum{{1},
                             {line_group(0, q, 0),
                              group(1, 2, companion_matrix(IntPoly(std::vector<Integer>{q, -a, 1}))),
                              line_group(2, q, 1)}});
  d.claimed_total_ranks = {{0, 1}, {1, 2}, {2, 1}};
  validate(d);
  return d;
}

DegenerationDescriptor two_components_descriptor(int g, const Integer& s, const Integer& a, std::optional<Integer> q) {
  if (g < 0) throw PreconditionError("two_components needs g >= 0");
  DegenerationDescriptor d;
  d.name = "two_components(g=" + std::to_string(g) + ",s=" + s.get_str() + ",a=" + a.get_str() + ")";
  d.relative_dimension = 2;
  d.components = 2;
  d.q = q;
  for (int c = 1; c <= 2; ++c)
    d.strata.push_back(Stratum{{c}, {line_group(0, q, 0), line_group(2, q, 1), line_group(4, q, 2)}});

  Stratum curve{{1, 2}, {line_group(0, q, 0)}};
  if (g > 0) {
    std::optional<IntMatrix> frob;
    if (q) frob = block_diagonal(std::vector<IntMatrix>(g, companion_matrix(IntPoly(std::vector<Integer>{*q, -1, 1}))));
    curve.cohomology.push_back(group(1, 2 * static_cast<std::size_t>(g), std::move(frob)));
  }
  curve.cohomology.push_back(line_group(2, q, 1));
  d.strata.push_back(std::move(curve));

  for (int c = 1; c <= 2; ++c) {
    d.restrictions.push_back(boundary({c}, {1, 2}, 0, scalar(1)));
    d.restrictions.push_back(boundary({c}, {1, 2}, 2, scalar(a)));
    d.gysin.push_back(boundary({1, 2}, {c}, 0, scalar(c == 1 ? s : Integer(-s))));
    d.gysin.push_back(boundary({1, 2}, {c}, 2, scalar(1)));
  }
  validate(d);
  return d;
}

DescriptorFile generate_example(const std::string& name, const ExampleParams& params) {
  DescriptorFile f;
  DegenerationDescriptor d;
  if (name == "i_n")
    d = i_n_descriptor(params.n, params.q);
  else if (name == "good_reduction")
    d = good_reduction_descriptor(params.a, params.q.value_or(2));
  else if (name == "two_components")
    d = two_components_descriptor(params.g, params.s, params.a, params.q);
  else
    throw PreconditionError("unknown example \"" + name + "\" (i_n, good_reduction, two_components)");
  f.name = d.name;
  f.payload = std::move(d);
  return f;
}

std::vector<DescriptorFile> standard_corpus() {
  std::vector<DescriptorFile> out;
  const auto add = [&](DegenerationDescriptor d) {
    DescriptorFile f;
    f.name = d.name;
    f.payload = std::move(d);
    out.push_back(std::move(f));
  };
  for (int n = 3; n <= 8; ++n) add(i_n_descriptor(n, n % 2 ? std::optional<Integer>(5) : std::nullopt));
  add(i_n_descriptor(12, Integer(3)));
  add(good_reduction_descriptor(1, 2));
  add(good_reduction_descriptor(3, 5));
  add(two_components_descriptor(1));
  add(two_components_descriptor(2, 2, 3, Integer(4)));
  add(two_components_descriptor(1, 6, 1, Integer(3)));
  add(two_components_descriptor(0, 5, 10));

  {
    DescriptorFile f;
    f.name = "jordan_12";
    f.payload = NilpotentPayload{IntMatrix{{0, 12}, {0, 0}}};
    out.push_back(std::move(f));
  }
  {
    DescriptorFile f;
    f.name = "jordan_3_1";
    f.payload = NilpotentPayload{IntMatrix{{0, 2, 0, 0}, {0, 0, 3, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}};
    out.push_back(std::move(f));
  }
  {
    DescriptorFile f;
    f.name = "supersingular_2";
    f.payload = WeilPayload{IntPoly{2, -1, 1}, Integer(2), 1};
    out.push_back(std::move(f));
  }
  {
    DescriptorFile f;
    f.name = "split_not_weil";
    f.payload = WeilPayload{IntPoly{3, -4, 1}, Integer(3), 1};
    out.push_back(std::move(f));
  }
  {
    // Multiplication by 3 on a weight-one rank-two family, repaired at 3 by an explicit fiber.
    FamilySpec spec;
    spec.rank = 2;
    spec.operators["frobenius"] = companion_matrix(IntPoly{2, -1, 1});
    spec.weight = 1;
    FamilyPayload p;
    p.source = spec;
    p.target = spec;
    p.map = Integer(3) * IntMatrix::identity(2);
    p.map_overrides[3] = FpMatrix::identity(3, 2);
    p.q = 2;
    DescriptorFile f;
    f.name = "scaled_isogeny";
    f.payload = std::move(p);
    out.push_back(std::move(f));
  }
  {
    // Weight one to weight two: the zero map.
    FamilySpec src;
    src.rank = 2;
    src.operators["frobenius"] = companion_matrix(IntPoly{2, -1, 1});
    src.weight = 1;
    FamilySpec dst;
    dst.rank = 1;
    dst.operators["frobenius"] = IntMatrix{{2}};
    dst.weight = 2;
    FamilyPayload p;
    p.source = src;
    p.target = dst;
    p.map = IntMatrix(1, 2);
    p.q = 2;
    DescriptorFile f;
    f.name = "weight_gap";
    f.payload = std::move(p);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace wmt
