#include "wmt/descriptor.hpp"

#include "wmt/errors.hpp"

#include <algorithm>
#include <set>

namespace wmt {

std::size_t Stratum::rank(int j) const {
  const CohomologyGroup* g = group(j);
  return g ? g->rank : 0;
}

const CohomologyGroup* Stratum::group(int j) const {
  for (const auto& g : cohomology)
    if (g.degree == j) return &g;
  return nullptr;
}

const Stratum* DegenerationDescriptor::find(const MultiIndex& i) const {
  for (const auto& s : strata)
    if (s.components == i) return &s;
  return nullptr;
}

std::vector<const Stratum*> DegenerationDescriptor::level(int v) const {
  std::vector<const Stratum*> out;
  for (const auto& s : strata)
    if (static_cast<int>(s.components.size()) == v + 1) out.push_back(&s);
  std::sort(out.begin(), out.end(), [](const Stratum* a, const Stratum* b) { return a->components < b->components; });
  return out;
}

namespace {
const BoundaryMap* find_in(const std::vector<BoundaryMap>& maps, const MultiIndex& from, const MultiIndex& to,
                           int degree) {
  for (const auto& m : maps)
    if (m.from == from && m.to == to && m.degree == degree) return &m;
  return nullptr;
}

// to = from + {k} for a single k not in from.
bool adds_one(const MultiIndex& from, const MultiIndex& to) {
  if (to.size() != from.size() + 1) return false;
  return std::includes(to.begin(), to.end(), from.begin(), from.end());
}
}  // namespace

const BoundaryMap* DegenerationDescriptor::find_restriction(const MultiIndex& from, const MultiIndex& to,
                                                            int degree) const {
  return find_in(restrictions, from, to, degree);
}

const BoundaryMap* DegenerationDescriptor::find_gysin(const MultiIndex& from, const MultiIndex& to, int degree) const {
  return find_in(gysin, from, to, degree);
}

bool DegenerationDescriptor::has_frobenius() const {
  for (const auto& s : strata)
    for (const auto& g : s.cohomology)
      if (g.rank > 0 && !g.frobenius) return false;
  return !strata.empty();
}

std::string to_string(const MultiIndex& i) {
  std::string s = "{";
  for (std::size_t k = 0; k < i.size(); ++k) s += (k ? "," : "") + std::to_string(i[k]);
  return s + "}";
}

void validate(const DegenerationDescriptor& d) {
  if (d.relative_dimension < 0) throw DescriptorError("relative_dimension", "must be non-negative");
  if (d.components < 1) throw DescriptorError("components", "need at least one component");
  if (d.q && *d.q < 2) throw DescriptorError("q", "must be a prime power >= 2");

  std::set<MultiIndex> seen;
  for (std::size_t n = 0; n < d.strata.size(); ++n) {
    const Stratum& s = d.strata[n];
    const std::string where = "strata[" + std::to_string(n) + "]";
    if (s.components.empty()) throw DescriptorError(where + ".components", "empty multi-index");
    for (std::size_t k = 0; k < s.components.size(); ++k) {
      if (s.components[k] < 1 || s.components[k] > d.components)
        throw DescriptorError(where + ".components", "component index out of range");
      if (k > 0 && s.components[k] <= s.components[k - 1])
        throw DescriptorError(where + ".components", "multi-index must be strictly increasing");
    }
    if (!seen.insert(s.components).second) throw DescriptorError(where, "duplicate stratum " + to_string(s.components));
    const int dim = d.dimension(s.components);
    if (dim < 0) throw DescriptorError(where, "stratum " + to_string(s.components) + " has negative dimension");
    std::set<int> degrees;
    for (std::size_t g = 0; g < s.cohomology.size(); ++g) {
      const CohomologyGroup& h = s.cohomology[g];
      const std::string gw = where + ".cohomology[" + std::to_string(g) + "]";
      if (h.degree < 0 || h.degree > 2 * dim)
        throw DescriptorError(gw + ".degree", "H^j must vanish outside 0 <= j <= 2 dim = " + std::to_string(2 * dim));
      if (!degrees.insert(h.degree).second) throw DescriptorError(gw + ".degree", "duplicate degree");
      if (h.frobenius && (h.frobenius->rows() != h.rank || h.frobenius->cols() != h.rank))
        throw DescriptorError(gw + ".frobenius", "must be square of the group's rank");
    }
  }
  for (int c = 1; c <= d.components; ++c)
    if (!seen.count({c})) throw DescriptorError("strata", "component " + std::to_string(c) + " is not listed");
  // Faces of nonempty intersections are nonempty.
  for (const auto& s : d.strata)
    if (s.components.size() > 1)
      for (std::size_t drop = 0; drop < s.components.size(); ++drop) {
        MultiIndex face = s.components;
        face.erase(face.begin() + static_cast<long>(drop));
        if (!seen.count(face))
          throw DescriptorError("strata", "face " + to_string(face) + " of " + to_string(s.components) + " is missing");
      }

  const auto check_maps = [&](const std::vector<BoundaryMap>& maps, const std::string& field, bool is_gysin) {
    std::set<std::tuple<MultiIndex, MultiIndex, int>> keys;
    for (std::size_t n = 0; n < maps.size(); ++n) {
      const BoundaryMap& m = maps[n];
      const std::string where = field + "[" + std::to_string(n) + "]";
      const Stratum* src = d.find(m.from);
      const Stratum* dst = d.find(m.to);
      if (!src) throw DescriptorError(where + ".from", "unknown stratum " + to_string(m.from));
      if (!dst) throw DescriptorError(where + ".to", "unknown stratum " + to_string(m.to));
      const bool shape_ok = is_gysin ? adds_one(m.to, m.from) : adds_one(m.from, m.to);
      if (!shape_ok)
        throw DescriptorError(where, is_gysin ? "Gysin maps go from D_{I+k} to D_I" : "restrictions go from D_I to D_{I+k}");
      const int target_degree = is_gysin ? m.degree + 2 : m.degree;
      if (m.matrix.rows() != dst->rank(target_degree) || m.matrix.cols() != src->rank(m.degree))
        throw DescriptorError(where + ".matrix", "shape must be rank H^" + std::to_string(target_degree) + "(" +
                                                     to_string(m.to) + ") x rank H^" + std::to_string(m.degree) + "(" +
                                                     to_string(m.from) + ")");
      if (!keys.insert({m.from, m.to, m.degree}).second) throw DescriptorError(where, "duplicate map");
    }
  };
  check_maps(d.restrictions, "restrictions", false);
  check_maps(d.gysin, "gysin", true);

  // Every map the differential needs between nonzero groups must be supplied.
  for (const auto& big : d.strata) {
    if (big.components.size() < 2) continue;
    for (std::size_t drop = 0; drop < big.components.size(); ++drop) {
      MultiIndex small = big.components;
      small.erase(small.begin() + static_cast<long>(drop));
      const Stratum* s = d.find(small);
      for (int j = 0; j <= 2 * d.relative_dimension; ++j) {
        if (s->rank(j) > 0 && big.rank(j) > 0 && !d.find_restriction(small, big.components, j))
          throw DescriptorError("restrictions", "missing H^" + std::to_string(j) + "(" + to_string(small) + ") -> H^" +
                                                    std::to_string(j) + "(" + to_string(big.components) + ")");
        if (big.rank(j) > 0 && s->rank(j + 2) > 0 && !d.find_gysin(big.components, small, j))
          throw DescriptorError("gysin", "missing H^" + std::to_string(j) + "(" + to_string(big.components) + ") -> H^" +
                                             std::to_string(j + 2) + "(" + to_string(small) + ")");
      }
    }
  }
}

}  // namespace wmt
