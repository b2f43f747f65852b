#include "wmt/descriptor_io.hpp"

#include "wmt/errors.hpp"
#include "wmt/primes.hpp"

#include "json.hpp"

#include <regex>
#include <set>

namespace wmt {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Object reader that records which keys were consumed so leftovers can be rejected.
class Fields {
public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw DescriptorError(path_, "expected an object");
  }
  const json& required(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw DescriptorError(at(key), "missing required field");
    return *it;
  }
  const json* optional(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw DescriptorError(at(it.key()), "unknown field");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

Integer read_integer(const json& j, const std::string& path) {
  static const std::regex pattern("-?(0|[1-9][0-9]*)");
  if (!j.is_string()) throw DescriptorError(path, "integers are written as decimal strings");
  const std::string s = j.get<std::string>();
  if (!std::regex_match(s, pattern) || s == "-0") throw DescriptorError(path, "not a canonical decimal integer: \"" + s + "\"");
  return Integer(s);
}

long read_small(const json& j, const std::string& path, long lo, long hi) {
  if (!j.is_number_integer()) throw DescriptorError(path, "expected an integer number");
  const long v = j.get<long>();
  if (v < lo || v > hi) throw DescriptorError(path, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw DescriptorError(path, "expected a string");
  return j.get<std::string>();
}

std::uint64_t read_prime(const json& j, const std::string& path) {
  const Integer p = read_integer(j, path);
  if (p < 2 || p >= Integer(1UL << 31) || !is_prime(p)) throw DescriptorError(path, "must be a prime below 2^31");
  return p.get_ui();
}

// Rows of decimal strings. An empty array is a matrix with zero rows; `cols_if_empty` fixes its width.
IntMatrix read_matrix(const json& j, const std::string& path, std::optional<std::size_t> rows = {},
                      std::optional<std::size_t> cols = {}) {
  if (!j.is_array()) throw DescriptorError(path, "matrix must be an array of rows");
  const std::size_t r = j.size();
  std::size_t c = 0;
  if (r > 0) {
    if (!j[0].is_array()) throw DescriptorError(index_path(path, 0), "row must be an array");
    c = j[0].size();
  } else if (cols) {
    c = *cols;
  }
  if (rows && *rows != r) throw DescriptorError(path, "expected " + std::to_string(*rows) + " rows, got " + std::to_string(r));
  if (cols && r > 0 && *cols != c)
    throw DescriptorError(path, "expected " + std::to_string(*cols) + " columns, got " + std::to_string(c));
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    const json& row = j[i];
    const std::string rp = index_path(path, i);
    if (!row.is_array()) throw DescriptorError(rp, "row must be an array");
    if (row.size() != c) throw DescriptorError(rp, "ragged matrix");
    for (std::size_t k = 0; k < c; ++k) m(i, k) = read_integer(row[k], index_path(rp, k));
  }
  return m;
}

FpMatrix read_fp_matrix(const json& j, const std::string& path, std::uint64_t ell, std::size_t rows, std::size_t cols) {
  const IntMatrix m = read_matrix(j, path, rows, cols);
  FpMatrix out(ell, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) {
      if (sgn(m(i, k)) < 0 || m(i, k) >= Integer(static_cast<unsigned long>(ell)))
        throw DescriptorError(index_path(index_path(path, i), k), "entries over F_ell must lie in [0, ell)");
      out(i, k) = m(i, k).get_ui();
    }
  return out;
}

IntPoly read_polynomial(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return parse_polynomial(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw DescriptorError(path, e.what());
    }
  }
  if (!j.is_array()) throw DescriptorError(path, "polynomial is a coefficient array (low degree first) or text");
  std::vector<Integer> c;
  for (std::size_t i = 0; i < j.size(); ++i) c.push_back(read_integer(j[i], index_path(path, i)));
  if (!c.empty() && sgn(c.back()) == 0) throw DescriptorError(path, "trailing zero coefficient");
  return IntPoly(std::move(c));
}

MultiIndex read_multi_index(const json& j, const std::string& path) {
  if (!j.is_array()) throw DescriptorError(path, "multi-index must be an array of component numbers");
  MultiIndex out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(static_cast<int>(read_small(j[i], index_path(path, i), 1, 1L << 20)));
  return out;
}

ojson write_integer(const Integer& x) { return x.get_str(); }

ojson write_matrix(const IntMatrix& m) {
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k).get_str());
    rows.push_back(std::move(row));
  }
  return rows;
}

ojson write_fp_matrix(const FpMatrix& m) {
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(std::to_string(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ojson write_polynomial(const IntPoly& p) {
  ojson c = ojson::array();
  for (const auto& x : p.coeffs()) c.push_back(x.get_str());
  return c;
}

// ---- payloads ----

NilpotentPayload read_nilpotent(const json& j, const std::string& path) {
  Fields f(j, path);
  NilpotentPayload p;
  p.matrix = read_matrix(f.required("matrix"), f.at("matrix"));
  if (!p.matrix.is_square()) throw DescriptorError(f.at("matrix"), "must be square");
  f.finish();
  return p;
}

WeilPayload read_weil(const json& j, const std::string& path) {
  Fields f(j, path);
  WeilPayload p;
  p.polynomial = read_polynomial(f.required("polynomial"), f.at("polynomial"));
  if (const json* q = f.optional("q")) p.q = read_integer(*q, f.at("q"));
  if (const json* w = f.optional("w")) p.w = static_cast<int>(read_small(*w, f.at("w"), 0, 1 << 16));
  f.finish();
  return p;
}

FamilySpec read_family(const json& j, const std::string& path) {
  Fields f(j, path);
  FamilySpec s;
  s.rank = static_cast<std::size_t>(read_small(f.required("rank"), f.at("rank"), 0, 1 << 16));
  {
    const json& ops = f.required("operators");
    if (!ops.is_object()) throw DescriptorError(f.at("operators"), "expected an object of named matrices");
    for (auto it = ops.begin(); it != ops.end(); ++it) {
      if (it.key() != "frobenius" && it.key() != "monodromy")
        throw DescriptorError(f.at("operators") + "." + it.key(), "unknown operator (frobenius or monodromy)");
      s.operators[it.key()] = read_matrix(*it, f.at("operators") + "." + it.key(), s.rank, s.rank);
    }
    if (!s.operators.count("frobenius")) throw DescriptorError(f.at("operators.frobenius"), "missing required field");
  }
  if (const json* ex = f.optional("exceptions")) {
    if (!ex->is_array()) throw DescriptorError(f.at("exceptions"), "expected an array");
    for (std::size_t i = 0; i < ex->size(); ++i) {
      const std::string ep = index_path(f.at("exceptions"), i);
      Fields e((*ex)[i], ep);
      const std::uint64_t ell = read_prime(e.required("ell"), e.at("ell"));
      const auto dim = static_cast<std::size_t>(read_small(e.required("dimension"), e.at("dimension"), 0, 1 << 16));
      const json& ops = e.required("operators");
      if (!ops.is_object()) throw DescriptorError(e.at("operators"), "expected an object of named matrices");
      std::map<std::string, FpMatrix> m;
      for (auto it = ops.begin(); it != ops.end(); ++it) {
        if (it.key() != "frobenius" && it.key() != "monodromy")
          throw DescriptorError(e.at("operators") + "." + it.key(), "unknown operator (frobenius or monodromy)");
        m[it.key()] = read_fp_matrix(*it, e.at("operators") + "." + it.key(), ell, dim, dim);
      }
      if (!m.count("frobenius")) throw DescriptorError(e.at("operators.frobenius"), "missing required field");
      e.finish();
      if (!s.exceptions.emplace(ell, std::make_pair(dim, std::move(m))).second)
        throw DescriptorError(ep + ".ell", "duplicate exception prime");
    }
  }
  if (const json* w = f.optional("weight")) s.weight = static_cast<int>(read_small(*w, f.at("weight"), 0, 1 << 16));
  if (const json* p = f.optional("weight_polynomial")) {
    s.weight_polynomial = read_polynomial(*p, f.at("weight_polynomial"));
    if (!s.weight) throw DescriptorError(f.at("weight_polynomial"), "needs a weight");
  }
  f.finish();
  return s;
}

FamilyPayload read_family_payload(const json& j, const std::string& path) {
  Fields f(j, path);
  FamilyPayload p;
  p.source = read_family(f.required("source"), f.at("source"));
  if (const json* t = f.optional("target")) p.target = read_family(*t, f.at("target"));
  if (const json* m = f.optional("map")) {
    if (!p.target) throw DescriptorError(f.at("map"), "a map needs a target family");
    p.map = read_matrix(*m, f.at("map"), p.target->rank, p.source.rank);
  }
  if (const json* o = f.optional("map_overrides")) {
    if (!p.map) throw DescriptorError(f.at("map_overrides"), "overrides need a map");
    if (!o->is_array()) throw DescriptorError(f.at("map_overrides"), "expected an array");
    for (std::size_t i = 0; i < o->size(); ++i) {
      const std::string op = index_path(f.at("map_overrides"), i);
      Fields e((*o)[i], op);
      const std::uint64_t ell = read_prime(e.required("ell"), e.at("ell"));
      const auto dim_of = [&](const FamilySpec& s) {
        auto it = s.exceptions.find(ell);
        return it == s.exceptions.end() ? s.rank : it->second.first;
      };
      FpMatrix m = read_fp_matrix(e.required("matrix"), e.at("matrix"), ell, dim_of(*p.target), dim_of(p.source));
      e.finish();
      if (!p.map_overrides.emplace(ell, std::move(m)).second) throw DescriptorError(op + ".ell", "duplicate override prime");
    }
  }
  if (const json* q = f.optional("q")) p.q = read_integer(*q, f.at("q"));
  f.finish();
  return p;
}

DegenerationDescriptor read_degeneration(const json& j, const std::string& path, const std::string& name) {
  Fields f(j, path);
  DegenerationDescriptor d;
  d.name = name;
  d.relative_dimension = static_cast<int>(read_small(f.required("relative_dimension"), f.at("relative_dimension"), 0, 64));
  d.components = static_cast<int>(read_small(f.required("components"), f.at("components"), 1, 1 << 20));
  if (const json* q = f.optional("q")) d.q = read_integer(*q, f.at("q"));
  if (const json* c = f.optional("claimed_total_ranks")) {
    if (!c->is_object()) throw DescriptorError(f.at("claimed_total_ranks"), "expected an object degree -> rank");
    for (auto it = c->begin(); it != c->end(); ++it) {
      const std::string kp = f.at("claimed_total_ranks") + "." + it.key();
      static const std::regex digits("0|[1-9][0-9]{0,3}");
      if (!std::regex_match(it.key(), digits)) throw DescriptorError(kp, "degree keys are non-negative integers");
      d.claimed_total_ranks[std::stoi(it.key())] = static_cast<std::size_t>(read_small(*it, kp, 0, 1L << 30));
    }
  }
  const json& strata = f.required("strata");
  if (!strata.is_array()) throw DescriptorError(f.at("strata"), "expected an array");
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const std::string sp = index_path(f.at("strata"), i);
    Fields s(strata[i], sp);
    Stratum st;
    st.components = read_multi_index(s.required("components"), s.at("components"));
    const json& coh = s.required("cohomology");
    if (!coh.is_array()) throw DescriptorError(s.at("cohomology"), "expected an array");
    for (std::size_t g = 0; g < coh.size(); ++g) {
      const std::string gp = index_path(s.at("cohomology"), g);
      Fields h(coh[g], gp);
      CohomologyGroup grp;
      grp.degree = static_cast<int>(read_small(h.required("degree"), h.at("degree"), -1000, 1000));
      grp.rank = static_cast<std::size_t>(read_small(h.required("rank"), h.at("rank"), 0, 1 << 16));
      if (const json* fr = h.optional("frobenius")) grp.frobenius = read_matrix(*fr, h.at("frobenius"), grp.rank, grp.rank);
      h.finish();
      st.cohomology.push_back(std::move(grp));
    }
    s.finish();
    d.strata.push_back(std::move(st));
  }
  const auto read_maps = [&](const char* key, bool gysin, std::vector<BoundaryMap>& out) {
    const json* maps = f.optional(key);
    if (!maps) return;
    if (!maps->is_array()) throw DescriptorError(f.at(key), "expected an array");
    for (std::size_t i = 0; i < maps->size(); ++i) {
      const std::string mp = index_path(f.at(key), i);
      Fields m((*maps)[i], mp);
      BoundaryMap b;
      b.from = read_multi_index(m.required("from"), m.at("from"));
      b.to = read_multi_index(m.required("to"), m.at("to"));
      b.degree = static_cast<int>(read_small(m.required("degree"), m.at("degree"), -1000, 1000));
      const Stratum* src = d.find(b.from);
      const Stratum* dst = d.find(b.to);
      std::optional<std::size_t> rows, cols;
      if (src) cols = src->rank(b.degree);
      if (dst) rows = dst->rank(gysin ? b.degree + 2 : b.degree);
      b.matrix = read_matrix(m.required("matrix"), m.at("matrix"), rows, cols);
      m.finish();
      out.push_back(std::move(b));
    }
  };
  read_maps("restrictions", false, d.restrictions);
  read_maps("gysin", true, d.gysin);
  f.finish();
  try {
    validate(d);
  } catch (const DescriptorError& e) {
    const std::string inner = e.what();
    const std::string detail = inner.substr(e.where().empty() ? 0 : e.where().size() + 2);
    throw DescriptorError(f.at(e.where()), detail);
  }
  return d;
}

ojson write_family(const FamilySpec& s) {
  ojson j;
  j["rank"] = s.rank;
  ojson ops = ojson::object();
  for (const auto& [name, m] : s.operators) ops[name] = write_matrix(m);
  j["operators"] = ops;
  if (!s.exceptions.empty()) {
    ojson ex = ojson::array();
    for (const auto& [ell, fiber] : s.exceptions) {
      ojson e;
      e["ell"] = std::to_string(ell);
      e["dimension"] = fiber.first;
      ojson fo = ojson::object();
      for (const auto& [name, m] : fiber.second) fo[name] = write_fp_matrix(m);
      e["operators"] = fo;
      ex.push_back(std::move(e));
    }
    j["exceptions"] = ex;
  }
  if (s.weight) j["weight"] = *s.weight;
  if (s.weight_polynomial) j["weight_polynomial"] = write_polynomial(*s.weight_polynomial);
  return j;
}

ojson write_degeneration(const DegenerationDescriptor& d) {
  ojson j;
  j["relative_dimension"] = d.relative_dimension;
  j["components"] = d.components;
  if (d.q) j["q"] = write_integer(*d.q);
  if (!d.claimed_total_ranks.empty()) {
    ojson c = ojson::object();
    for (const auto& [n, r] : d.claimed_total_ranks) c[std::to_string(n)] = r;
    j["claimed_total_ranks"] = c;
  }
  ojson strata = ojson::array();
  for (const auto& s : d.strata) {
    ojson st;
    st["components"] = s.components;
    ojson coh = ojson::array();
    for (const auto& g : s.cohomology) {
      ojson h;
      h["degree"] = g.degree;
      h["rank"] = g.rank;
      if (g.frobenius) h["frobenius"] = write_matrix(*g.frobenius);
      coh.push_back(std::move(h));
    }
    st["cohomology"] = coh;
    strata.push_back(std::move(st));
  }
  j["strata"] = strata;
  const auto write_maps = [](const std::vector<BoundaryMap>& maps) {
    ojson out = ojson::array();
    for (const auto& m : maps) {
      ojson b;
      b["from"] = m.from;
      b["to"] = m.to;
      b["degree"] = m.degree;
      b["matrix"] = write_matrix(m.matrix);
      out.push_back(std::move(b));
    }
    return out;
  };
  j["restrictions"] = write_maps(d.restrictions);
  j["gysin"] = write_maps(d.gysin);
  return j;
}

}  // namespace

const char* to_string(DescriptorFile::Kind k) {
  switch (k) {
    case DescriptorFile::Kind::nilpotent: return "nilpotent";
    case DescriptorFile::Kind::family: return "family";
    case DescriptorFile::Kind::degeneration: return "degeneration";
    case DescriptorFile::Kind::weil_poly: return "weil-poly";
  }
  return "?";
}

DescriptorFile parse_descriptor(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is a 1-based offset; report line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw DescriptorError("line " + std::to_string(line) + ", column " + std::to_string(col), "malformed JSON");
  }
  Fields f(j, "");
  if (read_string(f.required("format"), "format") != kDescriptorFormat)
    throw DescriptorError("format", std::string("expected \"") + kDescriptorFormat + "\"");
  DescriptorFile d;
  d.version = static_cast<int>(read_small(f.required("version"), "version", 0, 1 << 16));
  if (d.version != kDescriptorVersion) throw DescriptorError("version", "unsupported version " + std::to_string(d.version));
  const std::string kind = read_string(f.required("kind"), "kind");
  if (const json* n = f.optional("name")) d.name = read_string(*n, "name");
  const json& payload = f.required("payload");
  if (kind == "nilpotent")
    d.payload = read_nilpotent(payload, "payload");
  else if (kind == "family")
    d.payload = read_family_payload(payload, "payload");
  else if (kind == "degeneration")
    d.payload = read_degeneration(payload, "payload", d.name);
  else if (kind == "weil-poly")
    d.payload = read_weil(payload, "payload");
  else
    throw DescriptorError("kind", "unknown kind \"" + kind + "\" (nilpotent, family, degeneration, weil-poly)");
  f.finish();
  return d;
}

std::string serialize_descriptor(const DescriptorFile& d) {
  ojson j;
  j["format"] = kDescriptorFormat;
  j["version"] = d.version;
  j["kind"] = to_string(d.kind());
  j["name"] = d.name;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        ojson out;
        if constexpr (std::is_same_v<T, NilpotentPayload>) {
          out["matrix"] = write_matrix(p.matrix);
        } else if constexpr (std::is_same_v<T, WeilPayload>) {
          out["polynomial"] = write_polynomial(p.polynomial);
          if (p.q) out["q"] = write_integer(*p.q);
          if (p.w) out["w"] = *p.w;
        } else if constexpr (std::is_same_v<T, FamilyPayload>) {
          out["source"] = write_family(p.source);
          if (p.target) out["target"] = write_family(*p.target);
          if (p.map) out["map"] = write_matrix(*p.map);
          if (!p.map_overrides.empty()) {
            ojson o = ojson::array();
            for (const auto& [ell, m] : p.map_overrides) {
              ojson e;
              e["ell"] = std::to_string(ell);
              e["matrix"] = write_fp_matrix(m);
              o.push_back(std::move(e));
            }
            out["map_overrides"] = o;
          }
          if (p.q) out["q"] = write_integer(*p.q);
        } else {
          out = write_degeneration(p);
        }
        j["payload"] = std::move(out);
      },
      d.payload);
  return j.dump(2) + "\n";
}

}  // namespace wmt
