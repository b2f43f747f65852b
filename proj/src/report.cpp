#include "wmt/report.hpp"

#include "wmt/descriptor_io.hpp"
#include "wmt/errors.hpp"
#include "wmt/factor.hpp"
#include "wmt/families.hpp"
#include "wmt/filtration.hpp"
#include "wmt/modl.hpp"
#include "wmt/primes.hpp"
#include "wmt/specseq.hpp"
#include "wmt/weil.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <sstream>

namespace wmt {

namespace {

using ojson = nlohmann::ordered_json;

ojson integers(const std::vector<Integer>& xs) {
  ojson a = ojson::array();
  for (const auto& x : xs) a.push_back(x.get_str());
  return a;
}

ojson primes(const PrimeSet& s) { return integers({s.begin(), s.end()}); }

ojson primes(const std::set<std::uint64_t>& s) {
  ojson a = ojson::array();
  for (auto p : s) a.push_back(std::to_string(p));
  return a;
}

ojson matrix(const IntMatrix& m) {
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k).get_str());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string set_text(const PrimeSet& s) {
  std::string out = "{";
  for (auto it = s.begin(); it != s.end(); ++it) out += (it == s.begin() ? "" : ",") + it->get_str();
  return out + "}";
}

std::uint64_t checked_ell(std::uint64_t ell) {
  if (ell < 2 || ell >= (1ULL << 31) || !is_prime(ell)) throw PreconditionError("--ell must be a prime below 2^31");
  return ell;
}

// ---- nilpotent ----

void answer_nilpotent(const NilpotentPayload& p, const RunOptions& opt, ojson& out, std::ostringstream& summary) {
  const NilpotentOperator op(p.matrix);
  const bool all = !opt.any_question();
  const MonodromyFiltration fil = monodromy_filtration_rational(op);
  const int d = op.nilpotency_index();

  ojson f;
  f["rank"] = op.rank();
  f["nilpotency_index"] = d;
  ojson graded = ojson::array();
  for (int i = -d; i <= d; ++i) graded.push_back({{"i", i}, {"rank", fil.graded_rank(i)}});
  f["graded_ranks"] = graded;
  out["filtration"] = f;

  if (all || opt.monodromy_verdict) {
    ojson maps = ojson::array();
    bool units = true;
    for (int i = 0; i <= d; ++i) {
      const ElementaryDivisors e = graded_map_invariants(op, fil, i);
      units = units && e.all_units();
      maps.push_back({{"i", i}, {"divisors", integers(e.divisors)}, {"isomorphism", e.all_units()}});
    }
    out["graded_maps"] = maps;
    summary << "graded maps N^i: Gr_i -> Gr_-i: " << (units ? "all isomorphisms over Z" : "not all isomorphisms over Z")
            << "\n";
  }

  NilpotentBadPrimes bad;
  if (all || opt.bad_primes || opt.tf_check) bad = bad_primes_of_nilpotent(op, opt.exec);
  if (all || opt.bad_primes) {
    ojson coker = ojson::array();
    for (const auto& [i, e] : cokernel_torsion_freeness(op, opt.exec))
      coker.push_back({{"i", i}, {"divisors", integers(e.divisors)}, {"torsion_free", e.torsion_free()}});
    ojson prov = ojson::array();
    for (const auto& w : bad.provenance)
      prov.push_back({{"prime", w.prime.get_str()},
                      {"level", w.level},
                      {"divisor", w.divisor.get_str()},
                      {"source", w.source == BadPrimeWitness::Source::cokernel ? "cokernel" : "graded"}});
    out["cokernels"] = coker;
    out["bad_primes"] = {{"primes", primes(bad.primes)}, {"provenance", prov}};
    summary << "bad primes: " << set_text(bad.primes) << "\n";
  }

  if (all || opt.tf_check) {
    std::vector<std::uint64_t> ells;
    if (opt.ell)
      ells = {checked_ell(*opt.ell)};
    else
      ells = primes_in_range(2, 50);
    ojson checks = ojson::array();
    for (const TfCheck& c : property_tf_scan(op, ells, opt.exec)) {
      ojson j{{"ell", std::to_string(c.ell)},
              {"holds", c.holds},
              {"filtration_matches", c.filtration_matches},
              {"cokernels_torsion_free", c.cokernels_torsion_free}};
      if (!c.holds) j["detail"] = c.describe();
      checks.push_back(std::move(j));
      if (opt.ell) summary << "property (t-f) at " << c.ell << ": " << (c.holds ? "holds" : "fails") << "\n";
    }
    out["property_tf"] = checks;
    if (!opt.ell) summary << "property (t-f) for ell <= 50: fails exactly at " << set_text(bad.primes) << "\n";
  }
}

// ---- weil ----

ojson certificate_json(const WeilCertificate& c) {
  ojson j;
  j["polynomial"] = to_string(c.polynomial);
  j["q"] = c.q.get_str();
  j["w"] = c.w;
  j["status"] = to_string(c.status);
  ojson fs = ojson::array();
  for (const auto& t : c.factors) {
    ojson f;
    f["factor"] = to_string(t.factor);
    f["multiplicity"] = t.multiplicity;
    f["symmetric"] = t.symmetric;
    f["trace_polynomial"] = to_string(t.trace_polynomial);
    f["real_trace_roots"] = t.real_roots;
    f["boundary_roots"] = t.boundary_roots;
    f["inner"] = t.inner.get_str();
    f["outer"] = t.outer.get_str();
    f["refinements"] = t.refinements;
    f["certified"] = t.certified;
    fs.push_back(std::move(f));
  }
  j["factors"] = fs;
  if (c.witness) j["witness"] = {{"kind", to_string(c.witness->kind)}, {"detail", c.witness->describe()}};
  return j;
}

void answer_weil(const WeilPayload& p, const RunOptions& opt, ojson& out, std::ostringstream& summary) {
  const std::optional<Integer> q = opt.q ? opt.q : p.q;
  const std::optional<int> w = opt.w ? opt.w : p.w;
  if (!q || !w) throw PreconditionError("a weil-poly needs q and w (in the payload or as --q/--w)");
  const WeilCertificate c = certify_weil(p.polynomial, *q, *w, opt.exec);
  out["weil"] = certificate_json(c);
  summary << to_string(p.polynomial) << " at q=" << q->get_str() << ", w=" << *w << ": " << to_string(c.status) << "\n";
  if (c.witness) summary << "  " << c.witness->describe() << "\n";
}

// ---- family ----

IntegralFamily build_family(const FamilySpec& s) {
  std::map<std::string, LatticeMap> ops;
  const Lattice model{s.rank, ""};
  for (const auto& [name, m] : s.operators) ops.emplace(name, LatticeMap(model, model, m));
  std::map<std::uint64_t, FiberOverride> ex;
  for (const auto& [ell, fiber] : s.exceptions) ex[ell] = FiberOverride{fiber.first, fiber.second};
  return IntegralFamily(model, std::move(ops), std::move(ex));
}

ojson certify_side(IntegralFamily& fam, const FamilySpec& spec, const Integer& q, int w, const char* side,
                   std::ostringstream& summary) {
  ojson j;
  j["w"] = w;
  try {
    const WeightCertification c = weight_certify_family(fam, q, w, spec.weight_polynomial);
    j["certificate"] = certificate_json(c.certificate);
    j["annihilates"] = c.annihilation.integral;
    if (!c.annihilation.integral) j["annihilation"] = c.annihilation.describe();
    j["succeeded"] = c.succeeded;
    j["exceptional_fibers"] = primes(c.exceptional);
    j["scope"] = c.scope_note;
    if (c.succeeded) fam.declare_weight(w, c.certificate);
    summary << side << " weight " << w << ": " << (c.succeeded ? "certified" : "not certified") << "\n";
  } catch (const NotOfWeight& e) {
    j["certificate"] = certificate_json(e.certificate());
    j["succeeded"] = false;
    summary << side << " weight " << w << ": refuted\n";
  }
  return j;
}

void answer_family(const FamilyPayload& p, const RunOptions& opt, ojson& out, std::ostringstream& summary) {
  const bool all = !opt.any_question();
  const std::optional<Integer> q = opt.q ? opt.q : p.q;
  IntegralFamily source = build_family(p.source);
  std::optional<IntegralFamily> target;
  if (p.target) target = build_family(*p.target);

  const std::optional<int> w_source = p.source.weight ? p.source.weight : opt.w;
  const int undeclared = -1;
  const int w_target_value = p.target && p.target->weight ? *p.target->weight : undeclared;
  const bool has_target_weight = w_target_value != undeclared;

  if (all || opt.weight_certify) {
    if (!q && (w_source || has_target_weight)) throw PreconditionError("weight certification needs q (payload or --q)");
    ojson weights;
    if (w_source) weights["source"] = certify_side(source, p.source, *q, *w_source, "source", summary);
    if (target && has_target_weight) weights["target"] = certify_side(*target, *p.target, *q, w_target_value, "target", summary);
    if (!weights.empty()) out["weights"] = weights;
  }

  if (!p.map) return;
  const FamilyMap f(source, *target, LatticeMap(source.model(), target->model(), *p.map), p.map_overrides);
  if (w_source && has_target_weight && *w_source != w_target_value) {
    if (!q) throw PreconditionError("vanishing needs q (payload or --q)");
    const VanishingReport v = vanishing_for_almost_all(f, *w_source, w_target_value, *q, 100, opt.exec);
    ojson j;
    j["exceptional"] = primes(v.exceptional);
    j["bezout"] = primes(v.bezout);
    j["source_polynomial"] = to_string(v.source_polynomial);
    j["target_polynomial"] = to_string(v.target_polynomial);
    j["certificate_exceptions"] = primes(v.certificate_exceptions);
    ojson verified = ojson::array();
    for (auto ell : v.verified) verified.push_back(std::to_string(ell));
    j["verified_zero_at"] = verified;
    out["vanishing"] = j;
    summary << "map between weights " << *w_source << " and " << w_target_value << " vanishes outside "
            << set_text(v.exceptional) << "\n";
    return;
  }
  if (all || opt.bad_primes || opt.monodromy_verdict) {
    const IsoVerdict v = almost_all_iso(f);
    ojson j;
    j["kind"] = to_string(v.kind);
    j["bad_primes"] = primes(v.bad);
    ojson prov = ojson::array();
    for (const auto& [prime, why] : v.provenance) prov.push_back({{"prime", prime.get_str()}, {"reason", why}});
    j["provenance"] = prov;
    j["divisors"] = integers(v.divisors.divisors);
    j["rescued"] = primes(v.rescued);
    out["isomorphism"] = j;
    summary << "fiber maps: " << to_string(v.kind);
    if (v.kind == IsoVerdict::Kind::almost_all) summary << ", isomorphisms outside " << set_text(v.bad);
    summary << "\n";
  }
}

// ---- degeneration ----

ojson verdict_json(const MonodromyVerdict& v) {
  ojson j;
  j["w"] = v.w;
  j["rational_iso"] = v.rational_iso();
  j["bad_primes"] = primes(v.bad_primes());
  ojson levels = ojson::array();
  for (const auto& l : v.levels) {
    ojson L;
    L["i"] = l.i;
    L["source"] = {l.source.first, l.source.second};
    L["target"] = {l.target.first, l.target.second};
    L["source_rank"] = l.source_rank;
    L["target_rank"] = l.target_rank;
    if (l.trivial) {
      L["trivial"] = true;
      levels.push_back(std::move(L));
      continue;
    }
    L["rational_iso"] = l.rational_iso;
    L["matrix"] = matrix(l.matrix);
    L["divisors"] = integers(l.divisors.divisors);
    L["bad_primes"] = primes(l.bad_primes);
    ojson prov = ojson::array();
    for (const auto& p : l.provenance) {
      ojson P{{"prime", p.prime.get_str()}, {"reason", p.reason}};
      if (p.checked_mod_ell)
        P["mod_ell"] = {{"source_dim", p.source_dim}, {"target_dim", p.target_dim}, {"map_rank", p.map_rank}};
      prov.push_back(std::move(P));
    }
    L["provenance"] = prov;
    levels.push_back(std::move(L));
  }
  j["levels"] = levels;
  return j;
}

void answer_degeneration(DegenerationDescriptor desc, const RunOptions& opt, ojson& out, std::ostringstream& summary) {
  const bool all = !opt.any_question();
  if (opt.q) desc.q = opt.q;
  const SpectralPage page = assemble_page(desc);
  const E2Page e2 = compute_E2(page, opt.exec);
  const int d = desc.relative_dimension;

  ojson table = ojson::array();
  for (const auto& [at, e] : e2) {
    if (e.e1_rank == 0) continue;
    table.push_back({{"v", at.first},
                     {"w", at.second},
                     {"e1_rank", e.e1_rank},
                     {"free_rank", e.free_rank},
                     {"torsion", integers(e.torsion)},
                     {"reduction_primes", primes(e.reduction_primes)}});
  }
  out["E2"] = table;

  if (!desc.claimed_total_ranks.empty()) {
    const RankConsistency rc = total_rank_consistency(e2, desc.claimed_total_ranks);
    ojson degs = ojson::array();
    for (const auto& g : rc.degrees)
      degs.push_back({{"n", g.n}, {"computed", g.computed}, {"claimed", g.claimed}, {"consistent", g.consistent}});
    out["total_ranks"] = {{"consistent", rc.consistent()}, {"degrees", degs}};
    summary << "total ranks " << (rc.consistent() ? "match" : "do not match") << " the claimed Betti numbers\n";
  }

  if (opt.ell) {
    const std::uint64_t ell = checked_ell(*opt.ell);
    ojson mod = ojson::array();
    for (const auto& [at, e] : compute_E2_mod(page, ell, opt.exec)) {
      if (page.rank(at.first, at.second) == 0) continue;
      mod.push_back({{"v", at.first}, {"w", at.second}, {"dim", e.dim}, {"free_rank", e2.at(at).free_rank}});
    }
    out["E2_mod_ell"] = {{"ell", std::to_string(ell)}, {"entries", mod}};
  }

  if (all || opt.monodromy_verdict || opt.bad_primes) {
    std::vector<int> ws;
    if (opt.w) {
      if (*opt.w < 0 || *opt.w > 2 * d) throw PreconditionError("--w must lie in [0, 2d]");
      ws = {*opt.w};
    } else {
      for (int w = 0; w <= 2 * d; ++w) ws.push_back(w);
    }
    ojson verdicts = ojson::array();
    PrimeSet union_bad;
    for (int w : ws) {
      const MonodromyVerdict v = monodromy_on_E2(page, e2, w, opt.exec);
      const PrimeSet bad = v.bad_primes();
      union_bad.insert(bad.begin(), bad.end());
      if (all || opt.monodromy_verdict) {
        verdicts.push_back(verdict_json(v));
        summary << "w=" << w << ": rational iso " << (v.rational_iso() ? "yes" : "no") << ", bad primes "
                << set_text(bad) << "\n";
      }
    }
    if (all || opt.monodromy_verdict) out["monodromy"] = verdicts;
    if (opt.bad_primes && !opt.monodromy_verdict) summary << "bad primes: " << set_text(union_bad) << "\n";
    out["bad_primes"] = primes(union_bad);
  }

  if (all || opt.weight_certify) {
    const WeightReport wr = weight_report(desc, page);
    ojson j;
    j["available"] = wr.available;
    if (!wr.available) {
      j["reason"] = wr.reason;
      if (opt.weight_certify) summary << "weights: unavailable (" << wr.reason << ")\n";
    } else {
      ojson rows = ojson::array();
      bool ok = true;
      for (const auto& r : wr.rows) {
        rows.push_back({{"w", r.w}, {"characteristic", to_string(r.characteristic)}, {"status", to_string(r.certificate.status)}});
        ok = ok && r.certificate.certified();
      }
      ojson d2 = ojson::array();
      for (const auto& v : wr.d2)
        d2.push_back({{"w", v.w}, {"certified", v.certified}, {"exceptional", primes(v.exceptional)}});
      j["rows"] = rows;
      j["d2_vanishing"] = d2;
      summary << "row weights: " << (ok ? "all certified" : "not all certified") << "\n";
    }
    out["weights"] = j;
  }
}

// ---- rendering ----

void render_text(const ojson& j, int indent, std::ostringstream& os);

std::string scalar_text(const ojson& j) {
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

bool flat(const ojson& j) {
  if (!j.is_array()) return !j.is_object();
  for (const auto& x : j)
    if (!flat(x)) return false;
  return true;
}

std::string flat_text(const ojson& j) {
  if (!j.is_array()) return scalar_text(j);
  std::string s = "[";
  for (std::size_t i = 0; i < j.size(); ++i) s += (i ? ", " : "") + flat_text(j[i]);
  return s + "]";
}

void render_text(const ojson& j, int indent, std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (flat(*it)) {
        os << pad << it.key() << ": " << flat_text(*it) << "\n";
      } else {
        os << pad << it.key() << ":\n";
        render_text(*it, indent + 2, os);
      }
    }
  } else if (j.is_array()) {
    for (const auto& x : j) {
      if (flat(x)) {
        os << pad << "- " << flat_text(x) << "\n";
      } else {
        // The first line of a nested block shares the bullet.
        std::ostringstream inner;
        render_text(x, indent + 2, inner);
        std::string block = inner.str();
        block.replace(pad.size(), 2, "- ");
        os << block;
      }
    }
  } else {
    os << pad << scalar_text(j) << "\n";
  }
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

RunResult run(const std::string& input, const RunOptions& opt) {
  ojson report;
  report["toolkit_version"] = kToolkitVersion;
  report["input_digest"] = "sha256:" + sha256_hex(input);
  report["conventions"] = {{"sign", kSignConvention}, {"basis", kBasisConvention}};
  ojson flags;
  flags["monodromy_verdict"] = opt.monodromy_verdict;
  flags["tf_check"] = opt.tf_check;
  flags["weight_certify"] = opt.weight_certify;
  flags["bad_primes"] = opt.bad_primes;
  if (opt.ell) flags["ell"] = std::to_string(*opt.ell);
  if (opt.w) flags["w"] = *opt.w;
  if (opt.q) flags["q"] = opt.q->get_str();
  report["questions"] = flags;

  RunResult result;
  std::ostringstream summary;
  ojson answers = ojson::object();
  const auto fail = [&](int code, const char* status, const std::string& type, const std::string& message,
                        const std::string& where) {
    result.exit_code = code;
    report["status"] = status;
    ojson e{{"type", type}, {"message", message}};
    if (!where.empty()) e["where"] = where;
    report["error"] = e;
    summary.str("");
    summary << (code == 2 ? "input error: " : "internal assertion failed: ") << message << "\n";
  };
  try {
    const DescriptorFile file = parse_descriptor(input);
    report["descriptor"] = {{"kind", to_string(file.kind())}, {"name", file.name}};
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, NilpotentPayload>)
            answer_nilpotent(p, opt, answers, summary);
          else if constexpr (std::is_same_v<T, WeilPayload>)
            answer_weil(p, opt, answers, summary);
          else if constexpr (std::is_same_v<T, FamilyPayload>)
            answer_family(p, opt, answers, summary);
          else
            answer_degeneration(p, opt, answers, summary);
        },
        file.payload);
    report["status"] = "computed";
    report["answers"] = answers;
  } catch (const DescriptorError& e) {
    fail(2, "input_error", "descriptor", e.what(), e.where());
  } catch (const PreconditionError& e) {
    fail(2, "input_error", "precondition", e.what(), "");
  } catch (const NotOfWeight& e) {
    // A refuted weight is an answer, not an input error.
    answers["not_of_weight"] = {{"message", e.what()}, {"certificate", certificate_json(e.certificate())}};
    report["status"] = "computed";
    report["answers"] = answers;
    summary << e.what() << "\n";
  } catch (const AssertionFailure& e) {
    fail(3, "assertion_failure", "assertion", e.what(), "");
  } catch (const Error& e) {
    fail(2, "input_error", "error", e.what(), "");
  }

  if (opt.format == ReportFormat::structured) {
    result.report = report.dump(2) + "\n";
  } else {
    std::ostringstream os;
    render_text(report, 0, os);
    result.report = os.str();
  }
  result.summary = summary.str();
  return result;
}

}  // namespace wmt
