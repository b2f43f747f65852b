#include "doctest.h"

#include "json.hpp"
#include "wmt/corpus.hpp"
#include "wmt/descriptor_io.hpp"
#include "wmt/errors.hpp"
#include "wmt/report.hpp"
#include "wmt/specseq.hpp"

using namespace wmt;
using nlohmann::json;

namespace {

std::string corpus_text(const std::string& name) {
  for (const auto& f : standard_corpus())
    if (f.name == name) return serialize_descriptor(f);
  FAIL("no corpus entry " << name);
  return {};
}

json structured(const std::string& input, RunOptions o = {}) {
  o.format = ReportFormat::structured;
  const RunResult r = run(input, o);
  return json::parse(r.report);
}

std::string nilpotent_text(const std::string& matrix_json) {
  return R"({"format":"wmt-descriptor","version":1,"kind":"nilpotent","name":"m","payload":{"matrix":)" + matrix_json +
         "}}";
}

std::string expect_descriptor_error(const std::string& text) {
  try {
    (void)parse_descriptor(text);
  } catch (const DescriptorError& e) {
    return e.where();
  }
  FAIL("expected a DescriptorError");
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("every corpus descriptor survives a serialize / parse round trip") {
    for (const auto& f : standard_corpus()) {
      const std::string text = serialize_descriptor(f);
      const DescriptorFile back = parse_descriptor(text);
      CHECK_MESSAGE(back == f, f.name);
      CHECK(serialize_descriptor(back) == text);
    }
  }

  TEST_CASE("generated examples round trip and validate") {
    ExampleParams p;
    p.n = 9;
    p.q = Integer(7);
    const DescriptorFile f = generate_example("i_n", p);
    CHECK(parse_descriptor(serialize_descriptor(f)) == f);
    CHECK_THROWS_AS(generate_example("hexagon"), PreconditionError);
    p.n = 2;
    CHECK_THROWS_AS(generate_example("i_n", p), PreconditionError);
  }

  TEST_CASE("malformed descriptors are rejected with a location") {
    CHECK(expect_descriptor_error(nilpotent_text(R"([["0","1"],["0","0"]], "colour": "red")")) == "payload.colour");
    CHECK(expect_descriptor_error(nilpotent_text(R"([["0","1.5"],["0","0"]])")) == "payload.matrix[0][1]");
    CHECK(expect_descriptor_error(nilpotent_text(R"([["0","1"],["0"]])")).rfind("payload.matrix", 0) == 0);
    CHECK(expect_descriptor_error(R"({"format":"wmt-descriptor","version":2,"kind":"nilpotent","name":"m","payload":{}})") ==
          "version");
    CHECK(expect_descriptor_error(R"({"format":"other","version":1,"kind":"nilpotent","name":"m","payload":{}})") == "format");
    CHECK(expect_descriptor_error(R"({"format":"wmt-descriptor","version":1,"kind":"torus","name":"m","payload":{}})") ==
          "kind");
    const std::string where = expect_descriptor_error("{\"format\": \"wmt-descriptor\",\n  \"version\": 1,,\n}");
    CHECK(where == "line 2, column 16");  // the second comma
  }

  TEST_CASE("a degeneration with an unknown stratum in a map is rejected") {
    DegenerationDescriptor d = i_n_descriptor(3);
    d.gysin[0].from = {1, 3, 5};
    DescriptorFile f;
    f.name = "broken";
    f.payload = d;
    // serialize writes whatever it is given; parsing validates it
    const std::string where = expect_descriptor_error(serialize_descriptor(f));
    CHECK(where.rfind("payload.gysin[0]", 0) == 0);
  }

  TEST_CASE("cycle of six lines at weight one: rational iso with bad primes 2 and 3") {
    RunOptions o;
    o.monodromy_verdict = true;
    o.w = 1;
    const json r = structured(corpus_text("i_n(6)"), o);
    CHECK(r["status"] == "computed");
    const json& m = r["answers"]["monodromy"][0];
    CHECK(m["rational_iso"] == true);
    CHECK(m["bad_primes"] == json::array({"2", "3"}));
  }

  TEST_CASE("Jordan block with entry 12 has property (t-f) at 5 but not at 2 or 3") {
    const std::string text = corpus_text("jordan_12");
    for (std::uint64_t ell : {2, 3, 5, 7}) {
      RunOptions o;
      o.tf_check = true;
      o.ell = ell;
      const json r = structured(text, o);
      REQUIRE(r["status"] == "computed");
      CHECK(r["answers"]["property_tf"][0]["holds"] == (ell > 3));
    }
  }

  TEST_CASE("T^2 - T + 2 is certified of weight one over q = 2") {
    RunOptions o;
    o.weight_certify = true;
    const json r = structured(corpus_text("supersingular_2"), o);
    CHECK(r["answers"]["weil"]["status"] == "certified");
    const json n = structured(corpus_text("split_not_weil"), o);
    CHECK(n["status"] == "computed");
    CHECK(n["answers"]["weil"]["status"] == "refuted");
  }

  TEST_CASE("the unit Jordan block has property (t-f) at 5") {
    RunOptions o;
    o.tf_check = true;
    o.ell = 5;
    const json r = structured(nilpotent_text(R"([["0","1"],["0","0"]])"), o);
    CHECK(r["answers"]["property_tf"][0]["holds"] == true);
  }

  TEST_CASE("q and w may come from the command line instead of the file") {
    RunOptions o;
    o.weight_certify = true;
    o.q = Integer(2);
    o.w = 1;
    const std::string text =
        R"({"format":"wmt-descriptor","version":1,"kind":"weil-poly","name":"p","payload":{"polynomial":"T^2-T+2"}})";
    const json r = structured(text, o);
    CHECK(r["status"] == "computed");
    CHECK(r["answers"]["weil"]["status"] == "certified");
  }

  TEST_CASE("exit codes") {
    CHECK(run(corpus_text("i_n(4)"), {}).exit_code == 0);
    CHECK(run("not json", {}).exit_code == 2);
    CHECK(run(nilpotent_text(R"([["1","0"],["0","0"]])"), {}).exit_code == 2);  // not nilpotent
    RunOptions small_ell;
    small_ell.tf_check = true;
    small_ell.ell = 4;
    CHECK(run(corpus_text("jordan_12"), small_ell).exit_code == 2);  // not a prime
    RunOptions no_q;
    no_q.weight_certify = true;
    CHECK(run(R"({"format":"wmt-descriptor","version":1,"kind":"weil-poly","name":"p","payload":{"polynomial":"T - 4"}})", no_q)
              .exit_code == 2);
  }

  TEST_CASE("errors are reported in the structured output") {
    RunOptions o;
    o.format = ReportFormat::structured;
    const RunResult r = run("{\"format\": 1", o);
    CHECK(r.exit_code == 2);
    const json j = json::parse(r.report);
    CHECK(j["status"] == "input_error");
    CHECK(j["error"]["type"] == "descriptor");
    CHECK_FALSE(r.summary.empty());
  }

  TEST_CASE("reports are deterministic and carry the digest and conventions") {
    for (const auto& f : standard_corpus()) {
      const std::string text = serialize_descriptor(f);
      for (auto fmt : {ReportFormat::text, ReportFormat::structured}) {
        RunOptions s;
        s.format = fmt;
        RunOptions p = s;
        p.exec = Execution::parallel;
        const RunResult a = run(text, s), b = run(text, s), c = run(text, p);
        CHECK_MESSAGE(a.report == b.report, f.name);
        CHECK_MESSAGE(a.report == c.report, f.name);
        CHECK(a.exit_code == 0);
      }
      const json j = structured(text);
      CHECK(j["toolkit_version"] == kToolkitVersion);
      CHECK(j["input_digest"] == "sha256:" + sha256_hex(text));
      CHECK(j["conventions"]["sign"] == kSignConvention);
      CHECK(j["conventions"]["basis"] == kBasisConvention);
      CHECK(j["descriptor"]["name"] == f.name);
    }
  }

  TEST_CASE("sha256 of known strings") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("the text report mentions the verdict in readable form") {
    RunOptions o;
    o.monodromy_verdict = true;
    o.w = 1;
    const RunResult r = run(corpus_text("i_n(6)"), o);
    CHECK(r.report.find("status: computed") != std::string::npos);
    CHECK(r.report.find("rational_iso: true") != std::string::npos);
    CHECK(r.report.find("{") == std::string::npos);
  }
}
