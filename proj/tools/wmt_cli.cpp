// Command-line front end: run one descriptor, generate fixtures, or batch a directory's worth.

#include "wmt/corpus.hpp"
#include "wmt/descriptor_io.hpp"
#include "wmt/errors.hpp"
#include "wmt/report.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct QuestionFlags {
  wmt::RunOptions options;
  std::string q_text;
  std::string format = "text";
  bool parallel = false;
};

void add_question_flags(CLI::App* cmd, QuestionFlags& f) {
  cmd->add_flag("--monodromy-verdict", f.options.monodromy_verdict, "N^i on E2 (degenerations) or Gr (nilpotents)");
  cmd->add_flag("--tf-check", f.options.tf_check, "property (t-f) at --ell, or at every ell <= 50");
  cmd->add_flag("--weight-certify", f.options.weight_certify, "Weil certification of the declared weights");
  cmd->add_flag("--bad-primes", f.options.bad_primes, "the finite set of bad primes with provenance");
  cmd->add_option("--ell", f.options.ell, "a prime below 2^31");
  cmd->add_option("--w", f.options.w, "weight or row index");
  cmd->add_option("--q", f.q_text, "residue field size (prime power)");
  cmd->add_option("--format", f.format, "report format")->check(CLI::IsMember({"text", "structured"}));
  cmd->add_flag("--parallel", f.parallel, "use the OpenMP kernels");
}

// Returns false (after printing) when --q is not a decimal integer.
bool finish_flags(QuestionFlags& f) {
  if (!f.q_text.empty()) {
    if (!std::regex_match(f.q_text, std::regex("[0-9]+"))) {
      std::cerr << "input error: --q must be a positive decimal integer\n";
      return false;
    }
    f.options.q = wmt::Integer(f.q_text);
  }
  f.options.format = f.format == "structured" ? wmt::ReportFormat::structured : wmt::ReportFormat::text;
  f.options.exec = f.parallel ? wmt::Execution::parallel : wmt::Execution::sequential;
  return true;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

std::string file_stem(const std::string& name) {
  std::string s;
  for (char c : name) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s.empty() ? "descriptor" : s;
}

int run_one(const std::string& path, const QuestionFlags& flags, const std::string& out_path) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "input error: cannot read " << path << "\n";
    return 2;
  }
  const wmt::RunResult r = wmt::run(text, flags.options);
  if (out_path.empty()) {
    std::cout << r.report;
  } else {
    if (!write_file(out_path, r.report)) {
      std::cerr << "input error: cannot write " << out_path << "\n";
      return 2;
    }
    std::cout << r.summary;
  }
  if (r.exit_code != 0) std::cerr << r.summary;
  return r.exit_code;
}

int run_batch(const std::vector<std::string>& paths, const QuestionFlags& flags, const std::string& out_dir) {
  if (!out_dir.empty()) fs::create_directories(out_dir);
  const long n = static_cast<long>(paths.size());
  std::vector<wmt::RunResult> results(paths.size());
  std::vector<bool> readable(paths.size(), true);
  // Each descriptor is independent; run() never throws for toolkit errors, so one bad file
  // cannot disturb the others.
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    std::string text;
    if (!read_file(paths[i], text)) {
      readable[i] = false;
      continue;
    }
    try {
      results[i] = wmt::run(text, flags.options);
    } catch (const std::exception& e) {
      results[i].exit_code = 3;
      results[i].summary = std::string("internal error: ") + e.what() + "\n";
    }
  }
  int worst = 0;
  const char* ext = flags.options.format == wmt::ReportFormat::structured ? ".json" : ".txt";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    int code = results[i].exit_code;
    if (!readable[i]) {
      code = 2;
      std::cout << paths[i] << ": input error: cannot read\n";
    } else {
      std::cout << paths[i] << ": exit " << code << "\n";
      std::istringstream lines(results[i].summary);
      for (std::string line; std::getline(lines, line);) std::cout << "  " << line << "\n";
      if (!out_dir.empty() && !write_file(fs::path(out_dir) / (fs::path(paths[i]).stem().string() + ext), results[i].report))
        code = 2;
    }
    worst = std::max(worst, code);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact weight-monodromy toolkit: filtrations, bad primes, Weil certificates, weight spectral sequences"};
  app.set_version_flag("--version", wmt::kToolkitVersion);
  app.require_subcommand(1);

  QuestionFlags run_flags;
  std::string run_path, run_out;
  CLI::App* run_cmd = app.add_subcommand("run", "answer questions about one descriptor");
  run_cmd->add_option("file", run_path, "descriptor file")->required();
  run_cmd->add_option("--out", run_out, "write the report here and print a summary");
  add_question_flags(run_cmd, run_flags);

  std::string gen_name, gen_out, gen_q, gen_s = "1", gen_a = "1";
  int gen_n = 6, gen_g = 1;
  CLI::App* gen_cmd = app.add_subcommand("generate", "write a fixture descriptor");
  gen_cmd->add_option("name", gen_name, "i_n | good_reduction | two_components")->required();
  gen_cmd->add_option("--n", gen_n, "number of lines in the cycle");
  gen_cmd->add_option("--g", gen_g, "genus of the double curve");
  gen_cmd->add_option("--s", gen_s, "Gysin coefficient");
  gen_cmd->add_option("--a", gen_a, "restriction coefficient on H^2, or the trace for good_reduction");
  gen_cmd->add_option("--q", gen_q, "residue field size");
  gen_cmd->add_option("--out", gen_out, "output path (default: standard output)");

  std::string corpus_dir;
  CLI::App* corpus_cmd = app.add_subcommand("corpus", "write the standard corpus of descriptors");
  corpus_cmd->add_option("dir", corpus_dir, "output directory")->required();

  QuestionFlags batch_flags;
  std::vector<std::string> batch_paths;
  std::string batch_dir;
  CLI::App* batch_cmd = app.add_subcommand("batch", "run many descriptors in parallel");
  batch_cmd->add_option("files", batch_paths, "descriptor files")->required();
  batch_cmd->add_option("--out-dir", batch_dir, "directory for one report per descriptor");
  add_question_flags(batch_cmd, batch_flags);

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) {
    if (!finish_flags(run_flags)) return 2;
    return run_one(run_path, run_flags, run_out);
  }
  if (*batch_cmd) {
    if (!finish_flags(batch_flags)) return 2;
    return run_batch(batch_paths, batch_flags, batch_dir);
  }
  if (*gen_cmd) {
    const std::regex integer("-?[0-9]+");
    if (!std::regex_match(gen_s, integer) || !std::regex_match(gen_a, integer) ||
        (!gen_q.empty() && !std::regex_match(gen_q, integer))) {
      std::cerr << "input error: --s, --a and --q take decimal integers\n";
      return 2;
    }
    wmt::ExampleParams params;
    params.n = gen_n;
    params.g = gen_g;
    params.s = wmt::Integer(gen_s);
    params.a = wmt::Integer(gen_a);
    if (!gen_q.empty()) params.q = wmt::Integer(gen_q);
    try {
      const std::string text = wmt::serialize_descriptor(wmt::generate_example(gen_name, params));
      if (gen_out.empty()) {
        std::cout << text;
      } else if (!write_file(gen_out, text)) {
        std::cerr << "input error: cannot write " << gen_out << "\n";
        return 2;
      }
    } catch (const wmt::Error& e) {
      std::cerr << "input error: " << e.what() << "\n";
      return 2;
    }
    return 0;
  }
  if (*corpus_cmd) {
    fs::create_directories(corpus_dir);
    for (const auto& d : wmt::standard_corpus())
      if (!write_file(fs::path(corpus_dir) / (file_stem(d.name) + ".json"), wmt::serialize_descriptor(d))) {
        std::cerr << "input error: cannot write into " << corpus_dir << "\n";
        return 2;
      }
    return 0;
  }
  return 0;
}
