#pragma once

#include "wmt/execution.hpp"
#include "wmt/matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace wmt {

inline constexpr const char* kToolkitVersion = "1.0.0";

enum class ReportFormat { text, structured };

/// Which questions to answer. With none of the four question flags set, every question that
/// applies to the descriptor kind is answered.
struct RunOptions {
  bool monodromy_verdict = false;
  bool tf_check = false;
  bool weight_certify = false;
  bool bad_primes = false;
  std::optional<std::uint64_t> ell;
  std::optional<int> w;
  std::optional<Integer> q;
  ReportFormat format = ReportFormat::text;
  Execution exec = Execution::sequential;

  bool any_question() const { return monodromy_verdict || tf_check || weight_certify || bad_primes; }
};

struct RunResult {
  /// 0 computed, 2 input error, 3 internal assertion failure.
  int exit_code = 0;
  /// The full report (also written on errors, with the error recorded).
  std::string report;
  /// A few human-readable lines.
  std::string summary;
};

/// Parses, validates and answers; never throws for toolkit errors.
RunResult run(const std::string& input, const RunOptions& options);

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);

}  // namespace wmt
