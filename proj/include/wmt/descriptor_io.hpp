#pragma once

#include "wmt/descriptor.hpp"
#include "wmt/modular.hpp"
#include "wmt/polynomial.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>

namespace wmt {

inline constexpr const char* kDescriptorFormat = "wmt-descriptor";
inline constexpr int kDescriptorVersion = 1;

struct NilpotentPayload {
  IntMatrix matrix;
  friend bool operator==(const NilpotentPayload&, const NilpotentPayload&) = default;
};

struct WeilPayload {
  IntPoly polynomial;
  std::optional<Integer> q;
  std::optional<int> w;
  friend bool operator==(const WeilPayload&, const WeilPayload&) = default;
};

/// One integrally modeled family as written in a file.
struct FamilySpec {
  std::size_t rank = 0;
  std::map<std::string, IntMatrix> operators;
  std::map<std::uint64_t, std::pair<std::size_t, std::map<std::string, FpMatrix>>> exceptions;
  /// Declared weight and, optionally, the polynomial backing it.
  std::optional<int> weight;
  std::optional<IntPoly> weight_polynomial;
  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

struct FamilyPayload {
  FamilySpec source;
  std::optional<FamilySpec> target;
  std::optional<IntMatrix> map;
  std::map<std::uint64_t, FpMatrix> map_overrides;
  std::optional<Integer> q;
  friend bool operator==(const FamilyPayload&, const FamilyPayload&) = default;
};

struct DescriptorFile {
  enum class Kind { nilpotent, family, degeneration, weil_poly };
  int version = kDescriptorVersion;
  std::string name;
  std::variant<NilpotentPayload, FamilyPayload, DegenerationDescriptor, WeilPayload> payload;

  Kind kind() const { return static_cast<Kind>(payload.index()); }
  friend bool operator==(const DescriptorFile&, const DescriptorFile&) = default;
};

const char* to_string(DescriptorFile::Kind k);

/// Parses and schema-checks a descriptor; throws DescriptorError with a field path (and the
/// line/column for JSON syntax errors). Degeneration payloads are also structurally validated.
DescriptorFile parse_descriptor(const std::string& text);

/// Canonical text: parse_descriptor(serialize_descriptor(d)) == d.
std::string serialize_descriptor(const DescriptorFile& d);

}  // namespace wmt
