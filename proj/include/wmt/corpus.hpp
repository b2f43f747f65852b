#pragma once

#include "wmt/descriptor.hpp"
#include "wmt/descriptor_io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wmt {

/// Cycle of n projective lines (n >= 3), each meeting its two neighbours in a point.
/// With q, frobenius is 1 on H^0 and q on H^2. Maps are all [1].
DegenerationDescriptor i_n_descriptor(int n, std::optional<Integer> q = std::nullopt);

/// One smooth curve with H^1 frobenius the companion of T^2 - a T + q.
DegenerationDescriptor good_reduction_descriptor(const Integer& a = 1, const Integer& q = 2);

/// Two surfaces meeting along a genus-g curve C. The Gysin maps H^0(C) -> H^2(D_1), H^2(D_2) are
/// [s] and [-s]; the restrictions H^2(D_k) -> H^2(C) are [a]. With q, every piece carries a
/// compatible frobenius (H^1(C) as g copies of the companion of T^2 - T + q).
DegenerationDescriptor two_components_descriptor(int g, const Integer& s = 1, const Integer& a = 1,
                                                 std::optional<Integer> q = std::nullopt);

struct ExampleParams {
  int n = 6;
  int g = 1;
  Integer s = 1;
  Integer a = 1;
  std::optional<Integer> q;
};

/// name in {"i_n", "good_reduction", "two_components"}; PreconditionError otherwise.
DescriptorFile generate_example(const std::string& name, const ExampleParams& params = {});

/// The fixed corpus the determinism and E2 checks run over.
std::vector<DescriptorFile> standard_corpus();

}  // namespace wmt
