// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>

#include "biotrunc/error.hpp"
#include "biotrunc/he.hpp"

namespace biotrunc::he {

WorkloadReport workload_estimate(std::size_t dim, PackedKind kind, std::size_t slots) {
  require(dim >= 1 && slots >= 1, ErrorCode::kInvalidArgument, "dim and slots must be positive");
  WorkloadReport r;
  r.dim = dim;
  r.slots = slots;
  r.kind = kind;
  r.ciphertexts = (dim + slots - 1) / slots;
  // Rotate-and-sum over the occupied slots: ceil(log2(width)) steps.
  const std::size_t width = std::min(dim, slots);
  const auto steps = static_cast<std::size_t>(std::bit_width(width - 1));
  r.hadamard_mults = r.ciphertexts;
  r.rotations = r.ciphertexts * steps;
  r.additions = r.ciphertexts * steps;
  return r;
}

double operation_ratio(const WorkloadReport& a, const WorkloadReport& b) {
  require(b.total_ops() > 0, ErrorCode::kInvalidArgument, "reference workload has no operations");
  return static_cast<double>(a.total_ops()) / static_cast<double>(b.total_ops());
}

std::string_view to_string(PackedKind kind) {
  switch (kind) {
    case PackedKind::kFloat:
      return "float";
    case PackedKind::kInt:
      return "int";
    case PackedKind::kBinary:
      return "binary";
  }
  return "unknown";
}

PackedKind parse_packed_kind(std::string_view name) {
  if (name == "float" || name == "float_packed") return PackedKind::kFloat;
  if (name == "int" || name == "int_packed") return PackedKind::kInt;
  if (name == "binary" || name == "binary_packed") return PackedKind::kBinary;
  fail(ErrorCode::kInvalidArgument, "unknown packed kind '" + std::string(name) + "' (float, int, binary)");
}

}  // namespace biotrunc::he
