// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

// Training-free dimensionality reduction: binarization, equal-width
// quantization, contiguous fractions, interleaving (stride selection), the
// sum-of-fractions reduction and concatenation fusion.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "biotrunc/error.hpp"
#include "biotrunc/types.hpp"

namespace biotrunc::reduce {

struct Range {
  double lo = -1.0;
  double hi = 1.0;
  friend bool operator==(const Range&, const Range&) = default;
};

/// kFloor is floor((x - lo) / (hi - lo) * (q - 1)). kNearest adds 1/2 before
/// flooring, which places the q = 2 boundary exactly at the range midpoint.
enum class Rounding : std::uint8_t { kFloor, kNearest };

struct NoQuantization {
  friend bool operator==(const NoQuantization&, const NoQuantization&) = default;
};
struct BinaryQuantization {
  double threshold = 0.0;
  friend bool operator==(const BinaryQuantization&, const BinaryQuantization&) = default;
};
struct LevelQuantization {
  std::uint32_t q = 4;
  Range range;
  Rounding rounding = Rounding::kFloor;
  friend bool operator==(const LevelQuantization&, const LevelQuantization&) = default;
};
using Quantization = std::variant<NoQuantization, BinaryQuantization, LevelQuantization>;

struct NoTruncation {
  friend bool operator==(const NoTruncation&, const NoTruncation&) = default;
};
/// Keep the i-th (1-based) of k contiguous equal parts.
struct FractionTruncation {
  std::size_t k = 1;
  std::size_t i = 1;
  friend bool operator==(const FractionTruncation&, const FractionTruncation&) = default;
};
/// Keep every x-th element starting at 0. `literal` switches to the
/// x-point spread i_j = floor(j (d-1) / (x-1)), j = 0..x-1, which yields x
/// elements rather than d/x; it exists for documentation and comparison.
struct InterleaveTruncation {
  std::size_t x = 1;
  bool literal = false;
  friend bool operator==(const InterleaveTruncation&, const InterleaveTruncation&) = default;
};
/// Element-wise sum of the k contiguous parts.
struct SumTruncation {
  std::size_t k = 1;
  friend bool operator==(const SumTruncation&, const SumTruncation&) = default;
};
/// Keep the first `length` elements. Used for budgets that do not divide d,
/// e.g. 171/171/170 for a 512-element fused template.
struct HeadTruncation {
  std::size_t length = 0;
  friend bool operator==(const HeadTruncation&, const HeadTruncation&) = default;
};
using Truncation = std::variant<NoTruncation, FractionTruncation, InterleaveTruncation,
                                SumTruncation, HeadTruncation>;

struct NoFusion {
  friend bool operator==(const NoFusion&, const NoFusion&) = default;
};
struct ConcatFusion {
  std::vector<Modality> order = default_modalities();
  friend bool operator==(const ConcatFusion&, const ConcatFusion&) = default;
};
using Fusion = std::variant<NoFusion, ConcatFusion>;

/// Declarative pipeline, always applied as quantize -> truncate -> fuse.
struct ReductionPlan {
  Quantization quantization;
  Truncation truncation;
  Fusion fusion;

  /// Checks parameters that do not depend on the input dimension.
  void validate() const;
  /// Checks the dimension-dependent constraints (k | d, x | d, length <= d).
  void validate_for(std::size_t dim) const;
  /// Compact, stable textual form, e.g. "binary(0)|fraction(4,2)|none".
  std::string describe() const;
  bool integer_output() const;

  friend bool operator==(const ReductionPlan&, const ReductionPlan&) = default;
};

// ---------------------------------------------------------------------------
// Element-wise pre-processing.

/// 0 where v[i] < t, 1 otherwise.
BinaryVector binarize(const FeatureVector& v, double threshold = 0.0);

/// Equal-width quantization to q = 2^l levels over `range`; inputs outside the
/// range are clamped first.
QuantizedVector quantize(const FeatureVector& v, std::uint32_t q, Range range = {},
                         Rounding rounding = Rounding::kFloor);

std::uint32_t quantize_value(double x, std::uint32_t q, Range range,
                             Rounding rounding = Rounding::kFloor);

// ---------------------------------------------------------------------------
// Index selections (0-based). These are shared with encrypted matching, where
// truncation is a selection over the enrolled full template.

std::vector<std::size_t> fraction_indices(std::size_t dim, std::size_t k, std::size_t i);
std::vector<std::size_t> interleave_indices(std::size_t dim, std::size_t x);
std::vector<std::size_t> interleave_literal_indices(std::size_t dim, std::size_t x);
std::vector<std::size_t> head_indices(std::size_t dim, std::size_t length);

/// The selection a truncation amounts to, or nullopt for the sum reduction,
/// which is not a selection.
std::optional<std::vector<std::size_t>> selection_of(const Truncation& t, std::size_t dim);

FeatureVector select(const FeatureVector& v, std::span<const std::size_t> indices);
QuantizedVector select(const QuantizedVector& v, std::span<const std::size_t> indices);
BinaryVector select(const BinaryVector& v, std::span<const std::size_t> indices);
Payload select(const Payload& v, std::span<const std::size_t> indices);

// ---------------------------------------------------------------------------
// Truncation.

template <typename V>
V fraction(const V& v, std::size_t k, std::size_t i) {
  const auto idx = fraction_indices(v.dim(), k, i);
  return select(v, idx);
}

template <typename V>
V interleave(const V& v, std::size_t x) {
  const auto idx = interleave_indices(v.dim(), x);
  return select(v, idx);
}

template <typename V>
V interleave_literal(const V& v, std::size_t x) {
  const auto idx = interleave_literal_indices(v.dim(), x);
  return select(v, idx);
}

template <typename V>
V head(const V& v, std::size_t length) {
  const auto idx = head_indices(v.dim(), length);
  return select(v, idx);
}

/// Real input stays real. Integer input becomes a QuantizedVector whose q is
/// the smallest power of two holding the largest possible sum; for binary
/// input each output element counts the active bits across the k parts.
/// k = 1 returns the input unchanged.
FeatureVector sum_fractions(const FeatureVector& v, std::size_t k);
Payload sum_fractions(const QuantizedVector& v, std::size_t k);
Payload sum_fractions(const BinaryVector& v, std::size_t k);
Payload sum_fractions(const Payload& v, std::size_t k);

Payload quantize_payload(const Payload& v, const Quantization& quantization);
Payload truncate(const Payload& v, const Truncation& truncation);

// ---------------------------------------------------------------------------
// Plans and fusion.

/// Applies quantization then truncation. The plan's fusion step is ignored
/// here; see apply_plan_fused.
Template apply_plan(const Template& t, const ReductionPlan& plan);

/// Concatenates per-modality templates of one subject sample in `order`.
/// A single template is returned unchanged.
Template fuse_concat(std::span<const Template> templates, std::span<const Modality> order);

/// Reduces each per-modality template with `plan`, then fuses them in the
/// plan's concat order (or expects a single template when fusion is none).
Template apply_plan_fused(std::span<const Template> per_modality, const ReductionPlan& plan);

/// Splits a total length into `parts` near-equal lengths, the larger ones
/// first: (512, 3) -> {171, 171, 170}.
std::vector<std::size_t> split_total(std::size_t total, std::size_t parts);

/// "face+fingerprint+iris".
Modality fused_modality(std::span<const Modality> order);

}  // namespace biotrunc::reduce
