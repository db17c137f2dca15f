// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "biotrunc/types.hpp"

namespace biotrunc::match {

enum class ScoreKind : std::uint8_t { kFloatSed, kIntSed, kHamming };

/// Dissimilarity score; lower means more similar.
struct Score {
  double value = 0.0;
  ScoreKind kind = ScoreKind::kFloatSed;
  friend bool operator==(const Score&, const Score&) = default;
};

/// Squared Euclidean distance. Integer kinds are accumulated exactly.
double sed(const FeatureVector& a, const FeatureVector& b);
std::uint64_t sed(const QuantizedVector& a, const QuantizedVector& b);
std::uint64_t sed(const BinaryVector& a, const BinaryVector& b);
Score sed(const Payload& a, const Payload& b);

std::uint64_t hamming(const BinaryVector& a, const BinaryVector& b);

/// Sum rule. Rejects an empty list and mixed kinds.
Score score_fusion_sum(std::span<const Score> scores);

enum class Decision : std::uint8_t { kAccept, kReject };

/// Accepts iff the score is at most the threshold.
Decision decide(const Score& s, double threshold);

}  // namespace biotrunc::match
