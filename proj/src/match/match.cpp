// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include "biotrunc/match.hpp"

#include <string>

#include "biotrunc/error.hpp"

namespace biotrunc::match {

namespace {

void check_dims(std::size_t a, std::size_t b) {
  require(a == b, ErrorCode::kDimensionMismatch,
          "cannot compare vectors of dimension " + std::to_string(a) + " and " + std::to_string(b));
}

}  // namespace

double sed(const FeatureVector& a, const FeatureVector& b) {
  check_dims(a.dim(), b.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

std::uint64_t sed(const QuantizedVector& a, const QuantizedVector& b) {
  check_dims(a.dim(), b.dim());
  require(a.q() == b.q(), ErrorCode::kKindMismatch, "cannot compare vectors quantized with different q");
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const std::int64_t d = static_cast<std::int64_t>(a[i]) - static_cast<std::int64_t>(b[i]);
    sum += static_cast<std::uint64_t>(d * d);
  }
  return sum;
}

std::uint64_t sed(const BinaryVector& a, const BinaryVector& b) {
  check_dims(a.dim(), b.dim());
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    sum += static_cast<std::uint64_t>(d * d);
  }
  return sum;
}

std::uint64_t hamming(const BinaryVector& a, const BinaryVector& b) {
  check_dims(a.dim(), b.dim());
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) count += (a[i] != b[i]);
  return count;
}

Score sed(const Payload& a, const Payload& b) {
  require(a.index() == b.index(), ErrorCode::kKindMismatch,
          "cannot compare " + std::string(to_string(kind_of(a))) + " with " +
              std::string(to_string(kind_of(b))) + " vectors");
  if (const auto* fa = std::get_if<FeatureVector>(&a)) {
    return {sed(*fa, std::get<FeatureVector>(b)), ScoreKind::kFloatSed};
  }
  if (const auto* qa = std::get_if<QuantizedVector>(&a)) {
    return {static_cast<double>(sed(*qa, std::get<QuantizedVector>(b))), ScoreKind::kIntSed};
  }
  return {static_cast<double>(hamming(std::get<BinaryVector>(a), std::get<BinaryVector>(b))),
          ScoreKind::kHamming};
}

Score score_fusion_sum(std::span<const Score> scores) {
  require(!scores.empty(), ErrorCode::kInvalidArgument, "score fusion needs at least one score");
  Score out{0.0, scores.front().kind};
  for (const auto& s : scores) {
    require(s.kind == out.kind, ErrorCode::kKindMismatch, "score fusion over mixed score kinds");
    out.value += s.value;
  }
  return out;
}

Decision decide(const Score& s, double threshold) {
  return s.value <= threshold ? Decision::kAccept : Decision::kReject;
}

}  // namespace biotrunc::match
