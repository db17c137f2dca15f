// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include "biotrunc/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "biotrunc/error.hpp"

namespace biotrunc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kKindMismatch: return "kind mismatch";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kDegenerate: return "degenerate input";
    case ErrorCode::kUnreachable: return "target unreachable";
    case ErrorCode::kKeyMismatch: return "key mismatch";
    case ErrorCode::kCrypto: return "crypto failure";
    case ErrorCode::kIo: return "i/o failure";
    case ErrorCode::kNotTemplateFile: return "not a template file";
    case ErrorCode::kVersionMismatch: return "unsupported format version";
    case ErrorCode::kTruncatedFile: return "truncated file";
    case ErrorCode::kCountMismatch: return "count mismatch";
  }
  return "unknown error";
}

Modality::Modality(std::string name) : name_(std::move(name)) {
  require(!name_.empty(), ErrorCode::kInvalidArgument, "modality tag must not be empty");
}

std::vector<Modality> default_modalities() {
  return {Modality::face(), Modality::fingerprint(), Modality::iris()};
}

std::string_view to_string(VectorKind kind) {
  switch (kind) {
    case VectorKind::kReal: return "real";
    case VectorKind::kQuantized: return "quantized";
    case VectorKind::kBinary: return "binary";
  }
  return "unknown";
}

FeatureVector::FeatureVector(std::vector<double> elements) : elements_(std::move(elements)) {}

double FeatureVector::mean() const {
  if (elements_.empty()) return 0.0;
  double sum = 0.0;
  for (double x : elements_) sum += x;
  return sum / static_cast<double>(elements_.size());
}

double FeatureVector::norm() const {
  double sum = 0.0;
  for (double x : elements_) sum += x * x;
  return std::sqrt(sum);
}

bool FeatureVector::is_centered(double tolerance) const {
  return std::abs(mean()) <= tolerance;
}

BinaryVector::BinaryVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (std::uint8_t b : bits_) {
    require(b <= 1, ErrorCode::kInvalidArgument, "binary vector element outside {0,1}");
  }
}

std::size_t BinaryVector::weight() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool is_power_of_two_levels(std::uint64_t q) {
  return q >= 2 && (q & (q - 1)) == 0;
}

QuantizedVector::QuantizedVector(std::vector<std::uint32_t> levels, std::uint32_t q)
    : levels_(std::move(levels)), q_(q) {
  require(is_power_of_two_levels(q), ErrorCode::kInvalidArgument,
          "quantization intervals q must be a power of two >= 2, got " + std::to_string(q));
  for (std::uint32_t level : levels_) {
    require(level < q_, ErrorCode::kInvalidArgument,
            "quantization level " + std::to_string(level) + " outside [0, " +
                std::to_string(q_ - 1) + "]");
  }
}

VectorKind kind_of(const Payload& payload) {
  return static_cast<VectorKind>(payload.index());
}

std::size_t dim_of(const Payload& payload) {
  return std::visit([](const auto& v) { return v.dim(); }, payload);
}

std::uint32_t levels_of(const Payload& payload) {
  if (const auto* qv = std::get_if<QuantizedVector>(&payload)) return qv->q();
  if (std::holds_alternative<BinaryVector>(payload)) return 2;
  return 0;
}

std::vector<std::uint32_t> integer_elements(const Payload& payload) {
  if (const auto* qv = std::get_if<QuantizedVector>(&payload)) {
    return {qv->levels().begin(), qv->levels().end()};
  }
  if (const auto* bv = std::get_if<BinaryVector>(&payload)) {
    return {bv->bits().begin(), bv->bits().end()};
  }
  fail(ErrorCode::kKindMismatch, "integer elements requested from a real-valued vector");
}

namespace {

template <typename T, typename Get>
std::vector<T> join(std::size_t parts, Get&& get) {
  std::vector<T> out;
  for (std::size_t i = 0; i < parts; ++i) {
    auto span = get(i);
    out.insert(out.end(), span.begin(), span.end());
  }
  return out;
}

}  // namespace

FeatureVector concat(std::span<const FeatureVector> parts) {
  require(!parts.empty(), ErrorCode::kInvalidArgument, "concat needs at least one part");
  return FeatureVector(join<double>(parts.size(), [&](std::size_t i) { return parts[i].elements(); }));
}

QuantizedVector concat(std::span<const QuantizedVector> parts) {
  require(!parts.empty(), ErrorCode::kInvalidArgument, "concat needs at least one part");
  const std::uint32_t q = parts.front().q();
  for (const auto& p : parts) {
    require(p.q() == q, ErrorCode::kKindMismatch,
            "concat of quantized vectors with different q (" + std::to_string(q) + " vs " +
                std::to_string(p.q()) + ")");
  }
  return QuantizedVector(join<std::uint32_t>(parts.size(), [&](std::size_t i) { return parts[i].levels(); }), q);
}

BinaryVector concat(std::span<const BinaryVector> parts) {
  require(!parts.empty(), ErrorCode::kInvalidArgument, "concat needs at least one part");
  return BinaryVector(join<std::uint8_t>(parts.size(), [&](std::size_t i) { return parts[i].bits(); }));
}

Payload concat(std::span<const Payload> parts) {
  require(!parts.empty(), ErrorCode::kInvalidArgument, "concat needs at least one part");
  const VectorKind kind = kind_of(parts.front());
  for (const auto& p : parts) {
    require(kind_of(p) == kind, ErrorCode::kKindMismatch,
            "concat of mixed vector kinds: " + std::string(to_string(kind)) + " and " +
                std::string(to_string(kind_of(p))));
  }
  return std::visit(
      [&](const auto& first) -> Payload {
        using V = std::decay_t<decltype(first)>;
        std::vector<V> typed;
        typed.reserve(parts.size());
        for (const auto& p : parts) typed.push_back(std::get<V>(p));
        return concat(std::span<const V>(typed));
      },
      parts.front());
}

FeatureVector l2_normalize(const FeatureVector& v) {
  const double n = v.norm();
  require(n > 0.0, ErrorCode::kInvalidArgument, "cannot normalize the zero vector");
  std::vector<double> out(v.elements().begin(), v.elements().end());
  for (double& x : out) x /= n;
  return FeatureVector(std::move(out));
}

MultiDataset::MultiDataset(std::vector<Modality> modalities, std::vector<Subject> subjects)
    : modalities_(std::move(modalities)), subjects_(std::move(subjects)) {
  require(!modalities_.empty(), ErrorCode::kInvalidArgument, "dataset needs at least one modality");
  dims_.assign(modalities_.size(), 0);
  for (const auto& subject : subjects_) {
    require(subject.samples.size() == modalities_.size(), ErrorCode::kInvalidArgument,
            "subject " + subject.id + " does not cover every modality");
    for (std::size_t m = 0; m < modalities_.size(); ++m) {
      require(!subject.samples[m].empty(), ErrorCode::kInvalidArgument,
              "subject " + subject.id + " has no " + modalities_[m].name() + " template");
      for (const auto& t : subject.samples[m]) {
        require(t.subject_id == subject.id, ErrorCode::kInvalidArgument,
                "template subject id differs from its subject");
        const std::size_t d = dim_of(t.payload);
        if (dims_[m] == 0) dims_[m] = d;
        require(dims_[m] == d, ErrorCode::kDimensionMismatch,
                "non-uniform " + modalities_[m].name() + " dimension");
      }
    }
  }
}

std::size_t MultiDataset::modality_index(const Modality& m) const {
  auto it = std::find(modalities_.begin(), modalities_.end(), m);
  require(it != modalities_.end(), ErrorCode::kInvalidArgument,
          "modality " + m.name() + " not present in dataset");
  return static_cast<std::size_t>(it - modalities_.begin());
}

std::size_t MultiDataset::dim(const Modality& m) const { return dims_[modality_index(m)]; }

std::size_t MultiDataset::template_count() const {
  std::size_t total = 0;
  for (const auto& s : subjects_) {
    for (const auto& per : s.samples) total += per.size();
  }
  return total;
}

}  // namespace biotrunc
