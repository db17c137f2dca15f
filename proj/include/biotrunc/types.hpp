// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace biotrunc {

/// A biometric modality tag. The three built-in modalities are provided as
/// named constructors; any other non-empty tag is accepted.
class Modality {
 public:
  explicit Modality(std::string name);

  static Modality face() { return Modality("face"); }
  static Modality fingerprint() { return Modality("fingerprint"); }
  static Modality iris() { return Modality("iris"); }

  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const Modality&, const Modality&) = default;
  friend auto operator<=>(const Modality&, const Modality&) = default;

 private:
  std::string name_;
};

/// Face, fingerprint, iris: the default fusion order.
std::vector<Modality> default_modalities();

enum class VectorKind : std::uint8_t { kReal = 0, kQuantized = 1, kBinary = 2 };

std::string_view to_string(VectorKind kind);

/// Real-valued embedding.
class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::vector<double> elements);

  std::size_t dim() const noexcept { return elements_.size(); }
  std::span<const double> elements() const noexcept { return elements_; }
  double operator[](std::size_t i) const { return elements_[i]; }

  double mean() const;
  double norm() const;
  /// True when the empirical mean of the elements lies within `tolerance` of 0.
  bool is_centered(double tolerance) const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::vector<double> elements_;
};

/// Vector over {0, 1}. One byte per element in memory; packed on disk.
class BinaryVector {
 public:
  BinaryVector() = default;
  explicit BinaryVector(std::vector<std::uint8_t> bits);

  std::size_t dim() const noexcept { return bits_.size(); }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::size_t weight() const;

  friend bool operator==(const BinaryVector&, const BinaryVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Vector of quantization levels in [0, q-1], q a power of two >= 2.
class QuantizedVector {
 public:
  QuantizedVector() = default;
  QuantizedVector(std::vector<std::uint32_t> levels, std::uint32_t q);

  std::size_t dim() const noexcept { return levels_.size(); }
  std::uint32_t q() const noexcept { return q_; }
  std::span<const std::uint32_t> levels() const noexcept { return levels_; }
  std::uint32_t operator[](std::size_t i) const { return levels_[i]; }

  friend bool operator==(const QuantizedVector&, const QuantizedVector&) = default;

 private:
  std::vector<std::uint32_t> levels_;
  std::uint32_t q_ = 2;
};

bool is_power_of_two_levels(std::uint64_t q);

using Payload = std::variant<FeatureVector, QuantizedVector, BinaryVector>;

VectorKind kind_of(const Payload& payload);
std::size_t dim_of(const Payload& payload);
/// Number of levels for integer payloads (2 for binary, 0 for real).
std::uint32_t levels_of(const Payload& payload);

/// Integer view of an integer-kind payload; rejects real payloads.
std::vector<std::uint32_t> integer_elements(const Payload& payload);

FeatureVector concat(std::span<const FeatureVector> parts);
QuantizedVector concat(std::span<const QuantizedVector> parts);
BinaryVector concat(std::span<const BinaryVector> parts);
/// Rejects empty input and mixed kinds (or mixed q for quantized parts).
Payload concat(std::span<const Payload> parts);

/// Scales `v` to unit Euclidean norm. Rejects the zero vector.
FeatureVector l2_normalize(const FeatureVector& v);

inline constexpr std::string_view kRawProvenance = "raw";

/// A stored biometric sample of one modality (or a fused multi-modal sample).
struct Template {
  Payload payload;
  std::string subject_id;
  std::uint32_t sample_index = 0;
  Modality modality = Modality::face();
  /// "raw", or the describe() form of the reduction plan that produced it.
  std::string provenance{kRawProvenance};

  friend bool operator==(const Template&, const Template&) = default;
};

struct Subject {
  std::string id;
  /// Indexed like MultiDataset::modalities.
  std::vector<std::vector<Template>> samples;
};

/// Virtual multi-biometric dataset.
class MultiDataset {
 public:
  MultiDataset(std::vector<Modality> modalities, std::vector<Subject> subjects);

  const std::vector<Modality>& modalities() const noexcept { return modalities_; }
  const std::vector<Subject>& subjects() const noexcept { return subjects_; }
  std::size_t modality_index(const Modality& m) const;
  std::size_t dim(const Modality& m) const;
  std::size_t template_count() const;

 private:
  std::vector<Modality> modalities_;
  std::vector<Subject> subjects_;
  std::vector<std::size_t> dims_;
};

}  // namespace biotrunc
