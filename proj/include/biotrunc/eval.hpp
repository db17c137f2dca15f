// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

// Score collection over a comparison set and the experiment runner that
// produces EER tables over a dimension grid.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biotrunc/he.hpp"
#include "biotrunc/metrics.hpp"
#include "biotrunc/reduce.hpp"
#include "biotrunc/synth.hpp"

namespace biotrunc::eval {

enum class Backend : std::uint8_t { kPlaintext, kEncrypted };

std::string_view to_string(Backend b);
Backend parse_backend(std::string_view name);

/// One modality's contribution to a (possibly fused) comparison template. The
/// plan's fusion step is ignored; fusion is the concatenation of the parts.
struct ModalityPart {
  Modality modality;
  reduce::ReductionPlan plan;
};

/// Parts are reduced, concatenated in order, and the concatenation is then
/// truncated by `post` (the total-dimension reading of a fused budget).
struct Recipe {
  std::vector<ModalityPart> parts;
  reduce::Truncation post = reduce::NoTruncation{};

  /// A plan with concat fusion yields one part per modality in the fusion
  /// order; otherwise a single part for `single` (default: first modality).
  static Recipe from_plan(const reduce::ReductionPlan& plan, const MultiDataset& ds,
                          std::optional<Modality> single = std::nullopt);
  std::string describe() const;
};

struct ScoringOptions {
  Backend backend = Backend::kPlaintext;
  unsigned threads = 1;
  /// Key for the encrypted backend. When null a key of `key_bits` is
  /// generated from `key_seed`.
  const he::KeyPair* key = nullptr;
  std::size_t key_bits = he::kDefaultKeyBits;
  std::uint64_t key_seed = 1;
  /// Seeded encryption randomness; false draws from the system entropy source.
  bool deterministic = true;
  std::uint64_t nonce_seed = 1;
};

/// The comparison template of one (subject, tuple) under `recipe`.
Payload comparison_payload(const MultiDataset& ds, const Recipe& recipe, std::size_t subject, std::size_t tuple);

/// One score per pair, in pair order. The encrypted backend enrolls every
/// reference template under the key and decrypts each encrypted SED; for
/// integer kinds it yields exactly the plaintext scores.
ScoreSet collect_scores(const MultiDataset& ds, const Recipe& recipe, const synth::ComparisonSet& pairs,
                        const ScoringOptions& options = {});
ScoreSet collect_scores(const MultiDataset& ds, const reduce::ReductionPlan& plan,
                        const synth::ComparisonSet& pairs, const ScoringOptions& options = {});

// ---------------------------------------------------------------------------

enum class Method : std::uint8_t { kFraction, kInterleave, kSum };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// A quantization with a truncation method, swept over the dimension grid.
struct PlanFamily {
  reduce::Quantization quantization = reduce::NoQuantization{};
  Method method = Method::kFraction;
  std::string name() const;
};

struct ExperimentSpec {
  synth::SynthConfig data = synth::SynthConfig::desk_default();
  std::vector<PlanFamily> families;
  std::vector<std::size_t> grid = {16, 32, 64, 128, 256, 512};
  /// Grid values are the fused length (truncating the concatenation) instead
  /// of the per-modality length.
  bool total_dim = false;
  ScoringOptions scoring;

  void validate() const;
};

struct Cell {
  double mean = 0.0;
  double std = 0.0;
  std::size_t runs = 0;
  /// Dispersion is meaningful only over several fraction indices.
  bool has_std() const noexcept { return runs > 1; }
};

struct ReportRow {
  std::size_t dim = 0;
  std::vector<Cell> cells;
};

/// Columns: "all" (fused) then one per modality. EERs are fractions.
struct ReportTable {
  std::string title;
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;
  bool partial = false;
  std::string error;

  bool has_std() const;
};

std::vector<ReportTable> run_experiment(const ExperimentSpec& spec);
std::vector<ReportTable> run_experiment(const ExperimentSpec& spec, const MultiDataset& ds);

/// Mean and population standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& values);

/// DET plot with log-scaled FMR and FNMR axes.
std::string det_svg(const std::vector<std::pair<std::string, DetCurve>>& curves);

}  // namespace biotrunc::eval
