// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic multi-biometric embeddings and the comparison protocol.
//
// Per modality m a fixed mixing matrix A_m (dim x latent_rank, standard
// normal entries) maps a subject's latent identity z ~ N(0, I_rank) to its
// class mean mu = normalize(A_m z). Samples are
//
//   x = normalize(mu + (sigma_m + degradation_m) * eps),  eps ~ N(0, I_dim).
//
// latent_rank = 0 draws mu isotropically in R^dim instead. A small rank makes
// identity information redundant across coordinates, as in real DNN
// embeddings, so a truncated vector keeps most of it.
//
// Streams (see rng.hpp): basis {1, m}, identity {2, s, m}, sample
// {3, s, m, j} for subject s, modality position m and sample j.

#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "biotrunc/types.hpp"

namespace biotrunc::synth {

struct ModalityNoise {
  Modality modality;
  double sigma = 0.05;
  double degradation = 0.0;
  friend bool operator==(const ModalityNoise&, const ModalityNoise&) = default;
};

struct SynthConfig {
  std::size_t subjects = 200;
  std::size_t samples_per_modality = 4;
  std::size_t dim = 512;
  std::size_t latent_rank = 6;
  std::vector<ModalityNoise> modalities;
  std::uint64_t seed = 1;
  /// Bound on |mean| for the centered-embedding invariant.
  double centered_tolerance = 0.02;

  /// 200 subjects, 4 samples per modality, 512 dimensions, face/fingerprint/iris.
  static SynthConfig desk_default();

  void validate() const;
  std::vector<Modality> modality_order() const;

  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

/// Bit-identical for identical configs, independent of `threads`.
MultiDataset generate(const SynthConfig& config, unsigned threads = 1);

struct SampleRef {
  std::size_t subject = 0;
  std::size_t tuple = 0;
  friend bool operator==(const SampleRef&, const SampleRef&) = default;
};

struct ComparisonPair {
  SampleRef probe;
  SampleRef reference;
  friend bool operator==(const ComparisonPair&, const ComparisonPair&) = default;
};

/// A tuple is the t-th template of every modality of one subject.
struct ComparisonSet {
  std::vector<ComparisonPair> mated;
  std::vector<ComparisonPair> non_mated;
  /// Set when fewer than two subjects exist, so no non-mated pair does.
  bool degenerate = false;

  std::size_t n_mated() const noexcept { return mated.size(); }
  std::size_t n_non_mated() const noexcept { return non_mated.size(); }
  std::size_t size() const noexcept { return mated.size() + non_mated.size(); }
};

/// Mated: every within-subject pair of tuples. Non-mated: every cross-subject
/// pair of first tuples. With `limit_by_scarcest` the tuple count of a subject
/// is its smallest per-modality template count; without it, unequal counts
/// are rejected.
ComparisonSet enumerate_comparisons(const MultiDataset& ds, bool limit_by_scarcest = true);

/// Number of usable tuples of one subject.
std::size_t tuple_count(const Subject& subject);

struct CalibrationOptions {
  double sigma_max = 2.0;
  int max_iterations = 40;
  /// Held-out data uses seed ^ this value.
  std::uint64_t held_out_salt = 0x5ca1ab1eULL;
};

struct ModalityCalibration {
  Modality modality;
  double sigma = 0.0;
  double eer = 0.0;
};

/// Per modality, bisects sigma in [0, sigma_max] until the full-dimension
/// real-valued single-modality EER on a held-out dataset lies in [lo, hi].
/// Throws kUnreachable, naming the achieved EER bracket, when it cannot.
std::vector<ModalityCalibration> calibrate(std::pair<double, double> target,
                                           const SynthConfig& base,
                                           const CalibrationOptions& options = {});

/// Full-dimension real-valued EER of one modality of `ds`.
double single_modality_eer(const MultiDataset& ds, const ComparisonSet& pairs, std::size_t modality);

}  // namespace biotrunc::synth
