// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

// DET curve and equal error rate over dissimilarity scores.

#pragma once

#include <vector>

namespace biotrunc::eval {

/// Dissimilarity scores: a comparison is accepted when score <= threshold.
struct ScoreSet {
  std::vector<double> mated;
  std::vector<double> non_mated;
  friend bool operator==(const ScoreSet&, const ScoreSet&) = default;
};

struct DetPoint {
  double threshold = 0.0;
  double fmr = 0.0;
  double fnmr = 0.0;
};

/// Points at -inf, every distinct score in increasing order, and +inf.
/// FMR(t) = share of non-mated scores <= t; FNMR(t) = share of mated > t.
struct DetCurve {
  std::vector<DetPoint> points;
};

/// Rates are fractions in [0, 1], not percent.
struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

DetCurve det_curve(const ScoreSet& scores);

/// Where FMR == FNMR at some threshold that value is returned; otherwise both
/// rates are interpolated linearly between the two thresholds bracketing the
/// sign change of FMR - FNMR.
EerResult eer(const ScoreSet& scores);
EerResult eer(const DetCurve& curve);

}  // namespace biotrunc::eval
