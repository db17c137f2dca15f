// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include "biotrunc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "biotrunc/error.hpp"

namespace biotrunc::eval {

DetCurve det_curve(const ScoreSet& scores) {
  require(!scores.mated.empty() && !scores.non_mated.empty(), ErrorCode::kInvalidArgument,
          "DET curve needs both mated and non-mated scores");
  std::vector<double> mated = scores.mated;
  std::vector<double> non_mated = scores.non_mated;
  std::sort(mated.begin(), mated.end());
  std::sort(non_mated.begin(), non_mated.end());
  for (double s : mated) require(!std::isnan(s), ErrorCode::kInvalidArgument, "NaN score");
  for (double s : non_mated) require(!std::isnan(s), ErrorCode::kInvalidArgument, "NaN score");

  const double n_mated = static_cast<double>(mated.size());
  const double n_non = static_cast<double>(non_mated.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  DetCurve curve;
  curve.points.reserve(mated.size() + non_mated.size() + 2);
  curve.points.push_back({-kInf, 0.0, 1.0});
  std::size_t im = 0, in = 0;
  while (im < mated.size() || in < non_mated.size()) {
    double t = kInf;
    if (im < mated.size()) t = mated[im];
    if (in < non_mated.size()) t = std::min(t, non_mated[in]);
    while (im < mated.size() && mated[im] <= t) ++im;
    while (in < non_mated.size() && non_mated[in] <= t) ++in;
    curve.points.push_back({t, static_cast<double>(in) / n_non,
                            static_cast<double>(mated.size() - im) / n_mated});
  }
  curve.points.push_back({kInf, 1.0, 0.0});
  return curve;
}

EerResult eer(const DetCurve& curve) {
  const auto& pts = curve.points;
  require(pts.size() >= 2, ErrorCode::kInvalidArgument, "DET curve too short");
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double diff = pts[j].fmr - pts[j].fnmr;
    if (diff == 0.0) return {pts[j].fmr, pts[j].threshold};
    if (diff > 0.0) {
      // pts[0] has diff = -1, so j >= 1 here.
      const DetPoint& a = pts[j - 1];
      const DetPoint& b = pts[j];
      const double da = a.fmr - a.fnmr;
      const double alpha = -da / (diff - da);
      const double rate = a.fmr + alpha * (b.fmr - a.fmr);
      double threshold;
      if (std::isinf(a.threshold)) {
        threshold = b.threshold;
      } else if (std::isinf(b.threshold)) {
        threshold = a.threshold;
      } else {
        threshold = a.threshold + alpha * (b.threshold - a.threshold);
      }
      return {rate, threshold};
    }
  }
  fail(ErrorCode::kInvalidArgument, "DET curve never crosses FMR = FNMR");
}

EerResult eer(const ScoreSet& scores) { return eer(det_curve(scores)); }

}  // namespace biotrunc::eval
