// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

#include "biotrunc/error.hpp"
#include "biotrunc/match.hpp"
#include "biotrunc/metrics.hpp"
#include "biotrunc/reduce.hpp"
#include "biotrunc/rng.hpp"

namespace biotrunc {
namespace {

using eval::ScoreSet;

FeatureVector random_vector(rng::Engine& e, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng::standard_normal(e);
  return FeatureVector(std::move(v));
}

BinaryVector bits_of(std::uint32_t word, std::size_t d) {
  std::vector<std::uint8_t> b(d);
  for (std::size_t i = 0; i < d; ++i) b[i] = (word >> i) & 1u;
  return BinaryVector(std::move(b));
}

TEST(Sed, SmallCases) {
  EXPECT_EQ(match::sed(FeatureVector({1, 0}), FeatureVector({0, 1})), 2.0);
  EXPECT_EQ(match::sed(QuantizedVector({3, 0}, 4), QuantizedVector({0, 2}, 4)), 13u);
  EXPECT_EQ(match::hamming(BinaryVector({0, 1, 1}), BinaryVector({1, 1, 0})), 2u);
  EXPECT_THROW(match::sed(FeatureVector({1}), FeatureVector({1, 2})), Error);
  EXPECT_THROW(match::sed(Payload(FeatureVector({1})), Payload(BinaryVector({1}))), Error);
  EXPECT_THROW(match::sed(QuantizedVector({1}, 4), QuantizedVector({1}, 8)), Error);
}

TEST(Sed, MatchesDoubleLoopOracle) {
  rng::Engine e = rng::stream(21, {});
  for (int trial = 0; trial < 100; ++trial) {
    const FeatureVector a = random_vector(e, 512), b = random_vector(e, 512);
    long double oracle = 0;
    for (std::size_t i = 0; i < 512; ++i) {
      const long double d = static_cast<long double>(a[i]) - b[i];
      oracle += d * d;
    }
    const double got = match::sed(a, b);
    EXPECT_NEAR(got, static_cast<double>(oracle), 1e-9);
    EXPECT_EQ(got, match::sed(b, a));
    EXPECT_EQ(match::sed(a, a), 0.0);
  }
}

TEST(Sed, PayloadScoreKinds) {
  EXPECT_EQ(match::sed(Payload(BinaryVector({1, 0})), Payload(BinaryVector({0, 0}))).kind, match::ScoreKind::kHamming);
  EXPECT_EQ(match::sed(Payload(QuantizedVector({1}, 4)), Payload(QuantizedVector({3}, 4))).value, 4.0);
  EXPECT_EQ(match::sed(Payload(FeatureVector({1})), Payload(FeatureVector({3}))).kind, match::ScoreKind::kFloatSed);
}

TEST(Hamming, EqualsSedExhaustively) {
  for (std::size_t d = 1; d <= 8; ++d) {
    for (std::uint32_t x = 0; x < (1u << d); ++x) {
      for (std::uint32_t y = 0; y < (1u << d); ++y) {
        const BinaryVector a = bits_of(x, d), b = bits_of(y, d);
        ASSERT_EQ(match::hamming(a, b), match::sed(a, b));
        ASSERT_EQ(match::hamming(a, b), static_cast<std::uint64_t>(std::popcount(x ^ y)));
      }
    }
  }
  // d = 16: every vector against 64 sampled partners.
  rng::Engine e = rng::stream(22, {});
  for (std::uint32_t x = 0; x < (1u << 16); ++x) {
    for (int s = 0; s < 64; ++s) {
      const std::uint32_t y = static_cast<std::uint32_t>(e() & 0xffff);
      const BinaryVector a = bits_of(x, 16), b = bits_of(y, 16);
      ASSERT_EQ(match::hamming(a, b), match::sed(a, b));
    }
  }
}

TEST(Fusion, SumRuleEqualsConcatSed) {
  rng::Engine e = rng::stream(23, {});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<QuantizedVector> a, b;
    std::vector<match::Score> parts;
    for (int m = 0; m < 3; ++m) {
      const std::size_t d = 1 + e() % 100;
      std::vector<std::uint32_t> x(d), y(d);
      for (std::size_t i = 0; i < d; ++i) {
        x[i] = static_cast<std::uint32_t>(e() % 16);
        y[i] = static_cast<std::uint32_t>(e() % 16);
      }
      a.emplace_back(x, 16);
      b.emplace_back(y, 16);
      parts.push_back(match::sed(Payload(a.back()), Payload(b.back())));
    }
    EXPECT_EQ(match::score_fusion_sum(parts).value, static_cast<double>(match::sed(concat(a), concat(b))));
  }
  const std::vector<match::Score> s = {{2, match::ScoreKind::kIntSed}, {3, match::ScoreKind::kIntSed}, {5, match::ScoreKind::kIntSed}};
  EXPECT_EQ(match::score_fusion_sum(s).value, 10.0);
  EXPECT_EQ(match::score_fusion_sum(std::span(s).first(1)), s[0]);
  EXPECT_THROW(match::score_fusion_sum({}), Error);
  const std::vector<match::Score> mixed = {{2, match::ScoreKind::kIntSed}, {3, match::ScoreKind::kHamming}};
  EXPECT_THROW(match::score_fusion_sum(mixed), Error);
}

TEST(Decide, BoundaryAccepts) {
  EXPECT_EQ(match::decide({0, match::ScoreKind::kIntSed}, 1), match::Decision::kAccept);
  EXPECT_EQ(match::decide({2, match::ScoreKind::kIntSed}, 1), match::Decision::kReject);
  EXPECT_EQ(match::decide({1, match::ScoreKind::kIntSed}, 1), match::Decision::kAccept);
}

// Independent oracle: rates recomputed by counting at every candidate
// threshold, then the first sign change of FMR - FNMR interpolated.
double oracle_eer(const ScoreSet& s) {
  std::vector<double> t = {-std::numeric_limits<double>::infinity()};
  t.insert(t.end(), s.mated.begin(), s.mated.end());
  t.insert(t.end(), s.non_mated.begin(), s.non_mated.end());
  std::sort(t.begin() + 1, t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  t.push_back(std::numeric_limits<double>::infinity());
  double prev_fmr = 0, prev_fnmr = 1;
  for (double th : t) {
    double fm = 0, fnm = 0;
    for (double x : s.non_mated) fm += x <= th;
    for (double x : s.mated) fnm += x > th;
    fm /= static_cast<double>(s.non_mated.size());
    fnm /= static_cast<double>(s.mated.size());
    if (fm == fnm) return fm;
    if (fm > fnm) {
      const double w = (prev_fnmr - prev_fmr) / ((prev_fnmr - prev_fmr) + (fm - fnm));
      return prev_fmr + w * (fm - prev_fmr);
    }
    prev_fmr = fm;
    prev_fnmr = fnm;
  }
  return -1;
}

TEST(Eer, WorkedExamples) {
  const auto worked = eval::eer(ScoreSet{{1, 2, 3, 4}, {3, 4, 5, 6}});
  EXPECT_DOUBLE_EQ(worked.eer, 0.25);
  EXPECT_EQ(worked.threshold, 3.0);
  EXPECT_EQ(eval::eer(ScoreSet{{1, 2}, {3, 4}}).eer, 0.0);
  EXPECT_EQ(eval::eer(ScoreSet{{1, 2, 3}, {1, 2, 3}}).eer, 0.5);
  EXPECT_THROW(eval::eer(ScoreSet{{}, {1}}), Error);
  EXPECT_THROW(eval::det_curve(ScoreSet{{1}, {}}), Error);
}

TEST(Eer, MatchesThresholdScanOracle) {
  rng::Engine e = rng::stream(24, {});
  for (int trial = 0; trial < 500; ++trial) {
    ScoreSet s;
    const std::size_t nm = 1 + e() % 16, nn = 1 + e() % 16;
    const std::uint64_t spread = 2 + e() % 20;
    for (std::size_t i = 0; i < nm; ++i) s.mated.push_back(static_cast<double>(e() % spread));
    for (std::size_t i = 0; i < nn; ++i) s.non_mated.push_back(static_cast<double>(e() % spread + e() % 4));
    const auto got = eval::eer(s);
    ASSERT_NEAR(got.eer, oracle_eer(s), 1e-9);
    ASSERT_GE(got.eer, 0.0);
    ASSERT_LE(got.eer, 1.0);
  }
}

TEST(Det, MonotoneWithSentinels) {
  rng::Engine e = rng::stream(25, {});
  for (int trial = 0; trial < 50; ++trial) {
    ScoreSet s;
    for (int i = 0; i < 40; ++i) s.mated.push_back(rng::standard_normal(e));
    for (int i = 0; i < 60; ++i) s.non_mated.push_back(rng::standard_normal(e) + 1.0);
    const auto curve = eval::det_curve(s);
    ASSERT_EQ(curve.points.front().fmr, 0.0);
    ASSERT_EQ(curve.points.front().fnmr, 1.0);
    ASSERT_EQ(curve.points.back().fmr, 1.0);
    ASSERT_EQ(curve.points.back().fnmr, 0.0);
    EXPECT_EQ(curve.points.size(), 102u);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      ASSERT_LT(curve.points[i - 1].threshold, curve.points[i].threshold);
      ASSERT_LE(curve.points[i - 1].fmr, curve.points[i].fmr);
      ASSERT_GE(curve.points[i - 1].fnmr, curve.points[i].fnmr);
    }
  }
  const auto separated = eval::det_curve(ScoreSet{{1, 2}, {3, 4}});
  EXPECT_TRUE(std::any_of(separated.points.begin(), separated.points.end(),
                          [](const eval::DetPoint& p) { return p.fmr == 0 && p.fnmr == 0; }));
}

}  // namespace
}  // namespace biotrunc
