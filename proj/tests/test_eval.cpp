// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>

#include "biotrunc/error.hpp"
#include "biotrunc/eval.hpp"
#include "biotrunc/match.hpp"

namespace biotrunc::eval {
namespace {

using reduce::BinaryQuantization;
using reduce::LevelQuantization;
using reduce::ReductionPlan;

synth::SynthConfig tiny(std::uint64_t seed = 1) {
  synth::SynthConfig c = synth::SynthConfig::desk_default();
  c.subjects = 8;
  c.samples_per_modality = 2;
  c.dim = 32;
  c.seed = seed;
  return c;
}

const he::KeyPair& test_key() {
  static const he::KeyPair key = he::keygen(512, 77);
  return key;
}

ScoringOptions encrypted() {
  ScoringOptions o;
  o.backend = Backend::kEncrypted;
  o.key = &test_key();
  return o;
}

TEST(Names, ParseAndPrint) {
  EXPECT_EQ(parse_backend("encrypted"), Backend::kEncrypted);
  EXPECT_EQ(to_string(Backend::kPlaintext), "plaintext");
  EXPECT_THROW(parse_backend("gpu"), Error);
  EXPECT_EQ(parse_method("fractions"), Method::kFraction);
  EXPECT_EQ(parse_method("interleave"), Method::kInterleave);
  EXPECT_THROW(parse_method("pca"), Error);
  EXPECT_EQ((PlanFamily{BinaryQuantization{0.0}, Method::kFraction}.name()), "fraction/binary(0)");
}

TEST(Scores, BackendsAgreeExactly) {
  const MultiDataset ds = synth::generate(tiny());
  const auto pairs = synth::enumerate_comparisons(ds);
  const std::vector<ReductionPlan> plans = {
      {BinaryQuantization{0.0}, {}, {}},
      {BinaryQuantization{0.0}, reduce::FractionTruncation{4, 3}, {}},
      {LevelQuantization{16, {}, reduce::Rounding::kFloor}, reduce::InterleaveTruncation{2, false}, {}},
      {LevelQuantization{4, {}, reduce::Rounding::kFloor}, reduce::SumTruncation{2}, {}},
      {BinaryQuantization{0.0}, reduce::FractionTruncation{2, 2}, reduce::ConcatFusion{}},
  };
  for (const auto& plan : plans) {
    const ScoreSet plain = collect_scores(ds, plan, pairs);
    const ScoreSet enc = collect_scores(ds, plan, pairs, encrypted());
    EXPECT_EQ(plain, enc) << plan.describe();
    EXPECT_EQ(plain.mated.size(), pairs.n_mated());
  }
}

TEST(Scores, PostTruncatedRecipeAgrees) {
  const MultiDataset ds = synth::generate(tiny(2));
  const auto pairs = synth::enumerate_comparisons(ds);
  Recipe r;
  const auto split = reduce::split_total(32, 3);
  for (std::size_t m = 0; m < 3; ++m) {
    r.parts.push_back({ds.modalities()[m], {LevelQuantization{16, {}, reduce::Rounding::kFloor}, reduce::HeadTruncation{split[m]}, {}}});
  }
  EXPECT_EQ(comparison_payload(ds, r, 0, 0).index(), 1u);
  EXPECT_EQ(dim_of(comparison_payload(ds, r, 0, 0)), 32u);
  EXPECT_EQ(collect_scores(ds, r, pairs), collect_scores(ds, r, pairs, encrypted()));
  r.post = reduce::InterleaveTruncation{2, false};
  EXPECT_EQ(dim_of(comparison_payload(ds, r, 1, 1)), 16u);
  EXPECT_EQ(collect_scores(ds, r, pairs), collect_scores(ds, r, pairs, encrypted()));
}

TEST(Scores, FusedScoresAreSumsOfModalityScores) {
  const MultiDataset ds = synth::generate(tiny(3));
  const auto pairs = synth::enumerate_comparisons(ds);
  const ReductionPlan fused{LevelQuantization{256, {}, reduce::Rounding::kFloor}, {}, reduce::ConcatFusion{}};
  const ScoreSet all = collect_scores(ds, fused, pairs);
  std::vector<ScoreSet> single;
  for (const auto& m : ds.modalities()) {
    single.push_back(collect_scores(ds, Recipe::from_plan({fused.quantization, {}, {}}, ds, m), pairs));
  }
  for (std::size_t i = 0; i < all.mated.size(); ++i) {
    EXPECT_EQ(all.mated[i], single[0].mated[i] + single[1].mated[i] + single[2].mated[i]);
  }
}

TEST(Scores, Rejections) {
  const MultiDataset ds = synth::generate(tiny());
  const auto pairs = synth::enumerate_comparisons(ds);
  try {
    collect_scores(ds, ReductionPlan{}, pairs, encrypted());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kKindMismatch);
  }
  EXPECT_THROW(collect_scores(ds, ReductionPlan{}, synth::ComparisonSet{}), Error);
  EXPECT_THROW(collect_scores(ds, ReductionPlan{{}, reduce::FractionTruncation{3, 1}, {}}, pairs), Error);
}

TEST(Scores, ZeroNoiseMatedScoresVanish) {
  synth::SynthConfig c = tiny();
  for (auto& m : c.modalities) m.sigma = m.degradation = 0.0;
  const MultiDataset ds = synth::generate(c);
  const ScoreSet s = collect_scores(ds, ReductionPlan{}, synth::enumerate_comparisons(ds));
  EXPECT_TRUE(std::all_of(s.mated.begin(), s.mated.end(), [](double x) { return x == 0.0; }));
}

TEST(Stats, PopulationMeanStd) {
  const auto [m, s] = mean_std({1.0, 3.0});
  EXPECT_EQ(m, 2.0);
  EXPECT_EQ(s, 1.0);
  EXPECT_EQ(mean_std({5.0}).second, 0.0);
  EXPECT_THROW(mean_std({}), Error);
}

ExperimentSpec small_spec(Method method) {
  ExperimentSpec spec;
  spec.data = tiny();
  spec.data.subjects = 20;
  spec.data.dim = 64;
  spec.grid = {16, 32, 64};
  spec.families = {{BinaryQuantization{0.0}, method}};
  return spec;
}

TEST(Experiment, FractionTableShape) {
  const auto tables = run_experiment(small_spec(Method::kFraction));
  ASSERT_EQ(tables.size(), 1u);
  const ReportTable& t = tables[0];
  EXPECT_EQ(t.title, "fraction/binary(0)");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"all", "face", "fingerprint", "iris"}));
  EXPECT_FALSE(t.partial);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0].dim, 16u);
  EXPECT_EQ(t.rows[0].cells[1].runs, 4u);
  EXPECT_EQ(t.rows[1].cells[0].runs, 2u);
  EXPECT_EQ(t.rows[2].cells[3].runs, 1u);
  EXPECT_FALSE(t.rows[2].cells[3].has_std());
  EXPECT_TRUE(t.has_std());
  for (const auto& row : t.rows) {
    for (const auto& c : row.cells) {
      EXPECT_GE(c.mean, 0.0);
      EXPECT_LE(c.mean, 1.0);
    }
  }
}

TEST(Experiment, CellEqualsManualRuns) {
  const ExperimentSpec spec = small_spec(Method::kFraction);
  const MultiDataset ds = synth::generate(spec.data);
  const auto pairs = synth::enumerate_comparisons(ds);
  const auto t = run_experiment(spec, ds)[0];
  std::vector<double> eers;
  for (std::size_t i = 1; i <= 2; ++i) {
    const ReductionPlan p{BinaryQuantization{0.0}, reduce::FractionTruncation{2, i}, {}};
    eers.push_back(eer(collect_scores(ds, Recipe::from_plan(p, ds, Modality::iris()), pairs)).eer);
  }
  EXPECT_EQ(t.rows[1].cells[3].mean, mean_std(eers).first);
  EXPECT_EQ(t.rows[1].cells[3].std, mean_std(eers).second);
}

TEST(Experiment, InterleaveAndSumHaveNoStd) {
  for (Method m : {Method::kInterleave, Method::kSum}) {
    const auto t = run_experiment(small_spec(m))[0];
    EXPECT_FALSE(t.has_std());
    for (const auto& row : t.rows) EXPECT_EQ(row.cells[0].runs, 1u);
  }
}

TEST(Experiment, TotalDimensionReading) {
  ExperimentSpec spec = small_spec(Method::kFraction);
  spec.total_dim = true;
  spec.grid = {64};
  const auto t = run_experiment(spec)[0];
  EXPECT_EQ(t.title, "fraction/binary(0) total-dim");
  EXPECT_EQ(t.rows[0].cells[0].runs, 3u);
  EXPECT_EQ(t.rows[0].cells[1].runs, 1u);
}

TEST(Experiment, BadGridIsFlaggedPartial) {
  ExperimentSpec spec = small_spec(Method::kFraction);
  spec.grid = {16, 48, 64};
  const auto t = run_experiment(spec)[0];
  EXPECT_TRUE(t.partial);
  EXPECT_EQ(t.rows.size(), 1u);
  EXPECT_NE(t.error.find("48"), std::string::npos);
  spec.families.clear();
  EXPECT_THROW(spec.validate(), Error);
}

TEST(Experiment, EncryptedBackendReproducesTable) {
  ExperimentSpec spec = small_spec(Method::kFraction);
  spec.data.subjects = 8;
  spec.grid = {32, 64};
  const auto plain = run_experiment(spec)[0];
  spec.scoring = encrypted();
  const auto enc = run_experiment(spec)[0];
  ASSERT_EQ(plain.rows.size(), enc.rows.size());
  for (std::size_t r = 0; r < plain.rows.size(); ++r) {
    for (std::size_t c = 0; c < plain.columns.size(); ++c) {
      EXPECT_EQ(plain.rows[r].cells[c].mean, enc.rows[r].cells[c].mean);
    }
  }
}

TEST(DetPlot, SvgWithLegend) {
  const auto curve = det_curve(ScoreSet{{1, 2, 3, 4}, {3, 4, 5, 6}});
  const std::string svg = det_svg({{"face & iris", curve}, {"fused", curve}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("face &amp; iris"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

}  // namespace
}  // namespace biotrunc::eval
