// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>

#include "biotrunc/error.hpp"
#include "biotrunc/eval.hpp"
#include "biotrunc/match.hpp"
#include "biotrunc/parallel.hpp"

namespace biotrunc::eval {

namespace {

using reduce::ReductionPlan;
using synth::ComparisonSet;

std::string quantization_name(const reduce::Quantization& q) {
  const std::string d = ReductionPlan{q, {}, {}}.describe();
  return d.substr(0, d.find('|'));
}

// Flat cache of comparison templates for every usable (subject, tuple).
class PayloadCache {
 public:
  template <typename Fn>
  PayloadCache(const MultiDataset& ds, unsigned threads, Fn&& make) {
    const auto& subjects = ds.subjects();
    offsets_.resize(subjects.size() + 1, 0);
    for (std::size_t s = 0; s < subjects.size(); ++s) offsets_[s + 1] = offsets_[s] + synth::tuple_count(subjects[s]);
    payloads_.resize(offsets_.back());
    parallel_for(subjects.size(), threads, [&](std::size_t s) {
      for (std::size_t t = 0; t < offsets_[s + 1] - offsets_[s]; ++t) payloads_[offsets_[s] + t] = make(s, t);
    });
  }

  std::size_t index(const synth::SampleRef& r) const {
    require(r.subject + 1 < offsets_.size() && r.tuple < offsets_[r.subject + 1] - offsets_[r.subject],
            ErrorCode::kInvalidArgument, "comparison pair references a missing sample");
    return offsets_[r.subject] + r.tuple;
  }
  const Payload& at(const synth::SampleRef& r) const { return payloads_[index(r)]; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Payload> payloads_;
};

// Concatenated selection over the full per-part templates, or nullopt when
// some step is not a selection.
std::optional<std::vector<std::size_t>> recipe_selection(const MultiDataset& ds, const Recipe& recipe) {
  std::vector<std::size_t> sel;
  std::size_t offset = 0;
  for (const auto& part : recipe.parts) {
    const std::size_t dim = ds.dim(part.modality);
    part.plan.validate_for(dim);
    const auto s = reduce::selection_of(part.plan.truncation, dim);
    if (!s) return std::nullopt;
    for (std::size_t i : *s) sel.push_back(offset + i);
    offset += dim;
  }
  const auto post = reduce::selection_of(recipe.post, sel.size());
  if (!post) return std::nullopt;
  std::vector<std::size_t> out;
  out.reserve(post->size());
  for (std::size_t j : *post) out.push_back(sel[j]);
  return out;
}

bool is_identity(const std::vector<std::size_t>& sel, std::size_t dim) {
  if (sel.size() != dim) return false;
  for (std::size_t i = 0; i < dim; ++i) {
    if (sel[i] != i) return false;
  }
  return true;
}

void check_pairs(const ComparisonSet& pairs) {
  require(pairs.size() > 0, ErrorCode::kInvalidArgument, "empty comparison set");
}

ScoreSet plaintext_scores(const MultiDataset& ds, const Recipe& recipe, const ComparisonSet& pairs,
                          const ScoringOptions& options) {
  const PayloadCache cache(ds, options.threads,
                           [&](std::size_t s, std::size_t t) { return comparison_payload(ds, recipe, s, t); });
  ScoreSet out;
  out.mated.resize(pairs.mated.size());
  out.non_mated.resize(pairs.non_mated.size());
  auto score = [&](const synth::ComparisonPair& p) { return match::sed(cache.at(p.probe), cache.at(p.reference)).value; };
  parallel_for(pairs.size(), options.threads, [&](std::size_t i) {
    if (i < pairs.mated.size()) {
      out.mated[i] = score(pairs.mated[i]);
    } else {
      out.non_mated[i - pairs.mated.size()] = score(pairs.non_mated[i - pairs.mated.size()]);
    }
  });
  return out;
}

ScoreSet encrypted_scores(const MultiDataset& ds, const Recipe& recipe, const ComparisonSet& pairs,
                          const ScoringOptions& options) {
  for (const auto& part : recipe.parts) {
    require(part.plan.integer_output(), ErrorCode::kKindMismatch,
            "encrypted backend needs a quantized or binary plan; " + part.modality.name() + " stays real-valued");
  }
  std::unique_ptr<he::KeyPair> owned;
  const he::KeyPair* key = options.key;
  if (key == nullptr) {
    owned = std::make_unique<he::KeyPair>(he::keygen(options.key_bits, options.key_seed));
    key = owned.get();
  }

  // Enroll full quantized templates and compare on a selection when the
  // recipe is a pure selection; otherwise enroll the reduced template.
  const auto selection = recipe_selection(ds, recipe);
  auto full_payload = [&](std::size_t s, std::size_t t) {
    std::vector<Payload> parts;
    for (const auto& part : recipe.parts) {
      const Template& tmpl = ds.subjects()[s].samples[ds.modality_index(part.modality)][t];
      parts.push_back(reduce::quantize_payload(tmpl.payload, part.plan.quantization));
    }
    return concat(std::span<const Payload>(parts));
  };
  const PayloadCache cache(ds, options.threads, [&](std::size_t s, std::size_t t) {
    return selection ? full_payload(s, t) : comparison_payload(ds, recipe, s, t);
  });

  std::map<std::size_t, std::size_t> enrolled_slot;
  std::vector<synth::SampleRef> references;
  auto note = [&](const synth::ComparisonPair& p) {
    if (enrolled_slot.emplace(cache.index(p.reference), references.size()).second) references.push_back(p.reference);
  };
  for (const auto& p : pairs.mated) note(p);
  for (const auto& p : pairs.non_mated) note(p);

  bool use_selection = false;
  std::vector<std::size_t> sel;
  if (selection) {
    const std::size_t full_dim = dim_of(cache.at(references.front()));
    use_selection = !is_identity(*selection, full_dim);
    sel = *selection;
  }
  const he::NonceSource base =
      options.deterministic ? he::NonceSource::deterministic(options.nonce_seed) : he::NonceSource::system();
  std::vector<he::EncryptedTemplate> gallery(references.size());
  parallel_for(references.size(), options.threads, [&](std::size_t r) {
    he::NonceSource local = base.fork(r);
    gallery[r] = he::enroll_encrypted(key->pub, cache.at(references[r]), local, use_selection);
  });

  ScoreSet out;
  out.mated.resize(pairs.mated.size());
  out.non_mated.resize(pairs.non_mated.size());
  auto score = [&](const synth::ComparisonPair& p) {
    const auto& enc = gallery[enrolled_slot.at(cache.index(p.reference))];
    const he::Ciphertext c =
        use_selection ? he::encrypted_sed(key->pub, cache.at(p.probe), enc, std::span<const std::size_t>(sel))
                      : he::encrypted_sed(key->pub, cache.at(p.probe), enc);
    return static_cast<double>(he::decrypt_sed(*key, c));
  };
  parallel_for(pairs.size(), options.threads, [&](std::size_t i) {
    if (i < pairs.mated.size()) {
      out.mated[i] = score(pairs.mated[i]);
    } else {
      out.non_mated[i - pairs.mated.size()] = score(pairs.non_mated[i - pairs.mated.size()]);
    }
  });
  return out;
}

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::kEncrypted ? "encrypted" : "plaintext"; }

Backend parse_backend(std::string_view name) {
  if (name == "plaintext") return Backend::kPlaintext;
  if (name == "encrypted") return Backend::kEncrypted;
  fail(ErrorCode::kInvalidArgument, "unknown backend '" + std::string(name) + "' (plaintext, encrypted)");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kFraction:
      return "fraction";
    case Method::kInterleave:
      return "interleave";
    case Method::kSum:
      return "sum";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "fraction" || name == "fractions") return Method::kFraction;
  if (name == "interleave" || name == "interleaving") return Method::kInterleave;
  if (name == "sum") return Method::kSum;
  fail(ErrorCode::kInvalidArgument, "unknown truncation method '" + std::string(name) + "' (fraction, interleave, sum)");
}

std::string PlanFamily::name() const { return std::string(to_string(method)) + "/" + quantization_name(quantization); }

Recipe Recipe::from_plan(const ReductionPlan& plan, const MultiDataset& ds, std::optional<Modality> single) {
  plan.validate();
  Recipe r;
  ReductionPlan part_plan = plan;
  part_plan.fusion = reduce::NoFusion{};
  if (const auto* c = std::get_if<reduce::ConcatFusion>(&plan.fusion)) {
    for (const auto& m : c->order) {
      ds.modality_index(m);
      r.parts.push_back({m, part_plan});
    }
  } else {
    const Modality m = single.value_or(ds.modalities().front());
    ds.modality_index(m);
    r.parts.push_back({m, part_plan});
  }
  return r;
}

std::string Recipe::describe() const {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " + ";
    out += parts[i].modality.name() + ":" + parts[i].plan.describe();
  }
  if (!std::holds_alternative<reduce::NoTruncation>(post)) {
    out += " then " + ReductionPlan{reduce::NoQuantization{}, post, {}}.describe();
  }
  return out;
}

Payload comparison_payload(const MultiDataset& ds, const Recipe& recipe, std::size_t subject, std::size_t tuple) {
  require(!recipe.parts.empty(), ErrorCode::kInvalidArgument, "recipe without parts");
  std::vector<Payload> parts;
  parts.reserve(recipe.parts.size());
  for (const auto& part : recipe.parts) {
    const Template& t = ds.subjects()[subject].samples[ds.modality_index(part.modality)][tuple];
    parts.push_back(reduce::apply_plan(t, part.plan).payload);
  }
  Payload fused = parts.size() == 1 ? std::move(parts.front()) : concat(std::span<const Payload>(parts));
  return reduce::truncate(fused, recipe.post);
}

ScoreSet collect_scores(const MultiDataset& ds, const Recipe& recipe, const ComparisonSet& pairs,
                        const ScoringOptions& options) {
  check_pairs(pairs);
  if (options.backend == Backend::kEncrypted) return encrypted_scores(ds, recipe, pairs, options);
  return plaintext_scores(ds, recipe, pairs, options);
}

ScoreSet collect_scores(const MultiDataset& ds, const ReductionPlan& plan, const ComparisonSet& pairs,
                        const ScoringOptions& options) {
  return collect_scores(ds, Recipe::from_plan(plan, ds), pairs, options);
}

// ---------------------------------------------------------------------------

std::pair<double, double> mean_std(const std::vector<double>& values) {
  require(!values.empty(), ErrorCode::kInvalidArgument, "mean of an empty list");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

bool ReportTable::has_std() const {
  for (const auto& row : rows) {
    for (const auto& c : row.cells) {
      if (c.has_std()) return true;
    }
  }
  return false;
}

void ExperimentSpec::validate() const {
  data.validate();
  require(!families.empty(), ErrorCode::kInvalidArgument, "experiment needs at least one plan family");
  require(!grid.empty(), ErrorCode::kInvalidArgument, "experiment needs a dimension grid");
  for (std::size_t d : grid) require(d >= 1, ErrorCode::kInvalidArgument, "grid dimensions must be positive");
  for (const auto& f : families) ReductionPlan{f.quantization, {}, {}}.validate();
}

namespace {

reduce::Truncation truncation_for(Method method, std::size_t k, std::size_t i) {
  switch (method) {
    case Method::kFraction:
      return reduce::FractionTruncation{k, i};
    case Method::kInterleave:
      return reduce::InterleaveTruncation{k, false};
    case Method::kSum:
      return reduce::SumTruncation{k};
  }
  return reduce::NoTruncation{};
}

std::size_t factor_for(std::size_t full, std::size_t d) {
  require(d <= full && full % d == 0, ErrorCode::kInvalidArgument,
          "grid dimension " + std::to_string(d) + " does not divide " + std::to_string(full));
  return full / d;
}

// Runs behind one cell: every fraction index for fractions, one otherwise.
std::vector<Recipe> cell_recipes(const MultiDataset& ds, const PlanFamily& family, std::optional<Modality> single,
                                 std::size_t d, bool total_dim) {
  const std::vector<Modality> mods = single ? std::vector<Modality>{*single} : ds.modalities();
  std::vector<Recipe> out;
  if (!single && total_dim) {
    std::size_t total = 0;
    for (const auto& m : mods) total += ds.dim(m);
    const std::size_t k = factor_for(total, d);
    const std::size_t runs = family.method == Method::kFraction ? k : 1;
    for (std::size_t i = 1; i <= runs; ++i) {
      Recipe r;
      for (const auto& m : mods) r.parts.push_back({m, ReductionPlan{family.quantization, {}, {}}});
      r.post = truncation_for(family.method, k, i);
      out.push_back(std::move(r));
    }
    return out;
  }
  const std::size_t k = factor_for(ds.dim(mods.front()), d);
  for (const auto& m : mods) {
    require(ds.dim(m) == ds.dim(mods.front()), ErrorCode::kInvalidArgument,
            "per-modality grid needs equal modality dimensions");
  }
  const std::size_t runs = family.method == Method::kFraction ? k : 1;
  for (std::size_t i = 1; i <= runs; ++i) {
    Recipe r;
    for (const auto& m : mods) {
      r.parts.push_back({m, ReductionPlan{family.quantization, truncation_for(family.method, k, i), {}}});
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<ReportTable> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  return run_experiment(spec, synth::generate(spec.data, spec.scoring.threads));
}

std::vector<ReportTable> run_experiment(const ExperimentSpec& spec, const MultiDataset& ds) {
  spec.validate();
  const ComparisonSet pairs = synth::enumerate_comparisons(ds);
  std::vector<std::optional<Modality>> columns;
  std::vector<ReportTable> tables;
  if (ds.modalities().size() > 1) columns.emplace_back(std::nullopt);
  for (const auto& m : ds.modalities()) columns.emplace_back(m);

  for (const auto& family : spec.families) {
    ReportTable table;
    table.title = family.name() + (spec.total_dim ? " total-dim" : "");
    for (const auto& c : columns) table.columns.push_back(c ? c->name() : "all");
    for (std::size_t d : spec.grid) {
      try {
        ReportRow row;
        row.dim = d;
        for (const auto& c : columns) {
          std::vector<double> eers;
          for (const Recipe& r : cell_recipes(ds, family, c, d, spec.total_dim)) {
            eers.push_back(eer(collect_scores(ds, r, pairs, spec.scoring)).eer);
          }
          const auto [mean, sd] = mean_std(eers);
          row.cells.push_back({mean, sd, eers.size()});
        }
        table.rows.push_back(std::move(row));
      } catch (const Error& e) {
        table.partial = true;
        table.error = "dim " + std::to_string(d) + ": " + e.what();
        tables.push_back(std::move(table));
        return tables;
      }
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

}  // namespace biotrunc::eval
