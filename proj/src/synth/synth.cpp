// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include "biotrunc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "biotrunc/error.hpp"
#include "biotrunc/match.hpp"
#include "biotrunc/metrics.hpp"
#include "biotrunc/parallel.hpp"
#include "biotrunc/rng.hpp"

namespace biotrunc::synth {

namespace {

constexpr std::uint64_t kBasisTag = 1;
constexpr std::uint64_t kIdentityTag = 2;
constexpr std::uint64_t kSampleTag = 3;

std::string subject_id(std::size_t s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "S%05zu", s);
  return buf;
}

std::vector<double> normals(rng::Engine& engine, std::size_t n) {
  std::vector<double> out(n);
  for (double& x : out) x = rng::standard_normal(engine);
  return out;
}

}  // namespace

SynthConfig SynthConfig::desk_default() {
  SynthConfig c;
  c.modalities = {
      {Modality::face(), 0.045, 0.005},
      {Modality::fingerprint(), 0.05, 0.0},
      {Modality::iris(), 0.05, 0.0},
  };
  return c;
}

void SynthConfig::validate() const {
  require(subjects >= 2, ErrorCode::kInvalidArgument, "synthetic dataset needs at least 2 subjects");
  require(samples_per_modality >= 2, ErrorCode::kInvalidArgument,
          "synthetic dataset needs at least 2 samples per modality");
  require(dim >= 1, ErrorCode::kInvalidArgument, "embedding dimension must be positive");
  require(latent_rank <= dim, ErrorCode::kInvalidArgument, "latent rank exceeds the dimension");
  require(!modalities.empty(), ErrorCode::kInvalidArgument, "synthetic dataset needs a modality");
  for (std::size_t a = 0; a < modalities.size(); ++a) {
    const auto& m = modalities[a];
    require(std::isfinite(m.sigma) && m.sigma >= 0.0, ErrorCode::kInvalidArgument,
            "sigma of " + m.modality.name() + " must be finite and >= 0");
    require(std::isfinite(m.degradation) && m.degradation >= 0.0, ErrorCode::kInvalidArgument,
            "degradation of " + m.modality.name() + " must be finite and >= 0");
    for (std::size_t b = a + 1; b < modalities.size(); ++b) {
      require(!(m.modality == modalities[b].modality), ErrorCode::kInvalidArgument,
              "modality " + m.modality.name() + " listed twice");
    }
  }
  require(centered_tolerance > 0.0, ErrorCode::kInvalidArgument, "centered tolerance must be positive");
}

std::vector<Modality> SynthConfig::modality_order() const {
  std::vector<Modality> out;
  for (const auto& m : modalities) out.push_back(m.modality);
  return out;
}

MultiDataset generate(const SynthConfig& config, unsigned threads) {
  config.validate();
  const std::size_t dim = config.dim;
  const std::size_t rank = config.latent_rank;
  const std::size_t n_mod = config.modalities.size();

  // Row-major dim x rank mixing matrices.
  std::vector<std::vector<double>> basis(n_mod);
  if (rank > 0) {
    for (std::size_t m = 0; m < n_mod; ++m) {
      auto engine = rng::stream(config.seed, {kBasisTag, m});
      basis[m] = normals(engine, dim * rank);
    }
  }

  std::vector<Subject> subjects(config.subjects);
  parallel_for(config.subjects, threads, [&](std::size_t s) {
    Subject& subject = subjects[s];
    subject.id = subject_id(s);
    subject.samples.resize(n_mod);
    for (std::size_t m = 0; m < n_mod; ++m) {
      const ModalityNoise& noise = config.modalities[m];
      auto id_engine = rng::stream(config.seed, {kIdentityTag, s, m});
      std::vector<double> mean;
      if (rank == 0) {
        mean = normals(id_engine, dim);
      } else {
        const std::vector<double> z = normals(id_engine, rank);
        mean.assign(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
          double acc = 0.0;
          for (std::size_t r = 0; r < rank; ++r) acc += basis[m][i * rank + r] * z[r];
          mean[i] = acc;
        }
      }
      const FeatureVector mu = l2_normalize(FeatureVector(std::move(mean)));
      const double scale = noise.sigma + noise.degradation;

      auto& out = subject.samples[m];
      out.reserve(config.samples_per_modality);
      for (std::size_t j = 0; j < config.samples_per_modality; ++j) {
        auto engine = rng::stream(config.seed, {kSampleTag, s, m, j});
        std::vector<double> x(mu.elements().begin(), mu.elements().end());
        if (scale > 0.0) {
          for (double& v : x) v += scale * rng::standard_normal(engine);
        }
        Template t;
        t.payload = l2_normalize(FeatureVector(std::move(x)));
        t.subject_id = subject.id;
        t.sample_index = static_cast<std::uint32_t>(j);
        t.modality = noise.modality;
        out.push_back(std::move(t));
      }
    }
  });
  return MultiDataset(config.modality_order(), std::move(subjects));
}

std::size_t tuple_count(const Subject& subject) {
  std::size_t n = subject.samples.empty() ? 0 : subject.samples.front().size();
  for (const auto& per : subject.samples) n = std::min(n, per.size());
  return n;
}

ComparisonSet enumerate_comparisons(const MultiDataset& ds, bool limit_by_scarcest) {
  ComparisonSet out;
  const auto& subjects = ds.subjects();
  std::vector<std::size_t> tuples(subjects.size());
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    const Subject& subject = subjects[s];
    if (!limit_by_scarcest) {
      for (const auto& per : subject.samples) {
        require(per.size() == subject.samples.front().size(), ErrorCode::kInvalidArgument,
                "subject " + subject.id + " has unequal per-modality template counts");
      }
    }
    tuples[s] = tuple_count(subject);
    require(tuples[s] >= 1, ErrorCode::kDegenerate, "subject " + subject.id + " has no usable tuple");
  }
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    for (std::size_t a = 0; a < tuples[s]; ++a) {
      for (std::size_t b = a + 1; b < tuples[s]; ++b) out.mated.push_back({{s, a}, {s, b}});
    }
  }
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    for (std::size_t t = s + 1; t < subjects.size(); ++t) out.non_mated.push_back({{s, 0}, {t, 0}});
  }
  out.degenerate = subjects.size() < 2;
  return out;
}

double single_modality_eer(const MultiDataset& ds, const ComparisonSet& pairs, std::size_t modality) {
  auto score = [&](const ComparisonPair& p) {
    const auto& a = ds.subjects()[p.probe.subject].samples[modality][p.probe.tuple];
    const auto& b = ds.subjects()[p.reference.subject].samples[modality][p.reference.tuple];
    return match::sed(a.payload, b.payload).value;
  };
  eval::ScoreSet scores;
  scores.mated.reserve(pairs.mated.size());
  scores.non_mated.reserve(pairs.non_mated.size());
  for (const auto& p : pairs.mated) scores.mated.push_back(score(p));
  for (const auto& p : pairs.non_mated) scores.non_mated.push_back(score(p));
  return eval::eer(scores).eer;
}

std::vector<ModalityCalibration> calibrate(std::pair<double, double> target, const SynthConfig& base,
                                           const CalibrationOptions& options) {
  const auto [lo, hi] = target;
  require(0.0 < lo && lo < hi && hi < 0.5, ErrorCode::kInvalidArgument,
          "calibration target needs 0 < lo < hi < 0.5");
  require(options.sigma_max > 0.0 && options.max_iterations > 0, ErrorCode::kInvalidArgument,
          "calibration search bounds must be positive");
  base.validate();

  std::vector<ModalityCalibration> out;
  for (std::size_t m = 0; m < base.modalities.size(); ++m) {
    SynthConfig held_out = base;
    held_out.seed = base.seed ^ options.held_out_salt;
    auto eer_at = [&](double sigma) {
      held_out.modalities[m].sigma = sigma;
      const MultiDataset ds = generate(held_out);
      return single_modality_eer(ds, enumerate_comparisons(ds), m);
    };
    const std::string& name = base.modalities[m].modality.name();
    auto in_range = [&](double e) { return e >= lo && e <= hi; };

    double a = 0.0, b = options.sigma_max;
    double ea = eer_at(a), eb = eer_at(b);
    if (in_range(ea)) {
      out.push_back({base.modalities[m].modality, a, ea});
      continue;
    }
    if (in_range(eb)) {
      out.push_back({base.modalities[m].modality, b, eb});
      continue;
    }
    auto unreachable = [&]() {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "%s: EER target [%g, %g] unreachable; achieved bracket [%g, %g] for sigma in [%g, %g]",
                    name.c_str(), lo, hi, ea, eb, a, b);
      fail(ErrorCode::kUnreachable, buf);
    };
    if (ea > hi || eb < lo) unreachable();

    bool found = false;
    for (int it = 0; it < options.max_iterations; ++it) {
      const double mid = 0.5 * (a + b);
      const double e = eer_at(mid);
      if (in_range(e)) {
        out.push_back({base.modalities[m].modality, mid, e});
        found = true;
        break;
      }
      if (e < lo) {
        a = mid;
        ea = e;
      } else {
        b = mid;
        eb = e;
      }
    }
    if (!found) unreachable();
  }
  return out;
}

}  // namespace biotrunc::synth
