// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include "biotrunc/reduce.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace biotrunc::reduce {

namespace {

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_divides(std::size_t dim, std::size_t parts, const char* what) {
  require(parts >= 1, ErrorCode::kInvalidArgument, std::string(what) + " must be >= 1");
  require(dim % parts == 0, ErrorCode::kInvalidArgument,
          std::string(what) + "=" + std::to_string(parts) + " does not divide dimension " +
              std::to_string(dim));
}

}  // namespace

// ---------------------------------------------------------------------------

std::uint32_t quantize_value(double x, std::uint32_t q, Range range, Rounding rounding) {
  const double clamped = std::clamp(x, range.lo, range.hi);
  double scaled = (clamped - range.lo) / (range.hi - range.lo) * static_cast<double>(q - 1);
  if (rounding == Rounding::kNearest) scaled += 0.5;
  const double level = std::floor(scaled);
  return static_cast<std::uint32_t>(std::clamp(level, 0.0, static_cast<double>(q - 1)));
}

BinaryVector binarize(const FeatureVector& v, double threshold) {
  std::vector<std::uint8_t> bits(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) bits[i] = v[i] < threshold ? 0 : 1;
  return BinaryVector(std::move(bits));
}

QuantizedVector quantize(const FeatureVector& v, std::uint32_t q, Range range, Rounding rounding) {
  require(is_power_of_two_levels(q), ErrorCode::kInvalidArgument,
          "q must be 2^l with l >= 1, got " + std::to_string(q));
  require(range.lo < range.hi, ErrorCode::kInvalidArgument,
          "degenerate quantization range [" + fmt_double(range.lo) + ", " + fmt_double(range.hi) + "]");
  std::vector<std::uint32_t> levels(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) levels[i] = quantize_value(v[i], q, range, rounding);
  return QuantizedVector(std::move(levels), q);
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> fraction_indices(std::size_t dim, std::size_t k, std::size_t i) {
  check_divides(dim, k, "fraction count k");
  require(i >= 1 && i <= k, ErrorCode::kInvalidArgument,
          "fraction index i=" + std::to_string(i) + " outside [1, " + std::to_string(k) + "]");
  const std::size_t len = dim / k;
  std::vector<std::size_t> idx(len);
  std::iota(idx.begin(), idx.end(), (i - 1) * len);
  return idx;
}

std::vector<std::size_t> interleave_indices(std::size_t dim, std::size_t x) {
  check_divides(dim, x, "interleave factor x");
  std::vector<std::size_t> idx;
  idx.reserve(dim / x);
  for (std::size_t j = 0; j < dim; j += x) idx.push_back(j);
  return idx;
}

std::vector<std::size_t> interleave_literal_indices(std::size_t dim, std::size_t x) {
  require(x >= 1 && x <= dim, ErrorCode::kInvalidArgument,
          "literal interleave needs 1 <= x <= dim, got x=" + std::to_string(x));
  if (x == 1) return {0};
  std::vector<std::size_t> idx(x);
  for (std::size_t j = 0; j < x; ++j) idx[j] = j * (dim - 1) / (x - 1);
  return idx;
}

std::vector<std::size_t> head_indices(std::size_t dim, std::size_t length) {
  require(length >= 1 && length <= dim, ErrorCode::kInvalidArgument,
          "head length " + std::to_string(length) + " outside [1, " + std::to_string(dim) + "]");
  std::vector<std::size_t> idx(length);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

std::optional<std::vector<std::size_t>> selection_of(const Truncation& t, std::size_t dim) {
  return std::visit(
      overloaded{
          [&](const NoTruncation&) -> std::optional<std::vector<std::size_t>> {
            std::vector<std::size_t> idx(dim);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            return idx;
          },
          [&](const FractionTruncation& f) -> std::optional<std::vector<std::size_t>> {
            return fraction_indices(dim, f.k, f.i);
          },
          [&](const InterleaveTruncation& il) -> std::optional<std::vector<std::size_t>> {
            return il.literal ? interleave_literal_indices(dim, il.x) : interleave_indices(dim, il.x);
          },
          [&](const SumTruncation& s) -> std::optional<std::vector<std::size_t>> {
            check_divides(dim, s.k, "sum fraction count k");
            return std::nullopt;
          },
          [&](const HeadTruncation& h) -> std::optional<std::vector<std::size_t>> {
            return head_indices(dim, h.length);
          },
      },
      t);
}

namespace {

template <typename T>
std::vector<T> gather(std::span<const T> src, std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    require(i < src.size(), ErrorCode::kInvalidArgument,
            "selection index " + std::to_string(i) + " outside [0, " + std::to_string(src.size()) + ")");
    out.push_back(src[i]);
  }
  return out;
}

}  // namespace

FeatureVector select(const FeatureVector& v, std::span<const std::size_t> indices) {
  return FeatureVector(gather(v.elements(), indices));
}

QuantizedVector select(const QuantizedVector& v, std::span<const std::size_t> indices) {
  return QuantizedVector(gather(v.levels(), indices), v.q());
}

BinaryVector select(const BinaryVector& v, std::span<const std::size_t> indices) {
  return BinaryVector(gather(v.bits(), indices));
}

Payload select(const Payload& v, std::span<const std::size_t> indices) {
  return std::visit([&](const auto& typed) -> Payload { return select(typed, indices); }, v);
}

// ---------------------------------------------------------------------------

FeatureVector sum_fractions(const FeatureVector& v, std::size_t k) {
  check_divides(v.dim(), k, "sum fraction count k");
  if (k == 1) return v;
  const std::size_t len = v.dim() / k;
  std::vector<double> out(len, 0.0);
  for (std::size_t part = 0; part < k; ++part) {
    for (std::size_t j = 0; j < len; ++j) out[j] += v[part * len + j];
  }
  return FeatureVector(std::move(out));
}

namespace {

QuantizedVector sum_levels(std::span<const std::uint32_t> levels, std::uint32_t q, std::size_t k) {
  const std::size_t len = levels.size() / k;
  std::vector<std::uint32_t> out(len, 0);
  for (std::size_t part = 0; part < k; ++part) {
    for (std::size_t j = 0; j < len; ++j) out[j] += levels[part * len + j];
  }
  const std::uint64_t max_sum = static_cast<std::uint64_t>(k) * (q - 1);
  const std::uint64_t out_q = std::bit_ceil(max_sum + 1);
  require(out_q <= (std::uint64_t{1} << 31), ErrorCode::kInvalidArgument,
          "sum reduction overflows the level range");
  return QuantizedVector(std::move(out), static_cast<std::uint32_t>(out_q));
}

}  // namespace

Payload sum_fractions(const QuantizedVector& v, std::size_t k) {
  check_divides(v.dim(), k, "sum fraction count k");
  if (k == 1) return v;
  return sum_levels(v.levels(), v.q(), k);
}

Payload sum_fractions(const BinaryVector& v, std::size_t k) {
  check_divides(v.dim(), k, "sum fraction count k");
  if (k == 1) return v;
  const std::vector<std::uint32_t> widened(v.bits().begin(), v.bits().end());
  return sum_levels(widened, 2, k);
}

Payload sum_fractions(const Payload& v, std::size_t k) {
  return std::visit([&](const auto& typed) -> Payload { return sum_fractions(typed, k); }, v);
}

Payload quantize_payload(const Payload& v, const Quantization& quantization) {
  if (std::holds_alternative<NoQuantization>(quantization)) return v;
  const auto* real = std::get_if<FeatureVector>(&v);
  require(real != nullptr, ErrorCode::kKindMismatch,
          "quantization expects a real-valued vector, got " + std::string(to_string(kind_of(v))));
  if (const auto* b = std::get_if<BinaryQuantization>(&quantization)) {
    return binarize(*real, b->threshold);
  }
  const auto& lq = std::get<LevelQuantization>(quantization);
  return quantize(*real, lq.q, lq.range, lq.rounding);
}

Payload truncate(const Payload& v, const Truncation& truncation) {
  if (const auto* s = std::get_if<SumTruncation>(&truncation)) return sum_fractions(v, s->k);
  if (std::holds_alternative<NoTruncation>(truncation)) return v;
  const auto idx = selection_of(truncation, dim_of(v));
  return select(v, *idx);
}

// ---------------------------------------------------------------------------

void ReductionPlan::validate() const {
  std::visit(overloaded{
                 [](const NoQuantization&) {},
                 [](const BinaryQuantization& b) {
                   require(std::isfinite(b.threshold), ErrorCode::kInvalidArgument,
                           "binarization threshold must be finite");
                 },
                 [](const LevelQuantization& l) {
                   require(is_power_of_two_levels(l.q), ErrorCode::kInvalidArgument,
                           "q must be 2^l with l >= 1, got " + std::to_string(l.q));
                   require(l.range.lo < l.range.hi, ErrorCode::kInvalidArgument,
                           "quantization range needs x_min < x_max");
                 },
             },
             quantization);
  std::visit(overloaded{
                 [](const NoTruncation&) {},
                 [](const FractionTruncation& f) {
                   require(f.k >= 1, ErrorCode::kInvalidArgument, "fraction count k must be >= 1");
                   require(f.i >= 1 && f.i <= f.k, ErrorCode::kInvalidArgument,
                           "fraction index i=" + std::to_string(f.i) + " outside [1, " +
                               std::to_string(f.k) + "]");
                 },
                 [](const InterleaveTruncation& il) {
                   require(il.x >= 1, ErrorCode::kInvalidArgument, "interleave factor x must be >= 1");
                 },
                 [](const SumTruncation& s) {
                   require(s.k >= 1, ErrorCode::kInvalidArgument, "sum fraction count k must be >= 1");
                 },
                 [](const HeadTruncation& h) {
                   require(h.length >= 1, ErrorCode::kInvalidArgument, "head length must be >= 1");
                 },
             },
             truncation);
  if (const auto* c = std::get_if<ConcatFusion>(&fusion)) {
    require(!c->order.empty(), ErrorCode::kInvalidArgument, "concat fusion needs a modality order");
    for (std::size_t a = 0; a < c->order.size(); ++a) {
      for (std::size_t b = a + 1; b < c->order.size(); ++b) {
        require(!(c->order[a] == c->order[b]), ErrorCode::kInvalidArgument,
                "modality " + c->order[a].name() + " repeated in fusion order");
      }
    }
  }
}

void ReductionPlan::validate_for(std::size_t dim) const {
  validate();
  if (std::holds_alternative<NoTruncation>(truncation)) return;
  (void)selection_of(truncation, dim);
}

std::string ReductionPlan::describe() const {
  std::string out = std::visit(
      overloaded{
          [](const NoQuantization&) -> std::string { return "none"; },
          [](const BinaryQuantization& b) { return "binary(" + fmt_double(b.threshold) + ")"; },
          [](const LevelQuantization& l) {
            return "levels(" + std::to_string(l.q) + "," + fmt_double(l.range.lo) + "," +
                   fmt_double(l.range.hi) + (l.rounding == Rounding::kNearest ? ",nearest" : "") + ")";
          },
      },
      quantization);
  out += "|";
  out += std::visit(
      overloaded{
          [](const NoTruncation&) -> std::string { return "none"; },
          [](const FractionTruncation& f) {
            return "fraction(" + std::to_string(f.k) + "," + std::to_string(f.i) + ")";
          },
          [](const InterleaveTruncation& il) {
            return (il.literal ? "interleave_literal(" : "interleave(") + std::to_string(il.x) + ")";
          },
          [](const SumTruncation& s) { return "sum(" + std::to_string(s.k) + ")"; },
          [](const HeadTruncation& h) { return "head(" + std::to_string(h.length) + ")"; },
      },
      truncation);
  out += "|";
  if (const auto* c = std::get_if<ConcatFusion>(&fusion)) {
    out += "concat(";
    for (std::size_t i = 0; i < c->order.size(); ++i) {
      if (i) out += ",";
      out += c->order[i].name();
    }
    out += ")";
  } else {
    out += "none";
  }
  return out;
}

bool ReductionPlan::integer_output() const {
  return !std::holds_alternative<NoQuantization>(quantization);
}

Template apply_plan(const Template& t, const ReductionPlan& plan) {
  plan.validate_for(dim_of(t.payload));
  Template out = t;
  out.payload = truncate(quantize_payload(t.payload, plan.quantization), plan.truncation);
  out.provenance = plan.describe();
  return out;
}

Modality fused_modality(std::span<const Modality> order) {
  std::string name;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) name += "+";
    name += order[i].name();
  }
  return Modality(name);
}

Template fuse_concat(std::span<const Template> templates, std::span<const Modality> order) {
  require(!templates.empty(), ErrorCode::kInvalidArgument, "fusion needs at least one template");
  require(!order.empty(), ErrorCode::kInvalidArgument, "fusion needs a modality order");
  if (templates.size() == 1 && order.size() == 1) {
    require(templates.front().modality == order.front(), ErrorCode::kInvalidArgument,
            "missing modality " + order.front().name());
    return templates.front();
  }
  std::vector<Payload> parts;
  parts.reserve(order.size());
  for (const auto& m : order) {
    auto it = std::find_if(templates.begin(), templates.end(),
                           [&](const Template& t) { return t.modality == m; });
    require(it != templates.end(), ErrorCode::kInvalidArgument, "missing modality " + m.name());
    require(it->subject_id == templates.front().subject_id, ErrorCode::kInvalidArgument,
            "fusion across different subjects");
    parts.push_back(it->payload);
  }
  require(templates.size() == order.size(), ErrorCode::kInvalidArgument,
          "templates for modalities outside the fusion order");
  Template out;
  out.payload = concat(std::span<const Payload>(parts));
  out.subject_id = templates.front().subject_id;
  out.sample_index = templates.front().sample_index;
  out.modality = fused_modality(order);
  out.provenance = templates.front().provenance;
  return out;
}

Template apply_plan_fused(std::span<const Template> per_modality, const ReductionPlan& plan) {
  plan.validate();
  std::vector<Template> reduced;
  reduced.reserve(per_modality.size());
  for (const auto& t : per_modality) reduced.push_back(apply_plan(t, plan));
  if (const auto* c = std::get_if<ConcatFusion>(&plan.fusion)) {
    Template fused = fuse_concat(reduced, c->order);
    fused.provenance = plan.describe();
    return fused;
  }
  require(reduced.size() == 1, ErrorCode::kInvalidArgument,
          "plan without fusion applied to several templates");
  return reduced.front();
}

std::vector<std::size_t> split_total(std::size_t total, std::size_t parts) {
  require(parts >= 1, ErrorCode::kInvalidArgument, "split needs at least one part");
  require(total >= parts, ErrorCode::kInvalidArgument, "total length smaller than part count");
  std::vector<std::size_t> out(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i) ++out[i];
  return out;
}

}  // namespace biotrunc::reduce
