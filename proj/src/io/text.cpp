// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <set>

#include "biotrunc/error.hpp"
#include "biotrunc/io.hpp"

namespace biotrunc::io {

namespace {

using namespace reduce;

std::string type_of(const Json& j, const char* what) {
  require(j.is_object(), ErrorCode::kInvalidArgument, std::string(what) + " must be a JSON object");
  if (!j.contains("type")) return "none";
  require(j["type"].is_string(), ErrorCode::kInvalidArgument, std::string(what) + ".type must be a string");
  return j["type"].get<std::string>();
}

void only_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& what) {
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    require(allowed.count(it.key()) == 1, ErrorCode::kInvalidArgument,
            "unknown key '" + it.key() + "' in " + what);
  }
}

// JSON type errors carry nlohmann's message; report them as validation errors.
template <typename T>
T field(const Json& j, const char* key, const std::string& what) {
  require(j.contains(key), ErrorCode::kInvalidArgument, what + " needs '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, what + "." + key + ": " + e.what());
  }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback, const std::string& what) {
  return j.contains(key) ? field<T>(j, key, what) : fallback;
}

std::string hex_u64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kInvalidArgument, what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

Json plan_to_json(const ReductionPlan& plan) {
  Json j;
  j["quantization"] = std::visit(
      [](const auto& q) -> Json {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, NoQuantization>) {
          return {{"type", "none"}};
        } else if constexpr (std::is_same_v<T, BinaryQuantization>) {
          return {{"type", "binary"}, {"threshold", q.threshold}};
        } else {
          return {{"type", "levels"},
                  {"q", q.q},
                  {"range", {q.range.lo, q.range.hi}},
                  {"rounding", q.rounding == Rounding::kNearest ? "nearest" : "floor"}};
        }
      },
      plan.quantization);
  j["truncation"] = std::visit(
      [](const auto& t) -> Json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, NoTruncation>) {
          return {{"type", "none"}};
        } else if constexpr (std::is_same_v<T, FractionTruncation>) {
          return {{"type", "fraction"}, {"k", t.k}, {"i", t.i}};
        } else if constexpr (std::is_same_v<T, InterleaveTruncation>) {
          return {{"type", "interleave"}, {"x", t.x}, {"literal", t.literal}};
        } else if constexpr (std::is_same_v<T, SumTruncation>) {
          return {{"type", "sum"}, {"k", t.k}};
        } else {
          return {{"type", "head"}, {"length", t.length}};
        }
      },
      plan.truncation);
  if (const auto* c = std::get_if<ConcatFusion>(&plan.fusion)) {
    Json order = Json::array();
    for (const auto& m : c->order) order.push_back(m.name());
    j["fusion"] = {{"type", "concat"}, {"order", order}};
  } else {
    j["fusion"] = {{"type", "none"}};
  }
  return j;
}

ReductionPlan plan_from_json(const Json& j) {
  require(j.is_object(), ErrorCode::kInvalidArgument, "plan must be a JSON object");
  only_keys(j, {"quantization", "truncation", "fusion"}, "plan");
  ReductionPlan plan;
  if (j.contains("quantization")) {
    const Json& q = j["quantization"];
    const std::string type = type_of(q, "quantization");
    if (type == "none") {
      only_keys(q, {"type"}, "quantization");
    } else if (type == "binary") {
      only_keys(q, {"type", "threshold"}, "quantization");
      plan.quantization = BinaryQuantization{field_or<double>(q, "threshold", 0.0, "quantization")};
    } else if (type == "levels") {
      only_keys(q, {"type", "q", "range", "rounding"}, "quantization");
      LevelQuantization l;
      l.q = field<std::uint32_t>(q, "q", "quantization");
      if (q.contains("range")) {
        const auto r = field<std::vector<double>>(q, "range", "quantization");
        require(r.size() == 2, ErrorCode::kInvalidArgument, "quantization.range must be [lo, hi]");
        l.range = {r[0], r[1]};
      }
      const std::string rounding = field_or<std::string>(q, "rounding", "floor", "quantization");
      require(rounding == "floor" || rounding == "nearest", ErrorCode::kInvalidArgument,
              "quantization.rounding must be 'floor' or 'nearest'");
      l.rounding = rounding == "nearest" ? Rounding::kNearest : Rounding::kFloor;
      plan.quantization = l;
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown quantization type '" + type + "'");
    }
  }
  if (j.contains("truncation")) {
    const Json& t = j["truncation"];
    const std::string type = type_of(t, "truncation");
    if (type == "none") {
      only_keys(t, {"type"}, "truncation");
    } else if (type == "fraction") {
      only_keys(t, {"type", "k", "i"}, "truncation");
      plan.truncation = FractionTruncation{field<std::size_t>(t, "k", "truncation"), field<std::size_t>(t, "i", "truncation")};
    } else if (type == "interleave") {
      only_keys(t, {"type", "x", "literal"}, "truncation");
      plan.truncation = InterleaveTruncation{field<std::size_t>(t, "x", "truncation"),
                                             field_or<bool>(t, "literal", false, "truncation")};
    } else if (type == "sum") {
      only_keys(t, {"type", "k"}, "truncation");
      plan.truncation = SumTruncation{field<std::size_t>(t, "k", "truncation")};
    } else if (type == "head") {
      only_keys(t, {"type", "length"}, "truncation");
      plan.truncation = HeadTruncation{field<std::size_t>(t, "length", "truncation")};
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown truncation type '" + type + "'");
    }
  }
  if (j.contains("fusion")) {
    const Json& f = j["fusion"];
    const std::string type = type_of(f, "fusion");
    if (type == "none") {
      only_keys(f, {"type"}, "fusion");
    } else if (type == "concat") {
      only_keys(f, {"type", "order"}, "fusion");
      ConcatFusion c;
      if (f.contains("order")) {
        c.order.clear();
        for (const auto& name : field<std::vector<std::string>>(f, "order", "fusion")) c.order.emplace_back(name);
      }
      plan.fusion = c;
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown fusion type '" + type + "'");
    }
  }
  plan.validate();
  return plan;
}

Json synth_config_to_json(const synth::SynthConfig& c) {
  Json mods = Json::array();
  for (const auto& m : c.modalities) {
    mods.push_back({{"name", m.modality.name()}, {"sigma", m.sigma}, {"degradation", m.degradation}});
  }
  return {{"subjects", c.subjects},
          {"samples_per_modality", c.samples_per_modality},
          {"dim", c.dim},
          {"latent_rank", c.latent_rank},
          {"seed", c.seed},
          {"centered_tolerance", c.centered_tolerance},
          {"modalities", mods}};
}

synth::SynthConfig synth_config_from_json(const Json& j) {
  require(j.is_object(), ErrorCode::kInvalidArgument, "synth config must be a JSON object");
  only_keys(j, {"subjects", "samples_per_modality", "dim", "latent_rank", "seed", "centered_tolerance", "modalities"},
            "synth config");
  synth::SynthConfig c = synth::SynthConfig::desk_default();
  const std::string what = "synth config";
  c.subjects = field_or<std::size_t>(j, "subjects", c.subjects, what);
  c.samples_per_modality = field_or<std::size_t>(j, "samples_per_modality", c.samples_per_modality, what);
  c.dim = field_or<std::size_t>(j, "dim", c.dim, what);
  c.latent_rank = field_or<std::size_t>(j, "latent_rank", c.latent_rank, what);
  c.seed = field_or<std::uint64_t>(j, "seed", c.seed, what);
  c.centered_tolerance = field_or<double>(j, "centered_tolerance", c.centered_tolerance, what);
  if (j.contains("modalities")) {
    require(j["modalities"].is_array(), ErrorCode::kInvalidArgument, "modalities must be an array");
    c.modalities.clear();
    for (const auto& m : j["modalities"]) {
      require(m.is_object(), ErrorCode::kInvalidArgument, "modality entries must be objects");
      only_keys(m, {"name", "sigma", "degradation"}, "modality");
      c.modalities.push_back({Modality(field<std::string>(m, "name", "modality")),
                              field_or<double>(m, "sigma", 0.05, "modality"),
                              field_or<double>(m, "degradation", 0.0, "modality")});
    }
  }
  c.validate();
  return c;
}

Json public_key_to_json(const he::PublicKey& pk) {
  return {{"scheme", "paillier-djn"},
          {"bits", pk.bits()},
          {"n", pk.n().to_hex()},
          {"g", pk.g().to_hex()},
          {"hs", pk.hs().to_hex()},
          {"fingerprint", hex_u64(pk.fingerprint())}};
}

he::PublicKey public_key_from_json(const Json& j) {
  require(j.is_object(), ErrorCode::kCrypto, "public key must be a JSON object");
  try {
    require(j.value("scheme", "") == "paillier-djn", ErrorCode::kCrypto, "unsupported key scheme");
    he::PublicKey pk(BigUint::from_hex(j.at("n").get<std::string>()), BigUint::from_hex(j.at("hs").get<std::string>()));
    if (j.contains("g")) {
      require(BigUint::from_hex(j["g"].get<std::string>()) == pk.g(), ErrorCode::kCrypto, "public key needs g = n + 1");
    }
    if (j.contains("fingerprint")) {
      require(j["fingerprint"].get<std::string>() == hex_u64(pk.fingerprint()), ErrorCode::kCrypto,
              "public key fingerprint does not match n");
    }
    return pk;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kCrypto, std::string("malformed public key: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kCrypto, e.what());
  }
}

Json key_pair_to_json(const he::KeyPair& key) {
  Json j = public_key_to_json(key.pub);
  j["p"] = key.sec.p().to_hex();
  j["q"] = key.sec.q().to_hex();
  return j;
}

he::KeyPair key_pair_from_json(const Json& j) {
  he::PublicKey pk = public_key_from_json(j);
  try {
    const BigUint p = BigUint::from_hex(j.at("p").get<std::string>());
    const BigUint q = BigUint::from_hex(j.at("q").get<std::string>());
    require(p * q == pk.n(), ErrorCode::kCrypto, "secret primes do not match the public modulus");
    return he::KeyPair{std::move(pk), he::SecretKey(p, q)};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kCrypto, std::string("malformed secret key: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kCrypto, e.what());
  }
}

Json workload_to_json(const he::WorkloadReport& r) {
  return {{"dim", r.dim},
          {"slots", r.slots},
          {"kind", std::string(he::to_string(r.kind))},
          {"ciphertexts", r.ciphertexts},
          {"hadamard_mults", r.hadamard_mults},
          {"rotations", r.rotations},
          {"additions", r.additions},
          {"total_ops", r.total_ops()}};
}

Json report_to_json(const eval::ReportTable& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json cells = Json::object();
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      Json cell = {{"mean_eer", row.cells[c].mean}, {"runs", row.cells[c].runs}};
      if (row.cells[c].has_std()) cell["std_eer"] = row.cells[c].std;
      cells[t.columns[c]] = cell;
    }
    rows.push_back({{"dim", row.dim}, {"cells", cells}});
  }
  Json j = {{"title", t.title}, {"columns", t.columns}, {"rows", rows}, {"partial", t.partial}};
  if (t.partial) j["error"] = t.error;
  return j;
}

Json eer_to_json(const eval::EerResult& r) { return {{"eer", r.eer}, {"threshold", r.threshold}}; }

// ---------------------------------------------------------------------------

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_rate(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", rate);
  return buf;
}

namespace {

std::string format_score(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string det_csv(const eval::DetCurve& curve) {
  std::string out = "threshold,fmr,fnmr\n";
  for (const auto& p : curve.points) {
    out += format_score(p.threshold) + "," + format_rate(p.fmr) + "," + format_rate(p.fnmr) + "\n";
  }
  return out;
}

std::string report_csv(const eval::ReportTable& table) {
  const bool with_std = table.has_std();
  std::string out = with_std ? "modality,dim,mean_eer,std_eer\n" : "modality,dim,mean_eer\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    for (const auto& row : table.rows) {
      const eval::Cell& cell = row.cells[c];
      out += csv_field(table.columns[c]) + "," + std::to_string(row.dim) + "," + format_rate(cell.mean);
      if (with_std) out += "," + (cell.has_std() ? format_rate(cell.std) : std::string());
      out += "\n";
    }
  }
  return out;
}

std::string workload_csv(std::span<const he::WorkloadReport> reports) {
  std::string out = "dim,slots,kind,ciphertexts,hadamard_mults,rotations,additions,total_ops\n";
  for (const auto& r : reports) {
    out += std::to_string(r.dim) + "," + std::to_string(r.slots) + "," + std::string(he::to_string(r.kind)) + "," +
           std::to_string(r.ciphertexts) + "," + std::to_string(r.hadamard_mults) + "," +
           std::to_string(r.rotations) + "," + std::to_string(r.additions) + "," + std::to_string(r.total_ops()) +
           "\n";
  }
  return out;
}

void write_csv(const fs::path& path, const eval::DetCurve& curve) { write_text_atomic(path, det_csv(curve)); }
void write_csv(const fs::path& path, const eval::ReportTable& table) { write_text_atomic(path, report_csv(table)); }

}  // namespace biotrunc::io
