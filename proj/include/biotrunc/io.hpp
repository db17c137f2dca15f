// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

// File formats. Fixed-width fields are little-endian; crypto integers are
// length-prefixed big-endian. Every writer goes through a temporary file that
// is renamed into place.
//
// Template file (version 1):
//   "BTRC" | u16 version | u8 kind (0 f64, 1 level, 2 bit) | u16 q | u32 dim
//   | u32 count | str modality | str provenance
//   record: str subject | u32 sample | payload
// where str is a u16 byte length followed by UTF-8 bytes. Level payloads use
// one byte per element when q <= 256 and two otherwise; bit payloads are
// packed LSB-first with zero padding to the byte boundary.
//
// Encrypted gallery file (version 1):
//   "BTRE" | u16 version | u8 kind | u32 dim | u16 q | u64 key fingerprint
//   | u32 count
//   record: str subject | u32 sample | u8 has_squares | dim element
//   ciphertexts | [dim square ciphertexts] | norm ciphertext
// where each ciphertext is a u32 byte length followed by big-endian bytes.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "biotrunc/eval.hpp"
#include "biotrunc/he.hpp"
#include "biotrunc/reduce.hpp"
#include "biotrunc/synth.hpp"
#include "biotrunc/types.hpp"

namespace biotrunc::io {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

inline constexpr std::uint16_t kTemplateFormatVersion = 1;
inline constexpr std::uint16_t kGalleryFormatVersion = 1;

/// Writes `bytes` to `path` atomically (temporary file, then rename).
void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const fs::path& path, const std::string& text);
std::vector<std::uint8_t> read_file(const fs::path& path);
std::string read_text(const fs::path& path);

// ---------------------------------------------------------------------------
// Templates.

/// All templates must share kind, q, dim, modality and provenance.
std::vector<std::uint8_t> encode_templates(std::span<const Template> templates);
std::vector<Template> decode_templates(std::span<const std::uint8_t> bytes);

void write_templates(const fs::path& path, std::span<const Template> templates);
std::vector<Template> read_templates(const fs::path& path);

// ---------------------------------------------------------------------------
// Encrypted gallery.

std::vector<std::uint8_t> encode_gallery(std::span<const he::EncryptedTemplate> gallery, const he::PublicKey& pk);
/// Checks the fingerprint against `pk` (kKeyMismatch) and every ciphertext
/// against n^2 (kCrypto).
std::vector<he::EncryptedTemplate> decode_gallery(std::span<const std::uint8_t> bytes, const he::PublicKey& pk);

void write_gallery(const fs::path& path, std::span<const he::EncryptedTemplate> gallery, const he::PublicKey& pk);
std::vector<he::EncryptedTemplate> read_gallery(const fs::path& path, const he::PublicKey& pk);

// ---------------------------------------------------------------------------
// JSON documents.

Json plan_to_json(const reduce::ReductionPlan& plan);
reduce::ReductionPlan plan_from_json(const Json& j);

Json synth_config_to_json(const synth::SynthConfig& c);
synth::SynthConfig synth_config_from_json(const Json& j);

/// {"scheme", "bits", "n", "g", "hs", "fingerprint"} with hex integers.
Json public_key_to_json(const he::PublicKey& pk);
he::PublicKey public_key_from_json(const Json& j);
/// Public key plus the primes p and q.
Json key_pair_to_json(const he::KeyPair& key);
he::KeyPair key_pair_from_json(const Json& j);

Json workload_to_json(const he::WorkloadReport& r);
Json report_to_json(const eval::ReportTable& t);
Json eer_to_json(const eval::EerResult& r);

/// Parses JSON text; syntax errors become kInvalidArgument.
Json parse_json(const std::string& text, const std::string& what);

// ---------------------------------------------------------------------------
// CSV. Fields are quoted when needed; rates use six decimals.

std::string csv_field(const std::string& field);
std::string format_rate(double rate);

std::string det_csv(const eval::DetCurve& curve);
/// "modality,dim,mean_eer[,std_eer]"; the std column appears only when some
/// cell averaged several fraction indices.
std::string report_csv(const eval::ReportTable& table);
std::string workload_csv(std::span<const he::WorkloadReport> reports);

void write_csv(const fs::path& path, const eval::DetCurve& curve);
void write_csv(const fs::path& path, const eval::ReportTable& table);

}  // namespace biotrunc::io
