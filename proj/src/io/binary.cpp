// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstring>
#include <fstream>
#include <random>

#include "biotrunc/error.hpp"
#include "biotrunc/io.hpp"

namespace biotrunc::io {

namespace {

constexpr char kTemplateMagic[4] = {'B', 'T', 'R', 'C'};
constexpr char kGalleryMagic[4] = {'B', 'T', 'R', 'E'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    require(s.size() <= 0xffff, ErrorCode::kInvalidArgument, "string field longer than 65535 bytes");
    le(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void big(const BigUint& v) {
    const auto b = v.to_bytes_be();
    le(static_cast<std::uint32_t>(b.size()));
    bytes(b.data(), b.size());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  bool at_end() const { return pos_ == in_.size(); }
  std::span<const std::uint8_t> take(std::size_t n) {
    require(in_.size() - pos_ >= n, ErrorCode::kTruncatedFile, "file ends in the middle of a record");
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  template <typename T>
  T le() {
    const auto b = take(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b[i]) << (8 * i));
    return v;
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  std::string str() {
    const auto n = le<std::uint16_t>();
    const auto b = take(n);
    return std::string(b.begin(), b.end());
  }
  BigUint big() {
    const auto n = le<std::uint32_t>();
    return BigUint::from_bytes_be(take(n));
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void check_magic(Reader& r, const char (&magic)[4], const char* what) {
  std::span<const std::uint8_t> m;
  try {
    m = r.take(4);
  } catch (const Error&) {
    fail(ErrorCode::kNotTemplateFile, std::string("not a ") + what + " (file too short)");
  }
  require(std::memcmp(m.data(), magic, 4) == 0, ErrorCode::kNotTemplateFile,
          std::string("not a ") + what + " (bad magic bytes)");
}

std::size_t level_width(std::uint32_t q) { return q <= 256 ? 1 : 2; }

}  // namespace

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  thread_local std::mt19937_64 salt(std::random_device{}());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(salt() % 1000000007ULL);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(ErrorCode::kIo, "short write to " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::kIo, "cannot replace " + path.string());
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot read " + path.string());
  std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  require(!in.bad(), ErrorCode::kIo, "read error on " + path.string());
  return out;
}

std::string read_text(const fs::path& path) {
  const auto b = read_file(path);
  return std::string(b.begin(), b.end());
}

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> encode_templates(std::span<const Template> templates) {
  Writer w;
  w.bytes(kTemplateMagic, 4);
  w.le(kTemplateFormatVersion);
  VectorKind kind = VectorKind::kReal;
  std::uint32_t q = 0, dim = 0;
  std::string modality, provenance{kRawProvenance};
  if (!templates.empty()) {
    const Template& first = templates.front();
    kind = kind_of(first.payload);
    q = levels_of(first.payload);
    dim = static_cast<std::uint32_t>(dim_of(first.payload));
    modality = first.modality.name();
    provenance = first.provenance;
    for (const auto& t : templates) {
      require(kind_of(t.payload) == kind && levels_of(t.payload) == q, ErrorCode::kKindMismatch,
              "template file needs one element kind and q");
      require(dim_of(t.payload) == dim, ErrorCode::kDimensionMismatch, "template file needs one dimension");
      require(t.modality == first.modality, ErrorCode::kInvalidArgument, "template file needs one modality");
      require(t.provenance == provenance, ErrorCode::kInvalidArgument, "template file needs one provenance");
    }
  }
  require(q <= 0x8000, ErrorCode::kInvalidArgument, "q too large for the template format");
  w.le(static_cast<std::uint8_t>(kind));
  w.le(static_cast<std::uint16_t>(q));
  w.le(dim);
  w.le(static_cast<std::uint32_t>(templates.size()));
  w.str(modality);
  w.str(provenance);
  for (const auto& t : templates) {
    w.str(t.subject_id);
    w.le(t.sample_index);
    if (const auto* f = std::get_if<FeatureVector>(&t.payload)) {
      for (double v : f->elements()) w.f64(v);
    } else if (const auto* qv = std::get_if<QuantizedVector>(&t.payload)) {
      for (std::uint32_t v : qv->levels()) {
        if (level_width(q) == 1) {
          w.le(static_cast<std::uint8_t>(v));
        } else {
          w.le(static_cast<std::uint16_t>(v));
        }
      }
    } else {
      const auto bits = std::get<BinaryVector>(t.payload).bits();
      for (std::size_t i = 0; i < bits.size(); i += 8) {
        std::uint8_t byte = 0;
        for (std::size_t b = 0; b < 8 && i + b < bits.size(); ++b) byte |= static_cast<std::uint8_t>(bits[i + b] << b);
        w.le(byte);
      }
    }
  }
  return w.take();
}

std::vector<Template> decode_templates(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  check_magic(r, kTemplateMagic, "template file");
  const auto version = r.le<std::uint16_t>();
  require(version == kTemplateFormatVersion, ErrorCode::kVersionMismatch,
          "unsupported template file version " + std::to_string(version));
  const auto kind_byte = r.le<std::uint8_t>();
  require(kind_byte <= 2, ErrorCode::kNotTemplateFile, "unknown element kind " + std::to_string(kind_byte));
  const auto kind = static_cast<VectorKind>(kind_byte);
  const std::uint32_t q = r.le<std::uint16_t>();
  const auto dim = r.le<std::uint32_t>();
  const auto count = r.le<std::uint32_t>();
  const std::string modality = r.str();
  const std::string provenance = r.str();
  if (count > 0) {
    require(!modality.empty(), ErrorCode::kNotTemplateFile, "template file without a modality");
    if (kind == VectorKind::kQuantized) {
      require(is_power_of_two_levels(q), ErrorCode::kNotTemplateFile, "invalid q in template file header");
    }
  }

  std::vector<Template> out;
  out.reserve(std::min<std::size_t>(count, bytes.size()));
  for (std::uint32_t n = 0; n < count; ++n) {
    if (r.at_end()) {
      fail(ErrorCode::kCountMismatch, "header declares " + std::to_string(count) + " records, file holds " +
                                          std::to_string(n));
    }
    Template t;
    t.subject_id = r.str();
    t.sample_index = r.le<std::uint32_t>();
    t.modality = Modality(modality);
    t.provenance = provenance;
    if (kind == VectorKind::kReal) {
      std::vector<double> v(dim);
      for (auto& x : v) x = r.f64();
      t.payload = FeatureVector(std::move(v));
    } else if (kind == VectorKind::kQuantized) {
      std::vector<std::uint32_t> v(dim);
      for (auto& x : v) x = level_width(q) == 1 ? r.le<std::uint8_t>() : r.le<std::uint16_t>();
      t.payload = QuantizedVector(std::move(v), q);
    } else {
      std::vector<std::uint8_t> v(dim);
      const auto packed = r.take((dim + 7) / 8);
      for (std::size_t i = 0; i < dim; ++i) v[i] = (packed[i / 8] >> (i % 8)) & 1u;
      t.payload = BinaryVector(std::move(v));
    }
    out.push_back(std::move(t));
  }
  require(r.at_end(), ErrorCode::kCountMismatch,
          "template file holds data beyond the " + std::to_string(count) + " declared records");
  return out;
}

void write_templates(const fs::path& path, std::span<const Template> templates) {
  write_file_atomic(path, encode_templates(templates));
}

std::vector<Template> read_templates(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_templates(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> encode_gallery(std::span<const he::EncryptedTemplate> gallery, const he::PublicKey& pk) {
  Writer w;
  w.bytes(kGalleryMagic, 4);
  w.le(kGalleryFormatVersion);
  VectorKind kind = VectorKind::kBinary;
  std::uint32_t dim = 0, q = 2;
  if (!gallery.empty()) {
    kind = gallery.front().kind;
    dim = static_cast<std::uint32_t>(gallery.front().dim);
    q = gallery.front().q;
  }
  for (const auto& e : gallery) {
    require(e.key_fp == pk.fingerprint(), ErrorCode::kKeyMismatch, "gallery template under a different key");
    require(e.kind == kind && e.q == q && e.dim == dim, ErrorCode::kKindMismatch,
            "gallery needs one kind, q and dimension");
    require(e.elements.size() == dim && (e.squares.empty() || e.squares.size() == dim),
            ErrorCode::kDimensionMismatch, "malformed encrypted template");
  }
  require(q <= 0x8000, ErrorCode::kInvalidArgument, "q too large for the gallery format");
  w.le(static_cast<std::uint8_t>(kind));
  w.le(dim);
  w.le(static_cast<std::uint16_t>(q));
  w.le(pk.fingerprint());
  w.le(static_cast<std::uint32_t>(gallery.size()));
  for (const auto& e : gallery) {
    w.str(e.subject_id);
    w.le(e.sample_index);
    w.le(static_cast<std::uint8_t>(e.has_squares() ? 1 : 0));
    for (const auto& c : e.elements) w.big(c.value);
    for (const auto& c : e.squares) w.big(c.value);
    w.big(e.norm_sq.value);
  }
  return w.take();
}

std::vector<he::EncryptedTemplate> decode_gallery(std::span<const std::uint8_t> bytes, const he::PublicKey& pk) {
  Reader r(bytes);
  check_magic(r, kGalleryMagic, "encrypted gallery file");
  const auto version = r.le<std::uint16_t>();
  require(version == kGalleryFormatVersion, ErrorCode::kVersionMismatch,
          "unsupported gallery file version " + std::to_string(version));
  const auto kind_byte = r.le<std::uint8_t>();
  require(kind_byte == 1 || kind_byte == 2, ErrorCode::kNotTemplateFile, "gallery element kind must be integer");
  const auto dim = r.le<std::uint32_t>();
  const std::uint32_t q = r.le<std::uint16_t>();
  const auto fp = r.le<std::uint64_t>();
  require(fp == pk.fingerprint(), ErrorCode::kKeyMismatch, "gallery was encrypted under a different public key");
  const auto count = r.le<std::uint32_t>();

  auto cipher = [&] {
    he::Ciphertext c{r.big(), fp};
    require(!c.value.is_zero() && c.value < pk.n_squared(), ErrorCode::kCrypto, "ciphertext outside (0, n^2)");
    return c;
  };
  std::vector<he::EncryptedTemplate> out;
  for (std::uint32_t n = 0; n < count; ++n) {
    if (r.at_end()) {
      fail(ErrorCode::kCountMismatch, "header declares " + std::to_string(count) + " records, file holds " +
                                          std::to_string(n));
    }
    he::EncryptedTemplate e;
    e.kind = static_cast<VectorKind>(kind_byte);
    e.dim = dim;
    e.q = q;
    e.key_fp = fp;
    e.subject_id = r.str();
    e.sample_index = r.le<std::uint32_t>();
    const bool squares = r.le<std::uint8_t>() != 0;
    e.elements.reserve(dim);
    for (std::uint32_t i = 0; i < dim; ++i) e.elements.push_back(cipher());
    if (squares) {
      for (std::uint32_t i = 0; i < dim; ++i) e.squares.push_back(cipher());
    }
    e.norm_sq = cipher();
    out.push_back(std::move(e));
  }
  require(r.at_end(), ErrorCode::kCountMismatch,
          "gallery file holds data beyond the " + std::to_string(count) + " declared records");
  return out;
}

void write_gallery(const fs::path& path, std::span<const he::EncryptedTemplate> gallery, const he::PublicKey& pk) {
  write_file_atomic(path, encode_gallery(gallery, pk));
}

std::vector<he::EncryptedTemplate> read_gallery(const fs::path& path, const he::PublicKey& pk) {
  const auto bytes = read_file(path);
  try {
    return decode_gallery(bytes, pk);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace biotrunc::io
