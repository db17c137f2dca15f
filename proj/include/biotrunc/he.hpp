// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

// Paillier encryption with g = n + 1 and the Damgard-Jurik-Nielsen variant of
// the randomizer: the public key carries hs = h^n mod n^2 for h = -x^2 mod n,
// and Enc(m) = (1 + m n) * hs^a mod n^2 with a random of ceil(bits(n)/2) bits.
// Since hs is fixed, hs^a comes from a precomputed fixed-base table.
//
// Server-side functions (encrypt, add, scalar_mul, enroll, encrypted_sed)
// take only a PublicKey. Only decrypt sees a SecretKey.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biotrunc/bigint.hpp"
#include "biotrunc/types.hpp"

namespace biotrunc::he {

/// FNV-1a over the big-endian bytes of n.
std::uint64_t key_fingerprint(const BigUint& n);

class PublicKey {
 public:
  /// Validates that hs is a unit modulo n^2.
  PublicKey(BigUint n, BigUint hs);

  const BigUint& n() const noexcept { return n_; }
  const BigUint& n_squared() const noexcept { return n2_; }
  /// Always n + 1.
  BigUint g() const { return n_ + BigUint(1); }
  const BigUint& hs() const noexcept { return hs_; }
  std::size_t bits() const noexcept { return n_.bit_length(); }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  std::size_t nonce_bits() const noexcept { return (bits() + 1) / 2; }

  const Montgomery& mont() const noexcept { return *mont_; }
  const FixedBasePow& randomizer() const noexcept { return *table_; }

  friend bool operator==(const PublicKey& a, const PublicKey& b) { return a.n_ == b.n_ && a.hs_ == b.hs_; }

 private:
  BigUint n_, n2_, hs_;
  std::uint64_t fingerprint_ = 0;
  std::shared_ptr<const Montgomery> mont_;
  std::shared_ptr<const FixedBasePow> table_;
};

class SecretKey {
 public:
  SecretKey(const BigUint& p, const BigUint& q);

  const BigUint& p() const noexcept { return p_; }
  const BigUint& q() const noexcept { return q_; }
  const BigUint& lambda() const noexcept { return lambda_; }
  const BigUint& mu() const noexcept { return mu_; }

  /// m mod n recovered through the two prime-square residues.
  BigUint decrypt_crt(const BigUint& c) const;
  BigUint decrypt_textbook(const BigUint& c) const;

 private:
  BigUint p_, q_, n_, n2_, lambda_, mu_;
  BigUint hp_, hq_, q_inv_p_;
  std::shared_ptr<const Montgomery> mont_p2_, mont_q2_, mont_n2_;
};

struct KeyPair {
  PublicKey pub;
  SecretKey sec;
};

inline constexpr std::size_t kDefaultKeyBits = 2048;

/// Deterministic for a fixed seed. `bits` >= 64 and even.
KeyPair keygen(std::size_t bits, std::uint64_t seed);
/// Key from explicit primes (toy keys such as p = 5, q = 7 in tests).
KeyPair key_from_primes(const BigUint& p, const BigUint& q, std::uint64_t seed);

struct Ciphertext {
  BigUint value;
  std::uint64_t key_fp = 0;
  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

/// Source of encryption randomness. Deterministic sources derive every draw
/// from (seed, fork path, counter); fork() gives independent sub-streams so
/// parallel callers stay reproducible. System sources read std::random_device.
class NonceSource {
 public:
  static NonceSource deterministic(std::uint64_t seed);
  static NonceSource system();

  bool is_deterministic() const noexcept { return deterministic_; }
  NonceSource fork(std::uint64_t tag) const;
  /// A fresh sub-stream; advances this source.
  NonceSource split() { return fork(counter_++); }
  BigUint draw(std::size_t bits);

 private:
  NonceSource(bool deterministic, std::uint64_t key) : deterministic_(deterministic), key_(key) {}
  bool deterministic_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Rejects m >= n.
Ciphertext encrypt(const PublicKey& pk, const BigUint& m, NonceSource& nonce);
/// Enc(m) with randomizer 1; used for plaintext constants folded into sums.
Ciphertext encrypt_trivial(const PublicKey& pk, const BigUint& m);

/// CRT decryption.
BigUint decrypt(const KeyPair& key, const Ciphertext& c);
/// Textbook L(c^lambda mod n^2) * mu mod n; a cross-check for decrypt.
BigUint decrypt_reference(const KeyPair& key, const Ciphertext& c);

Ciphertext add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const BigUint& s);

/// v mod n; valid for |v| < n/2.
BigUint encode_signed(const PublicKey& pk, std::int64_t v);
/// Centered lift of m in [0, n) into (-n/2, n/2]; throws if it does not fit int64.
std::int64_t decode_signed(const PublicKey& pk, const BigUint& m);

// ---------------------------------------------------------------------------
// Encrypted templates.

struct EncryptedTemplate {
  std::vector<Ciphertext> elements;
  /// Enc(y_i^2); present only for subset matching of non-binary templates.
  std::vector<Ciphertext> squares;
  Ciphertext norm_sq;
  std::size_t dim = 0;
  std::uint32_t q = 2;
  VectorKind kind = VectorKind::kBinary;
  std::uint64_t key_fp = 0;
  std::string subject_id;
  std::uint32_t sample_index = 0;

  bool has_squares() const noexcept { return !squares.empty(); }
  bool supports_subsets() const noexcept { return kind == VectorKind::kBinary || has_squares(); }
};

/// Encrypts an integer-kind payload. Real payloads are rejected.
EncryptedTemplate enroll_encrypted(const PublicKey& pk, const Payload& y, NonceSource& nonce,
                                   bool with_squares = false, unsigned threads = 1);

/// Enc(sed(x, y)) where y is the enrolled template. With a selection, x may be
/// the full probe or already restricted to the selection; both sides are
/// compared only on the selected indices.
Ciphertext encrypted_sed(const PublicKey& pk, const Payload& x, const EncryptedTemplate& enc,
                         std::optional<std::span<const std::size_t>> selection = std::nullopt);

/// Decrypts an encrypted SED into a non-negative integer (key holder only).
std::uint64_t decrypt_sed(const KeyPair& key, const Ciphertext& c);

// ---------------------------------------------------------------------------
// Analytic cost of SIMD-packed SED comparison.

enum class PackedKind : std::uint8_t { kFloat, kInt, kBinary };

struct WorkloadReport {
  std::size_t dim = 0;
  std::size_t slots = 0;
  PackedKind kind = PackedKind::kFloat;
  std::size_t ciphertexts = 0;
  std::size_t hadamard_mults = 0;
  std::size_t rotations = 0;
  std::size_t additions = 0;

  std::size_t total_ops() const noexcept { return hadamard_mults + rotations + additions; }
  friend bool operator==(const WorkloadReport&, const WorkloadReport&) = default;
};

/// ceil(dim / slots) ciphertexts, each costing one Hadamard multiplication and
/// ceil(log2(min(dim, slots))) rotations plus as many additions.
WorkloadReport workload_estimate(std::size_t dim, PackedKind kind, std::size_t slots = 4096);

/// Ratio of total operation counts, a / b. Operation counts only; this is not
/// a wall-clock speedup.
double operation_ratio(const WorkloadReport& a, const WorkloadReport& b);

std::string_view to_string(PackedKind kind);
PackedKind parse_packed_kind(std::string_view name);

}  // namespace biotrunc::he
