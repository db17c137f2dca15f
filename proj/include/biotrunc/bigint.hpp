// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

// Non-negative arbitrary-precision integers with the modular arithmetic the
// additive HE scheme needs. Limbs are 64-bit, least significant first.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "biotrunc/rng.hpp"

namespace biotrunc {

class BigUint {
 public:
  BigUint() = default;
  BigUint(std::uint64_t v);  // NOLINT(google-explicit-constructor)

  static BigUint from_limbs(std::vector<std::uint64_t> limbs);
  /// Accepts an optional "0x" prefix; rejects empty input and non-hex digits.
  static BigUint from_hex(std::string_view hex);
  static BigUint from_bytes_be(std::span<const std::uint8_t> bytes);

  /// Lowercase, no prefix, "0" for zero.
  std::string to_hex() const;
  std::string to_decimal() const;
  /// Minimal big-endian encoding (empty for zero), left-padded to `min_len`.
  std::vector<std::uint8_t> to_bytes_be(std::size_t min_len = 0) const;

  bool is_zero() const noexcept { return limbs_.empty(); }
  bool is_odd() const noexcept { return !limbs_.empty() && (limbs_[0] & 1u); }
  std::size_t bit_length() const noexcept;
  bool bit(std::size_t i) const noexcept;
  std::uint64_t low_u64() const noexcept { return limbs_.empty() ? 0 : limbs_[0]; }
  bool fits_u64() const noexcept { return limbs_.size() <= 1; }
  std::span<const std::uint64_t> limbs() const noexcept { return limbs_; }

  friend bool operator==(const BigUint&, const BigUint&) = default;
  friend std::strong_ordering operator<=>(const BigUint& a, const BigUint& b);

  friend BigUint operator+(const BigUint& a, const BigUint& b);
  /// Requires a >= b.
  friend BigUint operator-(const BigUint& a, const BigUint& b);
  friend BigUint operator*(const BigUint& a, const BigUint& b);
  friend BigUint operator/(const BigUint& a, const BigUint& b);
  friend BigUint operator%(const BigUint& a, const BigUint& b);
  friend BigUint operator<<(const BigUint& a, std::size_t shift);
  friend BigUint operator>>(const BigUint& a, std::size_t shift);

  BigUint& operator+=(const BigUint& b) { return *this = *this + b; }
  BigUint& operator-=(const BigUint& b) { return *this = *this - b; }
  BigUint& operator*=(const BigUint& b) { return *this = *this * b; }
  BigUint& operator%=(const BigUint& b) { return *this = *this % b; }

  /// Quotient and remainder; throws on division by zero.
  static std::pair<BigUint, BigUint> divmod(const BigUint& a, const BigUint& b);

 private:
  void trim() noexcept;
  std::vector<std::uint64_t> limbs_;
};

BigUint gcd(BigUint a, BigUint b);
BigUint lcm(const BigUint& a, const BigUint& b);
BigUint mod_mul(const BigUint& a, const BigUint& b, const BigUint& m);
BigUint mod_pow(const BigUint& base, const BigUint& exp, const BigUint& m);
/// Throws kCrypto when a is not invertible modulo m.
BigUint mod_inverse(const BigUint& a, const BigUint& m);

/// Uniform in [0, 2^bits).
BigUint random_bits(std::size_t bits, rng::Engine& engine);
/// Uniform in [0, bound), bound > 0.
BigUint random_below(const BigUint& bound, rng::Engine& engine);

/// Miller-Rabin with `rounds` random bases after trial division.
bool is_probable_prime(const BigUint& n, int rounds, rng::Engine& engine);
/// Random prime of exactly `bits` bits with the two top bits set.
BigUint random_prime(std::size_t bits, rng::Engine& engine, int rounds = 40);

/// Montgomery arithmetic modulo an odd m > 1. Residues are fixed-width limb
/// arrays in Montgomery form. Immutable, so safe to share across threads.
class Montgomery {
 public:
  static constexpr std::size_t kMaxLimbs = 128;
  using Residue = std::vector<std::uint64_t>;

  explicit Montgomery(const BigUint& modulus);

  const BigUint& modulus() const noexcept { return modulus_; }
  std::size_t limbs() const noexcept { return k_; }

  Residue to_mont(const BigUint& a) const;
  BigUint from_mont(const Residue& a) const;
  Residue one() const { return one_; }

  /// out = a * b * R^-1 mod m. `out` may alias an input.
  void mul(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out) const;
  void mul(const Residue& a, const Residue& b, Residue& out) const { mul(a.data(), b.data(), out.data()); }

  Residue pow(const Residue& base, const BigUint& exp) const;
  BigUint pow(const BigUint& base, const BigUint& exp) const;

 private:
  BigUint modulus_;
  std::vector<std::uint64_t> m_;
  std::size_t k_ = 0;
  std::uint64_t n0_ = 0;
  Residue r2_;
  Residue one_;
};

/// Precomputed powers of a fixed base for exponents below 2^exp_bits:
/// table[i][d] = base^(d * 2^(window * i)).
class FixedBasePow {
 public:
  FixedBasePow(std::shared_ptr<const Montgomery> mont, const BigUint& base, std::size_t exp_bits,
               unsigned window);

  std::size_t exp_bits() const noexcept { return exp_bits_; }
  /// base^e in Montgomery form; requires e < 2^exp_bits.
  Montgomery::Residue pow(const BigUint& e) const;

 private:
  std::shared_ptr<const Montgomery> mont_;
  std::size_t exp_bits_;
  unsigned window_;
  std::size_t windows_;
  std::vector<std::uint64_t> table_;
};

}  // namespace biotrunc
