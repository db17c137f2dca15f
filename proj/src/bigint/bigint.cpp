// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include "biotrunc/bigint.hpp"

#include <algorithm>
#include <array>
#include <bit>

#include "biotrunc/error.hpp"

namespace biotrunc {

namespace {

using u128 = unsigned __int128;

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Primes below 1000 for trial division.
const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    std::vector<std::uint32_t> out;
    for (std::uint32_t n = 2; n < 1000; ++n) {
      bool prime = true;
      for (std::uint32_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
          prime = false;
          break;
        }
      }
      if (prime) out.push_back(n);
    }
    return out;
  }();
  return primes;
}

std::uint64_t mod_small(const BigUint& a, std::uint64_t m) {
  u128 r = 0;
  const auto limbs = a.limbs();
  for (std::size_t i = limbs.size(); i-- > 0;) r = ((r << 64) | limbs[i]) % m;
  return static_cast<std::uint64_t>(r);
}

}  // namespace

BigUint::BigUint(std::uint64_t v) {
  if (v != 0) limbs_.push_back(v);
}

BigUint BigUint::from_limbs(std::vector<std::uint64_t> limbs) {
  BigUint out;
  out.limbs_ = std::move(limbs);
  out.trim();
  return out;
}

void BigUint::trim() noexcept {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint BigUint::from_hex(std::string_view hex) {
  if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
  require(!hex.empty(), ErrorCode::kInvalidArgument, "empty hex integer");
  BigUint out;
  out.limbs_.assign((hex.size() + 15) / 16, 0);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const int v = hex_value(hex[hex.size() - 1 - i]);
    require(v >= 0, ErrorCode::kInvalidArgument, "invalid hex digit in '" + std::string(hex) + "'");
    out.limbs_[i / 16] |= static_cast<std::uint64_t>(v) << (4 * (i % 16));
  }
  out.trim();
  return out;
}

BigUint BigUint::from_bytes_be(std::span<const std::uint8_t> bytes) {
  BigUint out;
  out.limbs_.assign((bytes.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    out.limbs_[i / 8] |= static_cast<std::uint64_t>(bytes[bytes.size() - 1 - i]) << (8 * (i % 8));
  }
  out.trim();
  return out;
}

std::string BigUint::to_hex() const {
  if (is_zero()) return "0";
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    for (int nib = 15; nib >= 0; --nib) {
      const unsigned d = (limbs_[i] >> (4 * nib)) & 0xf;
      if (out.empty() && d == 0) continue;
      out.push_back(kDigits[d]);
    }
  }
  return out;
}

std::string BigUint::to_decimal() const {
  if (is_zero()) return "0";
  constexpr std::uint64_t kChunk = 10000000000000000000ULL;  // 10^19
  std::vector<std::uint64_t> parts;
  std::vector<std::uint64_t> cur = limbs_;
  while (!cur.empty()) {
    u128 r = 0;
    for (std::size_t i = cur.size(); i-- > 0;) {
      const u128 acc = (r << 64) | cur[i];
      cur[i] = static_cast<std::uint64_t>(acc / kChunk);
      r = acc % kChunk;
    }
    while (!cur.empty() && cur.back() == 0) cur.pop_back();
    parts.push_back(static_cast<std::uint64_t>(r));
  }
  std::string out = std::to_string(parts.back());
  for (std::size_t i = parts.size() - 1; i-- > 0;) {
    std::string chunk = std::to_string(parts[i]);
    out.append(19 - chunk.size(), '0');
    out += chunk;
  }
  return out;
}

std::vector<std::uint8_t> BigUint::to_bytes_be(std::size_t min_len) const {
  const std::size_t len = std::max(min_len, (bit_length() + 7) / 8);
  std::vector<std::uint8_t> out(len, 0);
  for (std::size_t i = 0; i < limbs_.size() * 8; ++i) {
    const auto byte = static_cast<std::uint8_t>(limbs_[i / 8] >> (8 * (i % 8)));
    if (i < len) out[len - 1 - i] = byte;
  }
  return out;
}

std::size_t BigUint::bit_length() const noexcept {
  if (limbs_.empty()) return 0;
  return 64 * limbs_.size() - static_cast<std::size_t>(std::countl_zero(limbs_.back()));
}

bool BigUint::bit(std::size_t i) const noexcept {
  const std::size_t limb = i / 64;
  return limb < limbs_.size() && ((limbs_[limb] >> (i % 64)) & 1u);
}

std::strong_ordering operator<=>(const BigUint& a, const BigUint& b) {
  if (a.limbs_.size() != b.limbs_.size()) return a.limbs_.size() <=> b.limbs_.size();
  for (std::size_t i = a.limbs_.size(); i-- > 0;) {
    if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] <=> b.limbs_[i];
  }
  return std::strong_ordering::equal;
}

BigUint operator+(const BigUint& a, const BigUint& b) {
  const auto& longer = a.limbs_.size() >= b.limbs_.size() ? a.limbs_ : b.limbs_;
  const auto& shorter = a.limbs_.size() >= b.limbs_.size() ? b.limbs_ : a.limbs_;
  BigUint out;
  out.limbs_.resize(longer.size() + 1);
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < longer.size(); ++i) {
    const u128 s = static_cast<u128>(longer[i]) + (i < shorter.size() ? shorter[i] : 0) + carry;
    out.limbs_[i] = static_cast<std::uint64_t>(s);
    carry = static_cast<std::uint64_t>(s >> 64);
  }
  out.limbs_[longer.size()] = carry;
  out.trim();
  return out;
}

BigUint operator-(const BigUint& a, const BigUint& b) {
  require(a >= b, ErrorCode::kInvalidArgument, "BigUint subtraction would underflow");
  BigUint out;
  out.limbs_.resize(a.limbs_.size());
  std::uint64_t borrow = 0;
  for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
    const std::uint64_t bi = i < b.limbs_.size() ? b.limbs_[i] : 0;
    const std::uint64_t t = a.limbs_[i] - bi;
    const std::uint64_t b1 = a.limbs_[i] < bi;
    out.limbs_[i] = t - borrow;
    borrow = b1 | (t < borrow);
  }
  out.trim();
  return out;
}

BigUint operator*(const BigUint& a, const BigUint& b) {
  if (a.is_zero() || b.is_zero()) return {};
  BigUint out;
  out.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
  for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
    std::uint64_t carry = 0;
    for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
      const u128 t = static_cast<u128>(a.limbs_[i]) * b.limbs_[j] + out.limbs_[i + j] + carry;
      out.limbs_[i + j] = static_cast<std::uint64_t>(t);
      carry = static_cast<std::uint64_t>(t >> 64);
    }
    out.limbs_[i + b.limbs_.size()] = carry;
  }
  out.trim();
  return out;
}

BigUint operator<<(const BigUint& a, std::size_t shift) {
  if (a.is_zero()) return {};
  const std::size_t limbs = shift / 64;
  const unsigned bits = shift % 64;
  BigUint out;
  out.limbs_.assign(a.limbs_.size() + limbs + 1, 0);
  for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
    out.limbs_[i + limbs] |= a.limbs_[i] << bits;
    if (bits != 0) out.limbs_[i + limbs + 1] |= a.limbs_[i] >> (64 - bits);
  }
  out.trim();
  return out;
}

BigUint operator>>(const BigUint& a, std::size_t shift) {
  const std::size_t limbs = shift / 64;
  if (limbs >= a.limbs_.size()) return {};
  const unsigned bits = shift % 64;
  BigUint out;
  out.limbs_.assign(a.limbs_.size() - limbs, 0);
  for (std::size_t i = 0; i < out.limbs_.size(); ++i) {
    out.limbs_[i] = a.limbs_[i + limbs] >> bits;
    if (bits != 0 && i + limbs + 1 < a.limbs_.size()) out.limbs_[i] |= a.limbs_[i + limbs + 1] << (64 - bits);
  }
  out.trim();
  return out;
}

// Knuth, TAOCP vol. 2, algorithm D.
std::pair<BigUint, BigUint> BigUint::divmod(const BigUint& a, const BigUint& b) {
  require(!b.is_zero(), ErrorCode::kInvalidArgument, "BigUint division by zero");
  if (a < b) return {BigUint{}, a};
  if (b.limbs_.size() == 1) {
    const std::uint64_t d = b.limbs_[0];
    BigUint q;
    q.limbs_.resize(a.limbs_.size());
    u128 r = 0;
    for (std::size_t i = a.limbs_.size(); i-- > 0;) {
      const u128 acc = (r << 64) | a.limbs_[i];
      q.limbs_[i] = static_cast<std::uint64_t>(acc / d);
      r = acc % d;
    }
    q.trim();
    return {q, BigUint(static_cast<std::uint64_t>(r))};
  }

  const std::size_t n = b.limbs_.size();
  const std::size_t m = a.limbs_.size() - n;
  const int s = std::countl_zero(b.limbs_.back());
  std::vector<std::uint64_t> vn(n), un(a.limbs_.size() + 1);
  for (std::size_t i = n; i-- > 0;) {
    vn[i] = b.limbs_[i] << s;
    if (s != 0 && i > 0) vn[i] |= b.limbs_[i - 1] >> (64 - s);
  }
  un[a.limbs_.size()] = s != 0 ? a.limbs_.back() >> (64 - s) : 0;
  for (std::size_t i = a.limbs_.size(); i-- > 0;) {
    un[i] = a.limbs_[i] << s;
    if (s != 0 && i > 0) un[i] |= a.limbs_[i - 1] >> (64 - s);
  }

  BigUint q;
  q.limbs_.assign(m + 1, 0);
  const u128 base = static_cast<u128>(1) << 64;
  for (std::size_t j = m + 1; j-- > 0;) {
    const u128 num = (static_cast<u128>(un[j + n]) << 64) | un[j + n - 1];
    u128 qhat = num / vn[n - 1];
    u128 rhat = num % vn[n - 1];
    while (qhat >= base || qhat * vn[n - 2] > ((rhat << 64) | un[j + n - 2])) {
      --qhat;
      rhat += vn[n - 1];
      if (rhat >= base) break;
    }
    std::uint64_t carry = 0, borrow = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const u128 p = qhat * vn[i] + carry;
      carry = static_cast<std::uint64_t>(p >> 64);
      const auto plo = static_cast<std::uint64_t>(p);
      const std::uint64_t t = un[i + j] - plo;
      const std::uint64_t b1 = un[i + j] < plo;
      un[i + j] = t - borrow;
      borrow = b1 | (t < borrow);
    }
    const std::uint64_t t = un[j + n] - carry;
    const std::uint64_t b1 = un[j + n] < carry;
    un[j + n] = t - borrow;
    const bool negative = b1 | (t < borrow);

    auto qj = static_cast<std::uint64_t>(qhat);
    if (negative) {
      --qj;
      std::uint64_t c = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const u128 sum = static_cast<u128>(un[i + j]) + vn[i] + c;
        un[i + j] = static_cast<std::uint64_t>(sum);
        c = static_cast<std::uint64_t>(sum >> 64);
      }
      un[j + n] += c;
    }
    q.limbs_[j] = qj;
  }
  q.trim();

  BigUint r;
  r.limbs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.limbs_[i] = un[i] >> s;
    if (s != 0) r.limbs_[i] |= un[i + 1] << (64 - s);
  }
  r.trim();
  return {q, r};
}

BigUint operator/(const BigUint& a, const BigUint& b) { return BigUint::divmod(a, b).first; }
BigUint operator%(const BigUint& a, const BigUint& b) { return BigUint::divmod(a, b).second; }

BigUint gcd(BigUint a, BigUint b) {
  while (!b.is_zero()) {
    BigUint r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

BigUint lcm(const BigUint& a, const BigUint& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return a / gcd(a, b) * b;
}

BigUint mod_mul(const BigUint& a, const BigUint& b, const BigUint& m) { return a * b % m; }

BigUint mod_pow(const BigUint& base, const BigUint& exp, const BigUint& m) {
  require(!m.is_zero(), ErrorCode::kInvalidArgument, "modulus must be positive");
  if (m == BigUint(1)) return {};
  if (m.is_odd()) return Montgomery(m).pow(base, exp);
  BigUint result(1);
  BigUint b = base % m;
  for (std::size_t i = exp.bit_length(); i-- > 0;) {
    result = result * result % m;
    if (exp.bit(i)) result = result * b % m;
  }
  return result;
}

BigUint mod_inverse(const BigUint& a, const BigUint& m) {
  require(m > BigUint(1), ErrorCode::kInvalidArgument, "modulus must exceed 1");
  BigUint r0 = m, r1 = a % m;
  BigUint t0, t1(1);
  while (!r1.is_zero()) {
    auto [q, r] = BigUint::divmod(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    const BigUint qt = q * t1 % m;
    BigUint t2 = (t0 + m - qt) % m;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  require(r0 == BigUint(1), ErrorCode::kCrypto, "value is not invertible modulo m");
  return t0;
}

BigUint random_bits(std::size_t bits, rng::Engine& engine) {
  std::vector<std::uint64_t> limbs((bits + 63) / 64);
  for (auto& l : limbs) l = engine();
  if (bits % 64 != 0) limbs.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
  return BigUint::from_limbs(std::move(limbs));
}

BigUint random_below(const BigUint& bound, rng::Engine& engine) {
  require(!bound.is_zero(), ErrorCode::kInvalidArgument, "random_below needs a positive bound");
  const std::size_t bits = bound.bit_length();
  for (;;) {
    BigUint r = random_bits(bits, engine);
    if (r < bound) return r;
  }
}

bool is_probable_prime(const BigUint& n, int rounds, rng::Engine& engine) {
  if (n < BigUint(2)) return false;
  for (std::uint32_t p : small_primes()) {
    if (n == BigUint(p)) return true;
    if (mod_small(n, p) == 0) return false;
  }
  const BigUint n_minus_1 = n - BigUint(1);
  std::size_t s = 0;
  while (!n_minus_1.bit(s)) ++s;
  const BigUint d = n_minus_1 >> s;

  const Montgomery mont(n);
  const Montgomery::Residue one = mont.one();
  const Montgomery::Residue minus_one = mont.to_mont(n_minus_1);
  const BigUint span = n - BigUint(3);
  for (int round = 0; round < rounds; ++round) {
    const BigUint a = random_below(span, engine) + BigUint(2);
    Montgomery::Residue x = mont.pow(mont.to_mont(a), d);
    if (x == one || x == minus_one) continue;
    bool witness = true;
    for (std::size_t r = 1; r < s; ++r) {
      mont.mul(x, x, x);
      if (x == minus_one) {
        witness = false;
        break;
      }
      if (x == one) break;
    }
    if (witness) return false;
  }
  return true;
}

BigUint random_prime(std::size_t bits, rng::Engine& engine, int rounds) {
  require(bits >= 3, ErrorCode::kInvalidArgument, "prime size must be at least 3 bits");
  constexpr int kMaxAttempts = 1 << 20;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<std::uint64_t> limbs((bits + 63) / 64);
    for (auto& l : limbs) l = engine();
    if (bits % 64 != 0) limbs.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
    limbs[(bits - 1) / 64] |= std::uint64_t{1} << ((bits - 1) % 64);
    limbs[(bits - 2) / 64] |= std::uint64_t{1} << ((bits - 2) % 64);
    limbs[0] |= 1;
    const BigUint c = BigUint::from_limbs(std::move(limbs));
    if (is_probable_prime(c, rounds, engine)) return c;
  }
  fail(ErrorCode::kCrypto, "prime generation failed after bounded attempts");
}

// ---------------------------------------------------------------------------

Montgomery::Montgomery(const BigUint& modulus) : modulus_(modulus) {
  require(modulus.is_odd() && modulus > BigUint(1), ErrorCode::kInvalidArgument,
          "Montgomery modulus must be odd and > 1");
  m_.assign(modulus.limbs().begin(), modulus.limbs().end());
  k_ = m_.size();
  require(k_ <= kMaxLimbs, ErrorCode::kInvalidArgument, "modulus too large");
  // Newton iteration for m^-1 mod 2^64.
  std::uint64_t inv = m_[0];
  for (int i = 0; i < 6; ++i) inv *= 2 - m_[0] * inv;
  n0_ = ~inv + 1;
  const BigUint r2 = (BigUint(1) << (128 * k_)) % modulus_;
  r2_.assign(k_, 0);
  std::copy(r2.limbs().begin(), r2.limbs().end(), r2_.begin());
  const BigUint r1 = (BigUint(1) << (64 * k_)) % modulus_;
  one_.assign(k_, 0);
  std::copy(r1.limbs().begin(), r1.limbs().end(), one_.begin());
}

void Montgomery::mul(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out) const {
  std::array<std::uint64_t, kMaxLimbs + 2> t{};
  const std::size_t k = k_;
  const std::uint64_t* m = m_.data();
  for (std::size_t i = 0; i < k; ++i) {
    std::uint64_t c = 0;
    const std::uint64_t bi = b[i];
    for (std::size_t j = 0; j < k; ++j) {
      const u128 s = static_cast<u128>(a[j]) * bi + t[j] + c;
      t[j] = static_cast<std::uint64_t>(s);
      c = static_cast<std::uint64_t>(s >> 64);
    }
    u128 s = static_cast<u128>(t[k]) + c;
    t[k] = static_cast<std::uint64_t>(s);
    t[k + 1] = static_cast<std::uint64_t>(s >> 64);

    const std::uint64_t mq = t[0] * n0_;
    s = static_cast<u128>(mq) * m[0] + t[0];
    c = static_cast<std::uint64_t>(s >> 64);
    for (std::size_t j = 1; j < k; ++j) {
      s = static_cast<u128>(mq) * m[j] + t[j] + c;
      t[j - 1] = static_cast<std::uint64_t>(s);
      c = static_cast<std::uint64_t>(s >> 64);
    }
    s = static_cast<u128>(t[k]) + c;
    t[k - 1] = static_cast<std::uint64_t>(s);
    t[k] = t[k + 1] + static_cast<std::uint64_t>(s >> 64);
  }
  // Conditional final subtraction.
  bool ge = t[k] != 0;
  if (!ge) {
    ge = true;
    for (std::size_t i = k; i-- > 0;) {
      if (t[i] != m[i]) {
        ge = t[i] > m[i];
        break;
      }
    }
  }
  if (ge) {
    std::uint64_t borrow = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t d = t[i] - m[i];
      const std::uint64_t b1 = t[i] < m[i];
      out[i] = d - borrow;
      borrow = b1 | (d < borrow);
    }
  } else {
    std::copy(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k), out);
  }
}

Montgomery::Residue Montgomery::to_mont(const BigUint& a) const {
  const BigUint reduced = a < modulus_ ? a : a % modulus_;
  Residue x(k_, 0);
  std::copy(reduced.limbs().begin(), reduced.limbs().end(), x.begin());
  mul(x.data(), r2_.data(), x.data());
  return x;
}

BigUint Montgomery::from_mont(const Residue& a) const {
  Residue unit(k_, 0);
  unit[0] = 1;
  Residue out(k_);
  mul(a.data(), unit.data(), out.data());
  return BigUint::from_limbs(std::move(out));
}

Montgomery::Residue Montgomery::pow(const Residue& base, const BigUint& exp) const {
  const std::size_t bits = exp.bit_length();
  if (bits == 0) return one_;
  // Sliding window over odd powers.
  const unsigned w = bits > 512 ? 5 : bits > 128 ? 4 : bits > 24 ? 3 : 1;
  std::vector<Residue> odd(std::size_t{1} << (w - 1), Residue(k_));
  odd[0] = base;
  if (odd.size() > 1) {
    Residue sq(k_);
    mul(base, base, sq);
    for (std::size_t i = 1; i < odd.size(); ++i) mul(odd[i - 1], sq, odd[i]);
  }
  Residue acc = one_;
  bool started = false;
  std::size_t i = bits;
  while (i > 0) {
    if (!exp.bit(i - 1)) {
      if (started) mul(acc, acc, acc);
      --i;
      continue;
    }
    // Longest window ending in a set bit, at most w bits.
    std::size_t len = std::min<std::size_t>(w, i);
    while (!exp.bit(i - len)) --len;
    unsigned value = 0;
    for (std::size_t b = 0; b < len; ++b) value = (value << 1) | (exp.bit(i - 1 - b) ? 1u : 0u);
    if (started) {
      for (std::size_t b = 0; b < len; ++b) mul(acc, acc, acc);
      mul(acc, odd[value >> 1], acc);
    } else {
      acc = odd[value >> 1];
      started = true;
    }
    i -= len;
  }
  return acc;
}

BigUint Montgomery::pow(const BigUint& base, const BigUint& exp) const {
  return from_mont(pow(to_mont(base), exp));
}

// ---------------------------------------------------------------------------

FixedBasePow::FixedBasePow(std::shared_ptr<const Montgomery> mont, const BigUint& base,
                           std::size_t exp_bits, unsigned window)
    : mont_(std::move(mont)), exp_bits_(exp_bits), window_(window) {
  require(mont_ != nullptr && window_ >= 1 && window_ <= 16, ErrorCode::kInvalidArgument,
          "invalid fixed-base table parameters");
  windows_ = (exp_bits_ + window_ - 1) / window_;
  const std::size_t k = mont_->limbs();
  const std::size_t digits = std::size_t{1} << window_;
  table_.assign(windows_ * digits * k, 0);
  Montgomery::Residue g = mont_->to_mont(base);
  for (std::size_t i = 0; i < windows_; ++i) {
    std::uint64_t* row = table_.data() + i * digits * k;
    const Montgomery::Residue one = mont_->one();
    std::copy(one.begin(), one.end(), row);
    std::copy(g.begin(), g.end(), row + k);
    for (std::size_t d = 2; d < digits; ++d) mont_->mul(row + (d - 1) * k, g.data(), row + d * k);
    // Next window's generator: g^(2^window).
    mont_->mul(row + (digits - 1) * k, g.data(), g.data());
  }
}

Montgomery::Residue FixedBasePow::pow(const BigUint& e) const {
  require(e.bit_length() <= exp_bits_, ErrorCode::kInvalidArgument, "exponent exceeds fixed-base table");
  const std::size_t k = mont_->limbs();
  const std::size_t digits = std::size_t{1} << window_;
  Montgomery::Residue acc = mont_->one();
  for (std::size_t i = 0; i < windows_; ++i) {
    unsigned d = 0;
    for (unsigned b = 0; b < window_; ++b) d |= (e.bit(i * window_ + b) ? 1u : 0u) << b;
    if (d != 0) mont_->mul(acc.data(), table_.data() + (i * digits + d) * k, acc.data());
  }
  return acc;
}

}  // namespace biotrunc
