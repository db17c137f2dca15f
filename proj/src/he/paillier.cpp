// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include <limits>
#include <random>

#include "biotrunc/error.hpp"
#include "biotrunc/he.hpp"

namespace biotrunc::he {

namespace {

constexpr std::uint64_t kKeygenTag = 0x6b657967656eULL;
constexpr std::uint64_t kNonceTag = 0x6e6f6e6365ULL;

unsigned table_window(std::size_t bits) {
  if (bits <= 1024) return 8;
  if (bits <= 2048) return 6;
  return 5;
}

// L_d(x) = (x - 1) / d.
BigUint l_function(const BigUint& x, const BigUint& d) { return (x - BigUint(1)) / d; }

void check_key(const PublicKey& pk, const Ciphertext& c) {
  require(c.key_fp == pk.fingerprint(), ErrorCode::kKeyMismatch,
          "ciphertext was produced under a different public key");
}

}  // namespace

std::uint64_t key_fingerprint(const BigUint& n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t byte : n.to_bytes_be()) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  }
  return h;
}

PublicKey::PublicKey(BigUint n, BigUint hs) : n_(std::move(n)), hs_(std::move(hs)) {
  require(n_.is_odd() && n_ >= BigUint(15), ErrorCode::kCrypto, "public modulus must be odd and >= 15");
  n2_ = n_ * n_;
  require(!hs_.is_zero() && hs_ < n2_ && gcd(hs_, n_) == BigUint(1), ErrorCode::kCrypto,
          "public randomizer base is not a unit modulo n^2");
  fingerprint_ = key_fingerprint(n_);
  mont_ = std::make_shared<const Montgomery>(n2_);
  table_ = std::make_shared<const FixedBasePow>(mont_, hs_, nonce_bits(), table_window(bits()));
}

SecretKey::SecretKey(const BigUint& p, const BigUint& q) : p_(p), q_(q) {
  require(p_ != q_, ErrorCode::kCrypto, "p and q must differ");
  require(p_.is_odd() && q_.is_odd() && p_ > BigUint(2) && q_ > BigUint(2), ErrorCode::kCrypto,
          "p and q must be odd primes");
  n_ = p_ * q_;
  n2_ = n_ * n_;
  const BigUint p1 = p_ - BigUint(1), q1 = q_ - BigUint(1);
  require(gcd(n_, p1 * q1) == BigUint(1), ErrorCode::kCrypto, "gcd(n, (p-1)(q-1)) must be 1");
  lambda_ = lcm(p1, q1);
  // With g = n + 1, L(g^lambda mod n^2) = lambda mod n.
  mu_ = mod_inverse(lambda_ % n_, n_);

  mont_p2_ = std::make_shared<const Montgomery>(p_ * p_);
  mont_q2_ = std::make_shared<const Montgomery>(q_ * q_);
  mont_n2_ = std::make_shared<const Montgomery>(n2_);
  const BigUint g = n_ + BigUint(1);
  hp_ = mod_inverse(l_function(mont_p2_->pow(g, p1), p_) % p_, p_);
  hq_ = mod_inverse(l_function(mont_q2_->pow(g, q1), q_) % q_, q_);
  q_inv_p_ = mod_inverse(q_ % p_, p_);
}

BigUint SecretKey::decrypt_crt(const BigUint& c) const {
  const BigUint mp = l_function(mont_p2_->pow(c, p_ - BigUint(1)), p_) * hp_ % p_;
  const BigUint mq = l_function(mont_q2_->pow(c, q_ - BigUint(1)), q_) * hq_ % q_;
  const BigUint diff = (mp + p_ - mq % p_) % p_;
  return mq + q_ * (diff * q_inv_p_ % p_);
}

BigUint SecretKey::decrypt_textbook(const BigUint& c) const {
  return l_function(mont_n2_->pow(c, lambda_), n_) * mu_ % n_;
}

namespace {

BigUint random_unit(const BigUint& n, rng::Engine& engine) {
  for (;;) {
    BigUint x = random_below(n, engine);
    if (!x.is_zero() && gcd(x, n) == BigUint(1)) return x;
  }
}

KeyPair assemble(const BigUint& p, const BigUint& q, rng::Engine& engine) {
  SecretKey sec(p, q);
  const BigUint n = p * q;
  const BigUint x = random_unit(n, engine);
  const BigUint h = n - x * x % n;
  const BigUint hs = mod_pow(h, n, n * n);
  return KeyPair{PublicKey(n, hs), std::move(sec)};
}

}  // namespace

KeyPair keygen(std::size_t bits, std::uint64_t seed) {
  require(bits >= 64 && bits % 2 == 0, ErrorCode::kInvalidArgument, "key size must be even and >= 64 bits");
  auto engine = rng::stream(seed, {kKeygenTag, bits});
  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const BigUint p = random_prime(bits / 2, engine);
    const BigUint q = random_prime(bits / 2, engine);
    if (p == q) continue;
    const BigUint n = p * q;
    if (n.bit_length() != bits) continue;
    if (gcd(n, (p - BigUint(1)) * (q - BigUint(1))) != BigUint(1)) continue;
    return assemble(p, q, engine);
  }
  fail(ErrorCode::kCrypto, "key generation failed after bounded attempts");
}

KeyPair key_from_primes(const BigUint& p, const BigUint& q, std::uint64_t seed) {
  auto engine = rng::stream(seed, {kKeygenTag, 0});
  rng::Engine check = rng::stream(seed, {kKeygenTag, 1});
  require(is_probable_prime(p, 40, check) && is_probable_prime(q, 40, check), ErrorCode::kCrypto,
          "key_from_primes needs two primes");
  return assemble(p, q, engine);
}

// ---------------------------------------------------------------------------

NonceSource NonceSource::deterministic(std::uint64_t seed) {
  return NonceSource(true, rng::derive_key(seed, {kNonceTag}));
}

NonceSource NonceSource::system() {
  std::random_device rd;
  const std::uint64_t key = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  return NonceSource(false, key);
}

NonceSource NonceSource::fork(std::uint64_t tag) const {
  if (!deterministic_) return system();
  return NonceSource(true, rng::derive_key(key_, {tag}));
}

BigUint NonceSource::draw(std::size_t bits) {
  if (deterministic_) {
    auto engine = rng::stream(key_, {counter_++});
    return random_bits(bits, engine);
  }
  thread_local std::random_device rd;
  std::vector<std::uint64_t> limbs((bits + 63) / 64);
  for (auto& l : limbs) l = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  if (bits % 64 != 0 && !limbs.empty()) limbs.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
  return BigUint::from_limbs(std::move(limbs));
}

// ---------------------------------------------------------------------------

Ciphertext encrypt(const PublicKey& pk, const BigUint& m, NonceSource& nonce) {
  require(m < pk.n(), ErrorCode::kInvalidArgument, "plaintext must lie in [0, n)");
  const Montgomery::Residue r = pk.randomizer().pow(nonce.draw(pk.nonce_bits()));
  const BigUint gm = BigUint(1) + m * pk.n();
  // Montgomery product of a Montgomery-form and a plain operand is plain.
  Montgomery::Residue plain(pk.mont().limbs(), 0);
  std::copy(gm.limbs().begin(), gm.limbs().end(), plain.begin());
  pk.mont().mul(r, plain, plain);
  return Ciphertext{BigUint::from_limbs(std::move(plain)), pk.fingerprint()};
}

Ciphertext encrypt_trivial(const PublicKey& pk, const BigUint& m) {
  require(m < pk.n(), ErrorCode::kInvalidArgument, "plaintext must lie in [0, n)");
  return Ciphertext{BigUint(1) + m * pk.n(), pk.fingerprint()};
}

BigUint decrypt(const KeyPair& key, const Ciphertext& c) {
  check_key(key.pub, c);
  return key.sec.decrypt_crt(c.value);
}

BigUint decrypt_reference(const KeyPair& key, const Ciphertext& c) {
  check_key(key.pub, c);
  return key.sec.decrypt_textbook(c.value);
}

Ciphertext add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  check_key(pk, a);
  check_key(pk, b);
  const Montgomery& mont = pk.mont();
  Montgomery::Residue am = mont.to_mont(a.value);
  Montgomery::Residue plain(mont.limbs(), 0);
  std::copy(b.value.limbs().begin(), b.value.limbs().end(), plain.begin());
  mont.mul(am, plain, plain);
  return Ciphertext{BigUint::from_limbs(std::move(plain)), pk.fingerprint()};
}

Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const BigUint& s) {
  check_key(pk, c);
  return Ciphertext{pk.mont().pow(c.value, s), pk.fingerprint()};
}

BigUint encode_signed(const PublicKey& pk, std::int64_t v) {
  const std::uint64_t mag = v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
  require((BigUint(mag) << 1) < pk.n(), ErrorCode::kInvalidArgument, "|value| must be below n/2");
  return v < 0 ? pk.n() - BigUint(mag) : BigUint(mag);
}

std::int64_t decode_signed(const PublicKey& pk, const BigUint& m) {
  require(m < pk.n(), ErrorCode::kInvalidArgument, "plaintext must lie in [0, n)");
  const bool negative = (m << 1) > pk.n();
  const BigUint mag = negative ? pk.n() - m : m;
  require(mag.fits_u64() && mag.low_u64() <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()),
          ErrorCode::kCrypto, "decoded value does not fit in 64 bits");
  const auto v = static_cast<std::int64_t>(mag.low_u64());
  return negative ? -v : v;
}

}  // namespace biotrunc::he
