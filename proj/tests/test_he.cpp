// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "biotrunc/error.hpp"
#include "biotrunc/he.hpp"
#include "biotrunc/match.hpp"
#include "biotrunc/reduce.hpp"
#include "biotrunc/rng.hpp"

namespace biotrunc::he {
namespace {

const KeyPair& test_key() {
  static const KeyPair key = keygen(512, 42);
  return key;
}

QuantizedVector random_levels(rng::Engine& engine, std::size_t dim, std::uint32_t q) {
  std::vector<std::uint32_t> v(dim);
  for (auto& x : v) x = static_cast<std::uint32_t>(engine() % q);
  return QuantizedVector(std::move(v), q);
}

BinaryVector random_bits_vec(rng::Engine& engine, std::size_t dim) {
  std::vector<std::uint8_t> v(dim);
  for (auto& x : v) x = static_cast<std::uint8_t>(engine() & 1u);
  return BinaryVector(std::move(v));
}

TEST(Keygen, DeterministicAndWellFormed) {
  const KeyPair a = keygen(64, 9);
  const KeyPair b = keygen(64, 9);
  EXPECT_EQ(a.pub, b.pub);
  EXPECT_EQ(a.sec.p(), b.sec.p());
  EXPECT_EQ(a.pub.bits(), 64u);
  EXPECT_NE(a.sec.p(), a.sec.q());
  EXPECT_EQ(a.sec.p() * a.sec.q(), a.pub.n());
  EXPECT_NE(keygen(64, 10).pub.n(), a.pub.n());
  EXPECT_EQ(a.pub.g(), a.pub.n() + BigUint(1));
  EXPECT_THROW(keygen(63, 1), Error);
  EXPECT_THROW(keygen(32, 1), Error);
}

TEST(Keygen, DefaultSizeRoundTrip) {
  const KeyPair key = keygen(kDefaultKeyBits, 2026);
  EXPECT_EQ(key.pub.bits(), 2048u);
  NonceSource nonce = NonceSource::deterministic(1);
  auto engine = rng::stream(2026, {});
  for (int i = 0; i < 1000; ++i) {
    const BigUint m = random_below(key.pub.n(), engine);
    ASSERT_EQ(decrypt(key, encrypt(key.pub, m, nonce)), m);
  }
}

TEST(Paillier, ToyModulusExhaustiveRoundTrip) {
  const KeyPair key = key_from_primes(BigUint(5), BigUint(7), 3);
  ASSERT_EQ(key.pub.n(), BigUint(35));
  NonceSource nonce = NonceSource::deterministic(1);
  for (std::uint64_t m = 0; m < 35; ++m) {
    const Ciphertext c = encrypt(key.pub, BigUint(m), nonce);
    EXPECT_LT(c.value, key.pub.n_squared());
    EXPECT_EQ(gcd(c.value, key.pub.n_squared()), BigUint(1));
    EXPECT_EQ(decrypt(key, c), BigUint(m));
    EXPECT_EQ(decrypt_reference(key, c), BigUint(m));
  }
  EXPECT_THROW(encrypt(key.pub, BigUint(35), nonce), Error);
  EXPECT_THROW(key_from_primes(BigUint(5), BigUint(9), 1), Error);
}

TEST(Paillier, RandomizedEncryption) {
  const KeyPair& key = test_key();
  NonceSource nonce = NonceSource::deterministic(5);
  const Ciphertext a = encrypt(key.pub, BigUint(0), nonce);
  const Ciphertext b = encrypt(key.pub, BigUint(0), nonce);
  EXPECT_NE(a.value, b.value);
  EXPECT_EQ(decrypt(key, a), BigUint(0));
  EXPECT_EQ(decrypt(key, b), BigUint(0));

  NonceSource sys = NonceSource::system();
  EXPECT_FALSE(sys.is_deterministic());
  EXPECT_NE(encrypt(key.pub, BigUint(7), sys).value, encrypt(key.pub, BigUint(7), sys).value);

  // Deterministic sources replay.
  NonceSource r1 = NonceSource::deterministic(8), r2 = NonceSource::deterministic(8);
  EXPECT_EQ(encrypt(key.pub, BigUint(3), r1), encrypt(key.pub, BigUint(3), r2));
}

TEST(Paillier, CrtMatchesTextbookDecryption) {
  const KeyPair& key = test_key();
  NonceSource nonce = NonceSource::deterministic(6);
  auto engine = rng::stream(6, {});
  for (int i = 0; i < 50; ++i) {
    const BigUint m = random_below(key.pub.n(), engine);
    const Ciphertext c = encrypt(key.pub, m, nonce);
    EXPECT_EQ(decrypt(key, c), m);
    EXPECT_EQ(decrypt_reference(key, c), m);
  }
}

TEST(Paillier, HomomorphicIdentities) {
  const KeyPair& key = test_key();
  const BigUint& n = key.pub.n();
  NonceSource nonce = NonceSource::deterministic(7);
  EXPECT_EQ(decrypt(key, add(key.pub, encrypt(key.pub, BigUint(2), nonce), encrypt(key.pub, BigUint(3), nonce))),
            BigUint(5));
  EXPECT_EQ(decrypt(key, scalar_mul(key.pub, encrypt(key.pub, BigUint(4), nonce), BigUint(3))), BigUint(12));

  auto engine = rng::stream(7, {});
  for (int i = 0; i < 100; ++i) {
    const BigUint a = random_below(n, engine), b = random_below(n, engine), s = random_below(n, engine);
    const Ciphertext ca = encrypt(key.pub, a, nonce), cb = encrypt(key.pub, b, nonce);
    EXPECT_EQ(decrypt(key, add(key.pub, ca, cb)), (a + b) % n);
    EXPECT_EQ(decrypt(key, scalar_mul(key.pub, ca, s)), a * s % n);
  }
  // n - 2 acts as -2.
  const Ciphertext c = scalar_mul(key.pub, encrypt(key.pub, BigUint(21), nonce), n - BigUint(2));
  EXPECT_EQ(decode_signed(key.pub, decrypt(key, c)), -42);
}

TEST(Paillier, MixedKeysRejected) {
  const KeyPair& key = test_key();
  const KeyPair other = keygen(512, 43);
  NonceSource nonce = NonceSource::deterministic(1);
  const Ciphertext a = encrypt(key.pub, BigUint(1), nonce);
  const Ciphertext b = encrypt(other.pub, BigUint(1), nonce);
  try {
    add(key.pub, a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kKeyMismatch);
  }
  EXPECT_THROW(decrypt(other, a), Error);
}

TEST(Paillier, SignedEncoding) {
  const KeyPair& key = test_key();
  for (std::int64_t v : std::initializer_list<std::int64_t>{0, 1, -1, 123456789, -987654321, INT64_MAX, INT64_MIN + 1}) {
    const BigUint m = encode_signed(key.pub, v);
    EXPECT_LT(m, key.pub.n());
    EXPECT_EQ(decode_signed(key.pub, m), v);
  }
  EXPECT_EQ(encode_signed(key.pub, -3), key.pub.n() - BigUint(3));
  const KeyPair toy = key_from_primes(BigUint(5), BigUint(7), 1);
  EXPECT_EQ(decode_signed(toy.pub, BigUint(17)), 17);
  EXPECT_EQ(decode_signed(toy.pub, BigUint(18)), -17);
  EXPECT_THROW(encode_signed(toy.pub, 18), Error);
}

TEST(Enrollment, NormSquared) {
  const KeyPair& key = test_key();
  NonceSource nonce = NonceSource::deterministic(2);
  const auto zero = enroll_encrypted(key.pub, QuantizedVector(std::vector<std::uint32_t>(16, 0), 4), nonce);
  EXPECT_EQ(decrypt(key, zero.norm_sq), BigUint(0));

  auto engine = rng::stream(2, {});
  const BinaryVector bits = random_bits_vec(engine, 64);
  const auto eb = enroll_encrypted(key.pub, bits, nonce, true);
  EXPECT_EQ(decrypt(key, eb.norm_sq), BigUint(bits.weight()));
  EXPECT_FALSE(eb.has_squares());
  EXPECT_TRUE(eb.supports_subsets());

  const QuantizedVector y = random_levels(engine, 64, 4);
  std::uint64_t expect = 0;
  for (auto v : y.levels()) expect += std::uint64_t{v} * v;
  const auto ey = enroll_encrypted(key.pub, y, nonce, true, 2);
  EXPECT_EQ(decrypt(key, ey.norm_sq), BigUint(expect));
  ASSERT_EQ(ey.squares.size(), 64u);
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_EQ(decrypt(key, ey.elements[i]), BigUint(y[i]));
    EXPECT_EQ(decrypt(key, ey.squares[i]), BigUint(std::uint64_t{y[i]} * y[i]));
  }
  EXPECT_THROW(enroll_encrypted(key.pub, FeatureVector({0.1, 0.2}), nonce), Error);
}

TEST(Enrollment, ThreadCountDoesNotChangeCiphertexts) {
  const KeyPair& key = test_key();
  auto engine = rng::stream(3, {});
  const QuantizedVector y = random_levels(engine, 40, 16);
  NonceSource a = NonceSource::deterministic(4), b = NonceSource::deterministic(4);
  const auto e1 = enroll_encrypted(key.pub, y, a, true, 1);
  const auto e2 = enroll_encrypted(key.pub, y, b, true, 3);
  EXPECT_EQ(e1.elements, e2.elements);
  EXPECT_EQ(e1.squares, e2.squares);
  EXPECT_EQ(e1.norm_sq, e2.norm_sq);
}

TEST(EncryptedSed, HandExamples) {
  const KeyPair& key = test_key();
  NonceSource nonce = NonceSource::deterministic(3);
  const BinaryVector x({1, 0, 1});
  const BinaryVector y({0, 0, 1});
  const auto ey = enroll_encrypted(key.pub, y, nonce);
  EXPECT_EQ(decrypt_sed(key, encrypted_sed(key.pub, x, ey)), 1u);
  EXPECT_EQ(decrypt_sed(key, encrypted_sed(key.pub, y, ey)), 0u);
}

TEST(EncryptedSed, MatchesPlaintextForRandomPairs) {
  const KeyPair& key = test_key();
  NonceSource nonce = NonceSource::deterministic(11);
  auto engine = rng::stream(11, {});
  for (std::uint32_t q : {2u, 4u, 16u, 256u}) {
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t dim = 64;
      Payload x, y;
      if (q == 2) {
        x = random_bits_vec(engine, dim);
        y = random_bits_vec(engine, dim);
      } else {
        x = random_levels(engine, dim, q);
        y = random_levels(engine, dim, q);
      }
      const auto ey = enroll_encrypted(key.pub, y, nonce, true);
      EXPECT_EQ(decrypt_sed(key, encrypted_sed(key.pub, x, ey)), match::sed(x, y).value);
      EXPECT_EQ(decrypt_sed(key, encrypted_sed(key.pub, y, ey)), 0u);
    }
  }
}

TEST(EncryptedSed, SelectionEqualsPlaintextOnRestrictedVectors) {
  const KeyPair& key = test_key();
  NonceSource nonce = NonceSource::deterministic(12);
  auto engine = rng::stream(12, {});
  const std::size_t dim = 64;
  for (std::uint32_t q : {2u, 16u}) {
    Payload x, y;
    if (q == 2) {
      x = random_bits_vec(engine, dim);
      y = random_bits_vec(engine, dim);
    } else {
      x = random_levels(engine, dim, q);
      y = random_levels(engine, dim, q);
    }
    const auto ey = enroll_encrypted(key.pub, y, nonce, true);
    std::vector<std::vector<std::size_t>> selections;
    for (std::size_t k : {2u, 4u, 8u}) {
      for (std::size_t i = 1; i <= k; ++i) selections.push_back(reduce::fraction_indices(dim, k, i));
      selections.push_back(reduce::interleave_indices(dim, k));
    }
    for (const auto& sel : selections) {
      const Payload xs = reduce::select(x, sel), ys = reduce::select(y, sel);
      const auto expected = static_cast<std::uint64_t>(match::sed(xs, ys).value);
      EXPECT_EQ(decrypt_sed(key, encrypted_sed(key.pub, x, ey, sel)), expected);
      EXPECT_EQ(decrypt_sed(key, encrypted_sed(key.pub, xs, ey, sel)), expected);
    }
  }
}

TEST(EncryptedSed, Rejections) {
  const KeyPair& key = test_key();
  NonceSource nonce = NonceSource::deterministic(13);
  const QuantizedVector y(std::vector<std::uint32_t>{1, 2, 3, 0}, 4);
  const auto plain = enroll_encrypted(key.pub, y, nonce, false);
  const std::vector<std::size_t> sel{0, 1};
  auto code = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code([&] { encrypted_sed(key.pub, y, plain, sel); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code([&] { encrypted_sed(key.pub, BinaryVector({1, 0, 1, 0}), plain); }), ErrorCode::kKindMismatch);
  EXPECT_EQ(code([&] { encrypted_sed(key.pub, QuantizedVector({1, 2, 3, 0}, 8), plain); }),
            ErrorCode::kKindMismatch);
  EXPECT_EQ(code([&] { encrypted_sed(key.pub, QuantizedVector({1, 2, 3}, 4), plain); }),
            ErrorCode::kDimensionMismatch);
  const auto squares = enroll_encrypted(key.pub, y, nonce, true);
  const std::vector<std::size_t> bad{0, 9};
  EXPECT_EQ(code([&] { encrypted_sed(key.pub, y, squares, bad); }), ErrorCode::kInvalidArgument);
  const KeyPair other = keygen(512, 99);
  EXPECT_EQ(code([&] { encrypted_sed(other.pub, y, plain); }), ErrorCode::kKeyMismatch);
  // Identity selection needs no squares.
  const std::vector<std::size_t> all{0, 1, 2, 3};
  EXPECT_EQ(decrypt_sed(key, encrypted_sed(key.pub, y, plain, all)), 0u);
}

TEST(Workload, ModelArithmetic) {
  const auto r512 = workload_estimate(512, PackedKind::kBinary, 4096);
  EXPECT_EQ(r512.ciphertexts, 1u);
  EXPECT_EQ(r512.hadamard_mults, 1u);
  EXPECT_EQ(r512.rotations, 9u);
  EXPECT_EQ(r512.additions, 9u);
  EXPECT_EQ(workload_estimate(1536, PackedKind::kFloat, 4096).rotations, 11u);
  const auto r1 = workload_estimate(1, PackedKind::kFloat, 4096);
  EXPECT_EQ(r1.ciphertexts, 1u);
  EXPECT_EQ(r1.rotations, 0u);
  const auto big = workload_estimate(8192, PackedKind::kFloat, 4096);
  EXPECT_EQ(big.ciphertexts, 2u);
  EXPECT_EQ(big.rotations, 24u);
  EXPECT_THROW(workload_estimate(0, PackedKind::kFloat, 4096), Error);
  EXPECT_THROW(workload_estimate(8, PackedKind::kFloat, 0), Error);
}

TEST(Workload, MonotoneInDimension) {
  for (std::size_t slots : {1u, 7u, 64u, 4096u}) {
    WorkloadReport prev = workload_estimate(1, PackedKind::kInt, slots);
    for (std::size_t dim = 2; dim <= 10000; dim += 37) {
      const WorkloadReport cur = workload_estimate(dim, PackedKind::kInt, slots);
      EXPECT_GE(cur.ciphertexts, prev.ciphertexts);
      EXPECT_GE(cur.rotations, prev.rotations);
      EXPECT_GE(cur.total_ops(), prev.total_ops());
      prev = cur;
    }
  }
}

TEST(Workload, KindNames) {
  EXPECT_EQ(parse_packed_kind("binary_packed"), PackedKind::kBinary);
  EXPECT_EQ(parse_packed_kind(to_string(PackedKind::kFloat)), PackedKind::kFloat);
  EXPECT_THROW(parse_packed_kind("double"), Error);
}

}  // namespace
}  // namespace biotrunc::he
