// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include <numeric>

#include "biotrunc/error.hpp"
#include "biotrunc/he.hpp"
#include "biotrunc/parallel.hpp"

namespace biotrunc::he {

namespace {

void check_key(const PublicKey& pk, std::uint64_t fp) {
  require(fp == pk.fingerprint(), ErrorCode::kKeyMismatch,
          "encrypted template was produced under a different public key");
}

bool is_identity(std::span<const std::size_t> sel, std::size_t dim) {
  if (sel.size() != dim) return false;
  for (std::size_t i = 0; i < dim; ++i) {
    if (sel[i] != i) return false;
  }
  return true;
}

}  // namespace

EncryptedTemplate enroll_encrypted(const PublicKey& pk, const Payload& y, NonceSource& nonce,
                                   bool with_squares, unsigned threads) {
  const VectorKind kind = kind_of(y);
  require(kind != VectorKind::kReal, ErrorCode::kKindMismatch,
          "encrypted enrollment needs a quantized or binary template");
  const std::vector<std::uint32_t> levels = integer_elements(y);
  const std::uint32_t q = levels_of(y);
  for (std::uint32_t v : levels) {
    require(v < q, ErrorCode::kInvalidArgument, "template element outside [0, q-1]");
  }
  const std::size_t dim = levels.size();
  const bool squares = with_squares && kind != VectorKind::kBinary;

  EncryptedTemplate out;
  out.dim = dim;
  out.q = q;
  out.kind = kind;
  out.key_fp = pk.fingerprint();
  out.elements.resize(dim);
  if (squares) out.squares.resize(dim);

  const NonceSource base = nonce.split();
  parallel_for(dim, threads, [&](std::size_t i) {
    NonceSource local = base.fork(i);
    out.elements[i] = encrypt(pk, BigUint(levels[i]), local);
    if (squares) {
      const std::uint64_t v = levels[i];
      out.squares[i] = encrypt(pk, BigUint(v * v), local);
    }
  });
  std::uint64_t norm = 0;
  for (std::uint64_t v : levels) norm += v * v;
  NonceSource local = base.fork(dim);
  out.norm_sq = encrypt(pk, BigUint(norm), local);
  return out;
}

Ciphertext encrypted_sed(const PublicKey& pk, const Payload& x, const EncryptedTemplate& enc,
                         std::optional<std::span<const std::size_t>> selection) {
  check_key(pk, enc.key_fp);
  const VectorKind kind = kind_of(x);
  require(kind == enc.kind, ErrorCode::kKindMismatch,
          std::string("probe is ") + std::string(to_string(kind)) + " but the enrolled template is " +
              std::string(to_string(enc.kind)));
  require(levels_of(x) == enc.q, ErrorCode::kKindMismatch, "probe and template use different q");
  require(enc.elements.size() == enc.dim, ErrorCode::kDimensionMismatch, "malformed encrypted template");

  const std::vector<std::uint32_t> probe_all = integer_elements(x);
  std::vector<std::size_t> index;
  std::vector<std::uint32_t> probe;
  bool full = true;
  if (selection && !is_identity(*selection, enc.dim)) {
    full = false;
    index.assign(selection->begin(), selection->end());
    for (std::size_t i : index) {
      require(i < enc.dim, ErrorCode::kInvalidArgument, "selection index outside [0, dim)");
    }
    if (probe_all.size() == enc.dim) {
      for (std::size_t i : index) probe.push_back(probe_all[i]);
    } else {
      require(probe_all.size() == index.size(), ErrorCode::kDimensionMismatch,
              "probe length matches neither the template nor the selection");
      probe = probe_all;
    }
    require(enc.supports_subsets(), ErrorCode::kInvalidArgument,
            "template was enrolled without squared elements; subset matching is unavailable");
  } else {
    require(probe_all.size() == enc.dim, ErrorCode::kDimensionMismatch,
            "probe dimension " + std::to_string(probe_all.size()) + " != template dimension " +
                std::to_string(enc.dim));
    index.resize(enc.dim);
    std::iota(index.begin(), index.end(), std::size_t{0});
    probe = probe_all;
  }

  const Montgomery& mont = pk.mont();
  const std::size_t k = mont.limbs();

  // prod_i Enc(y_i)^{x_i}: bucket by probe value, then suffix products give
  // prod_v B_v^v with one multiplication per bucket.
  const std::uint32_t q = enc.q;
  std::vector<Montgomery::Residue> bucket(q);
  std::vector<bool> used(q, false);
  std::uint64_t sum_x2 = 0;
  for (std::size_t j = 0; j < index.size(); ++j) {
    const std::uint32_t v = probe[j];
    require(v < q, ErrorCode::kInvalidArgument, "probe element outside [0, q-1]");
    sum_x2 += static_cast<std::uint64_t>(v) * v;
    if (v == 0) continue;
    const Ciphertext& c = enc.elements[index[j]];
    check_key(pk, c.key_fp);
    Montgomery::Residue cm = mont.to_mont(c.value);
    if (!used[v]) {
      bucket[v] = std::move(cm);
      used[v] = true;
    } else {
      mont.mul(bucket[v], cm, bucket[v]);
    }
  }
  Montgomery::Residue acc = mont.one();
  Montgomery::Residue cross = mont.one();
  for (std::uint32_t v = q; v-- > 1;) {
    if (used[v]) mont.mul(acc, bucket[v], acc);
    mont.mul(cross, acc, cross);
  }
  // Enc(-2 sum x y) = Enc(sum x y)^(n - 2).
  Montgomery::Residue result = mont.pow(cross, pk.n() - BigUint(2));

  // Enc(sum y^2) over the compared indices.
  if (full) {
    check_key(pk, enc.norm_sq.key_fp);
    Montgomery::Residue ny = mont.to_mont(enc.norm_sq.value);
    mont.mul(result, ny, result);
  } else {
    const std::vector<Ciphertext>& sq = enc.kind == VectorKind::kBinary ? enc.elements : enc.squares;
    for (std::size_t i : index) {
      Montgomery::Residue s = mont.to_mont(sq[i].value);
      mont.mul(result, s, result);
    }
  }

  const Ciphertext t1 = encrypt_trivial(pk, BigUint(sum_x2));
  Montgomery::Residue plain(k, 0);
  std::copy(t1.value.limbs().begin(), t1.value.limbs().end(), plain.begin());
  mont.mul(result, plain, plain);
  return Ciphertext{BigUint::from_limbs(std::move(plain)), pk.fingerprint()};
}

std::uint64_t decrypt_sed(const KeyPair& key, const Ciphertext& c) {
  const std::int64_t v = decode_signed(key.pub, decrypt(key, c));
  require(v >= 0, ErrorCode::kCrypto, "decrypted distance is negative; wrong key or corrupted ciphertext");
  return static_cast<std::uint64_t>(v);
}

}  // namespace biotrunc::he
