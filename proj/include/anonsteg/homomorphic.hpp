#pragma once

// Public-key encryption of an index i in [d] with deterministic homomorphic
// evaluation of the column selector mux[t,j]. Two interchangeable
// instantiations:
//
//   transparent      index blinded by a keyed offset; evaluation recovers i
//                    using key material that ships inside the public key.
//                    Functionally exact and fast, zero secrecy; exists so
//                    pipeline tests do not pay bignum costs. Tagged insecure.
//
//   onehot_additive  vector of d Paillier encryptions of the one-hot
//                    indicator of i. mux is linear in the one-hot encoding,
//                    so evaluation is a product of the ciphertexts selected
//                    by the column; no fresh randomness, deterministic by
//                    construction. |alpha| grows linearly in d (measured by
//                    the tests, not hidden).
//
// Evaluation determinism matters: sender and receiver must derive bit-equal
// ciphertext blocks so the commitments computed on both sides match.

#include "anonsteg/paillier.hpp"
#include "anonsteg/prf.hpp"

namespace anonsteg {

enum class HeKind : uint8_t { transparent = 0, onehot_additive = 1 };

inline const char* he_kind_name(HeKind k) {
  return k == HeKind::transparent ? "transparent" : "onehot-additive";
}

struct HePublicKey {
  HeKind kind = HeKind::transparent;
  uint32_t lambda = 0;
  Bytes material;           // transparent: the blinding key itself (insecure on purpose)
  PaillierPublicKey pail;   // onehot_additive

  bool insecure() const { return kind == HeKind::transparent; }
};

struct HeSecretKey {
  HeKind kind = HeKind::transparent;
  uint32_t lambda = 0;
  Bytes material;
  PaillierSecretKey pail;
};

struct IndexCiphertext {
  HeKind kind = HeKind::transparent;
  uint64_t d = 0;
  // transparent
  uint64_t blinded = 0;
  Bytes nonce;
  // onehot_additive
  std::vector<mpz_class> cts;
};

struct BitCiphertext {
  HeKind kind = HeKind::transparent;
  // transparent
  Bytes tag;  // 16 bytes
  uint8_t masked = 0;
  // onehot_additive
  mpz_class ct;
  uint32_t ct_n_bits = 0;
};

inline uint32_t he_paillier_bits(uint32_t lambda) { return lambda * 8; }

inline std::pair<HePublicKey, HeSecretKey> he_gen(HeKind kind, uint32_t lambda, Rng& rng) {
  if (lambda < 16 || lambda > 1024 || lambda % 8 != 0)
    throw std::invalid_argument("he_gen: unsupported lambda");
  HePublicKey pk;
  HeSecretKey sk;
  pk.kind = sk.kind = kind;
  pk.lambda = sk.lambda = lambda;
  if (kind == HeKind::transparent) {
    Bytes key = rng.bytes(16);
    pk.material = key;
    sk.material = key;
  } else {
    sk.pail = paillier_keygen(he_paillier_bits(lambda), rng);
    pk.pail = sk.pail.pk;
  }
  return {pk, sk};
}

namespace hedetail {

inline Bytes index_ct_body(const IndexCiphertext& a) {
  ByteWriter w;
  w.u64(a.d);
  if (a.kind == HeKind::transparent) {
    w.u64(a.blinded);
    w.raw(a.nonce);
  } else {
    for (const auto& c : a.cts) w.blob(mpz_to_bytes_fixed(c, (mpz_sizeinbase(c.get_mpz_t(), 2) + 7) / 8));
  }
  return w.take();
}

inline uint64_t blind_offset(std::span<const uint8_t> key, std::span<const uint8_t> nonce,
                             uint64_t d) {
  ByteWriter w;
  w.raw(nonce);
  w.u64(d);
  Digest32 h = keyed_digest(key, "he/blind", w.peek());
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | h[i];
  return v % d;
}

inline uint8_t mask_bit(std::span<const uint8_t> key, std::span<const uint8_t> tag) {
  return keyed_digest(key, "he/mask", tag)[0] & 1;
}

}  // namespace hedetail

inline IndexCiphertext he_enc_index(const HePublicKey& pk, uint64_t i, uint64_t d, Rng& rng) {
  if (d == 0 || i < 1 || i > d) throw std::invalid_argument("he_enc_index: index out of range");
  IndexCiphertext a;
  a.kind = pk.kind;
  a.d = d;
  if (pk.kind == HeKind::transparent) {
    a.nonce = rng.bytes(16);
    a.blinded = (i - 1 + hedetail::blind_offset(pk.material, a.nonce, d)) % d;
  } else {
    a.cts.reserve(d);
    for (uint64_t k = 0; k < d; ++k)
      a.cts.push_back(paillier_encrypt(pk.pail, (k == i - 1) ? 1 : 0, rng));
  }
  return a;
}

inline uint64_t he_dec_index(const HeSecretKey& sk, const IndexCiphertext& a) {
  if (sk.kind != a.kind) throw DecodeError("he_dec_index: instantiation mismatch");
  if (a.d == 0) throw DecodeError("he_dec_index: empty ciphertext");
  if (a.kind == HeKind::transparent) {
    uint64_t off = hedetail::blind_offset(sk.material, a.nonce, a.d);
    return (a.blinded + a.d - off) % a.d + 1;
  }
  if (a.cts.size() != a.d) throw DecodeError("he_dec_index: wrong component count");
  uint64_t hits = 0, idx = 0;
  for (uint64_t k = 0; k < a.d; ++k) {
    mpz_class m = paillier_decrypt(sk.pail, a.cts[k]);
    if (m == 1) {
      ++hits;
      idx = k + 1;
    } else if (m != 0) {
      throw DecodeError("he_dec_index: component not a bit");
    }
  }
  if (hits != 1) throw DecodeError("he_dec_index: not a one-hot encryption");
  return idx;
}

// column[k] is the j-th bit of document k+1; exactly d entries.
inline BitCiphertext he_eval_mux(const HePublicKey& pk, const IndexCiphertext& a,
                                 const std::vector<uint8_t>& column) {
  if (pk.kind != a.kind) throw std::invalid_argument("he_eval_mux: instantiation mismatch");
  if (column.size() != a.d) throw std::invalid_argument("he_eval_mux: column length != d");
  BitCiphertext b;
  b.kind = pk.kind;
  if (pk.kind == HeKind::transparent) {
    uint64_t off = hedetail::blind_offset(pk.material, a.nonce, a.d);
    uint64_t i = (a.blinded + a.d - off) % a.d + 1;
    uint8_t bit = column[i - 1] & 1;
    ByteWriter w;
    w.raw(hedetail::index_ct_body(a));
    for (uint8_t c : column) w.u8(c & 1);
    Digest32 h = keyed_digest(pk.material, "he/mux", w.peek());
    b.tag.assign(h.begin(), h.begin() + 16);
    b.masked = uint8_t(bit ^ hedetail::mask_bit(pk.material, b.tag));
  } else {
    if (a.cts.size() != a.d) throw std::invalid_argument("he_eval_mux: malformed ciphertext");
    mpz_class acc = 1;
    for (uint64_t k = 0; k < a.d; ++k)
      if (column[k] & 1) acc = paillier_ct_mul(pk.pail, acc, a.cts[k]);
    b.ct = acc;
    b.ct_n_bits = pk.pail.n_bits;
  }
  return b;
}

inline BitCiphertext he_enc_bit(const HePublicKey& pk, uint8_t bit, Rng& rng) {
  BitCiphertext b;
  b.kind = pk.kind;
  if (pk.kind == HeKind::transparent) {
    b.tag = rng.bytes(16);
    b.masked = uint8_t((bit & 1) ^ hedetail::mask_bit(pk.material, b.tag));
  } else {
    b.ct = paillier_encrypt(pk.pail, bit & 1, rng);
    b.ct_n_bits = pk.pail.n_bits;
  }
  return b;
}

inline uint8_t he_dec_bit(const HeSecretKey& sk, const BitCiphertext& b) {
  if (sk.kind != b.kind) throw DecodeError("he_dec_bit: instantiation mismatch");
  if (b.kind == HeKind::transparent) {
    if (b.tag.size() != 16) throw DecodeError("he_dec_bit: malformed tag");
    return uint8_t(b.masked ^ hedetail::mask_bit(sk.material, b.tag));
  }
  mpz_class m = paillier_decrypt(sk.pail, b.ct);
  if (m == 0) return 0;
  if (m == 1) return 1;
  throw DecodeError("he_dec_bit: plaintext is not a bit");
}

// Total variant used inside the decode circuit: a plaintext that is not a
// bit is truncated to its parity instead of raising.
inline uint8_t he_dec_bit_lossy(const HeSecretKey& sk, const BitCiphertext& b) {
  if (b.kind == HeKind::transparent) {
    if (sk.kind != b.kind || b.tag.size() != 16) return b.masked & 1;
    return uint8_t(b.masked ^ hedetail::mask_bit(sk.material, b.tag));
  }
  if (sk.kind != b.kind) return 0;
  mpz_class m = paillier_decrypt(sk.pail, b.ct);
  return uint8_t(mpz_odd_p(m.get_mpz_t()) ? 1 : 0);
}

// ------------------------------------------------------------ serialization
// Everything is length-prefixed binary with the instantiation tag first.

inline void serialize_he_public_key(ByteWriter& w, const HePublicKey& pk) {
  w.u8(uint8_t(pk.kind));
  w.u32(pk.lambda);
  if (pk.kind == HeKind::transparent)
    w.blob(pk.material);
  else
    serialize_paillier_pk(w, pk.pail);
}
inline HePublicKey deserialize_he_public_key(ByteReader& r) {
  HePublicKey pk;
  pk.kind = HeKind(r.u8());
  pk.lambda = r.u32();
  if (pk.kind == HeKind::transparent)
    pk.material = r.blob();
  else if (pk.kind == HeKind::onehot_additive)
    pk.pail = deserialize_paillier_pk(r);
  else
    throw DecodeError("he pk: unknown instantiation tag");
  return pk;
}

inline void serialize_he_secret_key(ByteWriter& w, const HeSecretKey& sk) {
  w.u8(uint8_t(sk.kind));
  w.u32(sk.lambda);
  if (sk.kind == HeKind::transparent)
    w.blob(sk.material);
  else
    serialize_paillier_sk(w, sk.pail);
}
inline HeSecretKey deserialize_he_secret_key(ByteReader& r) {
  HeSecretKey sk;
  sk.kind = HeKind(r.u8());
  sk.lambda = r.u32();
  if (sk.kind == HeKind::transparent)
    sk.material = r.blob();
  else if (sk.kind == HeKind::onehot_additive)
    sk.pail = deserialize_paillier_sk(r);
  else
    throw DecodeError("he sk: unknown instantiation tag");
  return sk;
}

inline void serialize_index_ciphertext(ByteWriter& w, const IndexCiphertext& a,
                                       const HePublicKey& pk) {
  w.u8(uint8_t(a.kind));
  w.u64(a.d);
  if (a.kind == HeKind::transparent) {
    w.u64(a.blinded);
    w.blob(a.nonce);
  } else {
    for (const auto& c : a.cts) w.raw(mpz_to_bytes_fixed(c, pk.pail.ct_bytes()));
  }
}
inline IndexCiphertext deserialize_index_ciphertext(ByteReader& r, const HePublicKey& pk) {
  IndexCiphertext a;
  a.kind = HeKind(r.u8());
  a.d = r.u64();
  if (a.d == 0) throw DecodeError("index ciphertext: d = 0");
  if (a.kind == HeKind::transparent) {
    a.blinded = r.u64();
    a.nonce = r.blob();
  } else if (a.kind == HeKind::onehot_additive) {
    a.cts.reserve(a.d);
    for (uint64_t k = 0; k < a.d; ++k) a.cts.push_back(bytes_to_mpz(r.raw(pk.pail.ct_bytes())));
  } else {
    throw DecodeError("index ciphertext: unknown instantiation tag");
  }
  return a;
}

// Serialized bit ciphertexts are the blocks the vector commitment sees;
// their byte length is a constant of (kind, key).
inline size_t bit_ciphertext_bytes(const HePublicKey& pk) {
  return pk.kind == HeKind::transparent ? 1 + 16 + 1 : 1 + pk.pail.ct_bytes();
}

inline Bytes serialize_bit_ciphertext(const BitCiphertext& b) {
  ByteWriter w;
  w.u8(uint8_t(b.kind));
  if (b.kind == HeKind::transparent) {
    if (b.tag.size() != 16) throw std::invalid_argument("bit ciphertext: bad tag size");
    w.raw(b.tag);
    w.u8(b.masked & 1);
  } else {
    w.raw(mpz_to_bytes_fixed(b.ct, 2 * size_t((b.ct_n_bits + 7) / 8)));
  }
  return w.take();
}

inline BitCiphertext deserialize_bit_ciphertext(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  BitCiphertext b;
  b.kind = HeKind(r.u8());
  if (b.kind == HeKind::transparent) {
    b.tag = r.raw(16);
    b.masked = r.u8();
    if (b.masked > 1) throw DecodeError("bit ciphertext: mask byte is not a bit");
    if (!r.done()) throw DecodeError("bit ciphertext: trailing bytes");
  } else if (b.kind == HeKind::onehot_additive) {
    size_t rem = r.remaining();
    if (rem == 0 || rem % 2 != 0) throw DecodeError("bit ciphertext: bad length");
    b.ct = bytes_to_mpz(r.raw(rem));
    b.ct_n_bits = uint32_t(rem * 8 / 2);
  } else {
    throw DecodeError("bit ciphertext: unknown instantiation tag");
  }
  return b;
}

}  // namespace anonsteg
