#pragma once

// Vector commitment over L blocks of block_bits bits: commit, per-position
// decommit with sibling-path proofs, verify. Two instantiations behind one
// interface:
//
//   merkle  binary hash tree, keyed digests domain-separated per level.
//           The binding index passed to vc_gen is accepted but has no
//           effect; binding is computational everywhere. Default for
//           pipeline use.
//
//   ssb     two-to-one combiner in which every internal node is a chunked
//           additive-homomorphic selection of one child, under per-level
//           ciphertexts Enc(b_t) of the hidden index bits. Decrypting a
//           node recovers the child on the hidden path exactly, for any
//           sibling value, so the root pins down the block at the hidden
//           index; verification stays public. Node values grow by roughly
//           the ciphertext expansion per level, which is the price of
//           avoiding full FHE here; sizes are measured by the tests.
//
// Proofs carry one sibling node value per level. Verification is total:
// malformed input of any shape is a reject, never an exception.

#include "anonsteg/paillier.hpp"

namespace anonsteg {

enum class VcKind : uint8_t { merkle = 0, ssb = 1 };

inline const char* vc_kind_name(VcKind k) { return k == VcKind::merkle ? "merkle" : "ssb"; }

struct VcParams {
  VcKind kind = VcKind::merkle;
  uint32_t lambda = 128;
  uint64_t length = 0;      // L
  uint32_t block_bits = 0;  // l_b
  uint32_t sel_modulus_bits = 0;  // ssb only; 0 = derive from lambda

  uint32_t effective_sel_bits() const {
    return sel_modulus_bits ? sel_modulus_bits : lambda * 8;
  }
};

struct CommitKey {
  VcParams params;
  uint32_t height = 0;
  Bytes salt;                           // merkle
  PaillierPublicKey sel_pk;             // ssb
  std::vector<mpz_class> level_select;  // ssb: Enc(path bit), one per level
};

struct VcCommitment {
  BitString value;
  bool operator==(const VcCommitment&) const = default;
};

struct VcProof {
  std::vector<BitString> siblings;  // level 0 first
};

namespace vcdetail {

constexpr size_t kMerkleNodeBits = 256;

inline size_t chunk_bits(uint32_t sel_modulus_bits) { return sel_modulus_bits - 1; }

inline size_t chunk_count(size_t value_bits, size_t cb) { return (value_bits + cb - 1) / cb; }

inline size_t ssb_parent_bits(size_t child_bits, uint32_t sel_bits) {
  return chunk_count(child_bits, chunk_bits(sel_bits)) * 2 * size_t(sel_bits);
}

// node value size at a given level (0 = leaf level)
inline size_t node_bits(const VcParams& p, size_t level) {
  if (p.kind == VcKind::merkle) return kMerkleNodeBits;
  size_t sz = p.block_bits;
  for (size_t t = 0; t < level; ++t) sz = ssb_parent_bits(sz, p.effective_sel_bits());
  return sz;
}

inline mpz_class bits_to_value(const BitString& v, size_t start, size_t len) {
  mpz_class x = 0;
  for (size_t j = 0; j < len; ++j)
    if (v.get(start + j)) mpz_setbit(x.get_mpz_t(), len - 1 - j);
  return x;
}

inline void value_into_bits(const mpz_class& x, BitString& out, size_t start, size_t len) {
  for (size_t j = 0; j < len; ++j)
    out.set(start + j, uint8_t(mpz_tstbit(x.get_mpz_t(), len - 1 - j)));
}

// homomorphic selection of one chunk: g^{lv} * sel_ct^{rv - lv}; decrypts to
// lv when the hidden bit is 0 and rv when it is 1.
inline mpz_class combine_chunk(const PaillierPublicKey& pk, const mpz_class& sel_ct,
                               const mpz_class& lv, const mpz_class& rv) {
  return paillier_ct_add_plain(pk, paillier_ct_pow(pk, sel_ct, rv - lv), lv);
}

inline BitString ssb_combine(const CommitKey& ck, size_t level, const BitString& left,
                             const BitString& right) {
  uint32_t sel_bits = ck.params.effective_sel_bits();
  size_t cb = chunk_bits(sel_bits);
  size_t child_bits = left.bits();
  size_t nchunks = chunk_count(child_bits, cb);
  BitString out(nchunks * 2 * size_t(sel_bits));
  const mpz_class& sel_ct = ck.level_select.at(level - 1);
  for (size_t c = 0; c < nchunks; ++c) {
    size_t off = c * cb;
    size_t w = std::min(cb, child_bits - off);
    mpz_class lv = bits_to_value(left, off, w);
    mpz_class rv = bits_to_value(right, off, w);
    mpz_class e = combine_chunk(ck.sel_pk, sel_ct, lv, rv);
    value_into_bits(e, out, c * 2 * size_t(sel_bits), 2 * size_t(sel_bits));
  }
  return out;
}

inline BitString merkle_leaf(const CommitKey& ck, const BitString& block) {
  ByteWriter w;
  w.u8(0x00);
  w.u64(0);
  w.u64(block.bits());
  w.raw(block.bytes());
  Digest32 h = keyed_digest(ck.salt, "vc/merkle", w.peek());
  return BitString(kMerkleNodeBits, Bytes(h.begin(), h.end()));
}

inline BitString merkle_combine(const CommitKey& ck, size_t level, const BitString& left,
                                const BitString& right) {
  ByteWriter w;
  w.u8(0x01);
  w.u64(level);
  w.raw(left.bytes());
  w.raw(right.bytes());
  Digest32 h = keyed_digest(ck.salt, "vc/merkle", w.peek());
  return BitString(kMerkleNodeBits, Bytes(h.begin(), h.end()));
}

inline BitString leaf_node(const CommitKey& ck, const BitString& block) {
  return ck.params.kind == VcKind::merkle ? merkle_leaf(ck, block) : block;
}

inline BitString combine(const CommitKey& ck, size_t level, const BitString& left,
                         const BitString& right) {
  return ck.params.kind == VcKind::merkle ? merkle_combine(ck, level, left, right)
                                          : ssb_combine(ck, level, left, right);
}

// full tree, level 0 = leaf nodes of the padded vector
inline std::vector<std::vector<BitString>> build_tree(const CommitKey& ck,
                                                      std::span<const BitString> blocks) {
  const VcParams& p = ck.params;
  if (blocks.size() != p.length) throw std::invalid_argument("vc: wrong block count");
  for (const auto& b : blocks)
    if (b.bits() != p.block_bits) throw std::invalid_argument("vc: wrong block size");
  size_t padded = size_t(1) << ck.height;
  std::vector<std::vector<BitString>> levels(ck.height + 1);
  levels[0].reserve(padded);
  BitString zero(p.block_bits);
  for (size_t k = 0; k < padded; ++k)
    levels[0].push_back(leaf_node(ck, k < blocks.size() ? blocks[k] : zero));
  for (size_t t = 1; t <= ck.height; ++t) {
    size_t n = padded >> t;
    levels[t].reserve(n);
    for (size_t k = 0; k < n; ++k)
      levels[t].push_back(combine(ck, t, levels[t - 1][2 * k], levels[t - 1][2 * k + 1]));
  }
  return levels;
}

}  // namespace vcdetail

// binding_index: 0 means "no designated position" and binds the last padded
// leaf; 1..L designate a block position.
inline CommitKey vc_gen(const VcParams& params, uint64_t binding_index, Rng& rng) {
  if (params.length == 0) throw std::invalid_argument("vc_gen: L = 0");
  if (params.lambda < 63 && params.length > (uint64_t(1) << params.lambda))
    throw std::invalid_argument("vc_gen: L exceeds 2^lambda");
  if (binding_index > params.length) throw std::invalid_argument("vc_gen: binding index out of range");
  if (params.block_bits == 0) throw std::invalid_argument("vc_gen: block_bits = 0");

  CommitKey ck;
  ck.params = params;
  uint32_t h = 0;
  while ((uint64_t(1) << h) < params.length) ++h;
  ck.height = h;

  if (params.kind == VcKind::merkle) {
    ck.salt = rng.bytes(16);
    return ck;
  }
  uint32_t sel_bits = params.effective_sel_bits();
  if (sel_bits < 4) throw std::invalid_argument("vc_gen: selection modulus too small");
  PaillierSecretKey sel_sk = paillier_keygen(sel_bits, rng);
  ck.sel_pk = sel_sk.pk;
  uint64_t padded = uint64_t(1) << h;
  uint64_t pos0 = binding_index == 0 ? padded - 1 : binding_index - 1;
  ck.level_select.reserve(h);
  for (uint32_t t = 1; t <= h; ++t)
    ck.level_select.push_back(
        paillier_encrypt(ck.sel_pk, mpz_class((pos0 >> (t - 1)) & 1), rng));
  return ck;
}

inline VcCommitment vc_commit(const CommitKey& ck, std::span<const BitString> blocks) {
  auto levels = vcdetail::build_tree(ck, blocks);
  return VcCommitment{levels[ck.height][0]};
}

inline VcProof vc_proof_from_tree(const CommitKey& ck,
                                  const std::vector<std::vector<BitString>>& levels,
                                  uint64_t position) {
  if (position < 1 || position > ck.params.length)
    throw std::invalid_argument("vc_decommit: position out of range");
  uint64_t pos0 = position - 1;
  VcProof pr;
  pr.siblings.reserve(ck.height);
  for (uint32_t t = 0; t < ck.height; ++t)
    pr.siblings.push_back(levels[t][(pos0 >> t) ^ 1]);
  return pr;
}

inline VcProof vc_decommit(const CommitKey& ck, std::span<const BitString> blocks,
                           uint64_t position) {
  auto levels = vcdetail::build_tree(ck, blocks);
  return vc_proof_from_tree(ck, levels, position);
}

// one tree construction serving every position
inline std::vector<VcProof> vc_decommit_all(const CommitKey& ck,
                                            std::span<const BitString> blocks) {
  auto levels = vcdetail::build_tree(ck, blocks);
  std::vector<VcProof> out;
  out.reserve(ck.params.length);
  for (uint64_t j = 1; j <= ck.params.length; ++j)
    out.push_back(vc_proof_from_tree(ck, levels, j));
  return out;
}

// Total: any malformed input is a reject.
inline bool vc_verify(const CommitKey& ck, const VcCommitment& y, uint64_t position,
                      const BitString& block, const VcProof& proof) noexcept {
  try {
    if (position < 1 || position > ck.params.length) return false;
    if (block.bits() != ck.params.block_bits) return false;
    if (proof.siblings.size() != ck.height) return false;
    uint64_t pos0 = position - 1;
    BitString node = vcdetail::leaf_node(ck, block);
    for (uint32_t t = 0; t < ck.height; ++t) {
      const BitString& sib = proof.siblings[t];
      if (sib.bits() != vcdetail::node_bits(ck.params, t)) return false;
      node = ((pos0 >> t) & 1) ? vcdetail::combine(ck, t + 1, sib, node)
                               : vcdetail::combine(ck, t + 1, node, sib);
    }
    return node == y.value;
  } catch (...) {
    return false;
  }
}

// ------------------------------------------------------------ serialization

inline void serialize_commit_key(ByteWriter& w, const CommitKey& ck) {
  w.u8(1);  // version
  w.u8(uint8_t(ck.params.kind));
  w.u32(ck.params.lambda);
  w.u64(ck.params.length);
  w.u32(ck.params.block_bits);
  w.u32(ck.params.sel_modulus_bits);
  w.u32(ck.height);
  if (ck.params.kind == VcKind::merkle) {
    w.blob(ck.salt);
  } else {
    serialize_paillier_pk(w, ck.sel_pk);
    for (const auto& c : ck.level_select) w.raw(mpz_to_bytes_fixed(c, ck.sel_pk.ct_bytes()));
  }
}

inline CommitKey deserialize_commit_key(ByteReader& r) {
  if (r.u8() != 1) throw DecodeError("commit key: unsupported version");
  CommitKey ck;
  ck.params.kind = VcKind(r.u8());
  ck.params.lambda = r.u32();
  ck.params.length = r.u64();
  ck.params.block_bits = r.u32();
  ck.params.sel_modulus_bits = r.u32();
  ck.height = r.u32();
  if (ck.params.kind == VcKind::merkle) {
    ck.salt = r.blob();
  } else if (ck.params.kind == VcKind::ssb) {
    ck.sel_pk = deserialize_paillier_pk(r);
    for (uint32_t t = 0; t < ck.height; ++t)
      ck.level_select.push_back(bytes_to_mpz(r.raw(ck.sel_pk.ct_bytes())));
  } else {
    throw DecodeError("commit key: unknown instantiation tag");
  }
  return ck;
}

inline void serialize_commitment(ByteWriter& w, const VcCommitment& y) { w.bitstring(y.value); }
inline VcCommitment deserialize_commitment(ByteReader& r) { return VcCommitment{r.bitstring()}; }

inline void serialize_proof(ByteWriter& w, const VcProof& p) {
  w.u32(uint32_t(p.siblings.size()));
  for (const auto& s : p.siblings) w.bitstring(s);
}
inline VcProof deserialize_proof(ByteReader& r) {
  VcProof p;
  uint32_t n = r.u32();
  if (n > 64) throw DecodeError("proof: too many levels");
  for (uint32_t i = 0; i < n; ++i) p.siblings.push_back(r.bitstring());
  return p;
}

}  // namespace anonsteg
