#pragma once

// The anonymous steganography scheme: Gen / Enc / KeyExtract / Dec, plus the
// anonymity-game harness. A message of l bits is stream-encrypted into one
// pseudorandom document among d; key extraction condenses the whole document
// set into a short decoding key (two index encryptions, two commitment keys,
// one obfuscated decode circuit); decoding recomputes everything from the
// public documents alone and runs the circuit once per bit slot.
//
// All randomized steps draw from the caller's Rng in a fixed order, so a
// fixed seed reproduces the decoding key byte for byte.

#include "anonsteg/obfuscation.hpp"

namespace anonsteg {

struct SchemeParams {
  uint32_t lambda = 128;
  uint64_t ell = 0;  // document length = message length, bits
  uint64_t d = 0;    // number of documents
  HeKind he = HeKind::transparent;
  VcKind vc = VcKind::merkle;
  uint32_t vc_sel_modulus_bits = 0;  // 0 = derive from lambda

  void validate() const {
    if (ell == 0 || d == 0) throw std::invalid_argument("scheme: ell and d must be positive");
    if (lambda < 64 || lambda % 8) throw std::invalid_argument("scheme: bad lambda");
  }
};

using Document = BitString;

// Ordered public documents plus an optional leaker position for harness
// bookkeeping. The position never leaves the process: serialization walks
// only the documents. Column views (bit j of every document) are built once
// because decoding touches every column.
struct Transcript {
  std::vector<Document> docs;
  std::optional<uint64_t> leaker;  // 1-based

  Transcript() = default;
  explicit Transcript(std::vector<Document> documents) : docs(std::move(documents)) {
    build_columns();
  }

  uint64_t d() const { return docs.size(); }
  uint64_t ell() const { return docs.empty() ? 0 : docs[0].bits(); }

  // bit j (1-based) of every document
  const std::vector<uint8_t>& column(uint64_t j) const {
    if (j < 1 || j > columns_.size()) throw std::invalid_argument("transcript: bad column");
    return columns_[j - 1];
  }

  void replace_document(uint64_t i, Document doc) {
    if (i < 1 || i > docs.size()) throw std::invalid_argument("transcript: bad index");
    if (doc.bits() != ell()) throw std::invalid_argument("transcript: bad document length");
    docs[i - 1] = std::move(doc);
    build_columns();
  }

 private:
  void build_columns() {
    for (const auto& doc : docs)
      if (doc.bits() != ell()) throw std::invalid_argument("transcript: ragged documents");
    columns_.assign(ell(), std::vector<uint8_t>(docs.size(), 0));
    for (size_t k = 0; k < docs.size(); ++k)
      for (size_t j = 0; j < ell(); ++j) columns_[j][k] = docs[k].get(j);
  }
  std::vector<std::vector<uint8_t>> columns_;
};

struct DecodingKey {
  HePublicKey pk0, pk1;
  IndexCiphertext alpha0, alpha1;
  CommitKey ck0, ck1;
  ObfuscatedProgram program;

  Bytes serialize() const {
    ByteWriter w;
    w.u8('A');
    w.u8('S');
    w.u8('D');
    w.u8('K');
    w.u8(1);
    ByteWriter part;
    serialize_he_public_key(part, pk0);
    w.blob(part.take());
    serialize_he_public_key(part, pk1);
    w.blob(part.take());
    serialize_index_ciphertext(part, alpha0, pk0);
    w.blob(part.take());
    serialize_index_ciphertext(part, alpha1, pk1);
    w.blob(part.take());
    serialize_commit_key(part, ck0);
    w.blob(part.take());
    serialize_commit_key(part, ck1);
    w.blob(part.take());
    w.blob(program.blob());
    return w.take();
  }

  static DecodingKey deserialize(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    if (r.u8() != 'A' || r.u8() != 'S' || r.u8() != 'D' || r.u8() != 'K')
      throw DecodeError("decoding key: bad magic");
    if (r.u8() != 1) throw DecodeError("decoding key: unsupported version");
    DecodingKey dk;
    auto part = [&](auto&& f) {
      Bytes b = r.blob();
      ByteReader pr(b);
      return f(pr);
    };
    dk.pk0 = part([](ByteReader& pr) { return deserialize_he_public_key(pr); });
    dk.pk1 = part([](ByteReader& pr) { return deserialize_he_public_key(pr); });
    dk.alpha0 = part([&dk](ByteReader& pr) { return deserialize_index_ciphertext(pr, dk.pk0); });
    dk.alpha1 = part([&dk](ByteReader& pr) { return deserialize_index_ciphertext(pr, dk.pk1); });
    dk.ck0 = part([](ByteReader& pr) { return deserialize_commit_key(pr); });
    dk.ck1 = part([](ByteReader& pr) { return deserialize_commit_key(pr); });
    dk.program = ObfuscatedProgram::from_blob(r.blob());
    if (!r.done()) throw DecodeError("decoding key: trailing bytes");
    return dk;
  }

  size_t bit_size() const { return serialize().size() * 8; }
};

// optional instrumentation: the ciphertext blocks and commitments as
// computed on each side, for byte-equality checks between the two
struct PipelineTrace {
  std::array<std::vector<Bytes>, 2> beta;  // [u][j-1] = serialized block
  std::array<Bytes, 2> gamma;
};

inline PrfKey gen(const SchemeParams& params, Rng& rng) {
  params.validate();
  return gen_prf_key(params.lambda, rng);
}

inline Document enc(const PrfKey& ek, const BitString& x) { return stream_xor(ek, x); }

namespace schemedetail {

// step 2 of both key extraction and decoding; deterministic
inline std::vector<BitString> eval_beta_blocks(const HePublicKey& pk,
                                               const IndexCiphertext& alpha,
                                               const Transcript& t) {
  std::vector<BitString> blocks;
  blocks.reserve(t.ell());
  for (uint64_t j = 1; j <= t.ell(); ++j) {
    BitCiphertext b = he_eval_mux(pk, alpha, t.column(j));
    Bytes raw = serialize_bit_ciphertext(b);
    size_t nbits = raw.size() * 8;
    blocks.emplace_back(nbits, std::move(raw));
  }
  return blocks;
}

inline VcParams vc_params_for(const SchemeParams& p, const HePublicKey& pk) {
  VcParams vp;
  vp.kind = p.vc;
  vp.lambda = p.lambda;
  vp.length = p.ell;
  vp.block_bits = uint32_t(bit_ciphertext_bytes(pk) * 8);
  vp.sel_modulus_bits = p.vc_sel_modulus_bits;
  return vp;
}

}  // namespace schemedetail

inline DecodingKey key_extract(const SchemeParams& params, const PrfKey& ek,
                               const Transcript& t, uint64_t i, Rng& rng,
                               PipelineTrace* trace = nullptr) {
  params.validate();
  if (t.d() != params.d || t.ell() != params.ell)
    throw std::invalid_argument("key_extract: transcript does not match parameters");
  if (i < 1 || i > params.d) throw std::invalid_argument("key_extract: index out of range");

  DecodingKey dk;
  // (1) two key pairs and two encryptions of the index
  auto [pk0, sk0] = he_gen(params.he, params.lambda, rng);
  dk.pk0 = pk0;
  dk.alpha0 = he_enc_index(pk0, i, params.d, rng);
  auto [pk1, sk1] = he_gen(params.he, params.lambda, rng);
  dk.pk1 = pk1;
  dk.alpha1 = he_enc_index(pk1, i, params.d, rng);

  // (2) one ciphertext block per bit slot and half
  std::array<std::vector<BitString>, 2> beta = {
      schemedetail::eval_beta_blocks(pk0, dk.alpha0, t),
      schemedetail::eval_beta_blocks(pk1, dk.alpha1, t)};

  // (3) commitment keys and commitments
  dk.ck0 = vc_gen(schemedetail::vc_params_for(params, pk0), 0, rng);
  dk.ck1 = vc_gen(schemedetail::vc_params_for(params, pk1), 0, rng);
  VcCommitment gamma0 = vc_commit(dk.ck0, beta[0]);
  VcCommitment gamma1 = vc_commit(dk.ck1, beta[1]);

  // (4) coin for which half the circuit decrypts
  uint8_t sigma = rng.bit();

  // (5, 6) assemble and obfuscate the decode circuit, padded to the larger
  // of the two circuit shapes
  DecodeCircuitParams cp;
  cp.ek = ek;
  cp.sigma = sigma;
  cp.sk_sigma = sigma ? sk1 : sk0;
  cp.ck0 = dk.ck0;
  cp.ck1 = dk.ck1;
  cp.gamma0 = gamma0;
  cp.gamma1 = gamma1;

  HybridCircuitParams shape;
  shape.tau = 0;
  shape.ek = ek;
  shape.ek_alt = PrfKey{Bytes(ek.key.size(), 0)};
  shape.sigma = sigma;
  shape.sk0 = sk0;
  shape.sk1 = sk1;
  shape.ck0 = dk.ck0;
  shape.ck1 = dk.ck1;
  shape.gamma0 = gamma0;
  shape.gamma1 = gamma1;
  size_t pad_to = std::max(decode_circuit_size(cp), hybrid_circuit_size(shape));
  dk.program = obfuscate(cp, pad_to);

  if (trace) {
    for (int u = 0; u < 2; ++u) {
      trace->beta[u].clear();
      for (const auto& b : beta[u]) trace->beta[u].push_back(b.bytes());
    }
    trace->gamma[0] = gamma0.value.bytes();
    trace->gamma[1] = gamma1.value.bytes();
  }
  return dk;
}

// Decoding works from the public view alone; returns nothing if any bit
// slot fails verification inside the circuit.
inline std::optional<BitString> dec(const DecodingKey& dk, const Transcript& t,
                                    PipelineTrace* trace = nullptr) {
  if (t.d() == 0 || t.ell() == 0) return std::nullopt;
  if (t.ell() != dk.ck0.params.length) return std::nullopt;

  std::array<std::vector<BitString>, 2> beta = {
      schemedetail::eval_beta_blocks(dk.pk0, dk.alpha0, t),
      schemedetail::eval_beta_blocks(dk.pk1, dk.alpha1, t)};
  VcCommitment gamma0 = vc_commit(dk.ck0, beta[0]);
  VcCommitment gamma1 = vc_commit(dk.ck1, beta[1]);
  std::vector<VcProof> pi0 = vc_decommit_all(dk.ck0, beta[0]);
  std::vector<VcProof> pi1 = vc_decommit_all(dk.ck1, beta[1]);

  if (trace) {
    for (int u = 0; u < 2; ++u) {
      trace->beta[u].clear();
      for (const auto& b : beta[u]) trace->beta[u].push_back(b.bytes());
    }
    trace->gamma[0] = gamma0.value.bytes();
    trace->gamma[1] = gamma1.value.bytes();
  }

  BitString x(t.ell());
  for (uint64_t j = 1; j <= t.ell(); ++j) {
    CircuitBit bit = dk.program.eval(beta[0][j - 1], beta[1][j - 1], pi0[j - 1], pi1[j - 1], j);
    if (!bit) return std::nullopt;
    x.set(j - 1, *bit);
  }
  return x;
}

// -------------------------------------------------------- anonymity game

struct AnonymityGameView {
  DecodingKey dk;
  Transcript t;
  uint8_t hidden_bit = 0;  // harness-only
};

// The challenger's move: the adversary supplied x, two candidate positions
// and every other document; one candidate gets the encoded message, the
// other a uniform document, and extraction runs at the hidden position.
inline AnonymityGameView anonymity_game(const SchemeParams& params, const BitString& x,
                                        uint64_t i0, uint64_t i1,
                                        const std::vector<Document>& t_rest, Rng& rng) {
  params.validate();
  if (x.bits() != params.ell) throw std::invalid_argument("anonymity_game: bad message length");
  if (i0 == i1 || i0 < 1 || i1 < 1 || i0 > params.d || i1 > params.d)
    throw std::invalid_argument("anonymity_game: bad indices");
  if (t_rest.size() != params.d - 2)
    throw std::invalid_argument("anonymity_game: need d-2 documents");

  uint8_t b = rng.bit();
  PrfKey ek = gen(params, rng);
  uint64_t ib = b ? i1 : i0;
  uint64_t iother = b ? i0 : i1;

  std::vector<Document> docs(params.d);
  size_t r = 0;
  for (uint64_t k = 1; k <= params.d; ++k)
    if (k != i0 && k != i1) docs[k - 1] = t_rest[r++];
  docs[ib - 1] = enc(ek, x);
  docs[iother - 1] = rng.bitstring(params.ell);

  Transcript t(std::move(docs));
  t.leaker = ib;
  AnonymityGameView view{key_extract(params, ek, t, ib, rng), std::move(t), b};
  return view;
}

// ----------------------------------------------------------- file formats

// Transcript file: "ASTR" version lambda ell d, then the documents packed
// MSB-first, each padded to a whole byte.
inline Bytes transcript_to_bytes(const Transcript& t, uint32_t lambda) {
  ByteWriter w;
  w.u8('A');
  w.u8('S');
  w.u8('T');
  w.u8('R');
  w.u8(1);
  w.u32(lambda);
  w.u64(t.ell());
  w.u64(t.d());
  for (const auto& doc : t.docs) w.raw(doc.bytes());
  return w.take();
}

inline std::pair<Transcript, uint32_t> transcript_from_bytes(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u8() != 'A' || r.u8() != 'S' || r.u8() != 'T' || r.u8() != 'R')
    throw DecodeError("transcript: bad magic");
  if (r.u8() != 1) throw DecodeError("transcript: unsupported version");
  uint32_t lambda = r.u32();
  uint64_t ell = r.u64();
  uint64_t d = r.u64();
  if (ell == 0 || d == 0 || ell > (1u << 24) || d > (1u << 24))
    throw DecodeError("transcript: implausible dimensions");
  std::vector<Document> docs;
  docs.reserve(size_t(d));
  for (uint64_t k = 0; k < d; ++k) docs.emplace_back(size_t(ell), r.raw((size_t(ell) + 7) / 8));
  if (!r.done()) throw DecodeError("transcript: trailing bytes");
  return {Transcript(std::move(docs)), lambda};
}

}  // namespace anonsteg
