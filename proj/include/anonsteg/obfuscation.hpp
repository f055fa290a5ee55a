#pragma once

// The decode circuit, its hybrid variant, and an obfuscator interface with
// an explicitly insecure reference instantiation. The reference obfuscator
// serializes the hard-wired parameters, pads the blob to the larger of the
// two circuit shapes, and evaluates by interpretation. It hides nothing;
// the flag in the serialized form says so and the CLI warns about it.
//
// Circuit inputs are the serialized ciphertext block for each half, the two
// decommitment proofs, and the bit slot j in [1, l]. Output is either one
// bit or the distinguished failure value (an empty optional, never a bit).

#include "anonsteg/homomorphic.hpp"
#include "anonsteg/prf.hpp"
#include "anonsteg/vector_commitment.hpp"

namespace anonsteg {

using CircuitBit = std::optional<uint8_t>;

struct DecodeCircuitParams {
  PrfKey ek;
  uint8_t sigma = 0;
  HeSecretKey sk_sigma;
  CommitKey ck0, ck1;
  VcCommitment gamma0, gamma1;
};

struct HybridCircuitParams {
  uint64_t tau = 0;
  PrfKey ek;      // used on slots j > tau
  PrfKey ek_alt;  // used on slots j <= tau
  uint8_t sigma = 0;
  HeSecretKey sk0, sk1;
  CommitKey ck0, ck1;
  VcCommitment gamma0, gamma1;
};

namespace obfdetail {

inline bool verify_both(const CommitKey& ck0, const CommitKey& ck1, const VcCommitment& g0,
                        const VcCommitment& g1, const BitString& b0, const BitString& b1,
                        const VcProof& p0, const VcProof& p1, uint64_t j) {
  return vc_verify(ck0, g0, j, b0, p0) && vc_verify(ck1, g1, j, b1, p1);
}

inline CircuitBit decrypt_branch(const HeSecretKey& sk, const BitString& beta,
                                 const PrfKey& ek, uint64_t j) {
  BitCiphertext ct;
  try {
    ct = deserialize_bit_ciphertext(beta.bytes());
  } catch (const DecodeError&) {
    return std::nullopt;  // unreachable on anything that passed verification honestly
  }
  return uint8_t(he_dec_bit_lossy(sk, ct) ^ prf_bit(ek, j));
}

}  // namespace obfdetail

inline CircuitBit eval_decode_circuit(const DecodeCircuitParams& p, const BitString& beta0,
                                      const BitString& beta1, const VcProof& pi0,
                                      const VcProof& pi1, uint64_t j) {
  if (!obfdetail::verify_both(p.ck0, p.ck1, p.gamma0, p.gamma1, beta0, beta1, pi0, pi1, j))
    return std::nullopt;
  const BitString& beta_sel = p.sigma ? beta1 : beta0;
  return obfdetail::decrypt_branch(p.sk_sigma, beta_sel, p.ek, j);
}

inline CircuitBit eval_hybrid_circuit(const HybridCircuitParams& p, const BitString& beta0,
                                      const BitString& beta1, const VcProof& pi0,
                                      const VcProof& pi1, uint64_t j) {
  if (!obfdetail::verify_both(p.ck0, p.ck1, p.gamma0, p.gamma1, beta0, beta1, pi0, pi1, j))
    return std::nullopt;
  if (j > p.tau) {
    const BitString& beta_sel = p.sigma ? beta1 : beta0;
    return obfdetail::decrypt_branch(p.sigma ? p.sk1 : p.sk0, beta_sel, p.ek, j);
  }
  const BitString& beta_sel = p.sigma ? beta0 : beta1;
  return obfdetail::decrypt_branch(p.sigma ? p.sk0 : p.sk1, beta_sel, p.ek_alt, j);
}

// ------------------------------------------------------------ serialization

inline void serialize_decode_params(ByteWriter& w, const DecodeCircuitParams& p) {
  serialize_prf_key(w, p.ek);
  w.u8(p.sigma & 1);
  serialize_he_secret_key(w, p.sk_sigma);
  serialize_commit_key(w, p.ck0);
  serialize_commit_key(w, p.ck1);
  serialize_commitment(w, p.gamma0);
  serialize_commitment(w, p.gamma1);
}
inline DecodeCircuitParams deserialize_decode_params(ByteReader& r) {
  DecodeCircuitParams p;
  p.ek = deserialize_prf_key(r);
  p.sigma = r.u8() & 1;
  p.sk_sigma = deserialize_he_secret_key(r);
  p.ck0 = deserialize_commit_key(r);
  p.ck1 = deserialize_commit_key(r);
  p.gamma0 = deserialize_commitment(r);
  p.gamma1 = deserialize_commitment(r);
  return p;
}

inline void serialize_hybrid_params(ByteWriter& w, const HybridCircuitParams& p) {
  w.u64(p.tau);
  serialize_prf_key(w, p.ek);
  serialize_prf_key(w, p.ek_alt);
  w.u8(p.sigma & 1);
  serialize_he_secret_key(w, p.sk0);
  serialize_he_secret_key(w, p.sk1);
  serialize_commit_key(w, p.ck0);
  serialize_commit_key(w, p.ck1);
  serialize_commitment(w, p.gamma0);
  serialize_commitment(w, p.gamma1);
}
inline HybridCircuitParams deserialize_hybrid_params(ByteReader& r) {
  HybridCircuitParams p;
  p.tau = r.u64();
  p.ek = deserialize_prf_key(r);
  p.ek_alt = deserialize_prf_key(r);
  p.sigma = r.u8() & 1;
  p.sk0 = deserialize_he_secret_key(r);
  p.sk1 = deserialize_he_secret_key(r);
  p.ck0 = deserialize_commit_key(r);
  p.ck1 = deserialize_commit_key(r);
  p.gamma0 = deserialize_commitment(r);
  p.gamma1 = deserialize_commitment(r);
  return p;
}

// circuit "size" = length in bytes of the serialized parameter block
inline size_t decode_circuit_size(const DecodeCircuitParams& p) {
  ByteWriter w;
  serialize_decode_params(w, p);
  return w.size();
}
inline size_t hybrid_circuit_size(const HybridCircuitParams& p) {
  ByteWriter w;
  serialize_hybrid_params(w, p);
  return w.size();
}

// ------------------------------------------------------- obfuscated program

class ObfuscatedProgram {
 public:
  static constexpr uint8_t kKindDecode = 0;
  static constexpr uint8_t kKindHybrid = 1;

  ObfuscatedProgram() = default;

  static ObfuscatedProgram from_blob(Bytes blob) {
    ObfuscatedProgram o;
    o.blob_ = std::move(blob);
    o.parse();
    return o;
  }

  const Bytes& blob() const { return blob_; }
  size_t padded_size() const { return blob_.size(); }
  bool insecure() const { return insecure_; }
  uint8_t kind() const { return kind_; }

  const DecodeCircuitParams& decode_params() const {
    if (kind_ != kKindDecode) throw std::logic_error("not a decode circuit");
    return decode_;
  }
  const HybridCircuitParams& hybrid_params() const {
    if (kind_ != kKindHybrid) throw std::logic_error("not a hybrid circuit");
    return hybrid_;
  }

  CircuitBit eval(const BitString& beta0, const BitString& beta1, const VcProof& pi0,
                  const VcProof& pi1, uint64_t j) const {
    return kind_ == kKindDecode ? eval_decode_circuit(decode_, beta0, beta1, pi0, pi1, j)
                                : eval_hybrid_circuit(hybrid_, beta0, beta1, pi0, pi1, j);
  }

  friend ObfuscatedProgram obfuscate(const DecodeCircuitParams&, size_t);
  friend ObfuscatedProgram obfuscate(const HybridCircuitParams&, size_t);

 private:
  static ObfuscatedProgram wrap(uint8_t kind, Bytes params, size_t pad_to) {
    ByteWriter w;
    w.u8('O');
    w.u8('B');
    w.u8('F');
    w.u8(1);  // format version
    w.u8(1);  // insecure reference instantiation
    w.u8(kind);
    w.u64(params.size());
    w.raw(params);
    Bytes blob = w.take();
    size_t header = blob.size() - params.size();
    size_t target = header + std::max(params.size(), pad_to);
    blob.resize(target, 0);
    return from_blob(std::move(blob));
  }

  void parse() {
    ByteReader r(blob_);
    if (r.u8() != 'O' || r.u8() != 'B' || r.u8() != 'F')
      throw DecodeError("obfuscated program: bad magic");
    if (r.u8() != 1) throw DecodeError("obfuscated program: unsupported version");
    insecure_ = r.u8() != 0;
    kind_ = r.u8();
    uint64_t len = r.u64();
    Bytes params = r.raw(size_t(len));
    ByteReader pr(params);
    if (kind_ == kKindDecode)
      decode_ = deserialize_decode_params(pr);
    else if (kind_ == kKindHybrid)
      hybrid_ = deserialize_hybrid_params(pr);
    else
      throw DecodeError("obfuscated program: unknown circuit kind");
  }

  Bytes blob_;
  uint8_t kind_ = kKindDecode;
  bool insecure_ = true;
  DecodeCircuitParams decode_;
  HybridCircuitParams hybrid_;
};

// pad_to: size of the larger circuit shape; the caller computes it because
// only the caller holds both key halves.
inline ObfuscatedProgram obfuscate(const DecodeCircuitParams& p, size_t pad_to = 0) {
  ByteWriter w;
  serialize_decode_params(w, p);
  return ObfuscatedProgram::wrap(ObfuscatedProgram::kKindDecode, w.take(), pad_to);
}

inline ObfuscatedProgram obfuscate(const HybridCircuitParams& p, size_t pad_to = 0) {
  ByteWriter w;
  serialize_hybrid_params(w, p);
  return ObfuscatedProgram::wrap(ObfuscatedProgram::kKindHybrid, w.take(), pad_to);
}

inline void serialize_program(ByteWriter& w, const ObfuscatedProgram& o) { w.blob(o.blob()); }
inline ObfuscatedProgram deserialize_program(ByteReader& r) {
  return ObfuscatedProgram::from_blob(r.blob());
}

}  // namespace anonsteg
