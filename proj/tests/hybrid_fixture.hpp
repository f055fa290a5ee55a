#pragma once

// Shared test fixture: the two-encodings setup against which the decode
// circuit and its hybrid variant must agree. Both candidate documents carry
// the same message, one under each stream key; the index ciphertext of the
// selected half points at the first candidate, the other at the second.

#include "anonsteg/scheme.hpp"

namespace anonsteg::testfix {

struct HybridSetup {
  SchemeParams params;
  BitString x;
  PrfKey ek, ek_alt;
  uint64_t i0 = 0, i1 = 0;
  uint8_t sigma = 0;
  Transcript t;
  std::array<HePublicKey, 2> pk;
  std::array<HeSecretKey, 2> sk;
  std::array<IndexCiphertext, 2> alpha;
  std::array<std::vector<BitString>, 2> beta;
  std::array<CommitKey, 2> ck;
  std::array<VcCommitment, 2> gamma;
  std::array<std::vector<VcProof>, 2> pi;

  DecodeCircuitParams decode_params(bool alt) const {
    DecodeCircuitParams p;
    p.ek = alt ? ek_alt : ek;
    p.sigma = alt ? uint8_t(1 ^ sigma) : sigma;
    p.sk_sigma = sk[p.sigma];
    p.ck0 = ck[0];
    p.ck1 = ck[1];
    p.gamma0 = gamma[0];
    p.gamma1 = gamma[1];
    return p;
  }

  HybridCircuitParams hybrid_params(uint64_t tau) const {
    HybridCircuitParams p;
    p.tau = tau;
    p.ek = ek;
    p.ek_alt = ek_alt;
    p.sigma = sigma;
    p.sk0 = sk[0];
    p.sk1 = sk[1];
    p.ck0 = ck[0];
    p.ck1 = ck[1];
    p.gamma0 = gamma[0];
    p.gamma1 = gamma[1];
    return p;
  }
};

// binding_index: where the freshly generated commitment keys bind (0 = none)
inline HybridSetup make_hybrid_setup(const SchemeParams& params, uint64_t binding_index,
                                     Rng& rng, std::optional<uint8_t> force_sigma = {}) {
  HybridSetup s;
  s.params = params;
  s.x = rng.bitstring(params.ell);
  s.ek = gen_prf_key(params.lambda, rng);
  s.ek_alt = gen_prf_key(params.lambda, rng);
  s.i0 = 1 + rng.below(params.d);
  do {
    s.i1 = 1 + rng.below(params.d);
  } while (params.d > 1 && s.i1 == s.i0);
  if (params.d == 1) throw std::invalid_argument("hybrid setup needs d >= 2");
  s.sigma = force_sigma ? *force_sigma : rng.bit();

  std::vector<Document> docs;
  for (uint64_t k = 1; k <= params.d; ++k) docs.push_back(rng.bitstring(params.ell));
  docs[s.i0 - 1] = enc(s.ek, s.x);
  docs[s.i1 - 1] = enc(s.ek_alt, s.x);
  s.t = Transcript(std::move(docs));

  for (int u = 0; u < 2; ++u) {
    auto [pk, sk] = he_gen(params.he, params.lambda, rng);
    s.pk[u] = pk;
    s.sk[u] = sk;
  }
  // the selected half encrypts i0, the ignored half i1
  s.alpha[s.sigma] = he_enc_index(s.pk[s.sigma], s.i0, params.d, rng);
  s.alpha[1 ^ s.sigma] = he_enc_index(s.pk[1 ^ s.sigma], s.i1, params.d, rng);

  for (int u = 0; u < 2; ++u) {
    s.beta[u] = schemedetail::eval_beta_blocks(s.pk[u], s.alpha[u], s.t);
    s.ck[u] = vc_gen(schemedetail::vc_params_for(params, s.pk[u]), binding_index, rng);
    s.gamma[u] = vc_commit(s.ck[u], s.beta[u]);
    s.pi[u] = vc_decommit_all(s.ck[u], s.beta[u]);
  }
  return s;
}

}  // namespace anonsteg::testfix
