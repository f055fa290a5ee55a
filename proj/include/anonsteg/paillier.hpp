#pragma once

// Additively homomorphic encryption over Z_n (Paillier). Plaintexts live in
// Z_n, ciphertexts in Z_{n^2}^*; multiplying ciphertexts adds plaintexts and
// raising a ciphertext to a plaintext power scales it. With g = n+1,
// g^m = 1 + m*n (mod n^2), so the deterministic ciphertext combinators below
// need no modular exponentiation for the plaintext part.

#include <gmpxx.h>

#include "anonsteg/common.hpp"

namespace anonsteg {

struct PaillierPublicKey {
  mpz_class n;
  mpz_class n2;
  uint32_t n_bits = 0;

  size_t n_bytes() const { return (n_bits + 7) / 8; }
  size_t ct_bytes() const { return 2 * n_bytes(); }
  bool operator==(const PaillierPublicKey& o) const { return n == o.n; }
};

struct PaillierSecretKey {
  PaillierPublicKey pk;
  mpz_class p, q;
  mpz_class lambda;  // lcm(p-1, q-1)
  mpz_class mu;      // lambda^{-1} mod n
};

inline Bytes mpz_to_bytes_fixed(const mpz_class& x, size_t nbytes) {
  Bytes out(nbytes, 0);
  size_t count = 0;
  if (x != 0) {
    size_t need = (mpz_sizeinbase(x.get_mpz_t(), 2) + 7) / 8;
    if (need > nbytes) throw std::invalid_argument("mpz_to_bytes_fixed: value too large");
    mpz_export(out.data() + (nbytes - need), &count, 1, 1, 1, 0, x.get_mpz_t());
  }
  return out;
}

inline mpz_class bytes_to_mpz(std::span<const uint8_t> b) {
  mpz_class x;
  if (!b.empty()) mpz_import(x.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
  return x;
}

inline mpz_class powm(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

inline PaillierSecretKey paillier_keygen(uint32_t n_bits, Rng& rng) {
  if (n_bits < 8 || n_bits > 8192)
    throw std::invalid_argument("paillier: unsupported modulus size");
  gmp_randclass grand(gmp_randinit_mt);
  grand.seed(static_cast<unsigned long>(rng.u64()));

  uint32_t pb = n_bits / 2, qb = n_bits - pb;
  mpz_class p, q, n;
  for (int tries = 0; tries < 10000; ++tries) {
    p = grand.get_z_bits(pb);
    mpz_setbit(p.get_mpz_t(), pb - 1);
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    q = grand.get_z_bits(qb);
    mpz_setbit(q.get_mpz_t(), qb - 1);
    mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
    if (p == q) continue;
    n = p * q;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) != n_bits) continue;
    mpz_class phi = (p - 1) * (q - 1);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
    if (g != 1) continue;

    PaillierSecretKey sk;
    sk.p = p;
    sk.q = q;
    sk.pk.n = n;
    sk.pk.n2 = n * n;
    sk.pk.n_bits = n_bits;
    mpz_lcm(sk.lambda.get_mpz_t(), mpz_class(p - 1).get_mpz_t(), mpz_class(q - 1).get_mpz_t());
    // L(g^lambda) = lambda for g = n+1, so mu = lambda^{-1} mod n
    if (mpz_invert(sk.mu.get_mpz_t(), sk.lambda.get_mpz_t(), n.get_mpz_t()) == 0) continue;
    return sk;
  }
  throw std::runtime_error("paillier: keygen failed");
}

// g^m with g = n+1
inline mpz_class paillier_gm(const PaillierPublicKey& pk, const mpz_class& m) {
  mpz_class mm = m % pk.n;
  if (mm < 0) mm += pk.n;
  return (1 + mm * pk.n) % pk.n2;
}

inline mpz_class paillier_encrypt(const PaillierPublicKey& pk, const mpz_class& m, Rng& rng) {
  gmp_randclass grand(gmp_randinit_mt);
  grand.seed(static_cast<unsigned long>(rng.u64()));
  mpz_class r, g;
  do {
    r = grand.get_z_range(pk.n - 1) + 1;
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
  } while (g != 1);
  return (paillier_gm(pk, m) * powm(r, pk.n, pk.n2)) % pk.n2;
}

inline mpz_class paillier_decrypt(const PaillierSecretKey& sk, const mpz_class& c) {
  if (c < 0 || c >= sk.pk.n2) throw DecodeError("paillier: ciphertext out of range");
  mpz_class u = powm(c, sk.lambda, sk.pk.n2);
  mpz_class l = (u - 1) / sk.pk.n;
  return (l * sk.mu) % sk.pk.n;
}

// ciphertext combinators (all deterministic)
inline mpz_class paillier_ct_mul(const PaillierPublicKey& pk, const mpz_class& a,
                                 const mpz_class& b) {
  return (a * b) % pk.n2;
}
inline mpz_class paillier_ct_pow(const PaillierPublicKey& pk, const mpz_class& a,
                                 const mpz_class& e) {
  mpz_class ee = e % pk.n;
  if (ee < 0) ee += pk.n;
  return powm(a, ee, pk.n2);
}
inline mpz_class paillier_ct_add_plain(const PaillierPublicKey& pk, const mpz_class& a,
                                       const mpz_class& m) {
  return (a * paillier_gm(pk, m)) % pk.n2;
}

inline void serialize_paillier_pk(ByteWriter& w, const PaillierPublicKey& pk) {
  w.u32(pk.n_bits);
  w.blob(mpz_to_bytes_fixed(pk.n, pk.n_bytes()));
}
inline PaillierPublicKey deserialize_paillier_pk(ByteReader& r) {
  PaillierPublicKey pk;
  pk.n_bits = r.u32();
  pk.n = bytes_to_mpz(r.blob());
  pk.n2 = pk.n * pk.n;
  if (pk.n == 0) throw DecodeError("paillier pk: zero modulus");
  return pk;
}

inline void serialize_paillier_sk(ByteWriter& w, const PaillierSecretKey& sk) {
  serialize_paillier_pk(w, sk.pk);
  w.blob(mpz_to_bytes_fixed(sk.p, sk.pk.n_bytes()));
  w.blob(mpz_to_bytes_fixed(sk.q, sk.pk.n_bytes()));
}
inline PaillierSecretKey deserialize_paillier_sk(ByteReader& r) {
  PaillierSecretKey sk;
  sk.pk = deserialize_paillier_pk(r);
  sk.p = bytes_to_mpz(r.blob());
  sk.q = bytes_to_mpz(r.blob());
  if (sk.p == 0 || sk.q == 0 || sk.p * sk.q != sk.pk.n)
    throw DecodeError("paillier sk: inconsistent factors");
  mpz_lcm(sk.lambda.get_mpz_t(), mpz_class(sk.p - 1).get_mpz_t(),
          mpz_class(sk.q - 1).get_mpz_t());
  if (mpz_invert(sk.mu.get_mpz_t(), sk.lambda.get_mpz_t(), sk.pk.n.get_mpz_t()) == 0)
    throw DecodeError("paillier sk: lambda not invertible");
  return sk;
}

}  // namespace anonsteg
