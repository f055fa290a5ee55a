#pragma once

// Keyed pseudorandom bit function f : {0,1}^lambda x {0,1}^lambda -> {0,1}
// and the bitwise stream cipher built on it. The PRF is a keyed hash
// truncated to one bit; the bit position is encoded as a 64-bit big-endian
// integer zero-padded to lambda bits, which pins cross-process determinism.

#include "anonsteg/common.hpp"

namespace anonsteg {

struct PrfKey {
  Bytes key;  // lambda/8 bytes

  size_t lambda_bits() const { return key.size() * 8; }
  bool operator==(const PrfKey&) const = default;
};

inline PrfKey gen_prf_key(size_t lambda, Rng& rng) {
  if (lambda < 64 || lambda % 8 != 0)
    throw std::invalid_argument("prf: lambda must be a multiple of 8, at least 64");
  return PrfKey{rng.bytes(lambda / 8)};
}

inline uint8_t prf_bit(const PrfKey& k, uint64_t index) {
  size_t kb = k.key.size();
  if (kb < 8) throw std::invalid_argument("prf: key shorter than 64 bits");
  Bytes buf(kb + kb, 0);  // key || zero-padded big-endian index block
  std::memcpy(buf.data(), k.key.data(), kb);
  be64_into(index, buf.data() + 2 * kb - 8);
  return sha256(buf)[0] & 1;
}

// c[j] = x[j] xor f(key, j+1); bit slots are numbered from 1 as everywhere
// a slot index j is passed around explicitly.
inline BitString stream_xor(const PrfKey& k, const BitString& x) {
  BitString out(x.bits());
  for (size_t j = 0; j < x.bits(); ++j)
    out.set(j, uint8_t(x.get(j) ^ prf_bit(k, uint64_t(j) + 1)));
  return out;
}

inline void serialize_prf_key(ByteWriter& w, const PrfKey& k) { w.blob(k.key); }
inline PrfKey deserialize_prf_key(ByteReader& r) { return PrfKey{r.blob()}; }

}  // namespace anonsteg
