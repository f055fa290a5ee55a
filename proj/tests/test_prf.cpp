#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "anonsteg/prf.hpp"

using namespace anonsteg;

namespace {

// log of C(n,k)/2^n, summed exactly enough for a coverage bound
double binom_cdf(int n, int k) {
  double s = 0.0;
  for (int i = 0; i <= k; ++i)
    s += std::exp(std::lgamma(n + 1) - std::lgamma(i + 1) - std::lgamma(n - i + 1) -
                  n * std::log(2.0));
  return s;
}

}  // namespace

TEST_CASE("prf_bit is deterministic") {
  Rng rng(1);
  PrfKey k = gen_prf_key(128, rng);
  for (uint64_t j = 0; j < 64; ++j) REQUIRE(prf_bit(k, j) == prf_bit(k, j));
}

TEST_CASE("prf output matches frozen vector for a fixed key") {
  PrfKey k;
  k.key = Bytes{0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07,
                0x08, 0x09, 0x0a, 0x0b, 0x0c, 0x0d, 0x0e, 0x0f};
  std::string got;
  for (uint64_t j = 0; j < 32; ++j) got.push_back(char('0' + prf_bit(k, j)));
  // pinned on first implementation; guards cross-process determinism
  REQUIRE(got == "01011010001011000100111010000100");
}

TEST_CASE("1024-bit prefix has plausible Hamming weight") {
  // the asserted bracket must cover at least 99.99% of Binomial(1024, 1/2)
  double cover = binom_cdf(1024, 612) - binom_cdf(1024, 411);
  REQUIRE(cover >= 0.9999);

  Rng rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    PrfKey k = gen_prf_key(128, rng);
    int weight = 0;
    for (uint64_t j = 0; j < 1024; ++j) weight += prf_bit(k, j);
    REQUIRE(weight >= 412);
    REQUIRE(weight <= 612);
  }
}

TEST_CASE("independent keys agree on at most 612 of 1024 positions") {
  Rng rng(8);
  PrfKey a = gen_prf_key(128, rng);
  PrfKey b = gen_prf_key(128, rng);
  REQUIRE(a.key != b.key);
  int agree = 0;
  for (uint64_t j = 0; j < 1024; ++j) agree += (prf_bit(a, j) == prf_bit(b, j));
  REQUIRE(agree >= 412);
  REQUIRE(agree <= 612);
}

TEST_CASE("stream_xor is an involution") {
  Rng rng(9);
  PrfKey k = gen_prf_key(128, rng);
  for (int trial = 0; trial < 16; ++trial) {
    BitString x = rng.bitstring(64);
    REQUIRE(stream_xor(k, stream_xor(k, x)) == x);
  }
}

TEST_CASE("stream_xor of zeros is the keystream and cancels across messages") {
  Rng rng(10);
  PrfKey k = gen_prf_key(128, rng);
  BitString zero(64);
  BitString ks = stream_xor(k, zero);
  BitString x = rng.bitstring(64), y = rng.bitstring(64);
  REQUIRE((stream_xor(k, x) ^ x) == ks);
  REQUIRE((stream_xor(k, x) ^ stream_xor(k, y)) == (x ^ y));
}

TEST_CASE("changing input bit j flips exactly output bit j") {
  Rng rng(11);
  PrfKey k = gen_prf_key(128, rng);
  BitString x = rng.bitstring(64);
  BitString base = stream_xor(k, x);
  for (size_t j = 0; j < 64; ++j) {
    BitString xx = x;
    xx.flip(j);
    BitString out = stream_xor(k, xx);
    for (size_t m = 0; m < 64; ++m)
      REQUIRE(out.get(m) == (m == j ? 1 ^ base.get(m) : base.get(m)));
  }
}

TEST_CASE("key generation validates lambda") {
  Rng rng(12);
  REQUIRE_THROWS_AS(gen_prf_key(60, rng), std::invalid_argument);
  REQUIRE_THROWS_AS(gen_prf_key(130, rng), std::invalid_argument);
  REQUIRE(gen_prf_key(128, rng).key.size() == 16);
}

TEST_CASE("prf key round-trips through serialization") {
  Rng rng(13);
  PrfKey k = gen_prf_key(128, rng);
  ByteWriter w;
  serialize_prf_key(w, k);
  Bytes b = w.take();
  ByteReader r(b);
  REQUIRE(deserialize_prf_key(r) == k);
}
