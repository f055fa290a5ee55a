#pragma once

// Shared basics: byte buffers, MSB-first bit strings, length-prefixed binary
// io, a seedable RNG with derived streams, and a keyed SHA-256 digest.
//
// Conventions used across the library:
//   - bit 0 of a BitString is the most significant bit of byte 0;
//   - "value" of a short bit string is its big-endian integer reading;
//   - all integer fields in serialized formats are little-endian;
//   - positions/indices exposed in public APIs are 1-based where the
//     operation contract says so (documents i in [d], bit slots j in [l],
//     commitment positions in [L]).

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>

namespace anonsteg {

using Bytes = std::vector<uint8_t>;

struct DecodeError : std::runtime_error {
  explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------- BitString

class BitString {
 public:
  BitString() = default;
  explicit BitString(size_t nbits) : nbits_(nbits), data_((nbits + 7) / 8, 0) {}
  BitString(size_t nbits, Bytes raw) : nbits_(nbits), data_(std::move(raw)) {
    if (data_.size() != (nbits_ + 7) / 8)
      throw std::invalid_argument("BitString: byte count does not match bit count");
    mask_tail();
  }

  size_t bits() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }
  const Bytes& bytes() const { return data_; }

  uint8_t get(size_t j) const {
    check(j);
    return (data_[j >> 3] >> (7 - (j & 7))) & 1;
  }
  void set(size_t j, uint8_t v) {
    check(j);
    uint8_t m = uint8_t(0x80u >> (j & 7));
    if (v & 1)
      data_[j >> 3] |= m;
    else
      data_[j >> 3] &= uint8_t(~m);
  }
  void flip(size_t j) { set(j, uint8_t(1 ^ get(j))); }

  uint8_t msb() const { return get(0); }
  uint8_t lsb() const { return get(nbits_ - 1); }

  // Big-endian integer reading; requires bits() <= 64.
  uint64_t value_u64() const {
    if (nbits_ > 64) throw std::invalid_argument("value_u64: too many bits");
    uint64_t v = 0;
    for (size_t j = 0; j < nbits_; ++j) v = (v << 1) | get(j);
    return v;
  }
  static BitString from_u64(uint64_t v, size_t nbits) {
    if (nbits > 64) throw std::invalid_argument("from_u64: too many bits");
    BitString b(nbits);
    for (size_t j = 0; j < nbits; ++j)
      b.set(nbits - 1 - j, uint8_t((v >> j) & 1));
    return b;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](uint8_t c) { return c == 0; });
  }

  BitString operator^(const BitString& o) const {
    if (o.nbits_ != nbits_) throw std::invalid_argument("xor: length mismatch");
    BitString r(nbits_);
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = uint8_t(data_[i] ^ o.data_[i]);
    return r;
  }
  bool operator==(const BitString& o) const = default;

  BitString slice(size_t start, size_t len) const {
    if (start + len > nbits_) throw std::invalid_argument("slice: out of range");
    BitString r(len);
    for (size_t j = 0; j < len; ++j) r.set(j, get(start + j));
    return r;
  }
  static BitString concat(const BitString& a, const BitString& b) {
    BitString r(a.nbits_ + b.nbits_);
    for (size_t j = 0; j < a.nbits_; ++j) r.set(j, a.get(j));
    for (size_t j = 0; j < b.nbits_; ++j) r.set(a.nbits_ + j, b.get(j));
    return r;
  }

  std::string hex() const {
    static const char* k = "0123456789abcdef";
    std::string s;
    s.reserve(data_.size() * 2);
    for (uint8_t c : data_) {
      s.push_back(k[c >> 4]);
      s.push_back(k[c & 15]);
    }
    return s;
  }

 private:
  void check(size_t j) const {
    if (j >= nbits_) throw std::invalid_argument("BitString: bit index out of range");
  }
  void mask_tail() {
    if (nbits_ % 8) data_.back() &= uint8_t(0xff00u >> (nbits_ % 8));
  }
  size_t nbits_ = 0;
  Bytes data_;
};

// ----------------------------------------------------------------- byte io

class ByteWriter {
 public:
  void u8(uint8_t v) { out_.push_back(v); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(uint8_t(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(uint8_t(v >> (8 * i)));
  }
  void raw(std::span<const uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void blob(std::span<const uint8_t> b) {
    u32(uint32_t(b.size()));
    raw(b);
  }
  void bitstring(const BitString& b) {
    u64(b.bits());
    raw(b.bytes());
  }
  Bytes take() { return std::move(out_); }
  const Bytes& peek() const { return out_; }
  size_t size() const { return out_.size(); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> in) : in_(in) {}

  uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(in_[pos_++]) << (8 * i);
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(in_[pos_++]) << (8 * i);
    return v;
  }
  Bytes raw(size_t n) {
    need(n);
    Bytes b(in_.begin() + pos_, in_.begin() + pos_ + n);
    pos_ += n;
    return b;
  }
  Bytes blob() { return raw(u32()); }
  BitString bitstring() {
    uint64_t nbits = u64();
    if (nbits > (uint64_t(in_.size()) - pos_) * 8 + 7)
      throw DecodeError("bitstring: truncated");
    Bytes raw_bytes = raw((size_t(nbits) + 7) / 8);
    return BitString(size_t(nbits), std::move(raw_bytes));
  }
  bool done() const { return pos_ == in_.size(); }
  size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(size_t n) const {
    if (pos_ + n > in_.size()) throw DecodeError("unexpected end of input");
  }
  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

// -------------------------------------------------------------------- rng

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seedable randomness handle. Every randomized algorithm in the library takes
// one of these explicitly so that whole experiments replay from one seed.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : gen_(seed) {}

  uint64_t u64() { return gen_(); }
  uint8_t bit() { return uint8_t(gen_() & 1); }
  // uniform in [0, n)
  uint64_t below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    uint64_t lim = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
    uint64_t v;
    do {
      v = gen_();
    } while (v >= lim);
    return v % n;
  }
  Bytes bytes(size_t n) {
    Bytes b(n);
    for (size_t i = 0; i < n; ++i) b[i] = uint8_t(gen_() >> 24);
    return b;
  }
  BitString bitstring(size_t nbits) {
    BitString b(nbits);
    for (size_t j = 0; j < nbits; ++j) b.set(j, bit());
    return b;
  }
  double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }

  // Derive an independent child stream; deterministic given call order.
  Rng fork(uint64_t tag) { return Rng(splitmix64(gen_() ^ splitmix64(tag))); }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// ------------------------------------------------------------------- hash

using Digest32 = std::array<uint8_t, 32>;

inline Digest32 sha256(std::span<const uint8_t> data) {
  Digest32 out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != 32)
    throw std::runtime_error("sha256 failed");
  return out;
}

// keyed, domain-separated digest: SHA-256(key || tag || payload)
inline Digest32 keyed_digest(std::span<const uint8_t> key, std::string_view tag,
                             std::span<const uint8_t> payload) {
  Bytes buf;
  buf.reserve(key.size() + tag.size() + payload.size());
  buf.insert(buf.end(), key.begin(), key.end());
  buf.insert(buf.end(), tag.begin(), tag.end());
  buf.insert(buf.end(), payload.begin(), payload.end());
  return sha256(buf);
}

inline void be64_into(uint64_t v, uint8_t* p) {
  for (int i = 0; i < 8; ++i) p[i] = uint8_t(v >> (8 * (7 - i)));
}

}  // namespace anonsteg
