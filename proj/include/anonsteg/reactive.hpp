#pragma once

// Reactive model: n players post documents over d rounds; the leaker owns
// rounds k = i (mod n) and may react to everything posted so far, everyone
// else posts uniform documents. A scheme is three operations: stateful
// encode, key extraction over the final transcript, and a deterministic,
// total decode from (dk, transcript) alone.
//
// Built-in schemes:
//   null           leaker posts uniform documents too; nothing flows.
//   direct         leaker writes the message behind a 16-bit magic prefix
//                  on her first turn; decode scans for the prefix. The
//                  leaker reveals herself; useful as a detector fixture.
//   reset-example  two players, one secret bit. The leaker claims the
//                  "leader" role with an all-zeros document and then either
//                  commits (0^{l-1}1) or resets (0^l) depending on the last
//                  bit the other player happened to post. See
//                  ResetExampleScheme for the exact rules.
//   wrapped-static the scheme from scheme.hpp run inside the reactive
//                  interface: encoded document on the first turn, uniform
//                  afterwards, key extraction at the leaker's global round.
//
// normalize_target wraps any scheme so that decoding a fully uniform
// transcript is uniform: documents grow by msg_bits, the pad rides in the
// extension of the first document and cancels at decode time.

#include "anonsteg/scheme.hpp"

namespace anonsteg {

class IReactiveScheme {
 public:
  virtual ~IReactiveScheme() = default;

  virtual std::string name() const = 0;
  virtual size_t doc_bits() const = 0;
  virtual size_t msg_bits() const = 0;
  virtual size_t dk_bits() const = 0;

  virtual Bytes init_state() const = 0;
  virtual std::pair<Document, Bytes> reactive_enc(const BitString& x,
                                                  std::span<const Document> prefix, Bytes state,
                                                  Rng& rng) const = 0;
  virtual BitString reactive_keyex(std::span<const Document> t, Bytes state, Rng& rng) const = 0;
  // deterministic and total
  virtual BitString reactive_dec(const BitString& dk, std::span<const Document> t) const = 0;
};

struct SimulationConfig {
  uint64_t n = 2;
  uint64_t d = 0;
  uint64_t seed = 0;

  void validate() const {
    if (n < 2) throw std::invalid_argument("simulation: need at least two players");
    if (d < 1) throw std::invalid_argument("simulation: need at least one round");
  }
};

struct GameRecord {
  std::vector<Document> docs;
  BitString dk;
  uint64_t leaker = 0;  // 1-based player index
  BitString x;
  BitString x_prime;
  bool correct = false;
  uint64_t enc_calls = 0;
  Bytes final_state;
};

inline GameRecord run_game(const SimulationConfig& cfg, const IReactiveScheme& scheme,
                           const BitString& x, Rng& rng) {
  cfg.validate();
  if (x.bits() != scheme.msg_bits()) throw std::invalid_argument("run_game: bad message length");
  GameRecord g;
  g.x = x;
  g.leaker = 1 + rng.below(cfg.n);
  Bytes state = scheme.init_state();
  g.docs.reserve(size_t(cfg.d));
  for (uint64_t k = 1; k <= cfg.d; ++k) {
    if (k % cfg.n == g.leaker % cfg.n) {
      auto [doc, next] = scheme.reactive_enc(x, g.docs, std::move(state), rng);
      if (doc.bits() != scheme.doc_bits())
        throw std::runtime_error("run_game: scheme emitted a wrong-length document");
      g.docs.push_back(std::move(doc));
      state = std::move(next);
      ++g.enc_calls;
    } else {
      g.docs.push_back(rng.bitstring(scheme.doc_bits()));
    }
  }
  g.dk = scheme.reactive_keyex(g.docs, state, rng);
  if (g.dk.bits() != scheme.dk_bits())
    throw std::runtime_error("run_game: scheme emitted a wrong-length decoding key");
  g.final_state = std::move(state);
  g.x_prime = scheme.reactive_dec(g.dk, g.docs);
  g.correct = g.x_prime == x;
  return g;
}

// ------------------------------------------------------------------- null

class NullScheme : public IReactiveScheme {
 public:
  NullScheme(size_t ell, size_t ell_prime, size_t s = 0)
      : ell_(ell), ellp_(ell_prime), s_(s) {
    if (ell_prime > ell) throw std::invalid_argument("null scheme: msg longer than document");
  }
  std::string name() const override { return "null"; }
  size_t doc_bits() const override { return ell_; }
  size_t msg_bits() const override { return ellp_; }
  size_t dk_bits() const override { return s_; }
  Bytes init_state() const override { return {}; }
  std::pair<Document, Bytes> reactive_enc(const BitString&, std::span<const Document>, Bytes st,
                                          Rng& rng) const override {
    return {rng.bitstring(ell_), std::move(st)};
  }
  BitString reactive_keyex(std::span<const Document>, Bytes, Rng& rng) const override {
    return rng.bitstring(s_);
  }
  BitString reactive_dec(const BitString&, std::span<const Document> t) const override {
    return t.empty() ? BitString(ellp_) : t.back().slice(0, ellp_);
  }

 private:
  size_t ell_, ellp_, s_;
};

// ------------------------------------------------------------------ direct

class DirectScheme : public IReactiveScheme {
 public:
  static constexpr uint16_t kMagic = 0xa5c3;
  static constexpr size_t kMagicBits = 16;

  explicit DirectScheme(size_t ell) : ell_(ell) {
    if (ell < kMagicBits + 1) throw std::invalid_argument("direct scheme: document too short");
  }
  std::string name() const override { return "direct"; }
  size_t doc_bits() const override { return ell_; }
  size_t msg_bits() const override { return ell_ - kMagicBits; }
  size_t dk_bits() const override { return 0; }
  Bytes init_state() const override { return {0}; }
  std::pair<Document, Bytes> reactive_enc(const BitString& x, std::span<const Document>,
                                          Bytes st, Rng& rng) const override {
    if (!st.empty() && st[0]) return {rng.bitstring(ell_), std::move(st)};
    Document doc = BitString::concat(BitString::from_u64(kMagic, kMagicBits), x);
    return {std::move(doc), Bytes{1}};
  }
  BitString reactive_keyex(std::span<const Document>, Bytes, Rng&) const override {
    return BitString(0);
  }
  BitString reactive_dec(const BitString&, std::span<const Document> t) const override {
    for (const auto& doc : t)
      if (doc.slice(0, kMagicBits).value_u64() == kMagic)
        return doc.slice(kMagicBits, msg_bits());
    return BitString(msg_bits());
  }

 private:
  size_t ell_;
};

// ----------------------------------------------------------- reset-example

// Decode state machine, shared between decoding and the exact continuation
// probabilities. Rounds are 1-based; with two players the sender of round k
// has parity k % 2.
struct ResetDecodeState {
  enum Phase : uint8_t { kStart, kFirstNonZero, kAwaitThird, kLeader, kDecided };
  uint8_t phase = kStart;
  uint8_t leader_parity = 0;  // k % 2 of the leader's rounds
  uint8_t lsb_last = 0;       // last bit of the latest document
  uint8_t other_lsb = 0;      // last bit of the non-leader's latest document
  uint8_t decided = 0;

  uint32_t id() const {
    return uint32_t(phase) | uint32_t(leader_parity) << 3 | uint32_t(lsb_last) << 4 |
           uint32_t(other_lsb) << 5 | uint32_t(decided) << 6;
  }
};

namespace resetdetail {

// v < (9/10) * 2^ell, exactly
inline bool low_value(uint64_t v, size_t ell) { return 10 * v < 9 * (uint64_t(1) << ell); }

inline ResetDecodeState advance(ResetDecodeState s, uint64_t k, bool is_zero, uint8_t lsb,
                                uint8_t msb, bool low) {
  using St = ResetDecodeState;
  switch (s.phase) {
    case St::kStart:
      if (is_zero) {
        s.phase = St::kLeader;
        s.leader_parity = uint8_t(k % 2);
        s.lsb_last = 0;
        s.other_lsb = 0;
      } else {
        s.phase = St::kFirstNonZero;
        s.lsb_last = lsb;
      }
      break;
    case St::kFirstNonZero:
      if (is_zero) {
        s.phase = St::kLeader;
        s.leader_parity = uint8_t(k % 2);
        s.other_lsb = s.lsb_last;  // round 1 belongs to the non-leader
        s.lsb_last = 0;
      } else {
        s.phase = St::kAwaitThird;
      }
      break;
    case St::kAwaitThird:
      s.phase = St::kDecided;
      s.decided = msb;
      break;
    case St::kLeader:
      if (k % 2 == s.leader_parity) {
        if (is_zero) {
          s.lsb_last = 0;
        } else {
          s.decided = low ? s.lsb_last : uint8_t(1 ^ s.lsb_last);
          s.phase = St::kDecided;
        }
      } else {
        s.lsb_last = lsb;
        s.other_lsb = lsb;
      }
      break;
    case St::kDecided:
      break;
  }
  return s;
}

inline ResetDecodeState advance_doc(ResetDecodeState s, uint64_t k, const Document& doc,
                                    size_t ell) {
  uint64_t v = doc.value_u64();
  return advance(s, k, v == 0, doc.lsb(), doc.msb(), low_value(v, ell));
}

inline uint8_t outcome(const ResetDecodeState& s) {
  if (s.phase == ResetDecodeState::kDecided) return s.decided;
  if (s.phase == ResetDecodeState::kLeader) return s.other_lsb;
  return 0;  // fewer than three documents; callers reject d < 3 up front
}

}  // namespace resetdetail

inline uint8_t reset_example_dec(std::span<const Document> t, size_t ell) {
  if (t.size() < 3) throw std::invalid_argument("reset_example_dec: need at least 3 documents");
  ResetDecodeState s;
  for (size_t k = 0; k < t.size(); ++k) s = resetdetail::advance_doc(s, k + 1, t[k], ell);
  return resetdetail::outcome(s);
}

struct ResetExampleStats {
  bool claimed = false;
  bool committed = false;
  bool failed = false;  // the other player claimed leadership first
  uint64_t claim_round = 0;
  uint64_t resets = 0;
};

class ResetExampleScheme : public IReactiveScheme {
 public:
  explicit ResetExampleScheme(size_t ell) : ell_(ell) {
    if (ell < 2 || ell > 60) throw std::invalid_argument("reset example: need 2 <= ell <= 60");
  }
  std::string name() const override { return "reset-example"; }
  size_t doc_bits() const override { return ell_; }
  size_t msg_bits() const override { return 1; }
  size_t dk_bits() const override { return 0; }

  Bytes init_state() const override { return pack({}); }

  // First move: claim the leader role with an all-zeros document. After
  // that, commit with 0^{l-1}1 once the other player's latest document ends
  // in the secret bit AND his post-claim documents ending in the right bit
  // outnumber those ending in the wrong bit; otherwise reset with 0^l.
  std::pair<Document, Bytes> reactive_enc(const BitString& x, std::span<const Document> prefix,
                                          Bytes state, Rng& rng) const override {
    ResetExampleStats st = unpack(state);
    uint64_t k = prefix.size() + 1;
    uint8_t xb = x.get(0);

    if (st.failed) return {rng.bitstring(ell_), pack(st)};
    if (!st.claimed) {
      if (k > 1 && prefix[0].is_zero()) {
        st.failed = true;  // round-1 player already holds leadership
        return {rng.bitstring(ell_), pack(st)};
      }
      st.claimed = true;
      st.claim_round = k;
      return {BitString(ell_), pack(st)};
    }
    if (st.committed) return {BitString(ell_), pack(st)};

    uint64_t match = 0, mismatch = 0;
    for (uint64_t r = st.claim_round + 1; r < k; ++r) {
      if (r % 2 == k % 2) continue;  // own round
      uint8_t b = prefix[size_t(r - 1)].lsb();
      (b == xb ? match : mismatch)++;
    }
    uint8_t last = prefix[size_t(k - 2)].lsb();
    if (last == xb && match > mismatch) {
      st.committed = true;
      BitString commit(ell_);
      commit.set(ell_ - 1, 1);
      return {std::move(commit), pack(st)};
    }
    ++st.resets;
    return {BitString(ell_), pack(st)};
  }

  BitString reactive_keyex(std::span<const Document>, Bytes, Rng&) const override {
    return BitString(0);
  }
  BitString reactive_dec(const BitString&, std::span<const Document> t) const override {
    BitString out(1);
    out.set(0, reset_example_dec(t, ell_));
    return out;
  }

  static Bytes pack(const ResetExampleStats& st) {
    ByteWriter w;
    w.u8(st.claimed);
    w.u8(st.committed);
    w.u8(st.failed);
    w.u64(st.claim_round);
    w.u64(st.resets);
    return w.take();
  }
  static ResetExampleStats unpack(std::span<const uint8_t> b) {
    ByteReader r(b);
    ResetExampleStats st;
    st.claimed = r.u8();
    st.committed = r.u8();
    st.failed = r.u8();
    st.claim_round = r.u64();
    st.resets = r.u64();
    return st;
  }

 private:
  size_t ell_;
};

// Exact continuation probabilities for the reset protocol: for each k,
// Pr[Dec(prefix + uniform continuation) = x], computed by backward
// induction over the decode state machine. Exact for dyadic denominators up
// to the long double mantissa.
inline std::vector<long double> reset_example_continuation_profile(std::span<const Document> t,
                                                                   uint8_t x, size_t ell) {
  if (ell > 20) throw std::invalid_argument("reset profile: ell too large to enumerate");
  size_t d = t.size();
  uint64_t m = uint64_t(1) << ell;
  struct Cat {
    bool zero;
    uint8_t lsb, msb;
    bool low;
  };
  std::vector<Cat> cats;
  cats.resize(size_t(m));
  for (uint64_t v = 0; v < m; ++v)
    cats[size_t(v)] = {v == 0, uint8_t(v & 1), uint8_t((v >> (ell - 1)) & 1),
                       resetdetail::low_value(v, ell)};

  // E[k][state id] = success probability with k documents already placed
  std::vector<std::vector<long double>> E(d + 1, std::vector<long double>(128, -1.0L));
  std::vector<ResetDecodeState> by_id(128);
  for (uint32_t id = 0; id < 128; ++id) {
    ResetDecodeState s;
    s.phase = uint8_t(id & 7);
    s.leader_parity = (id >> 3) & 1;
    s.lsb_last = (id >> 4) & 1;
    s.other_lsb = (id >> 5) & 1;
    s.decided = (id >> 6) & 1;
    by_id[id] = s;
  }
  for (uint32_t id = 0; id < 128; ++id) {
    const ResetDecodeState& s = by_id[id];
    if (s.phase > ResetDecodeState::kDecided) continue;
    E[d][id] = (resetdetail::outcome(s) == x) ? 1.0L : 0.0L;
  }
  for (size_t k = d; k-- > 0;) {
    for (uint32_t id = 0; id < 128; ++id) {
      const ResetDecodeState& s = by_id[id];
      if (s.phase > ResetDecodeState::kDecided) continue;
      long double acc = 0.0L;
      for (uint64_t v = 0; v < m; ++v) {
        const Cat& c = cats[size_t(v)];
        ResetDecodeState ns = resetdetail::advance(s, k + 1, c.zero, c.lsb, c.msb, c.low);
        acc += E[k + 1][ns.id()];
      }
      E[k][id] = acc / (long double)m;
    }
  }

  std::vector<long double> profile;
  profile.reserve(d + 1);
  ResetDecodeState s;
  profile.push_back(E[0][s.id()]);
  for (size_t k = 0; k < d; ++k) {
    s = resetdetail::advance_doc(s, k + 1, t[k], ell);
    profile.push_back(E[k + 1][s.id()]);
  }
  return profile;
}

// ---------------------------------------------------------- wrapped-static

class WrappedStaticScheme : public IReactiveScheme {
 public:
  explicit WrappedStaticScheme(SchemeParams params) : params_(params) {
    params_.validate();
    // one dry run pins the (parameter-determined) decoding key size
    Rng rng(0xd15c0);
    PrfKey ek = gen(params_, rng);
    std::vector<Document> docs;
    for (uint64_t k = 0; k < params_.d; ++k) docs.push_back(rng.bitstring(params_.ell));
    BitString x = rng.bitstring(params_.ell);
    docs[0] = enc(ek, x);
    Transcript t(std::move(docs));
    dk_bits_ = key_extract(params_, ek, t, 1, rng).serialize().size() * 8;
  }

  std::string name() const override { return "wrapped-static"; }
  size_t doc_bits() const override { return params_.ell; }
  size_t msg_bits() const override { return params_.ell; }
  size_t dk_bits() const override { return dk_bits_; }

  Bytes init_state() const override {
    ByteWriter w;
    w.u8(0);
    w.u64(0);
    w.blob(Bytes{});
    return w.take();
  }

  std::pair<Document, Bytes> reactive_enc(const BitString& x, std::span<const Document> prefix,
                                          Bytes state, Rng& rng) const override {
    ByteReader r(state);
    uint8_t posted = r.u8();
    if (posted) return {rng.bitstring(params_.ell), std::move(state)};
    PrfKey ek = gen_prf_key(params_.lambda, rng);
    Document doc = enc(ek, x);
    ByteWriter w;
    w.u8(1);
    w.u64(prefix.size() + 1);
    w.blob(ek.key);
    return {std::move(doc), w.take()};
  }

  BitString reactive_keyex(std::span<const Document> t, Bytes state, Rng& rng) const override {
    ByteReader r(state);
    uint8_t posted = r.u8();
    uint64_t round = r.u64();
    Bytes ek_bytes = r.blob();
    if (!posted) return BitString(dk_bits_);
    Transcript tr(std::vector<Document>(t.begin(), t.end()));
    DecodingKey dk = key_extract(params_, PrfKey{ek_bytes}, tr, round, rng);
    Bytes ser = dk.serialize();
    size_t nbits = ser.size() * 8;
    return BitString(nbits, std::move(ser));
  }

  BitString reactive_dec(const BitString& dk_bits, std::span<const Document> t) const override {
    try {
      DecodingKey dk = DecodingKey::deserialize(dk_bits.bytes());
      Transcript tr(std::vector<Document>(t.begin(), t.end()));
      auto x = dec(dk, tr);
      if (x && x->bits() == params_.ell) return *x;
    } catch (const std::exception&) {
      // fall through: garbage keys decode to the fixed default
    }
    return BitString(params_.ell);
  }

 private:
  SchemeParams params_;
  size_t dk_bits_ = 0;
};

// -------------------------------------------------------- normalize target

// Decoding the wrapped scheme on uniform input is uniform: the first
// document carries msg_bits extra bits X', the inner scheme transports
// x ^ X', and decode XORs X' back on.
class NormalizedScheme : public IReactiveScheme {
 public:
  explicit NormalizedScheme(std::shared_ptr<const IReactiveScheme> inner)
      : inner_(std::move(inner)) {}

  std::string name() const override { return "normalized(" + inner_->name() + ")"; }
  size_t doc_bits() const override { return inner_->doc_bits() + inner_->msg_bits(); }
  size_t msg_bits() const override { return inner_->msg_bits(); }
  size_t dk_bits() const override { return inner_->dk_bits(); }

  Bytes init_state() const override {
    ByteWriter w;
    w.u8(0);
    w.bitstring(BitString(0));
    w.blob(inner_->init_state());
    return w.take();
  }

  std::pair<Document, Bytes> reactive_enc(const BitString& x, std::span<const Document> prefix,
                                          Bytes state, Rng& rng) const override {
    ByteReader r(state);
    uint8_t have = r.u8();
    BitString xprime = r.bitstring();
    Bytes inner_state = r.blob();
    if (!have) {
      xprime = prefix.empty() ? rng.bitstring(msg_bits())
                              : prefix[0].slice(inner_->doc_bits(), msg_bits());
      have = 1;
    }
    std::vector<Document> stripped = strip(prefix);
    auto [doc, inner_next] =
        inner_->reactive_enc(x ^ xprime, stripped, std::move(inner_state), rng);
    BitString ext = prefix.empty() ? xprime : rng.bitstring(msg_bits());
    ByteWriter w;
    w.u8(have);
    w.bitstring(xprime);
    w.blob(inner_next);
    return {BitString::concat(doc, ext), w.take()};
  }

  BitString reactive_keyex(std::span<const Document> t, Bytes state, Rng& rng) const override {
    ByteReader r(state);
    r.u8();
    r.bitstring();
    Bytes inner_state = r.blob();
    std::vector<Document> stripped = strip(t);
    return inner_->reactive_keyex(stripped, std::move(inner_state), rng);
  }

  BitString reactive_dec(const BitString& dk, std::span<const Document> t) const override {
    if (t.empty()) return BitString(msg_bits());
    BitString xprime = t[0].slice(inner_->doc_bits(), msg_bits());
    std::vector<Document> stripped = strip(t);
    return inner_->reactive_dec(dk, stripped) ^ xprime;
  }

 private:
  std::vector<Document> strip(std::span<const Document> t) const {
    std::vector<Document> out;
    out.reserve(t.size());
    for (const auto& doc : t) out.push_back(doc.slice(0, inner_->doc_bits()));
    return out;
  }
  std::shared_ptr<const IReactiveScheme> inner_;
};

inline std::shared_ptr<IReactiveScheme> normalize_target(
    std::shared_ptr<const IReactiveScheme> inner) {
  return std::make_shared<NormalizedScheme>(std::move(inner));
}

}  // namespace anonsteg
