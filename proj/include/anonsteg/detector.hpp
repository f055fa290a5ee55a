#pragma once

// The polynomial-time leaker-identification adversary for reactive schemes,
// plus the additive-difference baseline it improves on.
//
// For each prefix length k the adversary estimates (or computes exactly)
//   p_k = Pr[ Dec_{dk'}(t^k, U^{d-k}) = x ]
// over uniform continuations U and a uniform decoding key dk'. Suspicion of
// player j is the product of the ratios p_k / p_{k-1} over j's rounds, taken
// from the first round k0 after which every estimate clears the floor
// p_min = eps^2 / (2^{s+7} d^2). The ratio across the floor boundary itself
// is kept, with the unreliable below-floor denominator replaced by the
// inflated floor (1 - 1/(2d))^{-1} p_min; that boundary ratio belongs to the
// sender of round k0. If exactly one player's factor clears m0 = 8d/eps the
// detector names that player, otherwise it guesses uniformly.

#include <cmath>
#include <limits>

#include "anonsteg/reactive.hpp"

namespace anonsteg {

struct DetectorParams {
  double epsilon = 0.5;
  uint64_t n_players = 2;
  uint64_t d = 0;
  uint64_t s = 0;
  uint64_t sample_budget = 10'000'000;
  std::optional<uint64_t> sample_override;  // voids the sampling guarantee; recorded in reports

  double m0() const { return 8.0 * double(d) / epsilon; }
  double p_min() const {
    return epsilon * epsilon / (std::pow(2.0, double(s) + 7.0) * double(d) * double(d));
  }
  // samples per prefix estimate: 3 * 2^{s+9} * d^4 / eps^2 * ln(4d / eps)
  uint64_t sample_formula() const {
    long double v = 3.0L * std::pow(2.0L, (long double)s + 9.0L) * std::pow((long double)d, 4.0L) /
                    ((long double)epsilon * epsilon) * std::log(4.0L * (long double)d / epsilon);
    if (v > 1e18L) return std::numeric_limits<uint64_t>::max();
    return uint64_t(std::ceil(v));
  }
  uint64_t samples_per_estimate() const {
    if (sample_override) return *sample_override;
    uint64_t n = sample_formula();
    if (n > sample_budget)
      throw BudgetError("detector: required samples " + std::to_string(n) + " exceed budget " +
                        std::to_string(sample_budget) +
                        "; pass an explicit override or shrink (d, eps)");
    return n;
  }
  // hypothesis of the identification bound: l' >= s + 7 + 2 log2 d - 2 log2 eps
  bool admissible(uint64_t msg_bits) const {
    return double(msg_bits) >=
           double(s) + 7.0 + 2.0 * std::log2(double(d)) - 2.0 * std::log2(epsilon);
  }

  void validate() const {
    if (epsilon <= 0) throw std::invalid_argument("detector: epsilon must be positive");
    if (d == 0 || n_players < 2) throw std::invalid_argument("detector: bad dimensions");
  }
};

struct ProbabilityProfile {
  std::vector<double> p;            // p[k], k = 0..d
  std::vector<uint64_t> n_samples;  // 0 when exact
  bool exact = false;
};

// round k (1-based) belongs to player ((k-1) mod n) + 1
inline uint64_t round_owner(uint64_t k, uint64_t n) { return (k - 1) % n + 1; }

inline ProbabilityProfile estimate_profile(const IReactiveScheme& scheme,
                                           std::span<const Document> t, const BitString& x,
                                           const DetectorParams& params, Rng& rng) {
  params.validate();
  if (t.size() != params.d) throw std::invalid_argument("estimate_profile: wrong transcript length");
  uint64_t N = params.samples_per_estimate();
  ProbabilityProfile prof;
  prof.p.resize(size_t(params.d) + 1);
  prof.n_samples.assign(size_t(params.d) + 1, N);
  std::vector<Document> work(t.begin(), t.end());
  for (uint64_t k = 0; k <= params.d; ++k) {
    uint64_t hits = 0;
    for (uint64_t sample = 0; sample < N; ++sample) {
      for (uint64_t r = k; r < params.d; ++r) work[size_t(r)] = rng.bitstring(scheme.doc_bits());
      BitString dk = rng.bitstring(params.s);
      if (scheme.reactive_dec(dk, work) == x) ++hits;
    }
    prof.p[size_t(k)] = double(hits) / double(N);
    for (uint64_t r = k; r < params.d; ++r) work[size_t(r)] = t[size_t(r)];
  }
  return prof;
}

// Exhaustive version: enumerates every continuation and every dk'. Only for
// tiny instances; refuses beyond max_evals.
inline ProbabilityProfile exact_profile_bruteforce(const IReactiveScheme& scheme,
                                                   std::span<const Document> t, const BitString& x,
                                                   uint64_t s, uint64_t max_evals = 100'000'000) {
  size_t d = t.size();
  size_t ell = scheme.doc_bits();
  ProbabilityProfile prof;
  prof.exact = true;
  prof.p.resize(d + 1);
  prof.n_samples.assign(d + 1, 0);
  if (ell * d + s > 62) throw BudgetError("exact profile: instance too large to enumerate");
  std::vector<Document> work(t.begin(), t.end());
  for (size_t k = 0; k <= d; ++k) {
    uint64_t free_bits = uint64_t(ell) * (d - k) + s;
    uint64_t total = uint64_t(1) << free_bits;
    if (total > max_evals) throw BudgetError("exact profile: instance too large to enumerate");
    uint64_t hits = 0;
    for (uint64_t w = 0; w < total; ++w) {
      uint64_t bits = w;
      for (size_t r = k; r < d; ++r) {
        work[r] = BitString::from_u64(bits & ((uint64_t(1) << ell) - 1), ell);
        bits >>= ell;
      }
      BitString dk = BitString::from_u64(bits, size_t(s));
      if (scheme.reactive_dec(dk, work) == x) ++hits;
    }
    prof.p[k] = double(hits) / double(total);
    for (size_t r = k; r < d; ++r) work[r] = t[size_t(r)];
  }
  return prof;
}

struct MultiplicativeFactors {
  std::vector<double> mf;  // [player-1]
  uint64_t k0 = 0;         // d+1 when no suffix clears the floor
  std::optional<uint64_t> corrected_player;
  bool degenerate = false;  // saturated ratio (zero denominator) somewhere
};

namespace detdetail {

inline double ratio(double num, double den, bool& degenerate) {
  if (den > 0) return num / den;
  degenerate = true;
  return num == 0 ? 1.0 : std::numeric_limits<double>::infinity();
}

}  // namespace detdetail

// Raw product of player j's ratios over rounds [k_lo, k_hi], no floor
// correction. Zero denominators saturate: 0/0 counts as 1, x/0 as infinity.
inline double interval_factor(const ProbabilityProfile& prof, uint64_t j, uint64_t k_lo,
                              uint64_t k_hi, uint64_t n) {
  double f = 1.0;
  bool degenerate = false;
  for (uint64_t k = std::max<uint64_t>(k_lo, 1); k <= k_hi && k + 1 <= prof.p.size(); ++k)
    if (round_owner(k, n) == j)
      f *= detdetail::ratio(prof.p[size_t(k)], prof.p[size_t(k) - 1], degenerate);
  return f;
}

inline MultiplicativeFactors multiplicative_factors(const ProbabilityProfile& prof, uint64_t n,
                                                    const DetectorParams& params) {
  params.validate();
  if (prof.p.size() != size_t(params.d) + 1)
    throw std::invalid_argument("multiplicative_factors: profile length mismatch");
  uint64_t d = params.d;
  double floor = params.p_min();

  MultiplicativeFactors out;
  out.mf.assign(size_t(n), 1.0);
  uint64_t k0 = d + 1;
  for (uint64_t k = d + 1; k-- > 0;) {
    if (prof.p[size_t(k)] >= floor)
      k0 = k;
    else
      break;
  }
  out.k0 = k0;

  for (uint64_t k = k0 + 1; k <= d; ++k) {
    double r = detdetail::ratio(prof.p[size_t(k)], prof.p[size_t(k) - 1], out.degenerate);
    out.mf[size_t(round_owner(k, n) - 1)] *= r;
  }
  if (k0 >= 1 && k0 <= d) {
    // boundary ratio: pretend the below-floor estimate p[k0-1] equals the
    // inflated floor
    uint64_t j = round_owner(k0, n);
    double pretend = params.p_min() / (1.0 - 1.0 / (2.0 * double(d)));
    out.mf[size_t(j - 1)] *= prof.p[size_t(k0)] / pretend;
    out.corrected_player = j;
  }
  return out;
}

struct DetectorReport {
  uint64_t guess = 0;  // 1-based player
  bool unique_exceedance = false;
  std::vector<double> mf;
  uint64_t k0 = 0;
  std::optional<uint64_t> corrected_player;
  bool degenerate = false;
};

inline DetectorReport guess_leaker(const MultiplicativeFactors& mf, const DetectorParams& params,
                                   Rng& rng) {
  DetectorReport rep;
  rep.mf = mf.mf;
  rep.k0 = mf.k0;
  rep.corrected_player = mf.corrected_player;
  rep.degenerate = mf.degenerate;
  double m0 = params.m0();
  uint64_t above = 0, candidate = 0;
  for (size_t j = 0; j < mf.mf.size(); ++j) {
    if (mf.mf[j] > m0) {
      ++above;
      candidate = j + 1;
    }
  }
  if (above == 1) {
    rep.guess = candidate;
    rep.unique_exceedance = true;
  } else {
    rep.guess = 1 + rng.below(mf.mf.size());
  }
  return rep;
}

// The baseline the reset protocol defeats: sum of additive differences per
// player, guess the argmax (ties broken uniformly).
struct AdditiveBaselineReport {
  uint64_t guess = 0;
  std::vector<double> sums;
};

inline AdditiveBaselineReport additive_baseline(const ProbabilityProfile& prof, uint64_t n,
                                                Rng& rng) {
  if (prof.p.size() < 2) throw std::invalid_argument("additive_baseline: empty profile");
  uint64_t d = prof.p.size() - 1;
  AdditiveBaselineReport rep;
  rep.sums.assign(size_t(n), 0.0);
  for (uint64_t k = 1; k <= d; ++k)
    rep.sums[size_t(round_owner(k, n) - 1)] += prof.p[size_t(k)] - prof.p[size_t(k) - 1];
  double best = *std::max_element(rep.sums.begin(), rep.sums.end());
  std::vector<uint64_t> ties;
  for (size_t j = 0; j < rep.sums.size(); ++j)
    if (rep.sums[j] == best) ties.push_back(j + 1);
  rep.guess = ties[size_t(rng.below(ties.size()))];
  return rep;
}

}  // namespace anonsteg
