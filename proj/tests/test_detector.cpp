#include <catch2/catch_amalgamated.hpp>

#include "anonsteg/detector.hpp"
#include "anonsteg/stats.hpp"

using namespace anonsteg;

namespace {

DetectorParams make_params(uint64_t n, uint64_t d, double eps = 0.5, uint64_t s = 0) {
  DetectorParams p;
  p.epsilon = eps;
  p.n_players = n;
  p.d = d;
  p.s = s;
  p.sample_override = 4000;
  return p;
}

ProbabilityProfile profile_from(std::vector<double> p) {
  ProbabilityProfile prof;
  prof.p = std::move(p);
  prof.n_samples.assign(prof.p.size(), 0);
  prof.exact = true;
  return prof;
}

ProbabilityProfile reset_exact_profile(const GameRecord& rec, size_t ell) {
  auto ld = reset_example_continuation_profile(rec.docs, rec.x.get(0), ell);
  ProbabilityProfile prof;
  prof.exact = true;
  prof.n_samples.assign(ld.size(), 0);
  for (long double v : ld) prof.p.push_back(double(v));
  return prof;
}

}  // namespace

TEST_CASE("with no key material the final estimate is already decided") {
  NullScheme scheme(6, 4);
  SimulationConfig cfg{2, 5, 0};
  Rng rng(70);
  GameRecord rec = run_game(cfg, scheme, rng.bitstring(4), rng);
  DetectorParams params = make_params(2, 5);
  params.sample_override = 50;
  ProbabilityProfile prof = estimate_profile(scheme, rec.docs, rec.x, params, rng);
  REQUIRE((prof.p.back() == 0.0 || prof.p.back() == 1.0));
}

TEST_CASE("null-scheme estimates sit near two to the minus message bits") {
  NullScheme scheme(8, 6);
  SimulationConfig cfg{2, 6, 0};
  Rng rng(71);
  GameRecord rec = run_game(cfg, scheme, rng.bitstring(6), rng);
  DetectorParams params = make_params(2, 6);
  params.sample_override = 20000;
  ProbabilityProfile prof = estimate_profile(scheme, rec.docs, rec.x, params, rng);
  double p = 1.0 / 64.0;
  double sd = std::sqrt(p * (1 - p) / 20000.0);
  for (uint64_t k = 0; k + 1 < prof.p.size(); ++k)
    REQUIRE(std::abs(prof.p[size_t(k)] - p) <= 3 * sd);
}

TEST_CASE("a committed reset prefix pins the estimate to one, exhaustively") {
  ResetExampleScheme scheme(4);
  SimulationConfig cfg{2, 6, 0};
  Rng rng(72);
  GameRecord rec;
  ResetExampleStats st;
  do {
    rec = run_game(cfg, scheme, rng.bitstring(1), rng);
    st = ResetExampleScheme::unpack(rec.final_state);
  } while (!st.committed || !rec.correct);

  ProbabilityProfile brute = exact_profile_bruteforce(scheme, rec.docs, rec.x, 0);
  ProbabilityProfile dp = reset_exact_profile(rec, 4);
  REQUIRE(brute.p.size() == dp.p.size());
  for (size_t k = 0; k < brute.p.size(); ++k)
    REQUIRE(brute.p[k] == Catch::Approx(dp.p[k]).margin(1e-12));
  REQUIRE(brute.p.back() == 1.0);
  // once the leader committed, continuations cannot change the outcome
  bool committed_seen = false;
  for (uint64_t k = 1; k <= cfg.d; ++k) {
    ResetDecodeState s;
    for (uint64_t r = 0; r < k; ++r) s = resetdetail::advance_doc(s, r + 1, rec.docs[r], 4);
    if (s.phase == ResetDecodeState::kDecided) {
      REQUIRE(brute.p[size_t(k)] == 1.0);
      committed_seen = true;
    }
  }
  REQUIRE(committed_seen);
}

TEST_CASE("constant profiles produce unit factors for everyone") {
  DetectorParams params = make_params(3, 6);
  ProbabilityProfile prof = profile_from(std::vector<double>(7, 0.25));
  MultiplicativeFactors mf = multiplicative_factors(prof, 3, params);
  REQUIRE(mf.k0 == 0);
  REQUIRE_FALSE(mf.corrected_player.has_value());
  for (double v : mf.mf) REQUIRE(v == Catch::Approx(1.0));
}

TEST_CASE("a hand-built profile credits the doubling player") {
  DetectorParams params = make_params(2, 4);
  ProbabilityProfile prof = profile_from({0.05, 0.05, 0.10, 0.10, 0.20});
  MultiplicativeFactors mf = multiplicative_factors(prof, 2, params);
  REQUIRE(mf.k0 == 0);
  REQUIRE(mf.mf[0] == Catch::Approx(1.0));
  REQUIRE(mf.mf[1] == Catch::Approx(4.0));
}

TEST_CASE("the boundary ratio goes to the sender of the first above-floor round") {
  DetectorParams params = make_params(2, 4, 0.5, 0);
  double floor = params.p_min();
  ProbabilityProfile prof = profile_from({floor / 4, floor / 4, 0.5, 0.5, 1.0});
  MultiplicativeFactors mf = multiplicative_factors(prof, 2, params);
  REQUIRE(mf.k0 == 2);
  REQUIRE(mf.corrected_player == 2);
  double pretend = floor / (1.0 - 1.0 / 8.0);
  // player 2 owns rounds 2 and 4: boundary ratio times the round-4 ratio
  REQUIRE(mf.mf[1] == Catch::Approx((0.5 / pretend) * 2.0));
  REQUIRE(mf.mf[0] == Catch::Approx(1.0));  // round 3 ratio is 1
}

TEST_CASE("factors agree with an independent product to a relative 1e-12") {
  Rng rng(73);
  for (int trial = 0; trial < 10000; ++trial) {
    uint64_t n = 2 + rng.below(3);
    uint64_t d = 3 + rng.below(10);
    DetectorParams params = make_params(n, d, 0.25 + rng.uniform01());
    double floor = params.p_min();
    std::vector<double> p(size_t(d) + 1);
    uint64_t kstar = rng.below(d);  // rounds before kstar sit below the floor
    for (uint64_t k = 0; k <= d; ++k)
      p[size_t(k)] = (k < kstar) ? floor * rng.uniform01() * 0.9
                                 : floor * (1.01 + 20.0 * rng.uniform01());
    ProbabilityProfile prof = profile_from(p);
    MultiplicativeFactors got = multiplicative_factors(prof, n, params);

    // independent recomputation, reversed accumulation order
    uint64_t k0 = d + 1;
    for (uint64_t k = d + 1; k-- > 0;) {
      if (p[size_t(k)] >= floor)
        k0 = k;
      else
        break;
    }
    REQUIRE(got.k0 == k0);
    for (uint64_t j = 1; j <= n; ++j) {
      std::vector<double> terms;
      for (uint64_t k = k0 + 1; k <= d; ++k)
        if (round_owner(k, n) == j) terms.push_back(p[size_t(k)] / p[size_t(k) - 1]);
      if (k0 >= 1 && k0 <= d && round_owner(k0, n) == j)
        terms.push_back(p[size_t(k0)] * (1.0 - 1.0 / (2.0 * double(d))) / floor);
      double expect = 1.0;
      for (auto it = terms.rbegin(); it != terms.rend(); ++it) expect *= *it;
      REQUIRE(got.mf[size_t(j - 1)] == Catch::Approx(expect).epsilon(1e-12).margin(0.0));
    }
  }
}

TEST_CASE("unique exceedance names the player, anything else guesses uniformly") {
  DetectorParams params = make_params(2, 10, 0.5);  // m0 = 160
  Rng rng(74);
  MultiplicativeFactors one;
  one.mf = {1.0, 250.0};
  DetectorReport rep = guess_leaker(one, params, rng);
  REQUIRE(rep.guess == 2);
  REQUIRE(rep.unique_exceedance);

  MultiplicativeFactors both;
  both.mf = {200.0, 250.0};
  int counts[2] = {0, 0};
  for (int t = 0; t < 400; ++t) ++counts[guess_leaker(both, params, rng).guess - 1];
  REQUIRE_FALSE(guess_leaker(both, params, rng).unique_exceedance);
  REQUIRE(counts[0] > 100);
  REQUIRE(counts[1] > 100);

  MultiplicativeFactors none;
  none.mf = {1.0, 2.0};
  counts[0] = counts[1] = 0;
  for (int t = 0; t < 400; ++t) ++counts[guess_leaker(none, params, rng).guess - 1];
  REQUIRE(counts[0] > 100);
  REQUIRE(counts[1] > 100);
}

TEST_CASE("additive baseline: argmax of summed differences, uniform on ties") {
  Rng rng(75);
  ProbabilityProfile rising = profile_from({0.1, 0.1, 0.5, 0.5, 0.9});
  AdditiveBaselineReport rep = additive_baseline(rising, 2, rng);
  REQUIRE(rep.guess == 2);
  REQUIRE(rep.sums[1] == Catch::Approx(0.8));
  REQUIRE(rep.sums[0] == Catch::Approx(0.0));

  ProbabilityProfile flat = profile_from(std::vector<double>(5, 0.3));
  int counts[2] = {0, 0};
  for (int t = 0; t < 400; ++t) ++counts[additive_baseline(flat, 2, rng).guess - 1];
  REQUIRE(counts[0] > 100);
  REQUIRE(counts[1] > 100);
}

TEST_CASE("additive baseline blames the leaker of the direct scheme") {
  DirectScheme scheme(20);
  SimulationConfig cfg{2, 4, 0};
  DetectorParams params = make_params(2, 4);
  params.sample_override = 1500;
  Rng rng(76);
  int blamed = 0;
  const int G = 60;
  for (int g = 0; g < G; ++g) {
    GameRecord rec = run_game(cfg, scheme, rng.bitstring(4), rng);
    ProbabilityProfile prof = estimate_profile(scheme, rec.docs, rec.x, params, rng);
    blamed += additive_baseline(prof, 2, rng).guess == rec.leaker;
  }
  REQUIRE(blamed >= G * 9 / 10);
}

TEST_CASE("additive baseline blames the wrong player in reset games") {
  ResetExampleScheme scheme(8);
  SimulationConfig cfg{2, 40, 0};
  Rng rng(77);
  uint64_t with_reset = 0, blamed_non = 0;
  for (int g = 0; g < 500; ++g) {
    GameRecord rec = run_game(cfg, scheme, rng.bitstring(1), rng);
    ResetExampleStats st = ResetExampleScheme::unpack(rec.final_state);
    if (st.resets == 0) continue;
    ++with_reset;
    ProbabilityProfile prof = reset_exact_profile(rec, 8);
    blamed_non += additive_baseline(prof, 2, rng).guess != rec.leaker;
  }
  REQUIRE(with_reset > 100);
  REQUIRE(double(blamed_non) / double(with_reset) > 0.5);
}

TEST_CASE("scaling the whole profile leaves uncorrected factors unchanged") {
  DetectorParams params = make_params(3, 9);
  Rng rng(78);
  double floor = params.p_min();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(10);
    for (auto& v : p) v = floor * (3.0 + 100.0 * rng.uniform01());
    ProbabilityProfile prof = profile_from(p);
    MultiplicativeFactors base = multiplicative_factors(prof, 3, params);
    REQUIRE(base.k0 == 0);
    for (double c : {0.5, 2.0}) {
      std::vector<double> q = p;
      for (auto& v : q) v *= c;
      MultiplicativeFactors scaled = multiplicative_factors(profile_from(q), 3, params);
      REQUIRE(scaled.k0 == 0);
      for (size_t j = 0; j < 3; ++j)
        REQUIRE(scaled.mf[j] == Catch::Approx(base.mf[j]).epsilon(1e-12));
    }
  }
  // with a boundary round, only its owner's factor picks up the scale
  std::vector<double> p = {floor / 8, 0.4, 0.4, 0.4, 0.4, 0.4, 0.4, 0.4, 0.4, 0.4};
  MultiplicativeFactors base = multiplicative_factors(profile_from(p), 3, params);
  REQUIRE(base.k0 == 1);
  REQUIRE(base.corrected_player == 1);
  std::vector<double> q = p;
  for (auto& v : q) v *= 2.0;
  q[0] = floor / 8;  // keep the below-floor prefix below the floor
  MultiplicativeFactors scaled = multiplicative_factors(profile_from(q), 3, params);
  REQUIRE(scaled.k0 == 1);
  REQUIRE(scaled.mf[0] == Catch::Approx(2.0 * base.mf[0]).epsilon(1e-12));
  REQUIRE(scaled.mf[1] == Catch::Approx(base.mf[1]).epsilon(1e-12));
  REQUIRE(scaled.mf[2] == Catch::Approx(base.mf[2]).epsilon(1e-12));
}

TEST_CASE("interval factors saturate on zero denominators") {
  ProbabilityProfile prof = profile_from({0.0, 0.0, 0.5, 0.5, 1.0});
  REQUIRE(interval_factor(prof, 2, 1, 4, 2) ==
          std::numeric_limits<double>::infinity());  // 0.5 / 0 at round 2
  REQUIRE(interval_factor(prof, 1, 1, 1, 2) == 1.0);  // 0/0 counts as 1
  ProbabilityProfile fine = profile_from({0.1, 0.2, 0.4, 0.4, 0.4});
  REQUIRE(interval_factor(fine, 1, 1, 4, 2) == Catch::Approx(2.0));
  REQUIRE(interval_factor(fine, 2, 1, 4, 2) == Catch::Approx(2.0));
}

TEST_CASE("sample budget: formula overruns refuse, an override proceeds") {
  DetectorParams params;
  params.epsilon = 0.05;
  params.n_players = 2;
  params.d = 8;
  params.s = 0;
  REQUIRE(params.sample_formula() > params.sample_budget);
  REQUIRE_THROWS_AS(params.samples_per_estimate(), BudgetError);
  params.sample_override = 1000;
  REQUIRE(params.samples_per_estimate() == 1000);
}

TEST_CASE("the identification hypothesis check uses base-2 logs") {
  DetectorParams params = make_params(2, 6, 0.5);
  REQUIRE(params.admissible(16));  // 16 >= 0 + 7 + 2*log2(6) + 2
  REQUIRE_FALSE(params.admissible(14));
  REQUIRE_FALSE(params.admissible(1));
}

TEST_CASE("exact profiles never detect worse than sampled ones") {
  ResetExampleScheme scheme(4);
  SimulationConfig cfg{2, 6, 0};
  DetectorParams params = make_params(2, 6, 25.0);  // rate-maximizing threshold scale
  params.sample_override = 3000;
  Rng rng(79);
  const int G = 400;
  int exact_ok = 0, sampled_ok = 0;
  for (int g = 0; g < G; ++g) {
    GameRecord rec = run_game(cfg, scheme, rng.bitstring(1), rng);
    ProbabilityProfile exact = reset_exact_profile(rec, 4);
    ProbabilityProfile sampled = estimate_profile(scheme, rec.docs, rec.x, params, rng);
    exact_ok +=
        guess_leaker(multiplicative_factors(exact, 2, params), params, rng).guess == rec.leaker;
    sampled_ok +=
        guess_leaker(multiplicative_factors(sampled, 2, params), params, rng).guess == rec.leaker;
  }
  double se = std::sqrt(0.25 / G);
  REQUIRE(double(exact_ok) / G >= double(sampled_ok) / G - 3 * se);
}
