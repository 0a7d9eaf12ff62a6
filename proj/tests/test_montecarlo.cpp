#include "beauty/errors.hpp"
#include "beauty/exact.hpp"
#include "beauty/exact_sum.hpp"
#include "beauty/montecarlo.hpp"
#include "beauty/protocol.hpp"
#include "beauty/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace beauty;

namespace {

ProtocolSpec make_protocol(std::uint32_t weeks, Rational pH, std::uint32_t cH,
                           std::uint32_t cT) {
  ProtocolSpec p;
  p.weeks = weeks;
  p.rule = AwakeningRule(cH, cT);
  p.coin = CoinModel::classical(std::move(pH));
  return p;
}

ProtocolSpec fair_protocol(std::uint32_t weeks) {
  return make_protocol(weeks, Rational(1, 2), 1, 2);
}

bool same_stats(const mc::SimulationStats& a, const mc::SimulationStats& b) {
  return a.protocolHash == b.protocolHash && a.seed == b.seed &&
         a.trials == b.trials && a.totalAwakenings == b.totalAwakenings &&
         a.hAwakenings == b.hAwakenings && a.wakingTrials == b.wakingTrials &&
         a.sumTrialFrequency == b.sumTrialFrequency &&
         a.sumTrialFrequencySq == b.sumTrialFrequencySq;
}

} // namespace

TEST_CASE("splitmix64 matches the reference stream") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xe220a8397b1dcdafULL);
  CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(rng.next() == 0x06c45d188009454fULL);

  SplitMix64 again(0);
  CHECK(again.next() == 0xe220a8397b1dcdafULL);
}

TEST_CASE("substreams are addressed deterministically and do not collide") {
  SplitMix64 a = substream(42, 0);
  SplitMix64 b = substream(42, 0);
  CHECK(a.next() == b.next());

  std::vector<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 64; ++s) firsts.push_back(substream(42, s).next());
  std::sort(firsts.begin(), firsts.end());
  CHECK(std::adjacent_find(firsts.begin(), firsts.end()) == firsts.end());
}

TEST_CASE("uniform draws respect their ranges") {
  SplitMix64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (std::uint64_t bound : {1ULL, 2ULL, 3ULL, 7ULL, 100ULL}) {
    for (int i = 0; i < 200; ++i) CHECK(rng.next_below(bound) < bound);
  }
  SplitMix64 ones(9);
  for (int i = 0; i < 50; ++i) CHECK(ones.next_below(1) == 0);
}

TEST_CASE("exact sums are order-independent and exact") {
  const std::vector<double> xs = {0.1, -0.2, 0.3, 1e-300, -1e17, 0.25};
  ExactSum fwd, rev, split1, split2;
  for (double x : xs) fwd.add(x);
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) rev.add(*it);
  for (std::size_t i = 0; i < xs.size(); ++i)
    (i % 2 ? split1 : split2).add(xs[i]);
  split1 += split2;
  CHECK(fwd == rev);
  CHECK(fwd == split1);

  ExactSum tenth;
  tenth.add(0.1); // the double nearest 1/10 is 3602879701896397 * 2^-55
  CHECK(tenth.exact() == BigRational(BigInt(3602879701896397LL), BigInt(1) << 55));

  ExactSum dyadic;
  dyadic.add(0.5);
  dyadic.add(0.25);
  CHECK(dyadic.exact() == BigRational(3, 4));
  CHECK(dyadic.value() == 0.75);

  ExactSum cancel;
  cancel.add(1e17);
  cancel.add(-1e17);
  CHECK(cancel.is_zero());

  ExactSum bad;
  CHECK_THROWS_AS(bad.add(1.0 / 0.0), std::invalid_argument);
}

TEST_CASE("simulation is reproducible and thread-count invariant") {
  const ProtocolSpec p = fair_protocol(2);
  const mc::SimulationStats one = mc::simulate(p, 10000, 321, 1);
  CHECK(same_stats(one, mc::simulate(p, 10000, 321, 1)));
  CHECK(same_stats(one, mc::simulate(p, 10000, 321, 3)));
  CHECK(same_stats(one, mc::simulate(p, 10000, 321, 8)));
  CHECK(one.to_json().dump() == mc::simulate(p, 10000, 321, 5).to_json().dump());

  // The exact moment sum fingerprints all 10000 per-trial frequencies, so a
  // different seed must change it.
  const mc::SimulationStats reseeded = mc::simulate(p, 10000, 322, 1);
  CHECK(!(one.sumTrialFrequency == reseeded.sumTrialFrequency));
}

TEST_CASE("disjoint ranges merge into exactly the full run") {
  const ProtocolSpec p = fair_protocol(3);
  const mc::SimulationStats whole = mc::simulate(p, 6000, 99);

  mc::SimulationStats merged = mc::simulate_range(p, 0, 1234, 99);
  merged.merge(mc::simulate_range(p, 1234, 4766, 99, 4));
  CHECK(same_stats(whole, merged));

  mc::SimulationStats other = mc::simulate(p, 6000, 100);
  CHECK_THROWS_AS(other.merge(whole), std::invalid_argument);
}

TEST_CASE("pooled frequency matches one rule, per-trial mean the other") {
  // Two fair weeks, wake once on H and twice on T: the pooled per-awakening
  // frequency estimates 1/3 while the mean of per-trial frequencies
  // estimates 5/12 - the two rules seen in one simulation.
  const mc::SimulationStats stats = mc::simulate(fair_protocol(2), 40000, 2024);
  CHECK(std::abs(stats.frequency() - 1.0 / 3.0) < 0.01);
  CHECK(std::abs(stats.trialFrequencyMean() - 5.0 / 12.0) < 0.01);
  CHECK(std::abs(stats.frequency() - stats.trialFrequencyMean()) > 0.05);

  CHECK(stats.trialFrequencyStddev() > 0.0);
  CHECK(stats.trialFrequencyStderr() ==
        doctest::Approx(stats.trialFrequencyStddev() / std::sqrt(40000.0))
            .epsilon(1e-12));
}

TEST_CASE("simulate validates its inputs") {
  CHECK_THROWS_AS(mc::simulate(fair_protocol(1), 0, 1), std::invalid_argument);

  ProtocolSpec fixed = fair_protocol(1);
  fixed.fixed = FixedComposition{1, 2};
  CHECK_THROWS_AS(mc::simulate(fixed, 10, 1), std::invalid_argument);

  ProtocolSpec quantum = fair_protocol(1);
  quantum.coin = CoinModel::quantum({0.6, 0.0}, {0.8, 0.0});
  CHECK_THROWS_AS(mc::simulate(quantum, 10, 1), std::invalid_argument);

  // Always heads, but heads never wakes: the run has no awakenings at all.
  const ProtocolSpec sleeper = make_protocol(2, Rational(1), 0, 3);
  CHECK_THROWS_AS(mc::simulate(sleeper, 100, 1), NoAwakeningsError);
}

TEST_CASE("fair quantum coins simulate like fair classical ones") {
  const double s = 1.0 / std::sqrt(2.0);
  ProtocolSpec quantum = fair_protocol(2);
  quantum.coin = CoinModel::quantum({0.0, s}, {s, 0.0});
  const mc::SimulationStats qs = mc::simulate(quantum, 5000, 7);
  const mc::SimulationStats cs = mc::simulate(fair_protocol(2), 5000, 7);
  CHECK(qs.hAwakenings == cs.hAwakenings); // same Bernoulli(1/2) draws
  CHECK(qs.totalAwakenings == cs.totalAwakenings);
}

TEST_CASE("shuffled schedules permute the fixed multiset") {
  const auto schedule = mc::shuffled_schedule(5, 10, 11);
  CHECK(schedule.size() == 15);
  CHECK(std::count(schedule.begin(), schedule.end(), TossOutcome::H) == 5);
  CHECK(mc::shuffled_schedule(5, 10, 11) == schedule); // same seed, same order
  CHECK(mc::shuffled_schedule(5, 10, 12) != schedule); // overwhelmingly likely
  CHECK_THROWS_AS(mc::shuffled_schedule(0, 0, 1), NoAwakeningsError);
}

TEST_CASE("fixed-composition runs realize their frequency exactly, any seed") {
  for (const mc::Seed seed : {1ULL, 2ULL, 42ULL, 12345ULL}) {
    const mc::SimulationStats stats = mc::simulate_fixed_composition(5, 10, seed);
    CHECK(stats.hAwakenings == 5);
    CHECK(stats.totalAwakenings == 15);
    CHECK(stats.frequency() == 5.0 / 15.0);
    CHECK(stats.trials == 1);
  }
}

TEST_CASE("bet tallies follow the identity payoff = stake * (odds * f - 1)") {
  const ProtocolSpec p = fair_protocol(1);
  const mc::BetLedger ledger = mc::bet_evaluate(p, 3.0, 2.0, 5000, 77);
  const double f = ledger.impliedCredence();
  CHECK(ledger.meanPayoffPerAwakening() ==
        doctest::Approx(2.0 * (3.0 * f - 1.0)).epsilon(1e-12));

  // The same trials drive simulate(), so the counts agree exactly.
  const mc::SimulationStats stats = mc::simulate(p, 5000, 77);
  CHECK(ledger.hAwakenings == stats.hAwakenings);
  CHECK(ledger.awakeningsBet == stats.totalAwakenings);
  CHECK(f == stats.frequency());
}

TEST_CASE("betting at thirder odds breaks even, at halfer odds loses") {
  const ProtocolSpec p = fair_protocol(1);

  const mc::BetLedger atThirds = mc::bet_evaluate(p, 3.0, 1.0, 100000, 5);
  CHECK(std::abs(atThirds.meanPayoffPerAwakening()) <
        4.0 * atThirds.payoffStderr());

  const mc::BetLedger atHalves = mc::bet_evaluate(p, 2.0, 1.0, 100000, 5);
  CHECK(atHalves.meanPayoffPerAwakening() < 0.0);
  CHECK(atHalves.meanPayoffPerAwakening() + 4.0 * atHalves.payoffStderr() < 0.0);

  CHECK(atThirds.payoffStderr() > 0.0);
  CHECK_THROWS_AS(mc::bet_evaluate(p, 0.0, 1.0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(mc::bet_evaluate(p, 3.0, -1.0, 10, 1), std::invalid_argument);
}

TEST_CASE("bet evaluation is thread-count invariant") {
  const ProtocolSpec p = fair_protocol(2);
  const mc::BetLedger one = mc::bet_evaluate(p, 3.0, 1.0, 8000, 13, 1);
  const mc::BetLedger four = mc::bet_evaluate(p, 3.0, 1.0, 8000, 13, 4);
  CHECK(one.hAwakenings == four.hAwakenings);
  CHECK(one.awakeningsBet == four.awakeningsBet);
  CHECK(one.sumNet == four.sumNet);
  CHECK(one.sumNetSq == four.sumNetSq);
  CHECK(one.sumNetAwakenings == four.sumNetAwakenings);
  CHECK(one.to_json().dump() == four.to_json().dump());
}

TEST_CASE("break-even odds invert the empirical frequency") {
  CHECK(mc::break_even_search(fair_protocol(1), 20000, 3) ==
        mc::simulate(fair_protocol(1), 20000, 3).frequency());
}

TEST_CASE("a long sequential run approaches the fixed-composition ratio") {
  const mc::CompareReport r = mc::compare_sequential_vs_fixed(5218, 1, 42);
  CHECK(r.weeks == 5218);
  CHECK(r.trials == 1);
  CHECK(r.targetRational == "1/3");
  CHECK(r.errorMethod == "week-bootstrap");
  CHECK(r.standardError > 0.0);
  CHECK(r.gap <= 4.0 * r.standardError);
  CHECK(r.pass);

  // Deterministic: the report serializes identically on repeat runs.
  CHECK(r.to_json().dump() ==
        mc::compare_sequential_vs_fixed(5218, 1, 42).to_json().dump());
}

TEST_CASE("multi-trial comparison uses the across-trial error") {
  const mc::CompareReport r =
      mc::compare_sequential_vs_fixed(fair_protocol(2), 400, 8);
  CHECK(r.errorMethod == "trial-stderr");
  CHECK(r.target == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(r.pass); // seeded: gap is well inside four standard errors

  const ProtocolSpec biased = make_protocol(30, Rational(1, 3), 1, 2);
  const mc::CompareReport rb = mc::compare_sequential_vs_fixed(biased, 500, 9);
  CHECK(rb.targetRational == "1/5");
  CHECK(rb.pass);
}

TEST_CASE("simulation statistics serialize to json and csv") {
  const mc::SimulationStats stats = mc::simulate(fair_protocol(1), 100, 6);
  const nlohmann::ordered_json j = stats.to_json();
  CHECK(j["seed"] == 6);
  CHECK(j["trials"] == 100);
  CHECK(j["protocolHash"] == protocol_hash(fair_protocol(1)));
  CHECK(j.contains("frequency"));
  CHECK(j.contains("trialFrequencyStderr"));

  CHECK(mc::SimulationStats::csv_header() ==
        "protocol_hash,seed,trials,total_awakenings,h_awakenings,frequency,se");
  const std::string row = stats.csv_row();
  CHECK(row.find(stats.protocolHash) == 0);
  CHECK(std::count(row.begin(), row.end(), ',') == 6);
}
