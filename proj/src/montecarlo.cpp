#include "beauty/montecarlo.hpp"

#include "beauty/errors.hpp"
#include "beauty/exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>
#include <utility>

namespace beauty::mc {

namespace {

constexpr std::uint64_t kTrialsPerBlock = 4096;
// Reserved substream index for bootstrap resampling, far away from any
// realistic trial index.
constexpr std::uint64_t kBootstrapStream = 0x626f6f7473653634ULL;

double classical_heads_double(const CoinModel& coin) {
  if (coin.is_classical()) return coin.heads_probability().to_double();
  if (coin.is_fair_quantum()) return 0.5;
  throw std::invalid_argument(
      "unequal quantum branch weights: simulate classically with pH = |ampH|^2, "
      "or use branch_engine credences");
}

struct TrialTally {
  std::uint64_t hAwakenings = 0;
  std::uint64_t totalAwakenings = 0;
};

TrialTally draw_trial(const ProtocolSpec& protocol, double pHeads, Seed seed,
                      std::uint64_t trial) {
  SplitMix64 rng = substream(seed, trial);
  const std::uint64_t cH = protocol.rule.count(TossOutcome::H);
  const std::uint64_t cT = protocol.rule.count(TossOutcome::T);
  TrialTally t;
  for (std::uint32_t w = 0; w < protocol.weeks; ++w) {
    if (rng.next_double() < pHeads) {
      t.hAwakenings += cH;
      t.totalAwakenings += cH;
    } else {
      t.totalAwakenings += cT;
    }
  }
  return t;
}

// Runs trials in fixed blocks; block results merge in index order, so the
// outcome is identical for every thread count.
template <typename Acc>
void run_trials(const ProtocolSpec& protocol, std::uint64_t firstTrial,
                std::uint64_t trials, Seed seed, unsigned threads, Acc& acc) {
  const double pHeads = classical_heads_double(protocol.coin);
  const std::uint64_t blocks = (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;

  auto run_block = [&](std::uint64_t b, Acc& out) {
    const std::uint64_t lo = firstTrial + b * kTrialsPerBlock;
    const std::uint64_t hi = std::min(firstTrial + trials, lo + kTrialsPerBlock);
    for (std::uint64_t t = lo; t < hi; ++t)
      out.consume(draw_trial(protocol, pHeads, seed, t));
  };

  if (threads <= 1 || blocks <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b, acc);
    return;
  }

  std::vector<Acc> partials(blocks, acc);
  std::atomic<std::uint64_t> next{0};
  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, blocks));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned i = 0; i < workers; ++i)
    pool.emplace_back([&] {
      for (std::uint64_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1))
        run_block(b, partials[b]);
    });
  for (auto& th : pool) th.join();
  for (const Acc& partial : partials) acc.combine(partial);
}

struct SimAccum {
  std::uint64_t trials = 0, totalAwakenings = 0, hAwakenings = 0, wakingTrials = 0;
  ExactSum sumFreq, sumFreqSq;

  void consume(const TrialTally& t) {
    ++trials;
    totalAwakenings += t.totalAwakenings;
    hAwakenings += t.hAwakenings;
    if (t.totalAwakenings > 0) {
      ++wakingTrials;
      const double f = static_cast<double>(t.hAwakenings) /
                       static_cast<double>(t.totalAwakenings);
      sumFreq.add(f);
      sumFreqSq.add(f * f);
    }
  }

  void combine(const SimAccum& o) {
    trials += o.trials;
    totalAwakenings += o.totalAwakenings;
    hAwakenings += o.hAwakenings;
    wakingTrials += o.wakingTrials;
    sumFreq += o.sumFreq;
    sumFreqSq += o.sumFreqSq;
  }
};

struct BetAccum {
  double odds = 1.0, stake = 1.0;
  std::uint64_t trials = 0, awakenings = 0, hAwakenings = 0;
  ExactSum sumNet, sumNetSq, sumAwk, sumAwkSq, sumNetAwk;

  void consume(const TrialTally& t) {
    ++trials;
    awakenings += t.totalAwakenings;
    hAwakenings += t.hAwakenings;
    const double a = static_cast<double>(t.totalAwakenings);
    const double net = odds * stake * static_cast<double>(t.hAwakenings) - stake * a;
    sumNet.add(net);
    sumNetSq.add(net * net);
    sumAwk.add(a);
    sumAwkSq.add(a * a);
    sumNetAwk.add(net * a);
  }

  void combine(const BetAccum& o) {
    trials += o.trials;
    awakenings += o.awakenings;
    hAwakenings += o.hAwakenings;
    sumNet += o.sumNet;
    sumNetSq += o.sumNetSq;
    sumAwk += o.sumAwk;
    sumAwkSq += o.sumAwkSq;
    sumNetAwk += o.sumNetAwk;
  }
};

// Unbiased sample variance from exact moment sums; exact rational algebra
// avoids the usual catastrophic cancellation in sum-of-squares formulas.
double sample_variance(const ExactSum& sum, const ExactSum& sumSq, std::uint64_t n) {
  if (n < 2) return 0.0;
  const BigRational s1 = sum.exact();
  const BigRational s2 = sumSq.exact();
  BigRational var = (s2 - s1 * s1 / n) / (n - 1);
  if (var < 0) var = 0;
  return var.convert_to<double>();
}

void check_sequential(const ProtocolSpec& protocol) {
  if (!protocol.sequential())
    throw std::invalid_argument(
        "sequential protocols only; use simulate_fixed_composition");
}

ProtocolSpec fixed_protocol(std::uint64_t nH, std::uint64_t nT) {
  ProtocolSpec p;
  p.fixed = FixedComposition{nH, nT};
  return p;
}

} // namespace

double SimulationStats::frequency() const {
  return static_cast<double>(hAwakenings) / static_cast<double>(totalAwakenings);
}

double SimulationStats::trialFrequencyMean() const {
  if (wakingTrials == 0) return 0.0;
  return BigRational(sumTrialFrequency.exact() / wakingTrials).convert_to<double>();
}

double SimulationStats::trialFrequencyStddev() const {
  return std::sqrt(sample_variance(sumTrialFrequency, sumTrialFrequencySq, wakingTrials));
}

double SimulationStats::trialFrequencyStderr() const {
  if (wakingTrials == 0) return 0.0;
  return trialFrequencyStddev() / std::sqrt(static_cast<double>(wakingTrials));
}

void SimulationStats::merge(const SimulationStats& other) {
  if (protocolHash != other.protocolHash || seed != other.seed)
    throw std::invalid_argument("merge: stats come from different runs");
  trials += other.trials;
  totalAwakenings += other.totalAwakenings;
  hAwakenings += other.hAwakenings;
  wakingTrials += other.wakingTrials;
  sumTrialFrequency += other.sumTrialFrequency;
  sumTrialFrequencySq += other.sumTrialFrequencySq;
}

nlohmann::ordered_json SimulationStats::to_json() const {
  nlohmann::ordered_json j;
  j["protocolHash"] = protocolHash;
  j["seed"] = seed;
  j["trials"] = trials;
  j["totalAwakenings"] = totalAwakenings;
  j["hAwakenings"] = hAwakenings;
  j["wakingTrials"] = wakingTrials;
  j["frequency"] = frequency();
  j["trialFrequencyMean"] = trialFrequencyMean();
  j["trialFrequencyStddev"] = trialFrequencyStddev();
  j["trialFrequencyStderr"] = trialFrequencyStderr();
  return j;
}

std::string SimulationStats::csv_header() {
  return "protocol_hash,seed,trials,total_awakenings,h_awakenings,frequency,se";
}

std::string SimulationStats::csv_row() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%llu,%llu,%llu,%llu,%.12f,%.12g",
                protocolHash.c_str(), static_cast<unsigned long long>(seed),
                static_cast<unsigned long long>(trials),
                static_cast<unsigned long long>(totalAwakenings),
                static_cast<unsigned long long>(hAwakenings), frequency(),
                trialFrequencyStderr());
  return buf;
}

SimulationStats simulate_range(const ProtocolSpec& protocol, std::uint64_t firstTrial,
                               std::uint64_t trials, Seed seed, unsigned threads) {
  check_sequential(protocol);
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");

  SimAccum acc;
  run_trials(protocol, firstTrial, trials, seed, threads, acc);

  SimulationStats s;
  s.protocolHash = protocol_hash(protocol);
  s.seed = seed;
  s.trials = acc.trials;
  s.totalAwakenings = acc.totalAwakenings;
  s.hAwakenings = acc.hAwakenings;
  s.wakingTrials = acc.wakingTrials;
  s.sumTrialFrequency = acc.sumFreq;
  s.sumTrialFrequencySq = acc.sumFreqSq;
  return s;
}

SimulationStats simulate(const ProtocolSpec& protocol, std::uint64_t trials, Seed seed,
                         unsigned threads) {
  SimulationStats s = simulate_range(protocol, 0, trials, seed, threads);
  if (s.totalAwakenings == 0)
    throw NoAwakeningsError("simulation produced no awakenings in " +
                            std::to_string(trials) + " trials");
  return s;
}

std::vector<TossOutcome> shuffled_schedule(std::uint64_t headsAwakenings,
                                           std::uint64_t tailsAwakenings, Seed seed) {
  const std::uint64_t total = headsAwakenings + tailsAwakenings;
  if (total == 0) throw NoAwakeningsError();
  std::vector<TossOutcome> schedule;
  schedule.reserve(total);
  schedule.insert(schedule.end(), headsAwakenings, TossOutcome::H);
  schedule.insert(schedule.end(), tailsAwakenings, TossOutcome::T);
  SplitMix64 rng = substream(seed, 0);
  for (std::uint64_t i = total - 1; i > 0; --i)
    std::swap(schedule[i], schedule[rng.next_below(i + 1)]);
  return schedule;
}

SimulationStats simulate_fixed_composition(std::uint64_t headsAwakenings,
                                           std::uint64_t tailsAwakenings, Seed seed) {
  const std::vector<TossOutcome> schedule =
      shuffled_schedule(headsAwakenings, tailsAwakenings, seed);

  SimulationStats s;
  s.protocolHash = protocol_hash(fixed_protocol(headsAwakenings, tailsAwakenings));
  s.seed = seed;
  s.trials = 1;
  s.totalAwakenings = schedule.size();
  s.hAwakenings = static_cast<std::uint64_t>(
      std::count(schedule.begin(), schedule.end(), TossOutcome::H));
  s.wakingTrials = 1;
  const double f = s.frequency();
  s.sumTrialFrequency.add(f);
  s.sumTrialFrequencySq.add(f * f);
  return s;
}

double BetLedger::netPayoff() const {
  return oddsPayoutOnH * stakePerAwakening * static_cast<double>(hAwakenings) -
         stakePerAwakening * static_cast<double>(awakeningsBet);
}

double BetLedger::meanPayoffPerAwakening() const {
  return netPayoff() / static_cast<double>(awakeningsBet);
}

double BetLedger::payoffStderr() const {
  if (trials < 2 || awakeningsBet == 0) return 0.0;
  // Ratio estimator sum(net_t) / sum(a_t): linearize with the residuals
  // d_t = net_t - rho * a_t (which sum to zero by choice of rho).
  const BigRational n1 = sumNet.exact();
  const BigRational a1 = sumAwakenings.exact();
  const BigRational rho = n1 / a1;
  const BigRational varD =
      (sumNetSq.exact() - 2 * rho * sumNetAwakenings.exact() +
       rho * rho * sumAwakeningsSq.exact()) /
      (trials - 1);
  const double meanA = BigRational(a1 / trials).convert_to<double>();
  const double v = std::max(0.0, varD.convert_to<double>());
  return std::sqrt(v / static_cast<double>(trials)) / meanA;
}

double BetLedger::impliedCredence() const {
  return static_cast<double>(hAwakenings) / static_cast<double>(awakeningsBet);
}

nlohmann::ordered_json BetLedger::to_json() const {
  nlohmann::ordered_json j;
  j["protocolHash"] = protocolHash;
  j["seed"] = seed;
  j["stakePerAwakening"] = stakePerAwakening;
  j["oddsPayoutOnH"] = oddsPayoutOnH;
  j["trials"] = trials;
  j["awakeningsBet"] = awakeningsBet;
  j["hAwakenings"] = hAwakenings;
  j["netPayoff"] = netPayoff();
  j["meanPayoffPerAwakening"] = meanPayoffPerAwakening();
  j["payoffStderr"] = payoffStderr();
  j["impliedCredence"] = impliedCredence();
  return j;
}

BetLedger bet_evaluate(const ProtocolSpec& protocol, double oddsPayoutOnH,
                       double stakePerAwakening, std::uint64_t trials, Seed seed,
                       unsigned threads) {
  check_sequential(protocol);
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (!(oddsPayoutOnH > 0.0)) throw std::invalid_argument("odds must be > 0");
  if (!(stakePerAwakening > 0.0)) throw std::invalid_argument("stake must be > 0");

  BetAccum acc;
  acc.odds = oddsPayoutOnH;
  acc.stake = stakePerAwakening;
  run_trials(protocol, 0, trials, seed, threads, acc);
  if (acc.awakenings == 0)
    throw NoAwakeningsError("no awakenings to bet on in " + std::to_string(trials) +
                            " trials");

  BetLedger ledger;
  ledger.protocolHash = protocol_hash(protocol);
  ledger.seed = seed;
  ledger.stakePerAwakening = stakePerAwakening;
  ledger.oddsPayoutOnH = oddsPayoutOnH;
  ledger.trials = acc.trials;
  ledger.awakeningsBet = acc.awakenings;
  ledger.hAwakenings = acc.hAwakenings;
  ledger.sumNet = acc.sumNet;
  ledger.sumNetSq = acc.sumNetSq;
  ledger.sumAwakenings = acc.sumAwk;
  ledger.sumAwakeningsSq = acc.sumAwkSq;
  ledger.sumNetAwakenings = acc.sumNetAwk;
  return ledger;
}

double break_even_search(const ProtocolSpec& protocol, std::uint64_t trials, Seed seed) {
  return simulate(protocol, trials, seed).frequency();
}

nlohmann::ordered_json CompareReport::to_json() const {
  nlohmann::ordered_json j;
  j["protocolHash"] = protocolHash;
  j["seed"] = seed;
  j["weeks"] = weeks;
  j["trials"] = trials;
  j["sequentialFrequency"] = sequentialFrequency;
  j["target"] = targetRational;
  j["targetDecimal"] = target;
  j["gap"] = gap;
  j["standardError"] = standardError;
  j["errorMethod"] = errorMethod;
  j["pass"] = pass;
  return j;
}

CompareReport compare_sequential_vs_fixed(const ProtocolSpec& protocol,
                                          std::uint64_t trials, Seed seed) {
  check_sequential(protocol);
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");

  // The fixed-composition schedule realizes the awakening-frequency ratio
  // exactly, so that ratio is the target the sequential run must approach.
  const Rational target = exact::awakening_frequency_ratio(protocol);

  CompareReport r;
  r.protocolHash = protocol_hash(protocol);
  r.seed = seed;
  r.weeks = protocol.weeks;
  r.trials = trials;
  r.targetRational = target.str();
  r.target = target.to_double();

  if (trials == 1) {
    // One long run: weeks are the independent units, so resample them.
    const double pHeads = classical_heads_double(protocol.coin);
    SplitMix64 rng = substream(seed, 0);
    const std::uint64_t cH = protocol.rule.count(TossOutcome::H);
    const std::uint64_t cT = protocol.rule.count(TossOutcome::T);
    std::vector<TrialTally> weekTallies(protocol.weeks);
    std::uint64_t h = 0, a = 0;
    for (std::uint32_t w = 0; w < protocol.weeks; ++w) {
      if (rng.next_double() < pHeads)
        weekTallies[w] = {cH, cH};
      else
        weekTallies[w] = {0, cT};
      h += weekTallies[w].hAwakenings;
      a += weekTallies[w].totalAwakenings;
    }
    if (a == 0) throw NoAwakeningsError();
    r.sequentialFrequency = static_cast<double>(h) / static_cast<double>(a);

    constexpr int kResamples = 1000;
    SplitMix64 boot = substream(seed, kBootstrapStream);
    ExactSum bootSum, bootSumSq;
    std::uint64_t valid = 0;
    for (int b = 0; b < kResamples; ++b) {
      std::uint64_t hb = 0, ab = 0;
      for (std::uint32_t w = 0; w < protocol.weeks; ++w) {
        const TrialTally& t = weekTallies[boot.next_below(protocol.weeks)];
        hb += t.hAwakenings;
        ab += t.totalAwakenings;
      }
      if (ab == 0) continue;
      const double fb = static_cast<double>(hb) / static_cast<double>(ab);
      bootSum.add(fb);
      bootSumSq.add(fb * fb);
      ++valid;
    }
    r.standardError = std::sqrt(sample_variance(bootSum, bootSumSq, valid));
    r.errorMethod = "week-bootstrap";
  } else {
    const SimulationStats s = simulate(protocol, trials, seed);
    r.sequentialFrequency = s.frequency();
    r.standardError = s.trialFrequencyStderr();
    r.errorMethod = "trial-stderr";
  }

  r.gap = std::abs(r.sequentialFrequency - r.target);
  r.pass = r.gap <= 4.0 * r.standardError;
  return r;
}

CompareReport compare_sequential_vs_fixed(std::uint32_t weeks, std::uint64_t trials,
                                          Seed seed) {
  ProtocolSpec p;
  p.weeks = weeks;
  p.rule = AwakeningRule(1, 2);
  p.coin = CoinModel::classical_fair();
  return compare_sequential_vs_fixed(p, trials, seed);
}

} // namespace beauty::mc
