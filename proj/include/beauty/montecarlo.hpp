#pragma once

#include "beauty/exact_sum.hpp"
#include "beauty/protocol.hpp"
#include "beauty/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace beauty::mc {

using Seed = std::uint64_t;

/*
 * Tallies of a simulation run. Integer counts plus exact per-trial moment
 * sums, so partial results from disjoint trial ranges merge associatively
 * and bit-reproducibly (see ExactSum).
 *
 * Uncertainty is reported across independent trials: awakenings within a
 * trial share the coin sequence and are correlated, so per-awakening
 * binomial errors would understate the noise.
 */
struct SimulationStats {
  std::string protocolHash;
  Seed seed = 0;

  std::uint64_t trials = 0;
  std::uint64_t totalAwakenings = 0;
  std::uint64_t hAwakenings = 0;
  std::uint64_t wakingTrials = 0; // trials with at least one awakening

  ExactSum sumTrialFrequency;   // sum over waking trials of h_t / a_t
  ExactSum sumTrialFrequencySq; // same, squared

  // Pooled per-awakening H frequency, hAwakenings / totalAwakenings.
  double frequency() const;

  // Moments of the per-trial frequencies h_t / a_t over waking trials.
  double trialFrequencyMean() const;
  double trialFrequencyStddev() const; // sample stddev; 0 when < 2 trials
  double trialFrequencyStderr() const;

  // Counterpart from a disjoint trial range of the same run.
  void merge(const SimulationStats& other);

  nlohmann::ordered_json to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

// Runs `trials` i.i.d. repetitions of the sequential protocol, tallying
// per-awakening H counts. Trial t draws from substream(seed, t), so results
// are independent of thread count and trial ranges can be recomputed
// anywhere. Throws NoAwakeningsError if the whole run never wakes Beauty.
SimulationStats simulate(const ProtocolSpec& protocol, std::uint64_t trials, Seed seed,
                         unsigned threads = 1);

// Same, over the absolute trial indices [firstTrial, firstTrial + trials).
// simulate(p, n, s) == merge of simulate_range pieces covering [0, n).
SimulationStats simulate_range(const ProtocolSpec& protocol, std::uint64_t firstTrial,
                               std::uint64_t trials, Seed seed, unsigned threads = 1);

// Uniformly shuffled schedule of nH H-awakenings and nT T-awakenings
// (Fisher-Yates over the multiset, substream(seed, 0)).
std::vector<TossOutcome> shuffled_schedule(std::uint64_t headsAwakenings,
                                           std::uint64_t tailsAwakenings, Seed seed);

// Experiment (iii): the shuffle permutes the schedule only, so the
// frequency is exactly nH / (nH + nT) for every seed.
SimulationStats simulate_fixed_composition(std::uint64_t headsAwakenings,
                                           std::uint64_t tailsAwakenings, Seed seed);

/*
 * Dutch-book ledger: Beauty stakes `stakePerAwakening` on H at every
 * awakening and is paid oddsPayoutOnH * stake when the coin shows H.
 * netPayoff = sum over awakenings of (payout * 1[H] - stake).
 */
struct BetLedger {
  std::string protocolHash;
  Seed seed = 0;
  double stakePerAwakening = 1.0;
  double oddsPayoutOnH = 1.0;

  std::uint64_t trials = 0;
  std::uint64_t awakeningsBet = 0;
  std::uint64_t hAwakenings = 0;

  // Per-trial moments for the ratio-estimator standard error.
  ExactSum sumNet, sumNetSq, sumAwakenings, sumAwakeningsSq, sumNetAwakenings;

  double netPayoff() const;
  double meanPayoffPerAwakening() const; // netPayoff / awakeningsBet
  // Linearized (ratio-estimator) standard error of meanPayoffPerAwakening
  // across trials.
  double payoffStderr() const;
  double impliedCredence() const; // per-awakening H frequency = 1 / break-even odds

  nlohmann::ordered_json to_json() const;
};

BetLedger bet_evaluate(const ProtocolSpec& protocol, double oddsPayoutOnH,
                       double stakePerAwakening, std::uint64_t trials, Seed seed,
                       unsigned threads = 1);

// Break-even betting price for H. Mean payoff per awakening at odds q is
// stake * (q * f - 1) with f the empirical per-awakening H frequency, so the
// zero is q* = 1/f and the implied credence 1/q* = f: the closed form needs
// no search.
double break_even_search(const ProtocolSpec& protocol, std::uint64_t trials, Seed seed);

/*
 * Closeness check between a sequential run and the awakening-frequency
 * ratio it should concentrate around (the exact awakening-weighted
 * credence, which is what a fixed-composition schedule realizes exactly).
 * With a single trial the across-trial error is replaced by a block
 * bootstrap over weeks (weeks are the independent blocks).
 */
struct CompareReport {
  std::string protocolHash;
  Seed seed = 0;
  std::uint32_t weeks = 0;
  std::uint64_t trials = 0;
  double sequentialFrequency = 0.0;
  std::string targetRational; // exact awakening-weighted credence
  double target = 0.0;
  double gap = 0.0;           // |sequentialFrequency - target|
  double standardError = 0.0;
  std::string errorMethod;    // "trial-stderr" or "week-bootstrap"
  bool pass = false;          // gap <= 4 * standardError

  nlohmann::ordered_json to_json() const;
};

CompareReport compare_sequential_vs_fixed(const ProtocolSpec& protocol,
                                          std::uint64_t trials, Seed seed);

// Fair coin, rule {H:1, T:2}.
CompareReport compare_sequential_vs_fixed(std::uint32_t weeks, std::uint64_t trials,
                                          Seed seed);

} // namespace beauty::mc
