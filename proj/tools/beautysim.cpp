// beautysim: exact and simulated per-awakening credences for Sleeping
// Beauty style protocols, plus the branching-worlds tools for quantum coins.
#include "beauty/branch.hpp"
#include "beauty/errors.hpp"
#include "beauty/exact.hpp"
#include "beauty/montecarlo.hpp"
#include "beauty/protocol.hpp"
#include "beauty/rational.hpp"
#include "beauty/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using beauty::AwakeningRule;
using beauty::CoinModel;
using beauty::Complex;
using beauty::NoAwakeningsError;
using beauty::ProtocolError;
using beauty::ProtocolSpec;
using beauty::Rational;
using beauty::TossOutcome;
namespace bx = beauty::exact;
namespace bmc = beauty::mc;
namespace bb = beauty::branch;

constexpr bmc::Seed kDefaultSeed = 42;

std::string dec(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.12f", v);
  return b;
}

std::string sig(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.12g", v);
  return b;
}

void kv(const char* key, const std::string& value) {
  std::printf("%-20s %s\n", key, value.c_str());
}

std::string day_name(std::uint32_t day) {
  static const char* const kDays[7] = {"Mon", "Tue", "Wed", "Thu",
                                       "Fri", "Sat", "Sun"};
  if (day < 7) return kDays[day];
  return "day" + std::to_string(day);
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

Complex parse_complex(const std::string& flag, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double re = std::stod(text, &pos);
    double im = 0.0;
    if (pos < text.size()) {
      if (text[pos] != ',') throw std::invalid_argument("separator");
      std::size_t rest = 0;
      const std::string imText = text.substr(pos + 1);
      im = std::stod(imText, &rest);
      if (rest != imText.size()) throw std::invalid_argument("trailing");
    }
    return {re, im};
  } catch (const ProtocolError&) {
    throw;
  } catch (const std::exception&) {
    throw ProtocolError(flag + ": malformed complex number '" + text +
                        "' (expected re or re,im)");
  }
}

struct ProtocolOptions {
  std::string file;
  std::uint32_t weeks = 1;
  std::string pHeads = "1/2";
  std::uint32_t countH = 1;
  std::uint32_t countT = 2;
  std::string ampH;
  std::string ampT;
};

void add_protocol_options(CLI::App* sub, ProtocolOptions& o, std::uint32_t defaultWeeks) {
  o.weeks = defaultWeeks;
  sub->add_option("--protocol", o.file, "Protocol JSON file (overrides inline flags)");
  sub->add_option("--weeks", o.weeks, "Number of i.i.d. experiment weeks")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--pH", o.pHeads, "Heads probability as a rational, e.g. 1/3")
      ->capture_default_str();
  sub->add_option("--countH", o.countH, "Awakenings in a heads week")
      ->capture_default_str();
  sub->add_option("--countT", o.countT, "Awakenings in a tails week")
      ->capture_default_str();
  sub->add_option("--ampH", o.ampH, "Quantum heads amplitude re[,im]");
  sub->add_option("--ampT", o.ampT, "Quantum tails amplitude re[,im]");
}

ProtocolSpec build_protocol(const ProtocolOptions& o) {
  if (!o.file.empty()) {
    std::ifstream in(o.file);
    if (!in) throw ProtocolError("--protocol: cannot open '" + o.file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return beauty::parse_protocol(buf.str());
  }
  ProtocolSpec p;
  p.weeks = o.weeks;
  p.rule = AwakeningRule(o.countH, o.countT);
  if (!o.ampH.empty() || !o.ampT.empty()) {
    if (o.ampH.empty() || o.ampT.empty())
      throw ProtocolError("coin: --ampH and --ampT must be given together");
    p.coin = CoinModel::quantum(parse_complex("--ampH", o.ampH),
                                parse_complex("--ampT", o.ampT));
  } else {
    p.coin = CoinModel::classical(Rational::parse(o.pHeads));
  }
  return p;
}

const char* rule_description(bx::CredenceRule rule) {
  return rule == bx::CredenceRule::EqualSequencePrior
             ? "equal prior per coin-outcome sequence"
             : "priors proportional to sequence weight times awakening count";
}

void run_exact(const ProtocolSpec& protocol, const std::string& ruleChoice,
               const std::string& format) {
  std::vector<bx::CredenceRule> rules;
  if (ruleChoice == "both")
    rules = {bx::CredenceRule::EqualSequencePrior, bx::CredenceRule::AwakeningWeighted};
  else
    rules = {bx::rule_from_name(ruleChoice)};

  std::vector<bx::CredenceReport> reports;
  reports.reserve(rules.size());
  for (bx::CredenceRule r : rules) reports.push_back(bx::credence(protocol, r));

  if (format == "json") {
    nlohmann::ordered_json j;
    j["protocolHash"] = beauty::protocol_hash(protocol);
    j["weeks"] = protocol.weeks;
    nlohmann::ordered_json byRule = nlohmann::ordered_json::object();
    for (const bx::CredenceReport& rep : reports)
      byRule[bx::rule_name(rep.rule)] = bx::to_json(rep);
    j["rules"] = std::move(byRule);
    std::printf("%s\n", j.dump(2).c_str());
    return;
  }
  if (format == "csv") {
    std::printf("rule,sequence,prior,conditional,total\n");
    for (const bx::CredenceReport& rep : reports)
      for (const bx::SequenceCredence& row : rep.perSequence)
        std::printf("%s,%s,%s,%s,%s\n", bx::rule_name(rep.rule),
                    beauty::sequence_to_string(row.sequence).c_str(),
                    row.prior.str().c_str(), row.conditional.str().c_str(),
                    rep.total.str().c_str());
    return;
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const bx::CredenceReport& rep = reports[i];
    if (i) std::printf("\n");
    std::printf("rule: %s (%s)\n", bx::rule_name(rep.rule), rule_description(rep.rule));
    const int width = std::max<int>(8, static_cast<int>(protocol.weeks));
    std::printf("%-*s  %-16s %s\n", width, "sequence", "prior", "conditional");
    for (const bx::SequenceCredence& row : rep.perSequence)
      std::printf("%-*s  %-16s %s\n", width,
                  beauty::sequence_to_string(row.sequence).c_str(),
                  row.prior.str().c_str(), row.conditional.str().c_str());
    std::printf("credence(H) = %s = %s\n", rep.total.str().c_str(),
                rep.total.decimal(12).c_str());
  }
}

void run_simulate(const ProtocolSpec& protocol, std::uint64_t trials, bmc::Seed seed,
                  unsigned threads, const std::string& format) {
  const bmc::SimulationStats stats = bmc::simulate(protocol, trials, seed, threads);
  if (format == "json") {
    std::printf("%s\n", stats.to_json().dump(2).c_str());
    return;
  }
  if (format == "csv") {
    std::printf("%s\n%s\n", bmc::SimulationStats::csv_header().c_str(),
                stats.csv_row().c_str());
    return;
  }
  kv("protocol hash", stats.protocolHash);
  kv("seed", std::to_string(stats.seed));
  kv("trials", std::to_string(stats.trials));
  kv("awakenings", std::to_string(stats.totalAwakenings));
  kv("H awakenings", std::to_string(stats.hAwakenings));
  kv("waking trials", std::to_string(stats.wakingTrials));
  kv("frequency", dec(stats.frequency()));
  kv("trial freq mean", dec(stats.trialFrequencyMean()));
  kv("trial freq stddev", sig(stats.trialFrequencyStddev()));
  kv("trial freq stderr", sig(stats.trialFrequencyStderr()));
}

void run_bet(const ProtocolSpec& protocol, double odds, double stake,
             std::uint64_t trials, bmc::Seed seed, unsigned threads,
             const std::string& format) {
  const bmc::BetLedger ledger =
      bmc::bet_evaluate(protocol, odds, stake, trials, seed, threads);
  const double breakEven = 1.0 / ledger.impliedCredence();
  if (format == "json") {
    nlohmann::ordered_json j = ledger.to_json();
    j["breakEvenOdds"] = breakEven;
    std::printf("%s\n", j.dump(2).c_str());
    return;
  }
  if (format == "csv") {
    std::printf(
        "protocol_hash,seed,odds,stake,trials,awakenings_bet,h_awakenings,"
        "net_payoff,mean_payoff_per_awakening,se,implied_credence,break_even_odds\n");
    std::printf("%s,%llu,%s,%s,%llu,%llu,%llu,%s,%s,%s,%s,%s\n",
                ledger.protocolHash.c_str(),
                static_cast<unsigned long long>(ledger.seed), sig(odds).c_str(),
                sig(stake).c_str(), static_cast<unsigned long long>(ledger.trials),
                static_cast<unsigned long long>(ledger.awakeningsBet),
                static_cast<unsigned long long>(ledger.hAwakenings),
                sig(ledger.netPayoff()).c_str(),
                dec(ledger.meanPayoffPerAwakening()).c_str(),
                sig(ledger.payoffStderr()).c_str(),
                dec(ledger.impliedCredence()).c_str(), dec(breakEven).c_str());
    return;
  }
  kv("protocol hash", ledger.protocolHash);
  kv("seed", std::to_string(ledger.seed));
  kv("odds on H", sig(ledger.oddsPayoutOnH));
  kv("stake/awakening", sig(ledger.stakePerAwakening));
  kv("trials", std::to_string(ledger.trials));
  kv("awakenings bet", std::to_string(ledger.awakeningsBet));
  kv("H awakenings", std::to_string(ledger.hAwakenings));
  kv("net payoff", sig(ledger.netPayoff()));
  kv("mean/awakening", dec(ledger.meanPayoffPerAwakening()));
  kv("stderr", sig(ledger.payoffStderr()));
  kv("implied credence", dec(ledger.impliedCredence()));
  kv("break-even odds", dec(breakEven));
}

void run_fixed(std::uint64_t countH, std::uint64_t countT, bmc::Seed seed,
               bool showSchedule, const std::string& format) {
  const bmc::SimulationStats stats =
      bmc::simulate_fixed_composition(countH, countT, seed);
  const Rational credence = bx::fixed_composition_credence(countH, countT);
  const std::string schedule =
      showSchedule
          ? beauty::sequence_to_string(bmc::shuffled_schedule(countH, countT, seed))
          : std::string();
  if (format == "json") {
    nlohmann::ordered_json j;
    j["countH"] = countH;
    j["countT"] = countT;
    j["seed"] = seed;
    j["frequency"] = credence.str();
    j["frequencyDecimal"] = credence.to_double();
    j["stats"] = stats.to_json();
    if (showSchedule) j["schedule"] = schedule;
    std::printf("%s\n", j.dump(2).c_str());
    return;
  }
  if (format == "csv") {
    std::printf("count_h,count_t,seed,awakenings,frequency,frequency_decimal\n");
    std::printf("%llu,%llu,%llu,%llu,%s,%s\n",
                static_cast<unsigned long long>(countH),
                static_cast<unsigned long long>(countT),
                static_cast<unsigned long long>(seed),
                static_cast<unsigned long long>(stats.totalAwakenings),
                credence.str().c_str(), credence.decimal(12).c_str());
    return;
  }
  kv("H awakenings", std::to_string(countH));
  kv("T awakenings", std::to_string(countT));
  kv("seed", std::to_string(seed));
  kv("frequency", credence.str() + " = " + credence.decimal(12));
  if (showSchedule) kv("schedule", schedule);
}

void run_centered(const ProtocolSpec& protocol, const std::string& format) {
  const bb::CenteredReport report = bb::centered_credences(protocol);
  if (format == "json") {
    std::printf("%s\n", report.to_json().dump(2).c_str());
    return;
  }
  if (format == "csv") {
    std::printf("branch,week,day,branch_weight,credence\n");
    for (const bb::CenteredCredence& e : report.entries)
      std::printf("%s,%u,%u,%s,%s\n", e.where.branchLabel.c_str(), e.where.week,
                  e.where.day, dec(e.branchWeight).c_str(), dec(e.credence).c_str());
    return;
  }
  kv("protocol hash", report.protocolHash);
  kv("total weight", dec(report.totalWeight));
  std::printf("%-7s %-5s %-5s %-16s %s\n", "branch", "week", "day", "weight",
              "credence");
  for (const bb::CenteredCredence& e : report.entries)
    std::printf("%-7s %-5u %-5s %-16s %s\n", e.where.branchLabel.c_str(),
                e.where.week, day_name(e.where.day).c_str(),
                dec(e.branchWeight).c_str(), dec(e.credence).c_str());
}

void run_roulette(std::uint32_t rounds, Complex amp, bool showTree,
                  const std::string& format) {
  const bb::RouletteMeasures m = bb::roulette_measures(rounds, amp);
  if (format == "json") {
    nlohmann::ordered_json j = m.to_json();
    if (showTree) j["tree"] = bb::roulette_tree(rounds, amp).to_json();
    std::printf("%s\n", j.dump(2).c_str());
    return;
  }
  if (format == "csv") {
    std::printf("round,survivor_measure\n");
    for (std::uint32_t r = 0; r < rounds; ++r)
      std::printf("%u,%s\n", r + 1, sig(m.perRound[r]).c_str());
    return;
  }
  kv("rounds", std::to_string(rounds));
  kv("survival amplitude", sig(amp.real()) + (amp.imag() == 0.0 ? std::string()
                                                                : "," + sig(amp.imag())));
  std::printf("%-7s %s\n", "round", "survivor measure");
  for (std::uint32_t r = 0; r < rounds; ++r)
    std::printf("%-7u %s\n", r + 1, sig(m.perRound[r]).c_str());
}

void run_opus(std::size_t minDim, std::size_t maxDim, std::uint64_t checks,
              bmc::Seed seed, const std::string& format) {
  if (minDim < 2 || maxDim < minDim)
    throw std::invalid_argument("--min-dim/--max-dim: need 2 <= min <= max");
  beauty::SplitMix64 rng = beauty::substream(seed, 0);
  double maxDeviation = 0.0;
  bool pass = true;
  for (std::uint64_t c = 0; c < checks; ++c) {
    const std::size_t dim =
        minDim + static_cast<std::size_t>(rng.next_below(maxDim - minDim + 1));
    const auto [p, q] = bb::random_orthonormal_pair(dim, rng);
    const bb::OpusReport rep = bb::opus_identity_check(p, q);
    maxDeviation = std::max(maxDeviation, rep.maxDeviation);
    pass = pass && rep.pass;
  }
  if (format == "json") {
    nlohmann::ordered_json j;
    j["checks"] = checks;
    j["minDim"] = minDim;
    j["maxDim"] = maxDim;
    j["seed"] = seed;
    j["maxDeviation"] = maxDeviation;
    j["pass"] = pass;
    std::printf("%s\n", j.dump(2).c_str());
    return;
  }
  if (format == "csv") {
    std::printf("checks,min_dim,max_dim,seed,max_deviation,pass\n");
    std::printf("%llu,%zu,%zu,%llu,%s,%s\n",
                static_cast<unsigned long long>(checks), minDim, maxDim,
                static_cast<unsigned long long>(seed), sig(maxDeviation).c_str(),
                yes_no(pass).c_str());
    return;
  }
  kv("checks", std::to_string(checks));
  kv("dims", std::to_string(minDim) + ".." + std::to_string(maxDim));
  kv("seed", std::to_string(seed));
  kv("max deviation", sig(maxDeviation));
  kv("pass", yes_no(pass));
}

void run_compare(const ProtocolSpec& protocol, std::uint64_t trials, bmc::Seed seed,
                 const std::string& format) {
  const bmc::CompareReport r = bmc::compare_sequential_vs_fixed(protocol, trials, seed);
  if (format == "json") {
    std::printf("%s\n", r.to_json().dump(2).c_str());
    return;
  }
  if (format == "csv") {
    std::printf(
        "protocol_hash,seed,weeks,trials,frequency,target,target_decimal,gap,se,"
        "method,pass\n");
    std::printf("%s,%llu,%u,%llu,%s,%s,%s,%s,%s,%s,%s\n", r.protocolHash.c_str(),
                static_cast<unsigned long long>(r.seed), r.weeks,
                static_cast<unsigned long long>(r.trials),
                dec(r.sequentialFrequency).c_str(), r.targetRational.c_str(),
                dec(r.target).c_str(), sig(r.gap).c_str(),
                sig(r.standardError).c_str(), r.errorMethod.c_str(),
                yes_no(r.pass).c_str());
    return;
  }
  kv("protocol hash", r.protocolHash);
  kv("seed", std::to_string(r.seed));
  kv("weeks", std::to_string(r.weeks));
  kv("trials", std::to_string(r.trials));
  kv("sequential freq", dec(r.sequentialFrequency));
  kv("target", r.targetRational + " = " + dec(r.target));
  kv("gap", sig(r.gap));
  kv("standard error", sig(r.standardError));
  kv("method", r.errorMethod);
  kv("pass", yes_no(r.pass));
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "beautysim: exact and Monte Carlo per-awakening credences for Sleeping "
      "Beauty protocols, with branching-worlds tools for quantum coins"};
  app.require_subcommand(1);

  std::string format = "table";
  bmc::Seed seed = kDefaultSeed;
  unsigned threads = 1;
  auto add_common = [&](CLI::App* sub, bool withThreads) {
    sub->add_option("--format", format, "Output format: table, json or csv")
        ->check(CLI::IsMember({"table", "json", "csv"}))
        ->capture_default_str();
    sub->add_option("--seed", seed, "RNG seed (env BEAUTYSIM_SEED)")
        ->envname("BEAUTYSIM_SEED")
        ->capture_default_str();
    if (withThreads)
      sub->add_option("--threads", threads, "Worker threads (results are identical)")
          ->check(CLI::PositiveNumber)
          ->capture_default_str();
  };

  // exact
  ProtocolOptions exactOpts;
  std::string rule = "both";
  CLI::App* exact = app.add_subcommand(
      "exact", "Exact credences by enumerating all coin-outcome sequences");
  add_protocol_options(exact, exactOpts, 2);
  exact->add_option("--rule", rule, "Credence rule: lewis, elga or both")
      ->check(CLI::IsMember({"lewis", "elga", "both"}))
      ->capture_default_str();
  add_common(exact, false);
  exact->callback([&] { run_exact(build_protocol(exactOpts), rule, format); });

  // simulate
  ProtocolOptions simOpts;
  std::uint64_t simTrials = 100000;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo awakening frequencies");
  add_protocol_options(simulate, simOpts, 1);
  simulate->add_option("--trials", simTrials, "Independent protocol runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(simulate, true);
  simulate->callback(
      [&] { run_simulate(build_protocol(simOpts), simTrials, seed, threads, format); });

  // bet
  ProtocolOptions betOpts;
  double odds = 0.0, stake = 1.0;
  std::uint64_t betTrials = 100000;
  CLI::App* bet = app.add_subcommand(
      "bet", "Evaluate a per-awakening bet on heads at fixed odds");
  add_protocol_options(bet, betOpts, 1);
  bet->add_option("--odds", odds, "Payout per unit stake when the coin shows H")
      ->required()
      ->check(CLI::PositiveNumber);
  bet->add_option("--stake", stake, "Stake per awakening")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bet->add_option("--trials", betTrials, "Independent protocol runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(bet, true);
  bet->callback([&] {
    run_bet(build_protocol(betOpts), odds, stake, betTrials, seed, threads, format);
  });

  // fixed
  std::uint64_t fixedH = 2609, fixedT = 5218;
  bool showSchedule = false;
  CLI::App* fixed = app.add_subcommand(
      "fixed", "Shuffle a fixed schedule of H- and T-awakenings");
  fixed->add_option("--countH", fixedH, "Total H awakenings")->capture_default_str();
  fixed->add_option("--countT", fixedT, "Total T awakenings")->capture_default_str();
  fixed->add_flag("--schedule", showSchedule, "Print the shuffled schedule");
  add_common(fixed, false);
  fixed->callback([&] { run_fixed(fixedH, fixedT, seed, showSchedule, format); });

  // branch
  ProtocolOptions branchOpts;
  std::uint32_t rouletteRounds = 0;
  std::string survivalAmp;
  bool showTree = false;
  CLI::App* branch = app.add_subcommand(
      "branch", "Branching-worlds credences and the world roulette");
  add_protocol_options(branch, branchOpts, 1);
  branch->add_option("--roulette", rouletteRounds,
                     "Rounds of the branching-world roulette (instead of credences)");
  branch->add_option("--survival-amp", survivalAmp,
                     "Survival amplitude re[,im] (default 1/sqrt(2))");
  branch->add_flag("--tree", showTree, "Include the world tree in JSON output");
  add_common(branch, false);
  branch->callback([&] {
    if (rouletteRounds > 0) {
      const Complex amp = survivalAmp.empty()
                              ? Complex(1.0 / std::sqrt(2.0), 0.0)
                              : parse_complex("--survival-amp", survivalAmp);
      run_roulette(rouletteRounds, amp, showTree, format);
    } else {
      run_centered(build_protocol(branchOpts), format);
    }
  });

  // opus
  std::size_t minDim = 2, maxDim = 16;
  std::uint64_t checks = 100;
  CLI::App* opus = app.add_subcommand(
      "opus", "Check the rotated-pair rewrite identity on random orthonormal states");
  opus->add_option("--min-dim", minDim, "Smallest state dimension")
      ->capture_default_str();
  opus->add_option("--max-dim", maxDim, "Largest state dimension")
      ->capture_default_str();
  opus->add_option("--checks", checks, "Number of random pairs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(opus, false);
  opus->callback([&] { run_opus(minDim, maxDim, checks, seed, format); });

  // compare
  ProtocolOptions cmpOpts;
  std::uint64_t cmpTrials = 1;
  CLI::App* compare = app.add_subcommand(
      "compare", "Compare a sequential run against the exact awakening-frequency ratio");
  add_protocol_options(compare, cmpOpts, 5218);
  compare->add_option("--trials", cmpTrials, "Independent runs (1 = week bootstrap)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(compare, false);
  compare->callback(
      [&] { run_compare(build_protocol(cmpOpts), cmpTrials, seed, format); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ProtocolError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NoAwakeningsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
