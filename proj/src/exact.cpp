#include "beauty/exact.hpp"

#include "beauty/errors.hpp"

#include <stdexcept>
#include <string>

namespace beauty::exact {

namespace {

Rational classical_heads_probability(const CoinModel& coin) {
  if (coin.is_classical()) return coin.heads_probability();
  if (coin.is_fair_quantum()) return Rational(1, 2);
  throw std::invalid_argument(
      "unequal quantum branch weights have no exact classical weight; "
      "use branch_engine credences instead");
}

void check_sequential(const ProtocolSpec& protocol) {
  if (!protocol.sequential())
    throw std::invalid_argument(
        "sequential protocols only; use fixed_composition_credence");
  if (protocol.weeks > kMaxEnumerationWeeks)
    throw std::invalid_argument("weeks > " + std::to_string(kMaxEnumerationWeeks) +
                                " is beyond exact enumeration; use the Monte Carlo engine");
}

} // namespace

const char* rule_name(CredenceRule rule) {
  return rule == CredenceRule::EqualSequencePrior ? "lewis" : "elga";
}

CredenceRule rule_from_name(std::string_view name) {
  if (name == "lewis" || name == "equal") return CredenceRule::EqualSequencePrior;
  if (name == "elga" || name == "weighted") return CredenceRule::AwakeningWeighted;
  throw std::invalid_argument("unknown credence rule '" + std::string(name) +
                              "' (expected lewis or elga)");
}

Rational sequence_weight(const OutcomeSequence& seq, const CoinModel& coin) {
  const Rational pH = classical_heads_probability(coin);
  const Rational pT = Rational(1) - pH;
  Rational w(1);
  for (TossOutcome o : seq) w *= (o == TossOutcome::H ? pH : pT);
  return w;
}

Rational conditional_credence(const OutcomeSequence& seq, const AwakeningRule& rule,
                              TossOutcome proposition) {
  const std::uint64_t total = total_awakenings(seq, rule);
  if (total == 0)
    throw NoAwakeningsError("conditional credence undefined: sequence '" +
                            sequence_to_string(seq) + "' produces no awakenings");
  return Rational(BigInt(outcome_awakenings(seq, rule, proposition)), BigInt(total));
}

Rational prior(const OutcomeSequence& seq, const ProtocolSpec& protocol, CredenceRule rule) {
  check_sequential(protocol);
  if (seq.size() != protocol.weeks)
    throw std::invalid_argument("sequence length does not match protocol weeks");

  Rational weightedMass(0); // sum w(s) a(s)
  Rational wakingWeight(0); // sum of w(s) over sequences with a(s) > 0
  const std::uint64_t count = 1ULL << protocol.weeks;
  for (std::uint64_t i = 0; i < count; ++i) {
    const OutcomeSequence s = sequence_from_index(protocol.weeks, i);
    const Rational w = sequence_weight(s, protocol.coin);
    const std::uint64_t a = total_awakenings(s, protocol.rule);
    weightedMass += w * Rational(BigInt(a), 1);
    if (a > 0) wakingWeight += w;
  }
  if (weightedMass.is_zero()) throw NoAwakeningsError();

  const std::uint64_t a = total_awakenings(seq, protocol.rule);
  if (a == 0) return Rational(0); // never-waking sequences drop out
  const Rational w = sequence_weight(seq, protocol.coin);
  return rule == CredenceRule::EqualSequencePrior
             ? w / wakingWeight
             : w * Rational(BigInt(a), 1) / weightedMass;
}

CredenceReport credence(const ProtocolSpec& protocol, CredenceRule rule) {
  check_sequential(protocol);

  const std::uint64_t count = 1ULL << protocol.weeks;
  struct Row {
    OutcomeSequence seq;
    Rational weight;
    std::uint64_t awakenings;
    std::uint64_t headsAwakenings;
  };
  std::vector<Row> rows;
  rows.reserve(count);

  Rational weightedMass(0);  // sum w(s) a(s)
  Rational wakingWeight(0);  // sum of w(s) over sequences with a(s) > 0
  for (std::uint64_t i = 0; i < count; ++i) {
    Row row;
    row.seq = sequence_from_index(protocol.weeks, i);
    row.weight = sequence_weight(row.seq, protocol.coin);
    row.awakenings = total_awakenings(row.seq, protocol.rule);
    row.headsAwakenings = outcome_awakenings(row.seq, protocol.rule, TossOutcome::H);
    weightedMass += row.weight * Rational(BigInt(row.awakenings), 1);
    if (row.awakenings > 0) wakingWeight += row.weight;
    rows.push_back(std::move(row));
  }
  if (weightedMass.is_zero()) throw NoAwakeningsError();

  CredenceReport report;
  report.rule = rule;
  report.perSequence.reserve(count);
  Rational total(0);
  for (const Row& row : rows) {
    SequenceCredence entry;
    entry.sequence = row.seq;
    if (row.awakenings == 0) {
      // Never-waking sequences carry no per-awakening evidence: prior 0
      // under both rules (equal priors renormalize over the waking ones).
      entry.prior = Rational(0);
      entry.conditional = Rational(0);
    } else {
      entry.conditional = Rational(BigInt(row.headsAwakenings), BigInt(row.awakenings));
      entry.prior = rule == CredenceRule::EqualSequencePrior
                        ? row.weight / wakingWeight
                        : row.weight * Rational(BigInt(row.awakenings), 1) / weightedMass;
      total += entry.prior * entry.conditional;
    }
    report.perSequence.push_back(std::move(entry));
  }
  report.total = std::move(total);
  return report;
}

Rational fixed_composition_credence(std::uint64_t headsAwakenings,
                                    std::uint64_t tailsAwakenings) {
  if (headsAwakenings + tailsAwakenings == 0) throw NoAwakeningsError();
  return Rational(BigInt(headsAwakenings), BigInt(headsAwakenings + tailsAwakenings));
}

Rational awakening_frequency_ratio(const ProtocolSpec& protocol) {
  if (!protocol.sequential())
    throw std::invalid_argument(
        "sequential protocols only; use fixed_composition_credence");
  const Rational pH = classical_heads_probability(protocol.coin);
  const Rational pT = Rational(1) - pH;
  const Rational hMass = pH * Rational(protocol.rule.count(TossOutcome::H));
  const Rational mass = hMass + pT * Rational(protocol.rule.count(TossOutcome::T));
  if (mass.is_zero()) throw NoAwakeningsError();
  return hMass / mass;
}

nlohmann::ordered_json to_json(const CredenceReport& report) {
  nlohmann::ordered_json j;
  j["rule"] = rule_name(report.rule);
  auto rows = nlohmann::ordered_json::array();
  for (const SequenceCredence& entry : report.perSequence) {
    rows.push_back({{"sequence", sequence_to_string(entry.sequence)},
                    {"prior", entry.prior.str()},
                    {"conditional", entry.conditional.str()}});
  }
  j["perSequence"] = std::move(rows);
  j["total"] = report.total.str();
  j["totalDecimal"] = report.total.decimal();
  return j;
}

} // namespace beauty::exact
