#pragma once

#include "beauty/protocol.hpp"
#include "beauty/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace beauty::exact {

// The two prior assignments under debate: Lewis gives every outcome
// sequence its coin weight; Elga reweights sequences by how many awakenings
// they produce.
enum class CredenceRule { EqualSequencePrior, AwakeningWeighted };

const char* rule_name(CredenceRule rule); // "lewis" / "elga"
CredenceRule rule_from_name(std::string_view name);

// Enumeration is 2^weeks; larger experiments belong to the Monte Carlo
// engine.
inline constexpr std::uint32_t kMaxEnumerationWeeks = 24;

struct SequenceCredence {
  OutcomeSequence sequence;
  Rational prior;       // p(s), after any renormalization
  Rational conditional; // p(H | s); 0 by convention when s never wakes
};

// Per-awakening credence in H, decomposed over coin-outcome sequences:
// total = sum over s of prior(s) * conditional(s).
struct CredenceReport {
  CredenceRule rule = CredenceRule::AwakeningWeighted;
  std::vector<SequenceCredence> perSequence; // lexicographic, H < T
  Rational total;
};

nlohmann::ordered_json to_json(const CredenceReport& report);

// i.i.d. product weight w(s) of a sequence under a classical coin. A fair
// quantum coin maps to pH = 1/2; any other quantum coin is the branch
// engine's business and is rejected here.
Rational sequence_weight(const OutcomeSequence& seq, const CoinModel& coin);

// Prior of one sequence exactly as it appears in credence()'s report:
// never-waking sequences get 0, and equal sequence priors renormalize over
// the waking ones.
Rational prior(const OutcomeSequence& seq, const ProtocolSpec& protocol, CredenceRule rule);

Rational conditional_credence(const OutcomeSequence& seq, const AwakeningRule& rule,
                              TossOutcome proposition);

CredenceReport credence(const ProtocolSpec& protocol, CredenceRule rule);

// Experiment-(iii) credence: nH / (nH + nT), exact.
Rational fixed_composition_credence(std::uint64_t headsAwakenings,
                                    std::uint64_t tailsAwakenings);

// Exact share of awakenings that follow heads for a sequential protocol:
// pH*countH / (pH*countH + pT*countT). Because weeks are i.i.d., this closed
// form equals credence(protocol, AwakeningWeighted).total for every horizon,
// with no enumeration and therefore no week cap. Throws NoAwakeningsError
// when the expected number of awakenings is zero.
Rational awakening_frequency_ratio(const ProtocolSpec& protocol);

} // namespace beauty::exact
