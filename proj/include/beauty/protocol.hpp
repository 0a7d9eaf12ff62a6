#pragma once

#include "beauty/rational.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace beauty {

// H < T: this order fixes sequence enumeration everywhere.
enum class TossOutcome : std::uint8_t { H = 0, T = 1 };

constexpr char to_char(TossOutcome o) { return o == TossOutcome::H ? 'H' : 'T'; }
TossOutcome toss_from_char(char c);

using OutcomeSequence = std::vector<TossOutcome>;

std::string sequence_to_string(const OutcomeSequence& seq);
OutcomeSequence sequence_from_string(std::string_view text);

// Sequence `index` of the lexicographic enumeration (H < T) of all
// 2^weeks outcome sequences.
OutcomeSequence sequence_from_index(std::uint32_t weeks, std::uint64_t index);

// How many times Beauty wakes for each coin outcome.
class AwakeningRule {
public:
  AwakeningRule(std::uint32_t headsCount, std::uint32_t tailsCount);

  std::uint32_t count(TossOutcome o) const {
    return counts_[static_cast<std::size_t>(o)];
  }

  bool operator==(const AwakeningRule&) const = default;

private:
  std::array<std::uint32_t, 2> counts_;
};

using Complex = std::complex<double>;

class CoinModel {
public:
  enum class Kind { ClassicalFair, ClassicalBiased, Quantum };

  static CoinModel classical_fair() { return classical(Rational(1, 2)); }
  static CoinModel classical(Rational pHeads);
  static CoinModel quantum(Complex ampHeads, Complex ampTails);

  Kind kind() const { return kind_; }
  bool is_classical() const { return kind_ != Kind::Quantum; }

  // Classical coins only.
  const Rational& heads_probability() const;

  // Quantum coins only.
  Complex amplitude(TossOutcome o) const;
  double branch_weight(TossOutcome o) const; // |amplitude|^2
  bool is_fair_quantum() const;              // branch weights equal within 1e-12

  bool operator==(const CoinModel&) const = default;

private:
  CoinModel() = default;
  Kind kind_ = Kind::ClassicalFair;
  Rational pHeads_{1, 2};
  Complex ampHeads_{0.0, 0.0};
  Complex ampTails_{0.0, 0.0};
};

// Experiment (iii)-style schedule: a pre-committed multiset of awakenings in
// randomized order, no coin randomness.
struct FixedComposition {
  std::uint64_t headsAwakenings = 0;
  std::uint64_t tailsAwakenings = 0;

  bool operator==(const FixedComposition&) const = default;
};

struct ProtocolSpec {
  std::uint32_t weeks = 1;
  AwakeningRule rule{1, 2};
  CoinModel coin = CoinModel::classical_fair();
  std::optional<FixedComposition> fixed; // nullopt = sequential mode

  bool sequential() const { return !fixed.has_value(); }

  bool operator==(const ProtocolSpec&) const = default;
};

// One wake-interrogate-erase episode. Day indices are 0-based within the
// week; no calendar semantics.
struct Awakening {
  std::uint32_t week = 0;
  std::uint32_t day = 0;
  TossOutcome coinState = TossOutcome::H;

  bool operator==(const Awakening&) const = default;
};

// All awakenings of one run, chronological (week-major, day-minor).
std::vector<Awakening> awakenings_for(const OutcomeSequence& seq, const AwakeningRule& rule);

std::uint64_t total_awakenings(const OutcomeSequence& seq, const AwakeningRule& rule);

// Awakenings whose coin shows `outcome`.
std::uint64_t outcome_awakenings(const OutcomeSequence& seq, const AwakeningRule& rule,
                                 TossOutcome outcome);

// Protocol file format: UTF-8 JSON, see README. Throws ProtocolError with the
// offending field path on malformed input or invariant violations.
ProtocolSpec parse_protocol(std::string_view text);
std::string serialize_protocol(const ProtocolSpec& protocol); // canonical form

// FNV-1a over the canonical serialization, 16 hex digits. Used to key runs
// in CSV/JSON reports.
std::string protocol_hash(const ProtocolSpec& protocol);

} // namespace beauty
