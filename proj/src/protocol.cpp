#include "beauty/protocol.hpp"

#include "beauty/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace beauty {

namespace {

constexpr double kNormalizationTolerance = 1e-12;

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ProtocolError(path + ": " + what);
}

const ordered_json& field(const ordered_json& obj, const std::string& path,
                          const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

std::uint64_t nonneg_int(const ordered_json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "must be a nonnegative integer");
  if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)
    fail(path, "must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

Complex amplitude_from_json(const ordered_json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(path, "expected [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

CoinModel coin_from_json(const ordered_json& v) {
  const auto& type = field(v, "coin", "type");
  if (!type.is_string()) fail("coin.type", "expected 'classical' or 'quantum'");
  const std::string kind = type.get<std::string>();
  if (kind == "classical") {
    const auto& pH = field(v, "coin", "pH");
    if (!pH.is_string()) fail("coin.pH", "expected a rational string \"num/den\"");
    Rational p;
    try {
      p = Rational::parse(pH.get<std::string>());
    } catch (const ProtocolError& e) {
      fail("coin.pH", e.what());
    }
    if (p < Rational(0) || p > Rational(1))
      fail("coin.pH", "probability out of range (" + p.str() + ")");
    return CoinModel::classical(p);
  }
  if (kind == "quantum") {
    const Complex aH = amplitude_from_json(field(v, "coin", "ampH"), "coin.ampH");
    const Complex aT = amplitude_from_json(field(v, "coin", "ampT"), "coin.ampT");
    const double total = std::norm(aH) + std::norm(aT);
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", total);
      fail("coin", std::string("quantum amplitudes not normalized (|ampH|^2+|ampT|^2 = ") +
                       buf + ")");
    }
    return CoinModel::quantum(aH, aT);
  }
  fail("coin.type", "expected 'classical' or 'quantum'");
}

ordered_json coin_to_json(const CoinModel& coin) {
  ordered_json j;
  if (coin.is_classical()) {
    j["type"] = "classical";
    j["pH"] = coin.heads_probability().str();
  } else {
    j["type"] = "quantum";
    const Complex aH = coin.amplitude(TossOutcome::H);
    const Complex aT = coin.amplitude(TossOutcome::T);
    j["ampH"] = {aH.real(), aH.imag()};
    j["ampT"] = {aT.real(), aT.imag()};
  }
  return j;
}

} // namespace

TossOutcome toss_from_char(char c) {
  if (c == 'H') return TossOutcome::H;
  if (c == 'T') return TossOutcome::T;
  throw std::invalid_argument(std::string("invalid toss outcome '") + c + "'");
}

std::string sequence_to_string(const OutcomeSequence& seq) {
  std::string s;
  s.reserve(seq.size());
  for (TossOutcome o : seq) s += to_char(o);
  return s;
}

OutcomeSequence sequence_from_string(std::string_view text) {
  OutcomeSequence seq;
  seq.reserve(text.size());
  for (char c : text) seq.push_back(toss_from_char(c));
  return seq;
}

OutcomeSequence sequence_from_index(std::uint32_t weeks, std::uint64_t index) {
  OutcomeSequence seq(weeks, TossOutcome::H);
  for (std::uint32_t w = 0; w < weeks; ++w) {
    const bool tails = (index >> (weeks - 1 - w)) & 1u;
    seq[w] = tails ? TossOutcome::T : TossOutcome::H;
  }
  return seq;
}

AwakeningRule::AwakeningRule(std::uint32_t headsCount, std::uint32_t tailsCount)
    : counts_{headsCount, tailsCount} {
  if (headsCount == 0 && tailsCount == 0)
    throw ProtocolError("awakenings: at least one outcome needs a positive count");
}

CoinModel CoinModel::classical(Rational pHeads) {
  if (pHeads < Rational(0) || pHeads > Rational(1))
    throw ProtocolError("coin.pH: probability out of range (" + pHeads.str() + ")");
  CoinModel c;
  c.kind_ = pHeads == Rational(1, 2) ? Kind::ClassicalFair : Kind::ClassicalBiased;
  c.pHeads_ = std::move(pHeads);
  return c;
}

CoinModel CoinModel::quantum(Complex ampHeads, Complex ampTails) {
  const double total = std::norm(ampHeads) + std::norm(ampTails);
  if (std::abs(total - 1.0) > kNormalizationTolerance)
    throw ProtocolError("coin: quantum amplitudes not normalized");
  CoinModel c;
  c.kind_ = Kind::Quantum;
  c.ampHeads_ = ampHeads;
  c.ampTails_ = ampTails;
  return c;
}

const Rational& CoinModel::heads_probability() const {
  if (!is_classical()) throw std::logic_error("heads_probability: quantum coin");
  return pHeads_;
}

Complex CoinModel::amplitude(TossOutcome o) const {
  if (is_classical()) throw std::logic_error("amplitude: classical coin");
  return o == TossOutcome::H ? ampHeads_ : ampTails_;
}

double CoinModel::branch_weight(TossOutcome o) const { return std::norm(amplitude(o)); }

bool CoinModel::is_fair_quantum() const {
  return kind_ == Kind::Quantum &&
         std::abs(branch_weight(TossOutcome::H) - branch_weight(TossOutcome::T)) <=
             kNormalizationTolerance;
}

std::vector<Awakening> awakenings_for(const OutcomeSequence& seq, const AwakeningRule& rule) {
  std::vector<Awakening> out;
  out.reserve(total_awakenings(seq, rule));
  for (std::uint32_t w = 0; w < seq.size(); ++w) {
    const TossOutcome o = seq[w];
    for (std::uint32_t d = 0; d < rule.count(o); ++d) out.push_back({w, d, o});
  }
  return out;
}

std::uint64_t total_awakenings(const OutcomeSequence& seq, const AwakeningRule& rule) {
  std::uint64_t n = 0;
  for (TossOutcome o : seq) n += rule.count(o);
  return n;
}

std::uint64_t outcome_awakenings(const OutcomeSequence& seq, const AwakeningRule& rule,
                                 TossOutcome outcome) {
  std::uint64_t n = 0;
  for (TossOutcome o : seq)
    if (o == outcome) n += rule.count(o);
  return n;
}

ProtocolSpec parse_protocol(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("protocol: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("protocol: expected a JSON object");

  ProtocolSpec p;

  const auto& weeks = field(j, "protocol", "weeks");
  if (!weeks.is_number_integer() || weeks.get<std::int64_t>() < 1)
    fail("weeks", "must be a positive integer");
  if (weeks.get<std::uint64_t>() > 0xffffffffULL) fail("weeks", "too large");
  p.weeks = weeks.get<std::uint32_t>();

  const auto& awk = field(j, "protocol", "awakenings");
  const std::uint64_t cH = nonneg_int(field(awk, "awakenings", "H"), "awakenings.H");
  const std::uint64_t cT = nonneg_int(field(awk, "awakenings", "T"), "awakenings.T");
  if (cH > 0xffffffffULL) fail("awakenings.H", "too large");
  if (cT > 0xffffffffULL) fail("awakenings.T", "too large");
  if (cH == 0 && cT == 0) fail("awakenings", "at least one outcome needs a positive count");
  p.rule = AwakeningRule(static_cast<std::uint32_t>(cH), static_cast<std::uint32_t>(cT));

  p.coin = coin_from_json(field(j, "protocol", "coin"));

  const auto& mode = field(j, "protocol", "mode");
  const auto& type = field(mode, "mode", "type");
  if (!type.is_string()) fail("mode.type", "expected 'sequential' or 'fixed'");
  const std::string kind = type.get<std::string>();
  if (kind == "sequential") {
    p.fixed.reset();
  } else if (kind == "fixed") {
    FixedComposition fc;
    fc.headsAwakenings = nonneg_int(field(mode, "mode", "nH"), "mode.nH");
    fc.tailsAwakenings = nonneg_int(field(mode, "mode", "nT"), "mode.nT");
    if (fc.headsAwakenings + fc.tailsAwakenings == 0)
      fail("mode", "nH + nT must be at least 1");
    p.fixed = fc;
  } else {
    fail("mode.type", "expected 'sequential' or 'fixed'");
  }
  return p;
}

std::string serialize_protocol(const ProtocolSpec& protocol) {
  ordered_json j;
  j["weeks"] = protocol.weeks;
  j["awakenings"] = {{"H", protocol.rule.count(TossOutcome::H)},
                     {"T", protocol.rule.count(TossOutcome::T)}};
  j["coin"] = coin_to_json(protocol.coin);
  if (protocol.fixed) {
    j["mode"] = {{"type", "fixed"},
                 {"nH", protocol.fixed->headsAwakenings},
                 {"nT", protocol.fixed->tailsAwakenings}};
  } else {
    j["mode"] = {{"type", "sequential"}};
  }
  return j.dump();
}

std::string protocol_hash(const ProtocolSpec& protocol) {
  const std::string text = serialize_protocol(protocol);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace beauty
