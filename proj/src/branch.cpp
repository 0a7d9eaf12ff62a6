#include "beauty/branch.hpp"

#include "beauty/errors.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace beauty::branch {

namespace {

std::string join_path(const std::vector<std::string>& path) {
  if (path.empty()) return "<root>";
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '/';
    out += path[i];
  }
  return out;
}

const WorldNode* child_named(const WorldNode& node, const std::string& label) {
  for (const WorldNode& c : node.children)
    if (c.label == label) return &c;
  return nullptr;
}

nlohmann::ordered_json node_json(const WorldNode& node, double pathMeasure) {
  nlohmann::ordered_json j;
  j["label"] = node.label;
  j["amplitude"] = {node.amplitude.real(), node.amplitude.imag()};
  j["measure"] = pathMeasure;
  if (!node.is_leaf()) {
    auto kids = nlohmann::ordered_json::array();
    for (const WorldNode& c : node.children)
      kids.push_back(node_json(c, pathMeasure * std::norm(c.amplitude)));
    j["children"] = std::move(kids);
  }
  return j;
}

// Branch weights of the two coin outcomes; classical coins carry probability
// weights directly, which equal the weights of the sqrt-amplitude branching.
std::pair<double, double> coin_weights(const CoinModel& coin) {
  if (coin.is_classical()) {
    const double p = coin.heads_probability().to_double();
    return {p, 1.0 - p};
  }
  return {coin.branch_weight(TossOutcome::H), coin.branch_weight(TossOutcome::T)};
}

} // namespace

WorldTree::WorldTree() { root_.label = "root"; }

const WorldNode* WorldTree::find(const std::vector<std::string>& path) const {
  const WorldNode* cur = &root_;
  for (const std::string& label : path) {
    cur = child_named(*cur, label);
    if (!cur) return nullptr;
  }
  return cur;
}

void WorldTree::split(const std::vector<std::string>& path,
                      std::vector<WorldNode> branches) {
  if (branches.empty())
    throw std::invalid_argument("split: at least one branch required");
  double weight = 0.0;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (branches[i].label.empty())
      throw std::invalid_argument("split: branch labels must be non-empty");
    if (!branches[i].children.empty())
      throw std::invalid_argument("split: branches must be leaves");
    for (std::size_t j = 0; j < i; ++j)
      if (branches[j].label == branches[i].label)
        throw std::invalid_argument("split: duplicate branch label '" +
                                    branches[i].label + "'");
    weight += std::norm(branches[i].amplitude);
  }
  if (std::abs(weight - 1.0) > kSplitTolerance) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "split: squared branch amplitudes sum to %.17g, not 1", weight);
    throw std::invalid_argument(msg);
  }

  WorldNode* cur = &root_;
  for (const std::string& label : path) {
    WorldNode* next = nullptr;
    for (WorldNode& c : cur->children)
      if (c.label == label) next = &c;
    if (!next)
      throw std::invalid_argument("split: unknown world path '" + join_path(path) + "'");
    cur = next;
  }
  if (!cur->is_leaf())
    throw std::invalid_argument("split: world '" + join_path(path) +
                                "' has already split");
  cur->children = std::move(branches);
}

double WorldTree::measure_of_existence(const std::vector<std::string>& path) const {
  const WorldNode* cur = &root_;
  double measure = 1.0;
  for (const std::string& label : path) {
    cur = child_named(*cur, label);
    if (!cur)
      throw std::invalid_argument("unknown world path '" + join_path(path) + "'");
    measure *= std::norm(cur->amplitude);
  }
  return measure;
}

std::vector<WorldTree::LeafMeasure> WorldTree::leaf_measures() const {
  std::vector<LeafMeasure> out;
  std::vector<std::string> path;
  auto walk = [&](auto&& self, const WorldNode& node, double measure) -> void {
    if (node.is_leaf()) {
      out.push_back({path, measure});
      return;
    }
    for (const WorldNode& c : node.children) {
      path.push_back(c.label);
      self(self, c, measure * std::norm(c.amplitude));
      path.pop_back();
    }
  };
  walk(walk, root_, 1.0);
  return out;
}

double WorldTree::total_leaf_measure() const {
  double total = 0.0;
  for (const LeafMeasure& leaf : leaf_measures()) total += leaf.measure;
  return total;
}

nlohmann::ordered_json WorldTree::to_json() const { return node_json(root_, 1.0); }

WorldTree coin_toss_tree(const CoinModel& coin) {
  Complex ampH, ampT;
  if (coin.is_classical()) {
    const double p = coin.heads_probability().to_double();
    ampH = Complex(std::sqrt(p), 0.0);
    ampT = Complex(std::sqrt(1.0 - p), 0.0);
  } else {
    ampH = coin.amplitude(TossOutcome::H);
    ampT = coin.amplitude(TossOutcome::T);
  }
  WorldTree tree;
  tree.split({}, {WorldNode{"H", ampH, {}}, WorldNode{"T", ampT, {}}});
  return tree;
}

nlohmann::ordered_json CenteredReport::to_json() const {
  nlohmann::ordered_json j;
  j["protocolHash"] = protocolHash;
  j["totalWeight"] = totalWeight;
  auto rows = nlohmann::ordered_json::array();
  for (const CenteredCredence& e : entries) {
    nlohmann::ordered_json row;
    row["branch"] = e.where.branchLabel;
    row["week"] = e.where.week;
    row["day"] = e.where.day;
    row["branchWeight"] = e.branchWeight;
    row["credence"] = e.credence;
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return j;
}

CenteredReport centered_credences(const ProtocolSpec& protocol) {
  if (!protocol.sequential())
    throw std::invalid_argument("centered credences require a sequential protocol");
  if (protocol.weeks != 1)
    throw std::invalid_argument(
        "centered credences are implemented for one-week protocols");

  const auto [weightH, weightT] = coin_weights(protocol.coin);
  const std::uint32_t countH = protocol.rule.count(TossOutcome::H);
  const std::uint32_t countT = protocol.rule.count(TossOutcome::T);
  const double total = countH * weightH + countT * weightT;
  if (!(total > 0.0))
    throw NoAwakeningsError("no branch with positive weight ever wakes");

  CenteredReport report;
  report.protocolHash = protocol_hash(protocol);
  report.totalWeight = total;
  auto add_branch = [&](const char* label, double weight, std::uint32_t count) {
    for (std::uint32_t day = 0; day < count; ++day)
      report.entries.push_back({{label, 0, day}, weight, weight / total});
  };
  add_branch("H", weightH, countH);
  add_branch("T", weightT, countT);
  return report;
}

WorldTree roulette_tree(std::uint32_t rounds, Complex survivalAmplitude) {
  if (rounds == 0) throw std::invalid_argument("rounds must be >= 1");
  const double live = std::norm(survivalAmplitude);
  if (!(live > 0.0) || live > 1.0 + WorldTree::kSplitTolerance)
    throw std::invalid_argument("|survival amplitude| must lie in (0, 1]");
  const Complex dead(std::sqrt(std::max(0.0, 1.0 - live)), 0.0);

  WorldTree tree;
  std::vector<std::string> path;
  for (std::uint32_t r = 0; r < rounds; ++r) {
    tree.split(path, {WorldNode{"live", survivalAmplitude, {}},
                      WorldNode{"dead", dead, {}}});
    path.push_back("live");
  }
  return tree;
}

nlohmann::ordered_json RouletteMeasures::to_json() const {
  nlohmann::ordered_json j;
  j["rounds"] = rounds;
  j["survivalAmplitude"] = {survivalAmplitude.real(), survivalAmplitude.imag()};
  j["perRound"] = perRound;
  j["survivorMeasure"] = survivorMeasure;
  return j;
}

RouletteMeasures roulette_measures(std::uint32_t rounds, Complex survivalAmplitude) {
  const WorldTree tree = roulette_tree(rounds, survivalAmplitude);

  RouletteMeasures m;
  m.rounds = rounds;
  m.survivalAmplitude = survivalAmplitude;
  m.perRound.reserve(rounds);
  std::vector<std::string> path;
  for (std::uint32_t r = 0; r < rounds; ++r) {
    path.push_back("live");
    m.perRound.push_back(tree.measure_of_existence(path));
  }
  m.survivorMeasure = m.perRound.back();
  return m;
}

void StateVector::set(const std::string& basis, Complex amplitude) {
  entries_[basis] = amplitude;
}

Complex StateVector::amp(const std::string& basis) const {
  const auto it = entries_.find(basis);
  return it == entries_.end() ? Complex{0.0, 0.0} : it->second;
}

double StateVector::norm() const {
  double sq = 0.0;
  for (const auto& [basis, amplitude] : entries_) sq += std::norm(amplitude);
  return std::sqrt(sq);
}

StateVector& StateVector::operator+=(const StateVector& other) {
  for (const auto& [basis, amplitude] : other.entries_) entries_[basis] += amplitude;
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
  for (const auto& [basis, amplitude] : other.entries_) entries_[basis] -= amplitude;
  return *this;
}

StateVector& StateVector::operator*=(Complex scalar) {
  for (auto& [basis, amplitude] : entries_) amplitude *= scalar;
  return *this;
}

nlohmann::ordered_json StateVector::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [basis, amplitude] : entries_)
    j[basis] = {amplitude.real(), amplitude.imag()};
  return j;
}

StateVector superpose(Complex a, const StateVector& x, Complex b, const StateVector& y) {
  StateVector out = x;
  out *= a;
  for (const auto& [basis, amplitude] : y.entries())
    out.set(basis, out.amp(basis) + b * amplitude);
  return out;
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  Complex sum{0.0, 0.0};
  for (const auto& [basis, amplitude] : a.entries())
    sum += std::conj(amplitude) * b.amp(basis);
  return sum;
}

nlohmann::ordered_json OpusReport::to_json() const {
  nlohmann::ordered_json j;
  j["maxDeviation"] = maxDeviation;
  j["pass"] = pass;
  return j;
}

OpusReport opus_identity_check(const StateVector& p, const StateVector& q) {
  constexpr double kOrthonormalTolerance = 1e-9;
  const double pNormGap = std::abs(inner_product(p, p).real() - 1.0) +
                          std::abs(inner_product(p, p).imag());
  const double qNormGap = std::abs(inner_product(q, q).real() - 1.0) +
                          std::abs(inner_product(q, q).imag());
  const double overlap = std::abs(inner_product(p, q));
  if (pNormGap > kOrthonormalTolerance || qNormGap > kOrthonormalTolerance ||
      overlap > kOrthonormalTolerance) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "states must be orthonormal: |<P,P>-1|=%.3g |<Q,Q>-1|=%.3g "
                  "|<P,Q>|=%.3g",
                  pNormGap, qNormGap, overlap);
    throw std::invalid_argument(msg);
  }

  const double invSqrt2 = 1.0 / std::sqrt(2.0);
  const StateVector rPlus = superpose(invSqrt2, p, invSqrt2, q);
  const StateVector rMinus = superpose(invSqrt2, p, -invSqrt2, q);
  const StateVector d = superpose(invSqrt2, rPlus, -invSqrt2, rMinus);

  OpusReport report;
  for (const auto& [basis, amplitude] : d.entries())
    report.maxDeviation = std::max(report.maxDeviation, std::abs(amplitude - q.amp(basis)));
  for (const auto& [basis, amplitude] : q.entries())
    report.maxDeviation = std::max(report.maxDeviation, std::abs(d.amp(basis) - amplitude));
  report.pass = report.maxDeviation < OpusReport::kPassTolerance;
  return report;
}

std::pair<StateVector, StateVector> random_orthonormal_pair(std::size_t dim,
                                                            SplitMix64& rng) {
  if (dim < 2) throw std::invalid_argument("dim must be >= 2");

  auto draw = [&] {
    StateVector v;
    for (std::size_t i = 0; i < dim; ++i)
      v.set("e" + std::to_string(i),
            Complex(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0));
    return v;
  };
  auto scaled = [](const StateVector& v, double s) {
    return Complex(s, 0.0) * v;
  };

  StateVector p = draw();
  while (p.norm() < 1e-6) p = draw();
  p = scaled(p, 1.0 / p.norm());

  for (;;) {
    StateVector q = draw();
    q = superpose(Complex(1.0, 0.0), q, -inner_product(p, q), p);
    if (q.norm() < 1e-6) continue;
    q = scaled(q, 1.0 / q.norm());
    return {p, std::move(q)};
  }
}

} // namespace beauty::branch
