#pragma once

#include "beauty/protocol.hpp"
#include "beauty/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace beauty::branch {

// ---------------------------------------------------------------------------
// Branching-worlds tree
//
// A world splits into labelled branches, each carrying a complex amplitude
// relative to its parent. The weight of a world ("measure of existence") is
// the product of |amplitude|^2 along its path from the root, so the leaf
// weights of any tree built from unitary splits sum to 1.
// ---------------------------------------------------------------------------

struct WorldNode {
  std::string label;
  Complex amplitude{1.0, 0.0}; // relative to the parent world
  std::vector<WorldNode> children;

  bool is_leaf() const { return children.empty(); }
};

class WorldTree {
 public:
  // Squared child amplitudes must sum to 1 within this tolerance for a split
  // to count as unitary.
  static constexpr double kSplitTolerance = 1e-12;

  WorldTree(); // a single world with amplitude 1

  // Splits the leaf world named by `path` (branch labels from the root, e.g.
  // {"H"} or {"live", "live"}) into the given branches. Branch labels must be
  // non-empty and distinct among siblings. Throws std::invalid_argument if the
  // path is unknown, names a non-leaf, or the split is not unitary.
  void split(const std::vector<std::string>& path, std::vector<WorldNode> branches);

  const WorldNode& root() const { return root_; }

  // Product of |amplitude|^2 along `path`; {} names the root (measure 1).
  double measure_of_existence(const std::vector<std::string>& path) const;

  struct LeafMeasure {
    std::vector<std::string> path;
    double measure;
  };

  // All leaf worlds in depth-first order, left to right.
  std::vector<LeafMeasure> leaf_measures() const;

  // Sum of all leaf measures; 1 up to rounding for unitary trees.
  double total_leaf_measure() const;

  nlohmann::ordered_json to_json() const;

 private:
  const WorldNode* find(const std::vector<std::string>& path) const;

  WorldNode root_;
};

// Tree for one coin toss: the root splits into branches "H" and "T". Quantum
// coins keep their amplitudes; a classical coin with heads probability p maps
// to the real amplitudes (sqrt(p), sqrt(1-p)), which carry the same weights.
WorldTree coin_toss_tree(const CoinModel& coin);

// ---------------------------------------------------------------------------
// Centered (self-locating) credences for one-week protocols
// ---------------------------------------------------------------------------

// "It is day `day` of week `week` inside branch `branchLabel`."
struct CenteredProposition {
  std::string branchLabel;
  std::uint32_t week = 0;
  std::uint32_t day = 0;

  auto operator<=>(const CenteredProposition&) const = default;
};

struct CenteredCredence {
  CenteredProposition where;
  double branchWeight; // measure of existence of the branch
  double credence;     // branchWeight / (total awakening-weighted measure)
};

struct CenteredReport {
  std::string protocolHash;
  double totalWeight = 0.0; // countH*weightH + countT*weightT
  std::vector<CenteredCredence> entries;

  nlohmann::ordered_json to_json() const;
};

// Per-awakening credences when both coin branches persist with their measures
// of existence: each awakening in branch b gets weight(b) / totalWeight.
// Requires a sequential one-week protocol (classical coins are mapped to the
// equivalent real-amplitude branching). Throws NoAwakeningsError when no
// branch with positive weight ever wakes.
CenteredReport centered_credences(const ProtocolSpec& protocol);

// ---------------------------------------------------------------------------
// Branching world roulette
// ---------------------------------------------------------------------------

struct RouletteMeasures {
  std::uint32_t rounds = 0;
  Complex survivalAmplitude{0.0, 0.0};
  std::vector<double> perRound; // survivor measure after round k+1
  double survivorMeasure = 0.0; // == perRound.back()

  nlohmann::ordered_json to_json() const;
};

// Tree for `rounds` rounds of the game: each round the surviving world splits
// into "live" (the given amplitude) and "dead" (real amplitude making the
// split unitary). |survivalAmplitude| must lie in (0, 1].
WorldTree roulette_tree(std::uint32_t rounds, Complex survivalAmplitude);

// Survivor measures computed by walking roulette_tree; for amplitude 1/sqrt(2)
// the measure after n rounds is 2^-n.
RouletteMeasures roulette_measures(std::uint32_t rounds, Complex survivalAmplitude);

// ---------------------------------------------------------------------------
// Sparse state vectors and the two-step rewrite identity
// ---------------------------------------------------------------------------

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::map<std::string, Complex> entries)
      : entries_(std::move(entries)) {}

  void set(const std::string& basis, Complex amplitude);
  Complex amp(const std::string& basis) const; // 0 for absent labels
  const std::map<std::string, Complex>& entries() const { return entries_; }

  double norm() const;

  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);
  StateVector& operator*=(Complex scalar);

  friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
  friend StateVector operator*(Complex s, StateVector v) { return v *= s; }

  nlohmann::ordered_json to_json() const;

 private:
  std::map<std::string, Complex> entries_;
};

// a*x + b*y without intermediate copies of the longer operand.
StateVector superpose(Complex a, const StateVector& x, Complex b, const StateVector& y);

// Hermitian inner product, conjugate-linear in the first argument.
Complex inner_product(const StateVector& a, const StateVector& b);

struct OpusReport {
  double maxDeviation = 0.0; // max coefficient gap between the rewrite and Q
  bool pass = false;         // maxDeviation < kPassTolerance

  static constexpr double kPassTolerance = 1e-12;

  nlohmann::ordered_json to_json() const;
};

// Verifies that rewriting P, Q into the rotated pair R+/- = (P +- Q)/sqrt(2)
// and recombining D = (R+ - R-)/sqrt(2) returns exactly Q. Inputs must be
// orthonormal within 1e-9 (std::invalid_argument otherwise).
OpusReport opus_identity_check(const StateVector& p, const StateVector& q);

// Random orthonormal pair over basis labels "e0".."e<dim-1>" (dim >= 2),
// built by Gram-Schmidt from rng draws; used for randomized identity checks.
std::pair<StateVector, StateVector> random_orthonormal_pair(std::size_t dim,
                                                            SplitMix64& rng);

} // namespace beauty::branch
