#pragma once

// Finite-depth forcing conditions over truncated tree systems: mock jumps and their
// DNC bad sets, condition validation and extension, the totality and splitting
// builders, and the restriction/homogenization maps between lengths.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bushy/functionals.hpp"
#include "bushy/quickgrow.hpp"
#include "bushy/systems.hpp"

namespace bushy {

// A finite stand-in for J^τ⃗: entries keyed by (oracle prefix, index). An entry at prefix
// π answers for every oracle tuple of the same length extending π.
struct MockJump {
  std::map<std::pair<Tuple, std::int64_t>, Sym> entries;

  std::optional<Sym> at(const Tuple& oracle, std::int64_t e) const;
  // prefixes with a common extension must agree on each index
  std::vector<std::string> validate() const;
  bool operator==(const MockJump& o) const { return entries == o.entries; }

  // entries for oracle lengths 0..maxLen-1, values below `branching`, indices below `depth`
  static MockJump random(std::mt19937_64& rng, std::size_t maxLen, Sym branching, std::size_t depth);
};

// τ⃗ violates DNC-ness somewhere along its coordinates
bool inBDnc(const MockJump& J, const Tuple& t);
TupleSet bDncSet(const MockJump& J, std::size_t n, const ForestSystem& U);

struct Condition {
  Tuple stem;
  ForestSystem system;  // truncated at system.depthBound
  TupleSet bad{1};
  BoundingFunction h, b;
  GrowthWitness gg;     // witnesses h ≫ b
  std::int64_t ggK = 3; // iterates checked by ggVerify, up to the depth bound

  std::size_t n() const { return system.n; }
  std::int64_t depth() const;
  bool operator==(const Condition& o) const {
    return stem == o.stem && system == o.system && bad == o.bad && h == o.h && b == o.b;
  }
  bool operator!=(const Condition& o) const { return !(*this == o); }
};

// errors carry the failing clause number; info carries truncation-relative notes
Diagnostics validateCondition(const Condition& p, const MockJump& J = {});
// q ≤ p in the condition order, checked pointwise up to q's depth bound
Diagnostics extendsCondition(const Condition& q, const Condition& p);

Condition extendToRectangle(const Condition& p, std::int64_t m);

struct Sigma1Result {
  bool big = false;
  std::optional<ForestSystem> witness;  // B ∪ C is g⃗-big above τ⃗
  std::optional<Condition> extension;   // otherwise: the condition adding C to the bad set
};
Sigma1Result sigma1Decide(const Condition& p, const TupleSet& C, const Tuple& tau, const BoundingFunction& g,
                          const GrowthWitness& gw = {});

struct BuildRound {
  std::size_t round = 0;
  std::int64_t level = 0;       // ℓ after the round
  std::size_t leaves = 0;
  std::string method;           // how the round's extension was found
  std::vector<std::string> notes;
};
struct BuildResult {
  Condition condition;
  std::vector<BuildRound> rounds;
};

BuildResult buildTotalitySystem(const Condition& p, const std::vector<TupleSet>& Cs, const BoundingFunction& g,
                                const GrowthWitness& gw = {});

BuildResult buildSplittingSystem(const Condition& p, const FunctionalTable& G, const BoundingFunction& g,
                                 PairwiseMode mode, std::size_t rounds, const GrowthWitness& gw = {});

// same-level scans used as builder postconditions; empty when they pass
std::vector<std::string> totalityViolations(const Condition& q, const std::vector<TupleSet>& Cs);
std::vector<std::string> splittingViolations(const Condition& q, const FunctionalTable& G,
                                             const std::vector<std::int64_t>& levels, PairwiseMode mode);

// drop the last coordinate; the bad set becomes the projection over the last stem component
Condition restrictI(const Condition& q, const MockJump& J = {});
Condition nuHomogenize(const Condition& q);
bool inQ(const Condition& q);
Condition composeRestrictions(const Condition& q, std::size_t m, const MockJump& J = {});
// a length n+1 condition with restrictI(lift(p)) = p; fibers are h-bounded strings up to the norm
Condition liftCondition(const Condition& p, const MockJump& J = {});

}  // namespace bushy
