#pragma once

// Truncated functionals: monotone maps from universe tuples to binary strings, the
// splitting relations they induce, and the constructive splitting lemmas.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bushy/systems.hpp"

namespace bushy {

class FunctionalTable {
 public:
  FunctionalTable() = default;
  // throws Validation listing the first violations
  FunctionalTable(ForestSystem universe, std::map<Tuple, Str> values);

  static std::vector<std::string> validate(const ForestSystem& universe, const std::map<Tuple, Str>& values);

  const ForestSystem& universe() const { return universe_; }
  const std::map<Tuple, Str>& values() const { return values_; }
  const Str& operator()(const Tuple& t) const;  // throws Range outside the universe
  bool defined(const Tuple& t) const { return values_.count(t) != 0; }
  std::size_t maxLength() const;

 private:
  ForestSystem universe_;
  std::map<Tuple, Str> values_;
};

enum class SplitKind { Global, Local };
const char* split_kind_name(SplitKind k);

// global: all cross pairs outside B have incomparable values; local: only pairs sharing
// their domain part (everything but the last coordinate)
bool isSplit(const TupleSet& A0, const TupleSet& A1, const TupleSet& B, const FunctionalTable& G,
             SplitKind kind);

struct SplittingCertificate {
  TupleSet E{1}, F{1};   // E′ and F′
  TupleSet modSet{1};
  SplitKind kind = SplitKind::Global;
  std::string branch;     // which step of the case analysis produced the pair
  Str alpha;              // the maximal α when the case analysis ran
  ForestSystem witnessE, witnessF;
};

// {α-values}: E_{⪰α}, E_{⪯α}, E_{⊥α}, each including E ∩ B
enum class Rel { Extends, PrefixOf, Incomparable };
TupleSet valueSlice(const TupleSet& E, const TupleSet& B, const FunctionalTable& G, const Str& alpha, Rel rel);

struct SinglePair {
  TupleSet A0{1}, A1{1};          // witness leaves
  ForestSystem witness0, witness1;
};

// exact search for two g⃗-big sets above s inside U that split mod B; values come from
// the universe tuple through `prefix` (the fiber coordinates are appended)
std::optional<SinglePair> findSingleSplit(const FunctionalTable& G, const TupleSet& B, const Tuple& prefix,
                                          const ForestSystem& U, const Tuple& s, const BoundVector& g,
                                          std::size_t budget = 200000);

// the domain tuples whose fiber holds a g-big splitting above μ
TupleSet splitSet(const FunctionalTable& G, const TupleSet& B, const Str& mu, const BoundingFunction& g);

// the longest α with A_α(τ) g-big above μ
Str computeTheta(const FunctionalTable& G, const TupleSet& B, const Str& mu, const BoundingFunction& g,
                 const Tuple& tau);

using SplitFamily = std::map<Tuple, std::array<TupleSet, 2>>;

SplittingCertificate extractSplitting(const TupleSet& A, const SplitFamily& Erho, const TupleSet& F,
                                      const TupleSet& B, const BoundVector& g, const BoundVector& h,
                                      const FunctionalTable& G, const Tuple& s, const Tuple& sStar);

enum class PairwiseMode { OneD, Local, Global };
const char* pairwise_mode_name(PairwiseMode m);

struct PairwiseResult {
  std::vector<TupleSet> sets;
  std::vector<std::string> trace;
};

PairwiseResult findPairwiseSplittings(const std::vector<Tuple>& taus, const TupleSet& B,
                                      const FunctionalTable& G, const BoundVector& g, PairwiseMode mode,
                                      std::size_t budget = 200000);

}  // namespace bushy
