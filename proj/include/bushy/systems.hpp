#pragma once

// Length-n forest systems: finite sets of n-tuples whose last-coordinate fibers are
// forests that end-extend along the domain. Bigness for systems is decided by
// projecting onto the domain one coordinate at a time.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bushy/largeness.hpp"

namespace bushy {

using BoundVector = std::vector<BoundingFunction>;
BoundVector chopBounds(const BoundVector& g);
BoundVector constBounds(std::size_t n, std::int64_t c);
BoundVector sumBounds(const BoundVector& a, const BoundVector& b);
BoundVector scaleBounds(std::int64_t c, const BoundVector& g);
std::string describe(const BoundVector& g);

using TuplePred = std::function<bool(const Tuple&)>;
TuplePred memberOfND(const TupleSet& B);

struct ForestSystem {
  std::size_t n = 1;
  TupleSet base{1};
  TupleSet nodes{1};
  std::int64_t depthBound = -1;  // -1: not a truncation

  ForestSystem() = default;
  ForestSystem(TupleSet b, TupleSet nd, std::int64_t depth = -1);

  bool contains(const Tuple& t) const { return nodes.listed(t); }
  std::size_t size() const { return nodes.size(); }
  bool operator==(const ForestSystem& o) const { return base == o.base && nodes == o.nodes; }
  bool operator!=(const ForestSystem& o) const { return !(*this == o); }
};

ForestSystem fromForest(const Forest& F);
Forest toForest(const ForestSystem& T);  // length 1 only
// chop T as a system above chop of the base
ForestSystem domSystem(const ForestSystem& T);
ForestSystem domK(const ForestSystem& T, std::size_t k);
// last-coordinate fibers, keyed by domain tuple, built in one pass
std::map<Tuple, StrSet> lastFibers(const ForestSystem& T);
// the fiber T(τ⃗) for a k-prefix τ⃗, as a system above the matching base fiber
ForestSystem fiberSystem(const ForestSystem& T, const Tuple& prefix);

struct Diagnostics {
  std::vector<std::string> errors;
  std::vector<std::string> info;
  bool ok() const { return errors.empty(); }
};
Diagnostics validateSystem(const ForestSystem& T);

// ⪯-maximal tuples
TupleSet leavesND(const ForestSystem& T);
bool isBushyND(const ForestSystem& T, const BoundVector& g, bool exact = false);
bool isEndExtensionND(const ForestSystem& S, const ForestSystem& R);
ForestSystem fullSubsystem(const ForestSystem& T, const Tuple& s);
TupleSet upwardIn(const TupleSet& A, const ForestSystem& U);  // A^⪯ ∩ U
TupleSet levelSet(const ForestSystem& U, std::size_t level);    // all components of length level

// universes
ForestSystem productSystem(const std::vector<Forest>& factors);
// every tuple with |τ_n| ≤ … ≤ |τ_1| ≤ depth over the given branching
ForestSystem balancedFullSystem(std::size_t n, Sym branching, std::size_t depth);

// {τ⃗ ∈ dom_k U above dom_k A : B(τ⃗) is h⃗-big above A(τ⃗^{-dom_k A})}, k = n − |h⃗|
TupleSet project(const TuplePred& inB, const TupleSet& A, const BoundVector& h, const ForestSystem& U);
// {τ⃗ ∈ dom_k U : μ⃗ ∈ U(τ⃗) and B(τ⃗) is h⃗-big above μ⃗}
TupleSet projectSuffix(const TuplePred& inB, const Tuple& mu, const BoundVector& h, const ForestSystem& U);

struct BigNDResult {
  bool big = false;
  std::optional<ForestSystem> witness;
  TupleSet smallAbove{1};
  TupleSet projection{1};  // the domain set decided at the top level (empty for n = 1)
};
BigNDResult decideBigND(const TuplePred& inB, const TupleSet& A, const BoundVector& g, const ForestSystem& U);
BigNDResult decideBigND(const TupleSet& B, const TupleSet& A, const BoundVector& g, const ForestSystem& U);
bool isBigND(const TuplePred& inB, const Tuple& s, const BoundVector& g, const ForestSystem& U);

// diagnostics for a claimed system witness; empty when valid
std::vector<std::string> checkWitnessND(const ForestSystem& W, const TuplePred& inB, const TupleSet& A,
                                        const BoundVector& g, const ForestSystem& U);

struct SubsetSplitND {
  SplitSide side = SplitSide::B;
  ForestSystem witness;
};
SubsetSplitND bigSubsetSplitND(const TuplePred& inB, const TuplePred& inC, const Tuple& s,
                               const BoundVector& g, const BoundVector& g2, const ForestSystem& U);
SubsetSplitND bigSubsetSplitND(const TupleSet& B, const TupleSet& C, const Tuple& s,
                               const BoundVector& g, const BoundVector& g2, const ForestSystem& U);
// the set form: only a single tuple is accepted
SubsetSplitND bigSubsetSplitND(const TupleSet& B, const TupleSet& C, const TupleSet& A,
                               const BoundVector& g, const BoundVector& g2, const ForestSystem& U);

// S⌢R; R must sit above the leaves of S
ForestSystem concatSystems(const ForestSystem& S, const ForestSystem& R);

// an end-extension of S inside U with leaves in the open set C
ForestSystem weakConcatExtend(const ForestSystem& S, const TuplePred& inC, const BoundVector& g,
                              const ForestSystem& U);
ForestSystem weakConcatExtend(const ForestSystem& S, const TupleSet& C, const BoundVector& g,
                              const ForestSystem& U);
// true iff C is upward closed inside U
bool isOpenIn(const TuplePred& inC, const ForestSystem& U);

std::vector<std::int64_t> balancedLevels(const ForestSystem& T);

// a tuple with every component of length ≥ m above which B is b⃗-small
Tuple findSmallRectangle(const ForestSystem& T, const TuplePred& inB, const BoundVector& b, std::int64_t m);

// the domain tuples over which every set's fiber is big; then its bigness above A
TupleSet uniformProjection(const std::vector<TuplePred>& sets, const TupleSet& A, const BoundVector& g,
                           const ForestSystem& U);
bool uniformlyBig(const std::vector<TuplePred>& sets, const TupleSet& A, const BoundVector& g,
                  const ForestSystem& U);

// worker threads used for per-domain-node decisions; results never depend on it
void setParallelism(unsigned threads);
unsigned parallelism();
// runs f(0..count-1) on the worker threads; calls nested inside a worker run serially
void parallelFor(std::size_t count, const std::function<void(std::size_t)>& f);

std::string to_text(const ForestSystem& T);

}  // namespace bushy
