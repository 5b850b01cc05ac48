#pragma once

// h-bigness of a set of strings above a set of strings, decided inside a finite
// universe forest U. Bigness is relative to U: only bushy forests whose nodes lie in
// U count as witnesses.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bushy/forests.hpp"

namespace bushy {

using StrPred = std::function<bool(const Str&)>;
StrPred memberOf(const TupleSet& B);  // arity 1, honours the open flag

struct LargenessWitness {
  Forest forest;
  TupleSet target{1};
  BoundingFunction bound;
};

struct BigResult {
  bool big = false;
  std::optional<LargenessWitness> witness;
  std::vector<Str> smallAbove;  // elements of A above which the target is small
  StrSet good;                  // the marking: U-nodes above A from which the target is big
};

// good(τ) iff τ ∈ B or at least h(|τ|) U-children of τ are good
StrSet goodMarking(const StrPred& inB, const BoundingFunction& h, const Forest& U);
// the witness read off a marking; roots must be good
Forest witnessFromMarking(const StrSet& good, const StrPred& inB, const BoundingFunction& h,
                          const Forest& U, const std::vector<Str>& roots);

BigResult decideBigPred(const StrPred& inB, const std::vector<Str>& A, const BoundingFunction& h,
                        const Forest& U);
BigResult decideBig(const TupleSet& B, const TupleSet& A, const BoundingFunction& h, const Forest& U);
bool isBig(const TupleSet& B, const Str& s, const BoundingFunction& h, const Forest& U);

// diagnostics for a claimed witness; empty when valid
std::vector<std::string> checkWitness(const Forest& W, const StrPred& inB, const std::vector<Str>& A,
                                      const BoundingFunction& h, const Forest& U);

enum class SplitSide { B, C };
const char* side_name(SplitSide s);

struct SubsetSplit {
  SplitSide side = SplitSide::B;
  LargenessWitness witness;
  Forest unionWitness;  // the (h+g)-bushy forest that was labelled
};

// B ∪ C is (h+g)-big above s, so B is h-big or C is g-big above s
SubsetSplit bigSubsetSplit(const TupleSet& B, const TupleSet& C, const Str& s,
                           const BoundingFunction& h, const BoundingFunction& g, const Forest& U);
SubsetSplit bigSubsetSplitPred(const StrPred& inB, const StrPred& inC, const Str& s,
                               const BoundingFunction& h, const BoundingFunction& g, const Forest& U);

// end-extends S so that its leaves land in C
Forest concatExtend(const Forest& S, const TupleSet& C, const BoundingFunction& h, const Forest& U);

// every τ ∈ U above which A is g-big
TupleSet gClosure(const TupleSet& A, const BoundingFunction& g, const Forest& U);

}  // namespace bushy
