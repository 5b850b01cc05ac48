#pragma once

// Brute-force bigness oracles and seeded fuzzers for the constructive lemmas. Every
// fuzz case is generated from (seed, lemma, case index) alone, so reports do not depend
// on thread count.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bushy/serialize.hpp"

namespace bushy {

inline constexpr std::size_t kBruteNodeLimit1D = 64;
inline constexpr std::size_t kBruteFreeLimitND = 20;

// Enumerates candidate witnesses explicitly. Length 1: exactly-bushy subtrees above each
// root, child subsets tried in order. Longer: every subset of the U-tuples above A,
// kept when it is a valid system that is g-bushy with leaves in B.
// Throws Limit when U (length 1) or the free tuple count (longer) exceeds the limit.
bool bruteBig(const TuplePred& inB, const TupleSet& A, const BoundVector& g, const ForestSystem& U,
              std::size_t limit = 0);
bool bruteBig(const TupleSet& B, const TupleSet& A, const BoundVector& g, const ForestSystem& U,
              std::size_t limit = 0);

struct FuzzBudget {
  std::size_t cases = 100;  // random cases, after any exhaustive ones
  bool exhaustive = false;  // also run the lemma's small exhaustive class
  // "exhaustive-small", "exhaustive-small+N" or a case count
  static FuzzBudget parse(const std::string& text);
  std::string str() const;
};

struct Counterexample {
  std::size_t caseIndex = 0;
  std::string message;
  Json instance;      // minimized, in the instance format
  std::string path;   // where it was persisted, if anywhere
};

struct FuzzReport {
  std::string lemma;
  std::uint64_t seed = 0;
  FuzzBudget budget;
  std::size_t cases = 0;
  std::size_t hypothesisHeld = 0;
  std::size_t checked = 0;
  std::size_t failures = 0;  // all failing cases; only the first few are minimized
  std::vector<Counterexample> counterexamples;
  std::map<std::string, std::size_t> tally;
  bool expectCounterexamples = false;

  bool asExpected() const { return expectCounterexamples ? failures > 0 : failures == 0; }
  Json toJson() const;
};

const std::vector<std::string>& lemmaNames();

// persistDir empty: nothing is written
FuzzReport fuzzLemma(const std::string& lemma, const FuzzBudget& budget, std::uint64_t seed = 1,
                     const std::string& persistDir = "", std::size_t maxMinimized = 3);

// re-derives every fact a persisted plain-concatenation counterexample claims; empty when it holds
std::vector<std::string> recheckWeakConcatFixture(const Instance& inst);

}  // namespace bushy
