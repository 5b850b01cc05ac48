#pragma once

// Finite forests of strings above a prefix-free base.

#include <cstdint>
#include <string>
#include <vector>

#include "bushy/quickgrow.hpp"
#include "bushy/strings.hpp"

namespace bushy {

struct Forest {
  StrSet base;
  StrSet nodes;
  // truncation depth for forests standing in for infinite trees; -1 when not a truncation
  std::int64_t depth = -1;

  Forest() = default;
  Forest(StrSet b, StrSet n, std::int64_t d = -1)
      : base(std::move(b)), nodes(std::move(n)), depth(d) {}

  // a single node, the trivial forest above {s}
  static Forest point(const Str& s);
  // base plus every given string and its initial segments down to its base element
  static Forest closure(const StrSet& base, const std::vector<Str>& strings,
                        std::int64_t depth = -1);

  bool contains(const Str& s) const { return nodes.count(s) != 0; }
  std::vector<Str> children(const Str& s) const;  // in canonical order
  std::size_t child_count(const Str& s) const;
  std::size_t size() const { return nodes.size(); }
  std::size_t height() const;  // longest node length

  bool operator==(const Forest& o) const { return base == o.base && nodes == o.nodes; }
  bool operator!=(const Forest& o) const { return !(*this == o); }
};

// empty iff the forest invariants hold
std::vector<std::string> validateForest(const Forest& T);

std::vector<Str> leaves(const Forest& T);
bool isLeaf(const Forest& T, const Str& s);
bool isBushy(const Forest& T, const BoundingFunction& h, bool exact = false);
// throws BaseMismatch when the bases differ
bool isEndExtension(const Forest& S, const Forest& R);
// T ∩ t^⪯ as a tree above t; throws Precondition if t ∉ T
Forest fullSubforest(const Forest& T, const Str& t);

// universes: every string of length ≤ depth above each base element with symbols < branching
Forest fullForest(const StrSet& base, Sym branching, std::size_t depthAbove);
Forest fullTree(Sym branching, std::size_t depth);

TupleSet nodesAsSet(const Forest& T);
std::string to_text(const Forest& T);

}  // namespace bushy
