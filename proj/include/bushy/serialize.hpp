#pragma once

// The instance format: JSON with sorted keys, strings written as "[0,1]" and tuples as
// "([0],[1])". Universes and sets may be given by generators; they are written back
// out explicitly, so parse ∘ serialize is the identity on parsed instances.

#include <map>
#include <string>

#include <json.hpp>

#include "bushy/forcing.hpp"

namespace bushy {

using Json = nlohmann::json;

inline constexpr const char* kInstanceVersion = "bushy-instance/1";

Json toJson(const Str& s);
Json toJson(const Tuple& t);
Json toJson(const TupleSet& A);
Json toJson(const BoundingFunction& f);
Json toJson(const BoundVector& g);
Json toJson(const GrowthWitness& w);
Json toJson(const ForestSystem& T);
Json toJson(const Forest& F);
Json toJson(const MockJump& J);
Json toJson(const FunctionalTable& G);
Json toJson(const Condition& c);

Str strFromJson(const Json& j);
Tuple tupleFromJson(const Json& j);
BoundingFunction boundFromJson(const Json& j);
GrowthWitness witnessFromJson(const Json& j);
MockJump jumpFromJson(const Json& j);

struct Instance {
  std::map<std::string, ForestSystem> universes;
  std::map<std::string, TupleSet> sets;
  std::map<std::string, BoundingFunction> bounds;
  std::map<std::string, GrowthWitness> witnesses;
  std::map<std::string, MockJump> jumps;
  std::map<std::string, FunctionalTable> functionals;
  std::map<std::string, Condition> conditions;

  const ForestSystem& universe(const std::string& name) const;
  const TupleSet& set(const std::string& name) const;
  const FunctionalTable& functional(const std::string& name) const;
  const Condition& condition(const std::string& name) const;
  const MockJump& jump(const std::string& name) const;
  // a bound by name, or an inline literal such as 2 or "Pow2"
  BoundingFunction bound(const std::string& nameOrLiteral) const;
};

// throws Parse with line and column for malformed JSON, Validation for schema errors
Instance parseInstance(const std::string& text);
Instance loadInstance(const std::string& path);
Json toJson(const Instance& inst);

std::string canonicalDump(const Json& j);
// FNV-1a over the compact canonical form, as 16 hex digits
std::string instanceHash(const Instance& inst);
std::string hashText(const std::string& s);

}  // namespace bushy
