#include "helpers.hpp"

#include <algorithm>
#include <random>
#include <tuple>

using namespace bushy;
using namespace test;

namespace {

Condition baseCondition(const ForestSystem& U) {
  Condition p;
  p.system = U;
  p.stem = *U.base.begin();
  p.bad = TupleSet(U.n);
  p.h = p.b = C(2);
  return p;
}

MockJump jumpOf(std::initializer_list<std::tuple<const char*, std::int64_t, Sym>> entries) {
  MockJump J;
  for (const auto& [t, e, v] : entries) J.entries[{T(t), e}] = v;
  return J;
}

TupleSet openOf(const TupleSet& A) { return TupleSet(A.arity(), TupleList(A.begin(), A.end()), true); }

}  // namespace

TEST_CASE("the DNC-violation set") {
  const ForestSystem U = fromForest(fullTree(6, 2));
  CHECK(bDncSet(MockJump{}, 1, U).empty());
  const TupleSet bad = bDncSet(jumpOf({{"()", 0, 5}}), 1, U);
  for (const auto& t : U.nodes) CHECK(bad.listed(t) == (!t[0].empty() && t[0][0] == 5));
}

TEST_CASE("mock jump entries with a common extension must agree") {
  CHECK(jumpOf({{"([],[0,1])", 0, 1}, {"([1],[])", 0, 1}}).validate().empty());
  CHECK_FALSE(jumpOf({{"([],[0,1])", 0, 1}, {"([1],[])", 0, 0}}).validate().empty());
  CHECK(jumpOf({{"([0])", 0, 1}, {"([1])", 0, 0}}).validate().empty());
  std::mt19937_64 r(9);
  for (int i = 0; i < 50; ++i) CHECK(MockJump::random(r, 3, 2, 3).validate().empty());
}

TEST_CASE("condition validation") {
  Condition p = baseCondition(fromForest(fullTree(4, 2)));
  p.h = BoundingFunction::pow2();
  p.b = BoundingFunction::table({2, 2, 2}, C(2));
  Diagnostics d = validateCondition(p);
  CHECK(d.ok());

  Condition bigBad = baseCondition(fromForest(fullTree(2, 2)));
  bigBad.bad = set1({"[0]", "[1]"}, false);
  bigBad.bad = upwardIn(bigBad.bad, bigBad.system);
  Diagnostics e = validateCondition(bigBad);
  REQUIRE_FALSE(e.ok());
  CHECK(e.errors.front().find("clause 4") != std::string::npos);

  Condition lopsided = baseCondition(ForestSystem(set1({"[]"}), set1({"[]", "[0]", "[1]", "[0,0]", "[0,1]"})));
  Diagnostics f = validateCondition(lopsided);
  REQUIRE_FALSE(f.ok());
  CHECK(f.errors.front().find("clause 1") != std::string::npos);
}

TEST_CASE("extension to a rectangle") {
  const Condition p = baseCondition(balancedFullSystem(2, 2, 3));
  const Condition q = extendToRectangle(p, 2);
  CHECK(q.stem.norm() >= 2);
  CHECK(extendsCondition(q, p).ok());
  CHECK(extendToRectangle(p, 0) == p);

  Condition coned = p;
  coned.bad = upwardIn(setN(2, {"([0],[])"}), p.system);
  REQUIRE(validateCondition(coned).ok());
  const Condition r = extendToRectangle(coned, 1);
  CHECK_FALSE(coned.bad.contains(r.stem));
  CHECK_FALSE(isBigND(memberOfND(coned.bad), r.stem, constBounds(2, 2), p.system));
}

TEST_CASE("deciding a union or avoiding it") {
  const Condition p = baseCondition(balancedFullSystem(2, 2, 2));
  Sigma1Result big = sigma1Decide(p, openOf(levelSet(p.system, 1)), p.stem, C(2));
  CHECK(big.big);
  REQUIRE(big.witness.has_value());
  Sigma1Result avoid = sigma1Decide(p, TupleSet(2, true), p.stem, C(2));
  CHECK_FALSE(avoid.big);
  REQUIRE(avoid.extension.has_value());
  CHECK(avoid.extension->bad == p.bad);
  CHECK(extendsCondition(*avoid.extension, p).ok());
}

TEST_CASE("the totality builder") {
  const Condition p = baseCondition(balancedFullSystem(2, 2, 4));
  BuildResult empty = buildTotalitySystem(p, {}, C(2));
  CHECK(validateCondition(empty.condition).ok());
  CHECK(isBushyND(empty.condition.system, constBounds(2, 2)));

  const TupleSet level2 = openOf(levelSet(p.system, 2));
  BuildResult one = buildTotalitySystem(p, {level2}, C(2));
  CHECK(one.rounds.size() == 1);
  CHECK(totalityViolations(one.condition, {level2}).empty());
  const auto lv = balancedLevels(one.condition.system);
  for (const auto& rd : one.rounds) CHECK(std::find(lv.begin(), lv.end(), rd.level) != lv.end());
}

TEST_CASE("the splitting builder") {
  const Condition p = baseCondition(fromForest(fullTree(2, 4)));
  std::map<Tuple, Str> code, flat;
  for (const auto& t : p.system.nodes) {
    code[t] = t.last();
    flat[t] = Str{};
  }
  const FunctionalTable G(p.system, code);
  BuildResult one = buildSplittingSystem(p, G, C(2), PairwiseMode::OneD, 1);
  CHECK(one.rounds.back().method == "direct");
  BuildResult two = buildSplittingSystem(p, G, C(2), PairwiseMode::OneD, 2);
  std::vector<std::int64_t> levels;
  for (const auto& rd : two.rounds) levels.push_back(rd.level);
  CHECK(splittingViolations(two.condition, G, levels, PairwiseMode::OneD).empty());
  CHECK(kindOf([&] { buildSplittingSystem(p, FunctionalTable(p.system, flat), C(2), PairwiseMode::OneD, 1); }) ==
        ErrorKind::Truncation);
}

TEST_CASE("restriction drops the last coordinate") {
  const Condition p = baseCondition(balancedFullSystem(2, 2, 2));
  CHECK(restrictI(p).bad.empty());
  CHECK(restrictI(p).system == domSystem(p.system));
  Condition coned = p;
  coned.bad = upwardIn(setN(2, {"([1],[])"}), p.system);
  REQUIRE(validateCondition(coned).ok());
  CHECK(restrictI(coned).bad.listed(T("([1])")));
}

TEST_CASE("homogenization") {
  const Condition p = baseCondition(balancedFullSystem(2, 2, 2));
  CHECK(inQ(p));
  CHECK(nuHomogenize(p) == p);
  // the fiber over ([1]) is bad everywhere above its root except at the root itself
  Condition q = p;
  for (const auto& t : p.system.nodes)
    if (!t[0].empty() && t[0][0] == 1 && !t[1].empty()) q.bad.insert(t);
  REQUIRE(validateCondition(q).ok());
  CHECK_FALSE(inQ(q));
  const Condition h = nuHomogenize(q);
  CHECK(h.bad.listed(T("([1],[])")));
  CHECK(h.bad.listed(T("([1,0],[])")));
  CHECK(inQ(h));
  CHECK(extendsCondition(h, q).ok());
  CHECK(restrictI(nuHomogenize(q)) == nuHomogenize(restrictI(q)));
}

TEST_CASE("composed restrictions") {
  const Condition p = baseCondition(balancedFullSystem(3, 2, 2));
  CHECK(composeRestrictions(p, 3) == p);
  CHECK(composeRestrictions(p, 1) == restrictI(restrictI(p)));
  CHECK(kindOf([&] { composeRestrictions(p, 0); }) == ErrorKind::Range);
  const Condition lifted = liftCondition(restrictI(p));
  CHECK(restrictI(lifted) == restrictI(p));
}
