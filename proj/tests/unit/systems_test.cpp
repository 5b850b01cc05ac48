#include "helpers.hpp"

#include <algorithm>
#include <random>

#include "bushy/oracle.hpp"

using namespace bushy;
using namespace test;

namespace {

ForestSystem binary2() { return productSystem({fullTree(2, 1), fullTree(2, 1)}); }
TupleSet root2() { return setN(2, {"([],[])"}); }

}  // namespace

TEST_CASE("system validation") {
  CHECK(validateSystem(fromForest(fullTree(3, 2))).ok());
  CHECK(validateSystem(balancedFullSystem(2, 2, 2)).ok());
  // the fiber over ([0,0]) drops the node [1] present over ([0])
  TupleSet nodes = balancedFullSystem(2, 2, 2).nodes;
  nodes.erase(T("([0,0],[1])"));
  Diagnostics d = validateSystem(ForestSystem(root2(), nodes, 2));
  REQUIRE_FALSE(d.ok());
  bool named = false;
  for (const auto& e : d.errors) named |= e.find("([0,0])") != std::string::npos;
  CHECK(named);
}

TEST_CASE("projection onto the domain") {
  const ForestSystem U = binary2();
  const TupleSet B = setN(2, {"([0],[0])", "([0],[1])"});
  CHECK(project(memberOfND(B), root2(), {C(2)}, U) == set1({"[0]"}));
  CHECK(project(memberOfND(TupleSet(2)), root2(), {C(2)}, U).empty());
}

TEST_CASE("nested projections agree with the joint projection") {
  const ForestSystem U = productSystem({fullTree(2, 1), fullTree(2, 1), fullTree(2, 1)});
  const std::vector<Tuple> nodes(U.nodes.begin(), U.nodes.end());
  const TupleSet A = setN(3, {"([],[],[])"});
  std::mt19937_64 r(11);
  for (int i = 0; i < 200; ++i) {
    TupleSet B(3);
    for (const auto& t : nodes)
      if (r() % 3 != 0) B.insert(t);
    const TupleSet joint = project(memberOfND(B), A, constBounds(2, 2), U);
    const TupleSet inner = project(memberOfND(B), A, constBounds(1, 2), U);
    const TupleSet nested = project(memberOfND(inner), chop_set(A), constBounds(1, 2), domSystem(U));
    CHECK(joint == nested);
  }
}

TEST_CASE("bigness of systems") {
  const ForestSystem U = binary2();
  const TupleSet B = setN(2, {"([0],[0])", "([0],[1])", "([1],[0])", "([1],[1])"});
  BigNDResult r = decideBigND(B, root2(), constBounds(2, 2), U);
  REQUIRE(r.big);
  // either coordinate may split first, so only the witness properties are fixed
  CHECK(validateSystem(*r.witness).ok());
  CHECK(leavesND(*r.witness) == B);
  CHECK(isBushyND(*r.witness, constBounds(2, 2)));
  CHECK(decideBigND(root2(), root2(), constBounds(2, 2), U).witness->nodes == root2());
  TupleSet holed = B;
  holed.erase(T("([1],[0])"));
  holed.erase(T("([1],[1])"));
  CHECK_FALSE(decideBigND(holed, root2(), constBounds(2, 2), U).big);
  CHECK_FALSE(bruteBig(holed, root2(), constBounds(2, 2), U));
}

TEST_CASE("bigness of systems agrees with the oracle on every pattern") {
  const ForestSystem U = binary2();
  const std::vector<Tuple> nodes(U.nodes.begin(), U.nodes.end());
  for (std::uint32_t mask = 0; mask < 512; mask += 3) {
    TupleSet B(2);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (mask >> i & 1) B.insert(nodes[i]);
    CAPTURE(to_text(B));
    BigNDResult r = decideBigND(B, root2(), constBounds(2, 2), U);
    CHECK(r.big == bruteBig(B, root2(), constBounds(2, 2), U));
    if (r.big) CHECK(checkWitnessND(*r.witness, memberOfND(B), root2(), constBounds(2, 2), U).empty());
  }
}

TEST_CASE("splitting a big union of systems") {
  const ForestSystem U = productSystem({fullTree(4, 1), fullTree(4, 1)});
  TupleSet B(2), Cset(2);
  for (const auto& t : levelSet(U, 1)) ((t[0][0] + t[1][0]) % 2 == 0 ? B : Cset).insert(t);
  SubsetSplitND sp = bigSubsetSplitND(B, Cset, T("([],[])"), constBounds(2, 2), constBounds(2, 2), U);
  const TupleSet& side = sp.side == SplitSide::B ? B : Cset;
  CHECK(checkWitnessND(sp.witness, memberOfND(side), root2(), constBounds(2, 2), U).empty());
  CHECK(bigSubsetSplitND(levelSet(U, 1), TupleSet(2), T("([],[])"), constBounds(2, 2), constBounds(2, 2), U).side ==
        SplitSide::B);
  CHECK(kindOf([&] {
          bigSubsetSplitND(B, Cset, setN(2, {"([0],[0])", "([1],[1])"}), constBounds(2, 2), constBounds(2, 2), U);
        }) == ErrorKind::Precondition);
}

TEST_CASE("concatenating systems") {
  const ForestSystem S1 = balancedFullSystem(2, 2, 1);
  CHECK(concatSystems(S1, ForestSystem(leavesND(S1), leavesND(S1))) == S1);
  const ForestSystem U = balancedFullSystem(2, 2, 2);
  ForestSystem ext = weakConcatExtend(S1, upwardIn(levelSet(U, 2), U), constBounds(2, 2), U);
  CHECK(validateSystem(ext).ok());
  CHECK(isEndExtensionND(S1, ext));
  CHECK(leavesND(ext) == levelSet(U, 2));
  CHECK(weakConcatExtend(S1, upwardIn(leavesND(S1), U), constBounds(2, 2), U) == S1);
}

TEST_CASE("balanced levels") {
  CHECK(balancedLevels(balancedFullSystem(2, 2, 3)) == std::vector<std::int64_t>{0, 1, 2, 3});
  TupleSet nodes = balancedFullSystem(2, 2, 3).nodes;
  // drop everything above one level-2 tuple's second component
  TupleSet kept(2);
  for (const auto& t : nodes)
    if (!(is_prefix(S("[0,0]"), t[0]) && is_prefix(S("[0]"), t[1]) && t[1].size() >= 2)) kept.insert(t);
  const auto lv = balancedLevels(ForestSystem(root2(), kept, 3));
  CHECK(std::find(lv.begin(), lv.end(), 2) == lv.end());
}

TEST_CASE("finding a small rectangle") {
  const ForestSystem U = balancedFullSystem(2, 2, 3);
  const Tuple any = findSmallRectangle(U, memberOfND(TupleSet(2)), constBounds(2, 2), 1);
  CHECK(any.norm() >= 1);
  const TupleSet cone = upwardIn(setN(2, {"([0],[0])"}), U);
  const Tuple t = findSmallRectangle(U, memberOfND(cone), constBounds(2, 2), 1);
  CHECK_FALSE(cone.contains(t));
  CHECK_FALSE(isBigND(memberOfND(cone), t, constBounds(2, 2), U));
  CHECK(kindOf([&] { findSmallRectangle(U, memberOfND(U.nodes), constBounds(2, 2), 1); }) == ErrorKind::Precondition);
}

TEST_CASE("results do not depend on the worker count") {
  const ForestSystem U = balancedFullSystem(2, 3, 2);
  TupleSet B(2);
  std::mt19937_64 r(3);
  for (const auto& t : U.nodes)
    if (r() % 2) B.insert(t);
  setParallelism(1);
  BigNDResult one = decideBigND(B, root2(), constBounds(2, 2), U);
  setParallelism(4);
  BigNDResult four = decideBigND(B, root2(), constBounds(2, 2), U);
  setParallelism(1);
  CHECK(one.big == four.big);
  CHECK(one.projection == four.projection);
  CHECK(one.smallAbove == four.smallAbove);
}
