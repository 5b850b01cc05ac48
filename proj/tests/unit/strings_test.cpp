#include "helpers.hpp"

using namespace bushy;
using namespace test;

TEST_CASE("strings order by length, then lexicographically") {
  CHECK(str_less(S("[1]"), S("[0,0]")));
  CHECK(str_less(S("[0,1]"), S("[1,0]")));
  CHECK_FALSE(str_less(S("[0]"), S("[0]")));
  CHECK(is_prefix(S("[]"), S("[3]")));
  CHECK(incomparable(S("[0,1]"), S("[0,0,1]")));
}

TEST_CASE("componentwise extension") {
  CHECK(extendsTuple(T("([0])"), T("([0,1])")));
  CHECK(extendsTuple(T("([0],[])"), T("([0],[])")));
  CHECK_FALSE(extendsTuple(T("([0],[1])"), T("([0,0],[0])")));
  CHECK(kindOf([] { extendsTuple(T("([0])"), T("([0],[1])")); }) == ErrorKind::Arity);
}

TEST_CASE("prefix-freeness") {
  CHECK(isPrefixFree(set1({"[0]", "[1]"})));
  CHECK_FALSE(isPrefixFree(set1({"[0]", "[0,1]"})));
  const TupleSet A = setN(2, {"([0],[0])", "([0],[1])", "([1],[0,0])"});
  CHECK(isPrefixFree(A));
  // the characterization through the domain and the fibers gives the same answer
  CHECK(isPrefixFreeAt(A, 1) == isPrefixFree(A));
  const TupleSet bad = setN(2, {"([0],[0])", "([0,1],[0,1])"});
  CHECK(isPrefixFreeAt(bad, 1) == isPrefixFree(bad));
}

TEST_CASE("the predecessor in a prefix-free set") {
  CHECK(predecessorIn(set1({"[0]", "[1]"}), Tuple::of(S("[0,2,2]"))) == Tuple::of(S("[0]")));
  CHECK(predecessorIn(setN(2, {"([0],[1])"}), T("([0,0],[1,1])")) == T("([0],[1])"));
  CHECK(kindOf([] { predecessorIn(set1({"[0]"}), Tuple::of(S("[1]"))); }) == ErrorKind::NotAbove);
}

TEST_CASE("chopping tuples") {
  const Tuple t = T("([0],[1],[2])");
  CHECK(chopRestrict(t, 2, Side::Lower) == T("([0],[1])"));
  CHECK(chopRestrict(t, 2, Side::Upper) == T("([2])"));
  CHECK(kindOf([] { chopRestrict(T("([5])"), 1, Side::Lower); }) == ErrorKind::Range);
}

TEST_CASE("open sets contain every extension of a listed tuple") {
  const TupleSet open = set1({"[0]"}, true);
  CHECK(open.contains(S("[0,1,1]")));
  CHECK_FALSE(open.contains(S("[1]")));
  CHECK_FALSE(set1({"[0]"}).contains(S("[0,1]")));
  CHECK(set1({"[0]", "[0,1]", "[1]"}).minimal() == set1({"[0]", "[1]"}));
}

TEST_CASE("fibers and domains") {
  const TupleSet A = setN(2, {"([0],[0])", "([0],[1])", "([1],[])"});
  CHECK(fiber(A, T("([0])")) == set1({"[0]", "[1]"}));
  CHECK(chop_set(A) == set1({"[0]", "[1]"}));
  CHECK(dom_k(setN(3, {"([0],[1],[2])"}), 2) == setN(2, {"([0],[1])"}));
}

TEST_CASE("text forms round-trip") {
  for (const char* s : {"()", "([])", "([0,1],[])", "([12,3],[0],[7])"}) CHECK(to_text(T(s)) == s);
  CHECK(to_text(S("[4,0]")) == "[4,0]");
  CHECK(kindOf([] { parse_tuple("([0],"); }) == ErrorKind::Parse);
}
