#include "helpers.hpp"

using namespace bushy;
using namespace test;

TEST_CASE("leaves of a forest") {
  CHECK(leaves(fullTree(2, 2)) == std::vector<Str>{S("[0,0]"), S("[0,1]"), S("[1,0]"), S("[1,1]")});
  CHECK(leaves(Forest::point(S("[]"))) == std::vector<Str>{S("[]")});
  const Forest f(strs({"[]"}), strs({"[]", "[0]", "[0,0]", "[1]"}));
  CHECK(leaves(f) == std::vector<Str>{S("[1]"), S("[0,0]")});
  CHECK(validateForest(f).empty());
  CHECK_FALSE(validateForest(Forest(strs({"[]"}), strs({"[]", "[0,0]"}))).empty());
}

TEST_CASE("bushiness") {
  CHECK(isBushy(fullTree(2, 2), C(2)));
  CHECK_FALSE(isBushy(fullTree(2, 2), C(3)));
  CHECK(isBushy(fullTree(3, 1), C(2)));
  CHECK_FALSE(isBushy(fullTree(3, 1), C(2), true));
}

TEST_CASE("end-extension") {
  const Forest S1 = fullTree(2, 1);
  CHECK(isEndExtension(S1, S1));
  CHECK(isEndExtension(Forest::point(S("[]")), S1));
  CHECK_FALSE(isEndExtension(S1, Forest(strs({"[]"}), strs({"[]", "[0]", "[1]", "[2]"}))));
  CHECK(kindOf([&] { isEndExtension(S1, Forest::point(S("[0]"))); }) == ErrorKind::BaseMismatch);
}

TEST_CASE("full subforests") {
  const Forest U = fullTree(2, 2);
  CHECK(fullSubforest(U, S("[0]")).nodes == strs({"[0]", "[0,0]", "[0,1]"}));
  CHECK(fullSubforest(U, S("[1,1]")).nodes == strs({"[1,1]"}));
  CHECK(kindOf([&] { fullSubforest(U, S("[2]")); }) == ErrorKind::Precondition);
}
