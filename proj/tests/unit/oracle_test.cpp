#include "helpers.hpp"

#include <filesystem>

#include "bushy/oracle.hpp"

using namespace bushy;
using namespace test;

TEST_CASE("the brute-force oracle on small cases") {
  const ForestSystem U = fromForest(fullTree(2, 1));
  const TupleSet root = set1({"[]"});
  CHECK(bruteBig(root, root, constBounds(1, 5), U));
  CHECK_FALSE(bruteBig(TupleSet(1), root, constBounds(1, 2), U));
  CHECK(bruteBig(set1({"[0]", "[1]"}), root, constBounds(1, 2), U));
  CHECK_FALSE(bruteBig(set1({"[0]"}), root, constBounds(1, 2), U));
  CHECK(kindOf([] {
          bruteBig(TupleSet(1), set1({"[]"}), constBounds(1, 2), fromForest(fullTree(3, 4)));
        }) == ErrorKind::Limit);
}

TEST_CASE("fuzz budgets") {
  CHECK(FuzzBudget::parse("exhaustive-small").exhaustive);
  CHECK(FuzzBudget::parse("exhaustive-small").cases == 0);
  CHECK(FuzzBudget::parse("exhaustive-small+7").cases == 7);
  CHECK(FuzzBudget::parse("12").cases == 12);
  CHECK(FuzzBudget::parse("exhaustive-small+7").str() == "exhaustive-small+7");
  CHECK(kindOf([] { FuzzBudget::parse("many"); }) == ErrorKind::Validation);
  CHECK(kindOf([] { fuzzLemma("noSuchLemma", FuzzBudget{}); }) == ErrorKind::Validation);
}

TEST_CASE("fuzz reports are reproducible") {
  for (const auto& lemma : lemmaNames()) {
    CAPTURE(lemma);
    const FuzzBudget b{lemma.rfind("extract", 0) == 0 ? 3u : 15u, false};
    const std::string first = canonicalDump(fuzzLemma(lemma, b, 42).toJson());
    CHECK(canonicalDump(fuzzLemma(lemma, b, 42).toJson()) == first);
  }
}

TEST_CASE("the clean lemmas have no counterexamples") {
  for (const char* lemma : {"bigSubset", "concat", "bigSubsetND", "projectComm"}) {
    CAPTURE(lemma);
    FuzzReport r = fuzzLemma(lemma, FuzzBudget{30, false}, 3);
    CHECK(r.asExpected());
    CHECK(r.failures == 0);
  }
  FuzzReport all = fuzzLemma("bigSubset", FuzzBudget::parse("exhaustive-small"), 1);
  CHECK(all.cases == 243);
  CHECK(all.failures == 0);
  FuzzReport nd = fuzzLemma("extractND", FuzzBudget{4, false}, 1);
  CHECK(nd.failures == 0);
}

TEST_CASE("plain concatenation counterexamples persist and re-validate") {
  const auto dir = std::filesystem::temp_directory_path() / "bushy-unit-fixtures";
  std::filesystem::remove_all(dir);
  FuzzReport r = fuzzLemma("weakConcat", FuzzBudget{120, false}, 2, dir.string(), 2);
  REQUIRE(r.failures > 0);
  CHECK(r.asExpected());
  REQUIRE_FALSE(r.counterexamples.empty());
  for (const auto& cx : r.counterexamples) {
    CAPTURE(cx.path);
    const Instance inst = loadInstance((dir / cx.path).string());
    CHECK(recheckWeakConcatFixture(inst).empty());
    CHECK(canonicalDump(toJson(inst)) == canonicalDump(cx.instance));
  }
  // a fixture whose B is emptied no longer shows the failure
  Instance broken = loadInstance((dir / r.counterexamples.front().path).string());
  broken.sets["B"] = TupleSet(2);
  CHECK_FALSE(recheckWeakConcatFixture(broken).empty());
}
