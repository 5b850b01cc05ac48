#include "helpers.hpp"

#include <filesystem>

#include "bushy/serialize.hpp"

using namespace bushy;
using namespace test;

namespace {

Str bits(Sym x, std::size_t width) {
  Str r;
  for (std::size_t i = width; i-- > 0;) r.push_back(x >> i & 1);
  return r;
}

// fixed-width codes of the last component, optionally padded below one depth-1 node
FunctionalTable codeFunctional(const ForestSystem& U, std::size_t width, int padBelow = -1) {
  std::map<Tuple, Str> v;
  for (const auto& t : U.nodes) {
    Str s;
    for (Sym x : t.last())
      for (Sym y : bits(x, width)) s.push_back(y);
    if (padBelow >= 0 && t.last().size() == 2 && t.last()[0] == static_cast<Sym>(padBelow)) s.insert(s.end(), {0, 0});
    v[t] = s;
  }
  return FunctionalTable(U, v);
}

std::string instancePath(const char* name) {
  return (std::filesystem::path(__FILE__).parent_path() / ".." / "cli" / "instances" / name).string();
}

}  // namespace

TEST_CASE("functional tables must be monotone") {
  const ForestSystem U = fromForest(fullTree(2, 1));
  std::map<Tuple, Str> v{{T("([])"), S("[0]")}, {T("([0])"), S("[1]")}, {T("([1])"), S("[0,1]")}};
  CHECK_FALSE(FunctionalTable::validate(U, v).empty());
  CHECK(kindOf([&] { FunctionalTable(U, v); }) == ErrorKind::Validation);
  v[T("([0])")] = S("[0,0]");
  CHECK(FunctionalTable::validate(U, v).empty());
}

TEST_CASE("global and local splitting") {
  const ForestSystem U = productSystem({fullTree(2, 1), fullTree(2, 1)});
  const FunctionalTable G = codeFunctional(U, 1);
  const TupleSet none(2);
  CHECK(isSplit(setN(2, {"([0],[0])", "([1],[0])"}), setN(2, {"([0],[1])", "([1],[1])"}), none, G, SplitKind::Global));
  CHECK(isSplit(setN(2, {"([0],[0])", "([1],[0])"}), setN(2, {"([0],[1])", "([1],[1])"}), none, G, SplitKind::Local));
  // equal values across different domain nodes
  const TupleSet A0 = setN(2, {"([0],[0])", "([1],[1])"}), A1 = setN(2, {"([0],[1])", "([1],[0])"});
  CHECK(isSplit(A0, A1, none, G, SplitKind::Local));
  CHECK_FALSE(isSplit(A0, A1, none, G, SplitKind::Global));
  CHECK(isSplit(A0, A0, A0, G, SplitKind::Global));
}

TEST_CASE("the longest big value prefix") {
  const ForestSystem U = fromForest(fullTree(2, 2));
  std::map<Tuple, Str> constant;
  for (const auto& t : U.nodes) constant[t] = S("[0,1]");
  CHECK(computeTheta(FunctionalTable(U, constant), TupleSet(1), S("[]"), C(2), Tuple()) == S("[0,1]"));
  // a binary fiber has no room for a 2-big splitting, so the codes still have a longest big prefix
  CHECK(computeTheta(codeFunctional(U, 1), TupleSet(1), S("[]"), C(2), Tuple()) == S("[]"));
  const ForestSystem W = fromForest(fullTree(4, 2));
  CHECK(kindOf([&] { computeTheta(codeFunctional(W, 2), TupleSet(1), S("[]"), C(2), Tuple()); }) ==
        ErrorKind::ExistsSplit);
}

TEST_CASE("the longest big value prefix agrees with enumeration") {
  const ForestSystem U = fromForest(fullTree(2, 2));
  std::mt19937_64 r(5);
  int decided = 0;
  for (int i = 0; i < 200; ++i) {
    std::map<Tuple, Str> v;
    for (const auto& t : U.nodes) {
      Str s = t.last().empty() ? Str{} : v.at(Tuple::of(parent_of(t.last())));
      for (std::uint64_t k = r() % 3; k > 0; --k) s.push_back(static_cast<Sym>(r() % 2));
      v[Tuple::of(t.last())] = s;
    }
    const FunctionalTable G(U, v);
    Str theta;
    try {
      theta = computeTheta(G, TupleSet(1), S("[]"), C(2), Tuple());
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ExistsSplit);
      continue;
    }
    ++decided;
    // every value prefix up to length 6, longest big one
    Str best;
    for (std::size_t len = 0; len <= 6; ++len)
      for (std::uint32_t m = 0; m < (1u << len); ++m) {
        const Str alpha = bits(m, len);
        TupleSet A(1);
        for (const auto& [t, val] : v)
          if (is_prefix(alpha, val)) A.insert(t);
        if (decideBig(A, set1({"[]"}), C(2), toForest(U)).big && alpha.size() >= best.size()) {
          if (alpha.size() == best.size() && !alpha.empty()) CHECK(alpha == best);
          best = alpha;
        }
      }
    CHECK(theta == best);
  }
  CHECK(decided > 20);
}

TEST_CASE("extraction on a hand-built instance") {
  const Instance inst = loadInstance(instancePath("extract.json"));
  const FunctionalTable& G = inst.functional("G");
  SplitFamily E;
  for (const auto& rho : inst.set("A")) E[rho] = {inst.set("E0" + to_text(rho)), inst.set("E1" + to_text(rho))};
  const TupleSet& A = inst.set("A");
  const TupleSet& F = inst.set("F");
  const BoundVector g = constBounds(1, 2);
  SplittingCertificate c = extractSplitting(A, E, F, TupleSet(1), g, g, G, T("([])"), T("([11])"));
  CHECK(c.branch == "case-2");
  CHECK(isSplit(c.E, c.F, TupleSet(1), G, c.kind));
  CHECK(decideBigND(c.E, setN(1, {"([])"}), g, G.universe()).big);
  CHECK(decideBigND(c.F, setN(1, {"([11])"}), g, G.universe()).big);

  // F inside B: the pair is (E, F ∩ B)
  SplittingCertificate d = extractSplitting(A, E, F, F, g, g, G, T("([])"), T("([11])"));
  CHECK(d.branch == "F-inside-B");
  TupleSet all(1);
  for (const auto& [rho, pr] : E) all = set_union(all, set_union(pr[0], pr[1]));
  CHECK(d.E == all);
  CHECK(d.F == F);

  // F values no longer than the E values
  std::map<Tuple, Str> shortVals = G.values();
  for (const auto& t : F) shortVals[t] = G(T("([11])"));
  const FunctionalTable Gs(G.universe(), shortVals);
  try {
    extractSplitting(A, E, F, TupleSet(1), g, g, Gs, T("([])"), T("([11])"));
    FAIL("expected a hypothesis error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Hypothesis);
    CHECK(std::string(e.what()).find("longer") != std::string::npos);
  }
}

TEST_CASE("pairwise splittings") {
  const ForestSystem U = fromForest(fullTree(12, 2));
  const FunctionalTable G = codeFunctional(U, 4, 1);
  PairwiseResult one = findPairwiseSplittings({T("([2])")}, TupleSet(1), G, constBounds(1, 2), PairwiseMode::OneD);
  REQUIRE(one.sets.size() == 1);
  CHECK(one.sets[0] == setN(1, {"([2])"}));

  PairwiseResult two =
      findPairwiseSplittings({T("([0])"), T("([1])")}, TupleSet(1), G, constBounds(1, 2), PairwiseMode::OneD);
  REQUIRE(two.sets.size() == 2);
  CHECK(isSplit(two.sets[0], two.sets[1], TupleSet(1), G, SplitKind::Global));
  CHECK(decideBigND(two.sets[0], setN(1, {"([0])"}), constBounds(1, 2), U).big);
  CHECK(decideBigND(two.sets[1], setN(1, {"([1])"}), constBounds(1, 2), U).big);

  // two taus need 6-bushiness, a binary tree has 2
  const ForestSystem small = fromForest(fullTree(2, 3));
  try {
    findPairwiseSplittings({T("([0])"), T("([1])")}, TupleSet(1), codeFunctional(small, 1), constBounds(1, 2),
                           PairwiseMode::OneD);
    FAIL("expected a budget error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Hypothesis);
    CHECK(std::string(e.what()).find("budget") != std::string::npos);
  }
}
