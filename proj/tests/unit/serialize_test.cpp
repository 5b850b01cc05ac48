#include "helpers.hpp"

#include <filesystem>

#include "bushy/serialize.hpp"

using namespace bushy;
using namespace test;

namespace {

std::string instancePath(const char* name) {
  return (std::filesystem::path(__FILE__).parent_path() / ".." / "cli" / "instances" / name).string();
}

}  // namespace

TEST_CASE("every bundled instance round-trips") {
  for (const char* name : {"conditions.json", "depth1.json", "extract.json", "functional.json", "strings.json",
                           "systems.json"}) {
    CAPTURE(name);
    const Instance a = loadInstance(instancePath(name));
    const std::string once = canonicalDump(toJson(a));
    const Instance b = parseInstance(once);
    CHECK(canonicalDump(toJson(b)) == once);
    CHECK(instanceHash(a) == instanceHash(b));
  }
}

TEST_CASE("bounds and witnesses round-trip") {
  const std::vector<BoundingFunction> fs = {
      C(3), BoundingFunction::pow2(), BoundingFunction::linear(2, 5),
      BoundingFunction::iterate(BoundingFunction::pow2(), 3), BoundingFunction::diag_iter(BoundingFunction::pow2()),
      BoundingFunction::piecewise(BoundingFunction::pow2(), {Num::of(4), Num::of(9)}),
      BoundingFunction::table({2, 4}, C(4)), BoundingFunction::sum(C(2), BoundingFunction::pow2()),
      BoundingFunction::scale(3, C(2)), C(2).with_cap(1000)};
  for (const auto& f : fs) {
    CAPTURE(f.describe());
    CHECK(boundFromJson(toJson(f)) == f);
  }
  for (const auto& w : {GrowthWitness(), GrowthWitness::linear(2, 1), GrowthWitness::table({1, 5, 5}),
                        GrowthWitness::square_index(GrowthWitness::linear(1, 2)),
                        GrowthWitness::shifted({Num::of(3), Num::inf()})}) {
    CAPTURE(w.describe());
    CHECK(witnessFromJson(toJson(w)).describe() == w.describe());
  }
}

TEST_CASE("strings and tuples in the text form") {
  CHECK(toJson(T("([0,1],[])")) == Json("([0,1],[])"));
  CHECK(tupleFromJson(Json("()")) == Tuple());
  CHECK(strFromJson(Json("[3,0]")) == S("[3,0]"));
}

TEST_CASE("parse errors carry line and column") {
  try {
    parseInstance("{\n  \"version\": \"bushy-instance/1\",\n  \"sets\": {,}\n}");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
}

TEST_CASE("schema errors") {
  CHECK(kindOf([] { parseInstance(R"({"version": "bushy-instance/9"})"); }) == ErrorKind::Validation);
  CHECK(kindOf([] { parseInstance(R"({"version": "bushy-instance/1", "extra": {}})"); }) == ErrorKind::Validation);
  CHECK(kindOf([] {
          parseInstance(R"j({"version": "bushy-instance/1",
                            "universes": {"U": {"kind": "full", "length": 1, "branching": 2, "depth": 1}},
                            "functionals": {"G": {"universe": "U", "values": {"([])": "[1]", "([0])": "[0]", "([1])": "[1]"}}}})j");
        }) == ErrorKind::Validation);
  CHECK(kindOf([] { Instance().set("missing"); }) == ErrorKind::Validation);
}

TEST_CASE("generated sets") {
  const Instance inst = parseInstance(R"({"version": "bushy-instance/1",
      "universes": {"U": {"kind": "product", "factors": [{"branching": 2, "depth": 1}, {"branching": 3, "depth": 1}]}},
      "sets": {"L": {"kind": "level", "universe": "U", "level": 1},
               "O": {"kind": "level", "universe": "U", "level": 1, "open": true},
               "X": {"kind": "leaves", "universe": "U"}}})");
  CHECK(inst.set("L").size() == 6);
  CHECK(inst.set("O").open());
  CHECK(inst.set("X") == inst.set("L"));
  CHECK(inst.bound("7").at(0) == Num::of(7));
  CHECK(inst.bound("Pow2").at(3) == Num::of(8));
}
