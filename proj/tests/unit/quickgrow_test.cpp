#include "helpers.hpp"

using namespace bushy;
using namespace test;

TEST_CASE("saturating arithmetic") {
  CHECK(sat_add(Num::of(5), Num::of(7), 10).huge);
  CHECK(sat_add(Num::of(5), Num::of(5), 10) == Num::of(10));
  CHECK(sat_mul(Num::inf(), Num::of(0), 100) == Num::of(0));
  CHECK(sat_pow2(Num::of(62), kDefaultCap) == Num::of(std::int64_t{1} << 62));
  CHECK(sat_pow2(Num::of(63), kDefaultCap).huge);
  CHECK(Num::inf() > Num::of(kDefaultCap));
}

TEST_CASE("iterates of Pow2") {
  const BoundingFunction p = BoundingFunction::pow2();
  CHECK(evalIterate(p, 1, 3) == Num::of(8));
  CHECK(evalIterate(p, 2, 3) == Num::of(256));
  CHECK(evalIterate(p, 3, 4, 1000000000).huge);
  // composition below the cap
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k)
      for (int n = 0; n <= 3; ++n)
        CHECK(evalIterate(p, j + k, n) == evalIterateNum(p, j, evalIterate(p, k, n), kDefaultCap));
}

TEST_CASE("bounding functions are nondecreasing and at least 2") {
  const std::vector<BoundingFunction> fs = {
      C(2), C(7), BoundingFunction::pow2(), BoundingFunction::linear(3, 2),
      BoundingFunction::iterate(BoundingFunction::pow2(), 2), BoundingFunction::diag_iter(BoundingFunction::pow2()),
      BoundingFunction::sum(C(2), BoundingFunction::pow2()), BoundingFunction::scale(3, C(2)),
      BoundingFunction::table({2, 3, 3, 9}, BoundingFunction::linear(1, 6))};
  for (const auto& f : fs) {
    CAPTURE(f.describe());
    CHECK_FALSE(firstNonBound(f, 40).has_value());
  }
  CHECK(BoundingFunction::pow2().at(0) == Num::of(2));
  CHECK(kindOf([] { C(1); }) == ErrorKind::Precondition);
}

TEST_CASE("uniform iterate domination") {
  const BoundingFunction p = BoundingFunction::pow2();
  CHECK(ggVerify(BoundingFunction::diag_iter(p), p, GrowthWitness(), 3, 6).pass);
  GGReport r = ggVerify(p, p, GrowthWitness::table({0, 1}), 2, 4);
  CHECK_FALSE(r.pass);
  CHECK(r.failK == 2);
  CHECK(r.failN == 2);
  CHECK(ggVerify(C(5), C(5), GrowthWitness::linear(0, 0), 1, 10).pass);
}

TEST_CASE("interpolating between h and g") {
  const BoundingFunction p = BoundingFunction::pow2();
  const BoundingFunction h = BoundingFunction::diag_iter(p);
  Density d = densityConstruct(h, p, GrowthWitness(), 3, 6);
  REQUIRE_FALSE(d.thresholds.empty());
  CHECK(d.thresholds[0] == Num::of(16));
  CHECK(d.f.at(3) == Num::of(8));
  CHECK(d.f.at(17).huge);
  CHECK(ggVerify(h, d.f, d.wh, 3, 6).pass);
  CHECK(ggVerify(d.f, p, d.wf, 3, 6).pass);
}

TEST_CASE("the bounded product against the third iterate") {
  ProductReport r = boundedProductBound(BoundingFunction::pow2(), 8);
  CHECK(r.holds);
  CHECK(r.products.size() == 9);
  CHECK(r.products[5] == Num::of(std::int64_t{1} << 11));
  CHECK(boundedProductBound(BoundingFunction::pow2(), 0).holds);
  CHECK(kindOf([] { boundedProductBound(C(2), 4); }) == ErrorKind::Precondition);
}
