// One PASS/FAIL line per acceptance criterion. Each check also enforces its time limit.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bushy/forcing.hpp"
#include "bushy/oracle.hpp"
#include "bushy/serialize.hpp"

using namespace bushy;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void check(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
};

int failures = 0;

void run(int number, const std::string& name, double limitSeconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const Error& e) {
    o.ok = false;
    o.detail = std::string("uncaught ") + error_kind_name(e.kind()) + ": " + e.what();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("uncaught exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.ok && secs > limitSeconds) {
    o.ok = false;
    o.detail += " (over the " + std::to_string(static_cast<int>(limitSeconds)) + " s limit)";
  }
  if (!o.ok) ++failures;
  std::printf("%s %2d %-28s %7.2fs  %s\n", o.ok ? "PASS" : "FAIL", number, name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string tallyText(const std::map<std::string, std::size_t>& tally) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : tally) {
    os << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  return os.str();
}

Tuple rootTuple(std::size_t n) { return Tuple(std::vector<Str>(n)); }

// ---- 1: big-subset sweep

// a random prefix-free labelling: stop at a node with some probability, else descend
void labelAntichain(std::mt19937_64& r, const Forest& U, const Str& t, TupleSet& B, TupleSet& C) {
  const auto kids = U.children(t);
  const int stop = kids.empty() ? 90 : t.empty() ? 5 : 30;
  const int roll = static_cast<int>(r() % 100);
  if (roll < stop) {
    if (roll % 2 == 0) B.insert(Tuple::of(t));
    else C.insert(Tuple::of(t));
    return;
  }
  if (kids.empty()) return;
  for (const auto& c : kids) labelAntichain(r, U, c, B, C);
}

Outcome bigSubsetSweep() {
  Outcome o;
  const BoundingFunction two = BoundingFunction::constant(2);
  std::size_t cases = 0, held = 0;
  auto one = [&](const Forest& U, const TupleSet& B, const TupleSet& C) {
    ++cases;
    const ForestSystem Us = fromForest(U);
    const TupleSet root(1, {Tuple::of(Str{})});
    if (!bruteBig(set_union(B, C), root, constBounds(1, 4), Us)) return;
    ++held;
    SubsetSplit sp = bigSubsetSplit(B, C, Str{}, two, two, U);
    const TupleSet& side = sp.side == SplitSide::B ? B : C;
    auto errs = checkWitness(sp.witness.forest, memberOf(side), {Str{}}, two, U);
    o.check(errs.empty(), "case " + std::to_string(cases) + ": " + (errs.empty() ? "" : errs.front()));
    o.check(bruteBig(side, root, constBounds(1, 2), Us), "case " + std::to_string(cases) + ": the chosen side is small");
  };

  // depth 1: the root alone, or each child in B, C or neither
  const Forest U1 = fullTree(4, 1);
  for (int who = 0; who < 2; ++who) {
    TupleSet B(1), C(1);
    (who ? C : B).insert(Tuple::of(Str{}));
    one(U1, B, C);
  }
  for (int code = 0; code < 81; ++code) {
    TupleSet B(1), C(1);
    for (int i = 0, c = code; i < 4; ++i, c /= 3) {
      if (c % 3 == 1) B.insert(Tuple::of(Str{static_cast<Sym>(i)}));
      if (c % 3 == 2) C.insert(Tuple::of(Str{static_cast<Sym>(i)}));
    }
    one(U1, B, C);
  }
  const Forest U2 = fullTree(4, 2);
  std::mt19937_64 r(2024);
  for (int i = 0; i < 200; ++i) {
    TupleSet B(1), C(1);
    labelAntichain(r, U2, Str{}, B, C);
    one(U2, B, C);
  }
  o.detail = std::to_string(cases) + " partitions, hypothesis held in " + std::to_string(held) +
             (o.ok ? "" : "; " + o.detail);
  o.check(held > 0, "the hypothesis never held");
  return o;
}

// ---- 2: bigness oracle equivalence

Outcome oracleEquivalence() {
  Outcome o;
  std::size_t compared = 0;
  const Forest U = fullTree(2, 2);
  const ForestSystem Us = fromForest(U);
  const std::vector<Str> nodes(U.nodes.begin(), U.nodes.end());
  const BoundingFunction two = BoundingFunction::constant(2);
  for (std::uint32_t mask = 0; mask < (1u << nodes.size()); ++mask) {
    TupleSet B(1);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (mask >> i & 1) B.insert(Tuple::of(nodes[i]));
    for (const auto& a : nodes) {
      const TupleSet A(1, {Tuple::of(a)});
      const bool fast = decideBig(B, A, two, U).big;
      const bool slow = bruteBig(B, A, constBounds(1, 2), Us);
      ++compared;
      o.check(fast == slow, "length 1, B=" + to_text(B) + " above " + to_text(a));
    }
  }
  const ForestSystem P = productSystem({fullTree(2, 1), fullTree(2, 1)});
  const std::vector<Tuple> tuples(P.nodes.begin(), P.nodes.end());
  const BoundVector g = constBounds(2, 2);
  for (std::uint32_t mask = 0; mask < (1u << tuples.size()); ++mask) {
    TupleSet B(2);
    for (std::size_t i = 0; i < tuples.size(); ++i)
      if (mask >> i & 1) B.insert(tuples[i]);
    for (const auto& a : tuples) {
      const TupleSet A(2, {a});
      const bool fast = decideBigND(B, A, g, P).big;
      const bool slow = bruteBig(B, A, g, P);
      ++compared;
      o.check(fast == slow, "length 2, B=" + to_text(B) + " above " + to_text(a));
    }
  }
  o.detail = std::to_string(compared) + " decisions agree" + (o.ok ? "" : "; first disagreement: " + o.detail);
  return o;
}

// ---- 3: plain concatenation fails

Outcome weakConcatCounterexample() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "bushy-acceptance-fixtures";
  std::filesystem::remove_all(dir);
  FuzzReport rep = fuzzLemma("weakConcat", FuzzBudget::parse("exhaustive-small"), 1, dir.string());
  o.check(rep.failures > 0, "no counterexample found");
  o.check(!rep.counterexamples.empty(), "no counterexample minimized");
  std::size_t rechecked = 0;
  for (const auto& cx : rep.counterexamples) {
    o.check(!cx.path.empty(), "counterexample " + std::to_string(cx.caseIndex) + " was not persisted");
    if (cx.path.empty()) continue;
    Instance inst = loadInstance((dir / cx.path).string());
    o.check(inst.universe("U").n == 2, cx.path + " is not a length-2 instance");
    auto errs = recheckWeakConcatFixture(inst);
    o.check(errs.empty(), cx.path + ": " + (errs.empty() ? "" : errs.front()));
    o.check(canonicalDump(toJson(parseInstance(canonicalDump(toJson(inst))))) == canonicalDump(toJson(inst)),
            cx.path + " does not round-trip");
    ++rechecked;
  }
  std::ostringstream os;
  os << rep.cases << " cases, " << rep.failures << " where plain concatenation fails, " << rechecked
     << " fixtures re-validated";
  if (!rep.counterexamples.empty() && !rep.counterexamples.front().path.empty())
    os << " (first: " << rep.counterexamples.front().path << ")";
  o.detail = os.str() + (o.ok ? "" : "; " + o.detail);
  return o;
}

// ---- 4, 5: fuzz classes that must be clean

Outcome cleanFuzz(const std::string& lemma, const FuzzBudget& budget, const std::vector<std::string>& mustTally) {
  Outcome o;
  FuzzReport rep = fuzzLemma(lemma, budget, 1);
  o.check(rep.failures == 0, std::to_string(rep.failures) + " failing cases" +
                                 (rep.counterexamples.empty() ? "" : ", first: " + rep.counterexamples.front().message));
  o.check(rep.hypothesisHeld == rep.cases, std::to_string(rep.cases - rep.hypothesisHeld) +
                                               " generated cases missed the hypotheses");
  o.check(rep.checked == rep.cases, "only " + std::to_string(rep.checked) + " cases were checked");
  for (const auto& t : mustTally) o.check(rep.tally.count(t) != 0, "branch '" + t + "' never ran");
  o.detail = std::to_string(rep.cases) + " cases [" + tallyText(rep.tally) + "]" + (o.ok ? "" : "; " + o.detail);
  return o;
}

// ---- 6: B_DNC is small

Outcome bdncSmall() {
  Outcome o;
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 2; ++n) {
    const ForestSystem U = balancedFullSystem(n, 4, 3);
    std::mt19937_64 r(600 + n);
    for (int i = 0; i < 100; ++i) {
      const MockJump J = MockJump::random(r, n, 4, 3);
      o.check(J.validate().empty(), "generated jump is inconsistent");
      const TupleSet bad = bDncSet(J, n, U);
      const BigNDResult res = decideBigND(bad, TupleSet(n, {rootTuple(n)}), constBounds(n, 2), U);
      o.check(!res.big, "length " + std::to_string(n) + ", jump " + std::to_string(i) + ": B_DNC is big");
      ++checked;
    }
  }
  o.detail = std::to_string(checked) + " jumps, all small" + (o.ok ? "" : "; " + o.detail);
  return o;
}

// ---- 7: restriction-map algebra

struct GeneratedCondition {
  Condition p;
  MockJump J;
};

// B_DNC plus a few random upward cones, retried until the condition is valid
GeneratedCondition randomCondition(std::mt19937_64& r, std::size_t n) {
  const ForestSystem U = balancedFullSystem(n, 2, 2);
  const std::vector<Tuple> nodes(U.nodes.begin(), U.nodes.end());
  for (;;) {
    GeneratedCondition gc;
    gc.J = MockJump::random(r, n + 1, 2, 2);
    Condition& p = gc.p;
    p.stem = rootTuple(n);
    p.system = U;
    p.h = p.b = BoundingFunction::constant(2);
    TupleSet seeds(n);
    const int extra = static_cast<int>(r() % 4);
    for (int k = 0; k < extra; ++k) {
      const Tuple& t = nodes[r() % nodes.size()];
      if (t.height() > 0) seeds.insert(t);
    }
    p.bad = set_union(bDncSet(gc.J, n, U), upwardIn(seeds, U));
    if (validateCondition(p, gc.J).ok()) return gc;
  }
}

Outcome restrictionAlgebra() {
  Outcome o;
  std::mt19937_64 r(777);
  std::size_t nontrivial = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = i % 2 == 0 ? 2 : 3;
    GeneratedCondition gc = randomCondition(r, n);
    const MockJump& J = gc.J;
    const std::string tag = "condition " + std::to_string(i) + " (length " + std::to_string(n) + ")";
    const Condition q = nuHomogenize(gc.p);
    if (q.bad != gc.p.bad) ++nontrivial;
    o.check(inQ(q), tag + ": the homogenized condition is not in Q");
    o.check(nuHomogenize(q) == q, tag + ": homogenization is not idempotent");
    o.check(extendsCondition(q, gc.p).ok(), tag + ": the homogenized condition does not extend the original");
    o.check(restrictI(nuHomogenize(q), J) == nuHomogenize(restrictI(q, J)), tag + ": restriction and homogenization do not commute");
    const Condition down = composeRestrictions(q, 1, J);
    Condition stepwise = q;
    while (stepwise.n() > 1) stepwise = composeRestrictions(stepwise, stepwise.n() - 1, J);
    o.check(down == stepwise, tag + ": restriction to length 1 depends on the grouping");
    if (n == 3)
      o.check(composeRestrictions(composeRestrictions(q, 2, J), 1, J) == composeRestrictions(q, 1, J),
              tag + ": composed restrictions are not associative");
    o.check(restrictI(liftCondition(q, J), J) == q, tag + ": restricting the lift does not give the condition back");
  }
  o.detail = "200 conditions, " + std::to_string(nontrivial) + " changed by homogenization" + (o.ok ? "" : "; " + o.detail);
  return o;
}

// ---- 8: builder postconditions

Str codeOf(const Str& s, std::size_t width) {
  Str v;
  for (Sym x : s)
    for (std::size_t i = width; i-- > 0;) v.push_back(x >> i & 1);
  return v;
}

Outcome builders() {
  Outcome o;
  const BoundingFunction two = BoundingFunction::constant(2);
  std::ostringstream os;

  // totality: three open targets on the binary×binary depth-6 system
  {
    Condition p;
    p.system = balancedFullSystem(2, 2, 6);
    p.stem = rootTuple(2);
    p.h = p.b = two;
    p.bad = upwardIn(TupleSet(2, {parse_tuple("([0,0],[0,0])")}), p.system);
    o.check(validateCondition(p).ok(), "the totality start condition is invalid");
    // with binary branching and Const(2), a target is big only if every path meets it
    std::vector<TupleSet> Cs(3, TupleSet(2));
    for (const auto& t : p.system.nodes) {
      const std::size_t a = t[0].size(), b = t[1].size();
      if (a == 1 && b == 1) Cs[0].insert(t);
      if (a == 2 && b == 2 && t[0][1] != t[1][1]) Cs[1].insert(t);
      if (a == 3 && b == 3) Cs[1].insert(t);
      if (a == 5 && b == 5) Cs[2].insert(t);
    }
    for (auto& C : Cs) C = TupleSet(2, TupleList(C.begin(), C.end()), true);
    BuildResult res = buildTotalitySystem(p, Cs, two);
    const Condition& q = res.condition;
    auto d = validateCondition(q);
    o.check(d.ok(), "totality: result invalid: " + (d.ok() ? std::string() : d.errors.front()));
    o.check(extendsCondition(q, p).ok(), "totality: result does not extend the start");
    o.check(!balancedLevels(q.system).empty(), "totality: result has no balanced level");
    auto v = totalityViolations(q, Cs);
    o.check(v.empty(), "totality: " + (v.empty() ? std::string() : v.front()));
    os << "totality levels";
    for (const auto& rd : res.rounds) os << " " << rd.level;
    os << ", " << leavesND(q.system).size() << " leaves";
  }

  // splitting: fixed-width binary codes are injective on each fiber and monotone
  auto splitting = [&](std::size_t n, std::size_t depth, PairwiseMode mode, std::size_t rounds) {
    Condition p;
    p.system = balancedFullSystem(n, 2, depth);
    p.stem = rootTuple(n);
    p.h = p.b = two;
    p.bad = TupleSet(n);
    std::map<Tuple, Str> vals;
    for (const auto& t : p.system.nodes) vals[t] = codeOf(t.last(), 1);
    const FunctionalTable G(p.system, vals);
    BuildResult res = buildSplittingSystem(p, G, two, mode, rounds);
    const Condition& q = res.condition;
    std::vector<std::int64_t> levels;
    for (const auto& rd : res.rounds) levels.push_back(rd.level);
    const std::string tag = std::string("splitting (") + pairwise_mode_name(mode) + "): ";
    auto d = validateCondition(q);
    o.check(d.ok(), tag + "result invalid: " + (d.ok() ? std::string() : d.errors.front()));
    o.check(extendsCondition(q, p).ok(), tag + "result does not extend the start");
    o.check(levels.size() == rounds + 1, tag + "wrong number of rounds");
    auto v = splittingViolations(q, G, levels, mode);
    o.check(v.empty(), tag + (v.empty() ? std::string() : v.front()));
    os << "; " << pairwise_mode_name(mode) << " splitting levels";
    for (auto l : levels) os << " " << l;
  };
  splitting(1, 6, PairwiseMode::OneD, 3);
  splitting(2, 4, PairwiseMode::Local, 2);
  o.detail = os.str() + (o.ok ? "" : "; " + o.detail);
  return o;
}

// ---- 9: quick growth

Outcome quickGrowth() {
  Outcome o;
  const std::int64_t cap = std::int64_t{1} << 62;
  const BoundingFunction g = BoundingFunction::pow2().with_cap(cap);
  const BoundingFunction h = BoundingFunction::diag_iter(BoundingFunction::pow2()).with_cap(cap);
  const GrowthWitness w;
  GGReport r = ggVerify(h, g, w, 3, 6);
  o.check(r.pass, "DiagIter(Pow2) >> Pow2 fails: " + r.note());
  Density d = densityConstruct(h, g, w, 3, 6);
  GGReport hf = ggVerify(h, d.f, d.wh, 3, 6);
  GGReport fg = ggVerify(d.f, g, d.wf, 3, 6);
  o.check(hf.pass, "h >> f fails: " + hf.note());
  o.check(fg.pass, "f >> g fails: " + fg.note());
  ProductReport pr = boundedProductBound(BoundingFunction::pow2(), 8);
  o.check(pr.holds, "the product bound fails");
  for (std::size_t n = 0; n < pr.products.size(); ++n)
    o.check(pr.products[n] <= pr.third[n], "product exceeds the third iterate at " + std::to_string(n));
  o.detail = "domination holds from " + std::to_string(pr.threshold) + " to 8" + (o.ok ? "" : "; " + o.detail);
  return o;
}

// ---- 10: CLI determinism is exercised by the cli_golden test; here the library side

Outcome determinism() {
  Outcome o;
  const std::vector<std::pair<std::string, FuzzBudget>> runs = {
      {"bigSubset", FuzzBudget{40, false}}, {"weakConcat", FuzzBudget{60, false}},
      {"projectComm", FuzzBudget{60, false}}, {"extractND", FuzzBudget{8, false}}};
  for (const auto& [lemma, budget] : runs) {
    std::string first;
    for (unsigned threads : {1u, 4u, 1u}) {
      setParallelism(threads);
      std::string text = canonicalDump(fuzzLemma(lemma, budget, 5).toJson());
      if (first.empty()) first = text;
      o.check(text == first, lemma + ": report differs at " + std::to_string(threads) + " threads");
    }
  }
  setParallelism(1);
  o.detail = std::to_string(runs.size()) + " fuzz reports identical across runs and thread counts" +
             (o.ok ? "" : "; " + o.detail);
  return o;
}

}  // namespace

int main() {
  setParallelism(1);
  run(1, "big-subset sweep", 60, bigSubsetSweep);
  run(2, "bigness oracle equivalence", 120, oracleEquivalence);
  run(3, "plain concatenation fails", 30, weakConcatCounterexample);
  run(4, "projection commutativity", 120,
      [] { return cleanFuzz("projectComm", FuzzBudget::parse("exhaustive-small"), {}); });
  run(5, "splitting extraction", 300,
      [] { return cleanFuzz("extract1D", FuzzBudget{500, false}, {"F-inside-B"}); });
  run(6, "B_DNC smallness", 60, bdncSmall);
  run(7, "restriction algebra", 120, restrictionAlgebra);
  run(8, "builder postconditions", 120, builders);
  run(9, "quick growth", 10, quickGrowth);
  run(10, "determinism", 120, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
