#include "bushy/oracle.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>

namespace bushy {

// ---- brute-force bigness

namespace {

// some exactly-bushy subtree of U above t has all its leaves in B
bool bushyTreeExists(const Forest& U, const StrPred& inB, const BoundingFunction& h, const Str& t) {
  if (inB(t)) return true;
  const Num need = h.at(static_cast<std::int64_t>(t.size()));
  const std::vector<Str> kids = U.children(t);
  if (need.huge || need.v > static_cast<std::int64_t>(kids.size())) return false;
  const auto k = static_cast<std::size_t>(need.v);
  // walk the k-subsets of the children in lexicographic order
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  for (;;) {
    bool all = true;
    for (std::size_t i : pick)
      if (!bushyTreeExists(U, inB, h, kids[i])) {
        all = false;
        break;
      }
    if (all) return true;
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == kids.size() - k + i - 1) --i;
    if (i == 0) return false;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace

bool bruteBig(const TuplePred& inB, const TupleSet& A, const BoundVector& g, const ForestSystem& U,
              std::size_t limit) {
  if (g.size() != U.n || A.arity() != U.n) fail(ErrorKind::Arity, "bound or base arity differs from the universe length");
  const TupleSet Am = A.minimal();
  if (U.n == 1) {
    if (limit == 0) limit = kBruteNodeLimit1D;
    if (U.size() > limit)
      fail(ErrorKind::Limit, "universe has " + std::to_string(U.size()) + " nodes, over the brute-force limit " +
                                 std::to_string(limit));
    const Forest F = toForest(U);
    StrPred p = [&](const Str& s) { return inB(Tuple::of(s)); };
    for (const auto& a : Am)
      if (!F.contains(a[0]) || !bushyTreeExists(F, p, g[0], a[0])) return false;
    return true;
  }
  if (limit == 0) limit = kBruteFreeLimitND;
  for (const auto& a : Am)
    if (!U.contains(a)) return false;
  std::vector<Tuple> free;
  for (const auto& t : U.nodes) {
    if (Am.listed(t)) continue;
    for (const auto& a : Am)
      if (tuple_le(a, t)) {
        free.push_back(t);
        break;
      }
  }
  if (free.size() > limit)
    fail(ErrorKind::Limit, std::to_string(free.size()) + " candidate tuples, over the brute-force limit " +
                               std::to_string(limit));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
    TupleSet nodes = Am;
    for (std::size_t i = 0; i < free.size(); ++i)
      if (mask >> i & 1) nodes.insert(free[i]);
    ForestSystem W(Am, nodes, U.depthBound);
    if (checkWitnessND(W, inB, A, g, U).empty()) return true;
  }
  return false;
}

bool bruteBig(const TupleSet& B, const TupleSet& A, const BoundVector& g, const ForestSystem& U, std::size_t limit) {
  return bruteBig(memberOfND(B), A, g, U, limit);
}

// ---- budgets and reports

FuzzBudget FuzzBudget::parse(const std::string& text) {
  FuzzBudget b;
  std::string rest = text;
  const std::string ex = "exhaustive-small";
  if (rest.rfind(ex, 0) == 0) {
    b.exhaustive = true;
    b.cases = 0;
    rest = rest.substr(ex.size());
    if (rest.empty()) return b;
    if (rest[0] != '+') fail(ErrorKind::Validation, "budget must be a count, exhaustive-small or exhaustive-small+N");
    rest = rest.substr(1);
  }
  if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos || rest.size() > 9)
    fail(ErrorKind::Validation, "budget must be a count, exhaustive-small or exhaustive-small+N");
  b.cases = std::stoul(rest);
  return b;
}

std::string FuzzBudget::str() const {
  if (!exhaustive) return std::to_string(cases);
  return cases == 0 ? "exhaustive-small" : "exhaustive-small+" + std::to_string(cases);
}

Json FuzzReport::toJson() const {
  Json cx = Json::array();
  for (const auto& c : counterexamples) {
    Json e{{"case", c.caseIndex}, {"message", c.message}, {"instance", c.instance}};
    if (!c.path.empty()) e["file"] = c.path;
    cx.push_back(e);
  }
  Json t = Json::object();
  for (const auto& [k, v] : tally) t[k] = v;
  return Json{{"summary",
               {{"lemma", lemma},
                {"seed", seed},
                {"budget", budget.str()},
                {"cases", cases},
                {"hypothesisHeld", hypothesisHeld},
                {"checked", checked},
                {"failures", failures},
                {"expectCounterexamples", expectCounterexamples},
                {"asExpected", asExpected()},
                {"tally", t}}},
              {"counterexamples", cx}};
}

const std::vector<std::string>& lemmaNames() {
  static const std::vector<std::string> names{"bigSubset", "concat",    "weakConcat", "bigSubsetND",
                                              "extract1D", "extractND", "projectComm"};
  return names;
}

// ---- case plumbing

namespace {

using Rng = std::mt19937_64;

Rng caseRng(std::uint64_t seed, const std::string& lemma, std::size_t idx) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : lemma) h = (h ^ c) * 1099511628211ull;
  std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                   static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32)};
  return Rng(sq);
}

int rint(Rng& r, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(r); }

Str randomBits(Rng& r, int lo, int hi) {
  Str s(static_cast<std::size_t>(rint(r, lo, hi)));
  for (auto& x : s) x = static_cast<Sym>(rint(r, 0, 1));
  return s;
}

Str cat(Str a, const Str& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// k distinct values from 0..n-1, sorted
std::vector<int> pickSubset(Rng& r, int n, int k) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), r);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

std::string errText(const Error& e) { return std::string(error_kind_name(e.kind())) + ": " + e.what(); }

TupleSet single(const Tuple& t) { return TupleSet(t.arity(), {t}); }

Tuple rootOf(const ForestSystem& U) { return *U.base.begin(); }

// the system without the upward closure of t; nullopt when the rest is not a valid system
std::optional<ForestSystem> dropAbove(const ForestSystem& U, const Tuple& t) {
  if (U.base.listed(t)) return std::nullopt;
  TupleSet nodes(U.n);
  for (const auto& x : U.nodes)
    if (!tuple_le(t, x)) nodes.insert(x);
  ForestSystem V(U.base, nodes, U.depthBound);
  if (!validateSystem(V).ok()) return std::nullopt;
  return V;
}

TupleSet keepInside(const TupleSet& A, const ForestSystem& U) {
  TupleSet r(A.arity(), {}, A.open());
  for (const auto& t : A)
    if (U.contains(t)) r.insert(t);
  return r;
}

template <class Case, class Count, class Shrink, class Fails>
Case shrinkGreedy(Case c, Count count, Shrink shrinkAt, Fails fails) {
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < count(c);) {
      std::optional<Case> cand = shrinkAt(c, i);
      if (cand && fails(*cand)) {
        c = std::move(*cand);
        changed = true;
      } else {
        ++i;
      }
    }
  }
  return c;
}

struct Outcome {
  bool hypothesis = false;
  bool checked = false;
  std::string failure;
  std::string tally;
  std::function<Counterexample()> minimize;
};

// labels each listed tuple none/first/second, keeping only the minimal labelled ones
void labelRandom(Rng& r, const ForestSystem& U, TupleSet& X, TupleSet& Y, bool skipRoot) {
  TupleSet both(U.n);
  std::map<Tuple, int> lab;
  for (const auto& t : U.nodes) {
    if (skipRoot && U.base.listed(t)) continue;
    int v = rint(r, 0, 3);
    if (v >= 2) lab[t] = v - 2;
  }
  for (const auto& [t, v] : lab) both.insert(t);
  const TupleSet m = both.minimal();
  for (const auto& t : m) (lab[t] == 0 ? X : Y).insert(t);
}

// ---- bigSubset: (h+g)-big union, one side big with a valid witness

struct BigSubsetCase {
  ForestSystem U;
  TupleSet B{1}, C{1};
  Str s;
  std::int64_t h = 2, g = 2;
};

struct Verdict {
  bool hyp = false;
  std::string failure, tally;
};

Verdict evalBigSubset(const BigSubsetCase& c) {
  Verdict v;
  const TupleSet BC = set_union(c.B, c.C);
  if (!isPrefixFree(BC) || BC.size() != c.B.size() + c.C.size()) return v;
  const BoundingFunction h = BoundingFunction::constant(c.h), g = BoundingFunction::constant(c.g);
  v.hyp = bruteBig(BC, single(Tuple::of(c.s)), {BoundingFunction::sum(h, g)}, c.U);
  if (!v.hyp) return v;
  try {
    const Forest Uf = toForest(c.U);
    SubsetSplit sp = bigSubsetSplit(c.B, c.C, c.s, h, g, Uf);
    const bool onB = sp.side == SplitSide::B;
    v.tally = std::string("side-") + side_name(sp.side);
    auto errs = checkWitness(sp.witness.forest, memberOf(onB ? c.B : c.C), {c.s}, onB ? h : g, Uf);
    if (!errs.empty()) v.failure = "witness for side " + std::string(side_name(sp.side)) + " rejected: " + errs.front();
  } catch (const Error& e) {
    v.failure = errText(e);
  }
  return v;
}

Json bigSubsetInstance(const BigSubsetCase& c) {
  Instance inst;
  inst.universes["U"] = c.U;
  inst.sets["B"] = c.B;
  inst.sets["C"] = c.C;
  inst.sets["root"] = single(Tuple::of(c.s));
  inst.bounds["h"] = BoundingFunction::constant(c.h);
  inst.bounds["g"] = BoundingFunction::constant(c.g);
  return toJson(inst);
}

template <class Case>
Outcome finish(const Case& c, Verdict v, Verdict (*eval)(const Case&), Json (*inst)(const Case&),
               std::initializer_list<TupleSet Case::*> shrinkable) {
  Outcome o;
  o.hypothesis = v.hyp;
  o.checked = v.hyp;
  o.failure = v.failure;
  o.tally = v.tally;
  if (!v.failure.empty()) {
    std::vector<TupleSet Case::*> sets(shrinkable);
    o.minimize = [c, eval, inst, sets]() {
      auto count = [&](const Case& x) {
        std::size_t n = 0;
        for (auto m : sets) n += (x.*m).size();
        return n;
      };
      auto shrink = [&](const Case& x, std::size_t i) -> std::optional<Case> {
        for (auto m : sets) {
          if (i < (x.*m).size()) {
            Case d = x;
            (d.*m).erase(*std::next((x.*m).begin(), static_cast<std::ptrdiff_t>(i)));
            return d;
          }
          i -= (x.*m).size();
        }
        return std::nullopt;
      };
      auto fails = [&](const Case& x) {
        Verdict w = eval(x);
        return w.hyp && !w.failure.empty();
      };
      Case m = shrinkGreedy(c, count, shrink, fails);
      return Counterexample{0, eval(m).failure, inst(m), ""};
    };
  }
  return o;
}

constexpr std::size_t kBigSubsetExhaustive = 243;  // 3^5 labelings of the 4-ary depth-1 tree

Outcome runBigSubset(Rng& r, bool exhaustive, std::size_t ex) {
  BigSubsetCase c;
  if (exhaustive) {
    c.U = fromForest(fullTree(4, 1));
    std::size_t code = ex;
    for (const auto& t : c.U.nodes) {
      const std::size_t v = code % 3;
      code /= 3;
      if (v == 1) c.B.insert(t);
      if (v == 2) c.C.insert(t);
    }
  } else {
    const Sym b = static_cast<Sym>(rint(r, 4, 6));
    c.U = fromForest(fullTree(b, static_cast<std::size_t>(rint(r, 1, 2))));
    c.h = rint(r, 2, 3);
    c.g = b >= 5 ? rint(r, 2, 3) : 2;
    if (c.h + c.g > b) c.h = 2;
    labelRandom(r, c.U, c.B, c.C, false);
  }
  return finish<BigSubsetCase>(c, evalBigSubset(c), &evalBigSubset, &bigSubsetInstance,
                               {&BigSubsetCase::B, &BigSubsetCase::C});
}

// ---- concat: leaves of a B-witness, each with C big above it, give C big above the root

struct ConcatCase {
  ForestSystem U;
  TupleSet B{1}, C{1};
  std::int64_t h = 2;
};

Verdict evalConcat(const ConcatCase& c) {
  Verdict v;
  if (!isPrefixFree(c.B) || !isPrefixFree(c.C)) return v;
  const Forest Uf = toForest(c.U);
  const BoundingFunction h = BoundingFunction::constant(c.h);
  const Str root;
  BigResult rb = decideBig(c.B, single(Tuple::of(root)), h, Uf);
  if (!rb.big) return v;
  const Forest S = rb.witness->forest;
  for (const auto& l : leaves(S))
    if (!isBig(c.C, l, h, Uf)) return v;
  v.hyp = true;
  try {
    Forest R = concatExtend(S, c.C, h, Uf);
    if (!isEndExtension(S, R)) v.failure = "result does not end-extend the B-witness";
    auto errs = checkWitness(R, memberOf(c.C), {root}, h, Uf);
    if (v.failure.empty() && !errs.empty()) v.failure = "result rejected as a C-witness: " + errs.front();
    if (v.failure.empty() && !bruteBig(c.C, single(Tuple::of(root)), {h}, c.U))
      v.failure = "oracle finds C small above the root";
    v.tally = R.size() == S.size() ? "no-growth" : "extended";
  } catch (const Error& e) {
    v.failure = errText(e);
  }
  return v;
}

Json concatInstance(const ConcatCase& c) {
  Instance inst;
  inst.universes["U"] = c.U;
  inst.sets["B"] = c.B;
  inst.sets["C"] = c.C;
  inst.bounds["h"] = BoundingFunction::constant(c.h);
  return toJson(inst);
}

std::vector<TupleSet> antichainsOf(const Forest& U, const Str& t) {
  // antichains of the subtree above t
  std::vector<TupleSet> acc{TupleSet(1)};
  for (const auto& k : U.children(t)) {
    std::vector<TupleSet> sub = antichainsOf(U, k), next;
    for (const auto& a : acc)
      for (const auto& b : sub) next.push_back(set_union(a, b));
    acc = std::move(next);
  }
  acc.push_back(TupleSet(1, {Tuple::of(t)}));
  return acc;
}

const std::vector<TupleSet>& binaryDepth2Antichains() {
  static const std::vector<TupleSet> v = antichainsOf(fullTree(2, 2), Str{});
  return v;
}

std::size_t concatExhaustiveCount() {
  const std::size_t n = binaryDepth2Antichains().size();
  return n * n;
}

Outcome runConcat(Rng& r, bool exhaustive, std::size_t ex) {
  ConcatCase c;
  if (exhaustive) {
    const auto& ac = binaryDepth2Antichains();
    c.U = fromForest(fullTree(2, 2));
    c.B = ac[ex / ac.size()];
    c.C = ac[ex % ac.size()];
  } else {
    const Sym b = static_cast<Sym>(rint(r, 2, 3));
    c.U = fromForest(fullTree(b, static_cast<std::size_t>(rint(r, 2, 3))));
    TupleSet X(1), Y(1);
    labelRandom(r, c.U, X, Y, true);
    c.B = X;
    labelRandom(r, c.U, X, Y, true);
    c.C = set_union(X, Y).minimal();
    c.h = b >= 3 ? rint(r, 2, 3) : 2;
  }
  return finish<ConcatCase>(c, evalConcat(c), &evalConcat, &concatInstance, {&ConcatCase::B, &ConcatCase::C});
}

// ---- weakConcat: the plain concatenation claim for length-2 systems

struct WeakCase {
  ForestSystem U;
  TupleSet C{2, {}, true};
};

struct WeakFacts {
  bool hyp = false;
  bool conclusion = true;
  TupleSet Bset{2};
};

// the hypothesis is only derived when the conclusion fails, which is all a counterexample needs
WeakFacts weakFacts(const WeakCase& c) {
  WeakFacts f;
  const BoundVector g = constBounds(2, 2);
  const Tuple root = rootOf(c.U);
  TuplePred inC = memberOfND(c.C);
  f.conclusion = isBigND(inC, root, g, c.U);
  if (f.conclusion) return f;
  for (const auto& t : c.U.nodes)
    if (isBigND(inC, t, g, c.U)) f.Bset.insert(t);
  f.hyp = decideBigND(f.Bset, single(root), g, c.U).big;
  return f;
}

Json weakInstance(const WeakCase& c, const TupleSet& Bset) {
  Instance inst;
  inst.universes["U"] = c.U;
  inst.sets["C"] = c.C;
  inst.sets["B"] = Bset;
  inst.sets["root"] = single(rootOf(c.U));
  inst.bounds["g1"] = BoundingFunction::constant(2);
  inst.bounds["g2"] = BoundingFunction::constant(2);
  return toJson(inst);
}

// does weak concatenation, started from a witness for B, refuse to build a C-witness?
std::string weakConstructionVerdict(const ForestSystem& U, const TupleSet& B, const TupleSet& C) {
  const BoundVector g = constBounds(2, 2);
  BigNDResult rb = decideBigND(B, single(rootOf(U)), g, U);
  if (!rb.big || !rb.witness) return "no B-witness";
  try {
    weakConcatExtend(*rb.witness, C, g, U);
    return "built";
  } catch (const Error& e) {
    return e.kind() == ErrorKind::NotBig ? "refused" : errText(e);
  }
}

constexpr std::size_t kWeakExhaustive = 512;  // 8^3 fiber patterns, repeated across the level-1 blocks

Outcome runWeakConcat(Rng& r, bool exhaustive, std::size_t ex) {
  WeakCase c;
  const Sym b = exhaustive ? 3 : static_cast<Sym>(rint(r, 2, 3));
  c.U = balancedFullSystem(2, b, 2);
  for (Sym a = 0; a < b; ++a)
    for (Sym j = 0; j < b; ++j) {
      const unsigned mask = exhaustive ? static_cast<unsigned>(ex >> (3 * j) & 7)
                                       : static_cast<unsigned>(rint(r, 0, (1 << b) - 1));
      for (Sym i = 0; i < b; ++i)
        if (mask >> i & 1) c.C.insert(Tuple({Str{a, j}, Str{i}}));
    }
  WeakFacts f = weakFacts(c);
  Outcome o;
  o.checked = true;
  if (f.conclusion) {
    o.tally = "plain-conclusion-holds";
    return o;
  }
  o.hypothesis = f.hyp;
  if (!f.hyp) {
    o.tally = "plain-conclusion-fails/hypothesis-fails";
    return o;
  }
  o.failure = "C is (2,2)-big above every element of B and B is (2,2)-big above the root, "
              "but C is (2,2)-small above the root";
  o.tally = "plain-conclusion-fails/weak-" + weakConstructionVerdict(c.U, f.Bset, c.C);
  o.minimize = [c]() {
    auto fails = [](const WeakCase& x) {
      WeakFacts w = weakFacts(x);
      return !w.conclusion && w.hyp;
    };
    auto count = [](const WeakCase& x) { return x.C.size() + x.U.nodes.size(); };
    auto shrink = [](const WeakCase& x, std::size_t i) -> std::optional<WeakCase> {
      if (i < x.C.size()) {
        WeakCase d = x;
        d.C.erase(*std::next(x.C.begin(), static_cast<std::ptrdiff_t>(i)));
        return d;
      }
      i -= x.C.size();
      // leaves first, so whole branches go before their roots are tried
      const Tuple& t = *std::next(x.U.nodes.elements().rbegin(), static_cast<std::ptrdiff_t>(i));
      auto V = dropAbove(x.U, t);
      if (!V) return std::nullopt;
      WeakCase d{*V, keepInside(x.C, *V)};
      return d;
    };
    WeakCase m = shrinkGreedy(c, count, shrink, fails);
    WeakFacts w = weakFacts(m);
    return Counterexample{0,
                          "plain concatenation fails; weak concatenation " +
                              weakConstructionVerdict(m.U, w.Bset, m.C),
                          weakInstance(m, w.Bset), ""};
  };
  return o;
}

// ---- bigSubsetND

struct BigSubsetNDCase {
  ForestSystem U;
  TupleSet B{2}, C{2};
  BoundVector g, g2;
};

Verdict evalBigSubsetND(const BigSubsetNDCase& c) {
  Verdict v;
  if (!set_union(c.B, c.C).elements().empty() &&
      set_union(c.B, c.C).size() != c.B.size() + c.C.size())
    return v;
  const Tuple root = rootOf(c.U);
  v.hyp = decideBigND(set_union(c.B, c.C), single(root), sumBounds(c.g, c.g2), c.U).big;
  if (!v.hyp) return v;
  try {
    SubsetSplitND sp = bigSubsetSplitND(c.B, c.C, root, c.g, c.g2, c.U);
    const bool onB = sp.side == SplitSide::B;
    v.tally = std::string("side-") + side_name(sp.side);
    auto errs = checkWitnessND(sp.witness, memberOfND(onB ? c.B : c.C), single(root), onB ? c.g : c.g2, c.U);
    if (!errs.empty()) v.failure = "witness rejected: " + errs.front();
  } catch (const Error& e) {
    v.failure = errText(e);
  }
  return v;
}

Json bigSubsetNDInstance(const BigSubsetNDCase& c) {
  Instance inst;
  inst.universes["U"] = c.U;
  inst.sets["B"] = c.B;
  inst.sets["C"] = c.C;
  for (std::size_t i = 0; i < c.g.size(); ++i) {
    inst.bounds["g" + std::to_string(i + 1)] = c.g[i];
    inst.bounds["h" + std::to_string(i + 1)] = c.g2[i];
  }
  return toJson(inst);
}

constexpr std::size_t kBigSubsetNDExhaustive = 6561;  // 81 fiber labelings for each of two domain nodes

Outcome runBigSubsetND(Rng& r, bool exhaustive, std::size_t ex) {
  BigSubsetNDCase c;
  if (exhaustive) {
    c.U = productSystem({fullTree(4, 1), fullTree(4, 1)});
    c.g = c.g2 = constBounds(2, 2);
    const std::size_t pat[2] = {ex % 81, ex / 81};
    for (Sym a = 0; a < 4; ++a) {
      std::size_t code = pat[a % 2];
      for (Sym i = 0; i < 4; ++i, code /= 3) {
        const Tuple t({Str{a}, Str{i}});
        if (code % 3 == 1) c.B.insert(t);
        if (code % 3 == 2) c.C.insert(t);
      }
    }
  } else {
    const Sym b1 = static_cast<Sym>(rint(r, 4, 5)), b2 = static_cast<Sym>(rint(r, 4, 5));
    c.U = rint(r, 0, 1) ? productSystem({fullTree(b1, 1), fullTree(b2, 1)}) : balancedFullSystem(2, b1, 1);
    c.g = c.g2 = constBounds(2, 2);
    labelRandom(r, c.U, c.B, c.C, true);
  }
  return finish<BigSubsetNDCase>(c, evalBigSubsetND(c), &evalBigSubsetND, &bigSubsetNDInstance,
                                 {&BigSubsetNDCase::B, &BigSubsetNDCase::C});
}

// ---- extraction of a splitting pair

struct ExtractCase {
  FunctionalTable G;
  TupleSet A{1}, B{1}, F{1};
  SplitFamily E;
  Tuple s, sStar;
  BoundVector g, h;
};

Verdict evalExtract(const ExtractCase& c) {
  Verdict v;
  v.hyp = true;
  const ForestSystem& U = c.G.universe();
  try {
    SplittingCertificate cert = extractSplitting(c.A, c.E, c.F, c.B, c.g, c.h, c.G, c.s, c.sStar);
    v.tally = cert.branch;
    TupleSet E(U.n);
    for (const auto& [rho, pr] : c.E) E = set_union(E, set_union(pr[0], pr[1]));
    std::vector<std::string> bad;
    if (!isSplit(cert.E, cert.F, c.B, c.G, cert.kind)) bad.push_back("E' and F' do not split");
    for (const auto& t : cert.E)
      if (!E.listed(t)) bad.push_back("E' holds " + to_text(t) + " outside E");
    for (const auto& t : cert.F)
      if (!c.F.listed(t)) bad.push_back("F' holds " + to_text(t) + " outside F");
    if (!decideBigND(cert.E, single(c.s), c.g, U).big) bad.push_back("E' is small above s");
    if (!decideBigND(cert.F, single(c.sStar), c.h, U).big) bad.push_back("F' is small above s*");
    if (!cert.witnessE.nodes.empty()) {
      auto e = checkWitnessND(cert.witnessE, memberOfND(cert.E), single(c.s), c.g, U);
      if (!e.empty()) bad.push_back("E' witness: " + e.front());
    }
    if (!cert.witnessF.nodes.empty()) {
      auto e = checkWitnessND(cert.witnessF, memberOfND(cert.F), single(c.sStar), c.h, U);
      if (!e.empty()) bad.push_back("F' witness: " + e.front());
    }
    if (!bad.empty()) v.failure = bad.front();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Hypothesis) {
      v.hyp = false;
      v.tally = "generator-missed-hypothesis";
    } else {
      v.failure = errText(e);
    }
  }
  return v;
}

Json extractInstance(const ExtractCase& c) {
  Instance inst;
  inst.universes["U"] = c.G.universe();
  inst.functionals["G"] = c.G;
  inst.sets["A"] = c.A;
  inst.sets["B"] = c.B;
  inst.sets["F"] = c.F;
  inst.sets["s"] = single(c.s);
  inst.sets["sStar"] = single(c.sStar);
  for (const auto& [rho, pr] : c.E)
    for (int i = 0; i < 2; ++i) inst.sets["E" + std::to_string(i) + to_text(rho)] = pr[static_cast<std::size_t>(i)];
  return toJson(inst);
}

// values below a splitting pair: side 0 gets c0.., side 1 gets c1.., shared children go to B
struct PairValues {
  std::vector<int> I0, I1;
};

PairValues splitChildren(Rng& r, int branching) {
  PairValues p;
  if (branching < 12) {
    p.I0 = pickSubset(r, branching, rint(r, 6, branching));
    p.I1 = pickSubset(r, branching, rint(r, 6, branching));
    return p;
  }
  // room for disjoint sides; now and then one shared child
  std::vector<int> order = pickSubset(r, branching, branching);
  std::shuffle(order.begin(), order.end(), r);
  p.I0.assign(order.begin(), order.begin() + 6);
  p.I1.assign(order.begin() + 6, order.begin() + 12);
  if (rint(r, 0, 3) == 0) p.I1.push_back(p.I0.front());
  std::sort(p.I0.begin(), p.I0.end());
  std::sort(p.I1.begin(), p.I1.end());
  return p;
}

Str childValue(Rng& r, const Str& base, int i, const PairValues& p) {
  const bool in0 = std::binary_search(p.I0.begin(), p.I0.end(), i);
  const bool in1 = std::binary_search(p.I1.begin(), p.I1.end(), i);
  if (in0 && !in1) return cat(extend(base, 0), randomBits(r, 0, 2));
  if (in1 && !in0) return cat(extend(base, 1), randomBits(r, 0, 2));
  return cat(base, randomBits(r, 0, 3));
}

// the prefix F's values start from: fresh, or sitting on one side of an E pair
Str fPrefix(Rng& r, const std::vector<Str>& ePrefixes) {
  const int mode = rint(r, 0, 2);
  if (mode == 0 || ePrefixes.empty()) return randomBits(r, 0, 2);
  const Str& base = ePrefixes[static_cast<std::size_t>(rint(r, 0, static_cast<int>(ePrefixes.size()) - 1))];
  return mode == 1 ? extend(base, static_cast<Sym>(rint(r, 0, 1))) : base;
}

std::size_t maxLenOutside(const std::map<Tuple, Str>& vals, const TupleSet& E, const TupleSet& B) {
  std::size_t L = 0;
  for (const auto& t : E)
    if (!B.contains(t)) L = std::max(L, vals.at(t).size());
  return L;
}

Outcome runExtract1D(Rng& r, std::size_t idx, int b) {
  ExtractCase c;
  const ForestSystem U = fromForest(fullTree(b, 2));
  c.g = c.h = constBounds(1, 2);
  c.s = Tuple::of(Str{});
  const int k = rint(r, 0, b - 1);
  c.sStar = Tuple::of(Str{static_cast<Sym>(k)});
  std::vector<int> others;
  for (int i = 0; i < b; ++i)
    if (i != k) others.push_back(i);
  std::shuffle(others.begin(), others.end(), r);
  others.resize(static_cast<std::size_t>(rint(r, 6, b - 1)));
  std::sort(others.begin(), others.end());

  std::map<Tuple, Str> vals;
  vals[Tuple::of(Str{})] = Str{};
  // wide flavors pin the maximal F-prefix at kAlpha: E above it (flavor 1) or beside it (flavor 2)
  static const Str kAlpha{0, 1, 1, 0};
  const int flavor = b >= 12 ? static_cast<int>(idx % 3) : 0;
  std::vector<Str> cpre(b);
  for (int a = 0; a < b; ++a) {
    const bool inA = std::binary_search(others.begin(), others.end(), a);
    cpre[a] = !inA || flavor == 0 ? randomBits(r, 0, 2) : flavor == 1 ? kAlpha : cat(Str{1, 1}, randomBits(r, 0, 1));
    vals[Tuple::of(Str{static_cast<Sym>(a)})] = cpre[a];
  }
  TupleSet Eall(1);
  std::vector<Str> ePrefixes;
  for (int a : others) {
    const Tuple rho = Tuple::of(Str{static_cast<Sym>(a)});
    c.A.insert(rho);
    PairValues p = splitChildren(r, b);
    std::array<TupleSet, 2> pr{TupleSet(1), TupleSet(1)};
    for (int i = 0; i < b; ++i) {
      const Tuple t = Tuple::of(Str{static_cast<Sym>(a), static_cast<Sym>(i)});
      vals[t] = childValue(r, cpre[a], i, p);
      const bool in0 = std::binary_search(p.I0.begin(), p.I0.end(), i);
      const bool in1 = std::binary_search(p.I1.begin(), p.I1.end(), i);
      if (in0) pr[0].insert(t);
      if (in1) pr[1].insert(t);
      if (in0 && in1) c.B.insert(t);
    }
    for (int side = 0; side < 2; ++side) ePrefixes.push_back(extend(cpre[a], static_cast<Sym>(side)));
    Eall = set_union(Eall, set_union(pr[0], pr[1]));
    c.E[rho] = pr;
  }
  const std::size_t L = maxLenOutside(vals, Eall, c.B);
  cpre[k] = flavor == 0 ? fPrefix(r, ePrefixes) : Str{};
  vals[c.sStar] = cpre[k];
  const std::vector<int> fk = pickSubset(r, b, rint(r, 6, std::min(b, 9)));
  for (int i = 0, nth = 0; i < b; ++i) {
    const Tuple t = Tuple::of(Str{static_cast<Sym>(k), static_cast<Sym>(i)});
    if (std::binary_search(fk.begin(), fk.end(), i)) {
      c.F.insert(t);
      Str head = cpre[k];
      if (flavor != 0) {
        // two values branch right after kAlpha; the rest start with 1 and part within three bits
        const int j = nth++;
        head = j < 2 ? extend(kAlpha, static_cast<Sym>(j))
                     : Str{1, static_cast<Sym>((j - 2) >> 2 & 1), static_cast<Sym>((j - 2) >> 1 & 1),
                           static_cast<Sym>((j - 2) & 1)};
      }
      const std::size_t len = std::max(L + 1, head.size()) + static_cast<std::size_t>(rint(r, 0, 1));
      const int pad = static_cast<int>(len - head.size());
      vals[t] = cat(head, randomBits(r, pad, pad));
    } else {
      vals[t] = cat(cpre[k], randomBits(r, 0, 2));
    }
  }
  for (int a = 0; a < b; ++a) {
    if (a == k || std::binary_search(others.begin(), others.end(), a)) continue;
    for (int i = 0; i < b; ++i)
      vals[Tuple::of(Str{static_cast<Sym>(a), static_cast<Sym>(i)})] = cat(cpre[a], randomBits(r, 0, 2));
  }
  if (idx % 10 == 0) c.B = set_union(c.B, c.F);  // the degenerate branch
  c.G = FunctionalTable(U, vals);
  return finish<ExtractCase>(c, evalExtract(c), &evalExtract, &extractInstance, {});
}

Outcome runExtractND(Rng& r, std::size_t idx, int b) {
  ExtractCase c;
  const ForestSystem U = productSystem({fullTree(b, 1), fullTree(b, 2)});
  c.A = c.B = c.F = TupleSet(2);
  c.g = c.h = constBounds(2, 2);
  c.s = c.sStar = rootOf(U);
  std::map<Tuple, Str> vals;
  for (const auto& t : U.nodes)
    if (t[0].empty()) vals[t] = Str{};
  const int top = std::min(b, 7);
  const std::vector<int> adom = pickSubset(r, b, rint(r, 6, top));
  const std::vector<int> fdom = pickSubset(r, b, rint(r, 6, top));
  TupleSet Eall(2);
  std::vector<Str> cpre(b);
  for (int a = 0; a < b; ++a) cpre[a] = randomBits(r, 0, 1);
  std::map<std::pair<int, int>, Str> level1;
  for (int a = 0; a < b; ++a) {
    const Str ta{static_cast<Sym>(a)};
    vals[Tuple({ta, Str{}})] = cpre[a];
    const bool inA = std::binary_search(adom.begin(), adom.end(), a);
    PairValues p = inA ? splitChildren(r, b) : PairValues{};
    std::array<TupleSet, 2> pr{TupleSet(2), TupleSet(2)};
    for (int i = 0; i < b; ++i) {
      const Tuple t({ta, Str{static_cast<Sym>(i)}});
      Str v = inA ? childValue(r, cpre[a], i, p) : cat(cpre[a], randomBits(r, 0, 2));
      level1[{a, i}] = v;
      vals[t] = v;
      if (!inA) continue;
      const bool in0 = std::binary_search(p.I0.begin(), p.I0.end(), i);
      const bool in1 = std::binary_search(p.I1.begin(), p.I1.end(), i);
      if (in0) pr[0].insert(t);
      if (in1) pr[1].insert(t);
      if (in0 && in1) c.B.insert(t);
    }
    if (inA) {
      const Tuple rho({ta, Str{}});
      c.A.insert(rho);
      c.E[rho] = pr;
      Eall = set_union(Eall, set_union(pr[0], pr[1]));
    }
  }
  const std::size_t L = maxLenOutside(vals, Eall, c.B);
  for (int a = 0; a < b; ++a) {
    const Str ta{static_cast<Sym>(a)};
    const bool inF = std::binary_search(fdom.begin(), fdom.end(), a);
    const std::vector<int> fi = inF ? pickSubset(r, b, rint(r, 6, top)) : std::vector<int>{};
    for (int i = 0; i < b; ++i) {
      const Str& base = level1[{a, i}];
      const bool rowF = std::binary_search(fi.begin(), fi.end(), i);
      const std::vector<int> fj = rowF ? pickSubset(r, b, rint(r, 6, top)) : std::vector<int>{};
      for (int j = 0; j < b; ++j) {
        const Tuple t({ta, Str{static_cast<Sym>(i), static_cast<Sym>(j)}});
        if (std::binary_search(fj.begin(), fj.end(), j)) {
          c.F.insert(t);
          const std::size_t len = std::max(L + 1, base.size() + 1) + static_cast<std::size_t>(rint(r, 0, 1));
          const int extra = static_cast<int>(len - base.size());
          vals[t] = cat(base, randomBits(r, extra, extra));
        } else {
          vals[t] = cat(base, randomBits(r, 0, 1));
        }
      }
    }
  }
  if (idx % 10 == 0) c.B = set_union(c.B, c.F);
  c.G = FunctionalTable(U, vals);
  return finish<ExtractCase>(c, evalExtract(c), &evalExtract, &extractInstance, {});
}

// ---- projection commutativity on length-3 systems

struct ProjCase {
  ForestSystem U;
  TupleSet B{3};
  BoundVector h;
};

Verdict evalProj(const ProjCase& c) {
  Verdict v;
  v.hyp = true;
  try {
    const Tuple root = rootOf(c.U);
    TuplePred inB = memberOfND(c.B);
    const TupleSet joint = project(inB, single(root), {c.h[1], c.h[2]}, c.U);
    const TupleSet inner = project(inB, single(root), {c.h[2]}, c.U);
    const TupleSet nested = project(memberOfND(inner), single(chop(root)), {c.h[1]}, domK(c.U, 2));
    if (joint.elements() != nested.elements())
      v.failure = "joint projection " + to_text(joint) + " differs from nested " + to_text(nested);
    v.tally = joint.empty() ? "empty-projection" : "nonempty-projection";
  } catch (const Error& e) {
    v.failure = errText(e);
  }
  return v;
}

Json projInstance(const ProjCase& c) {
  Instance inst;
  inst.universes["U"] = c.U;
  inst.sets["B"] = c.B;
  for (std::size_t i = 0; i < c.h.size(); ++i) inst.bounds["h" + std::to_string(i + 1)] = c.h[i];
  return toJson(inst);
}

const ForestSystem& balanced3() {
  static const ForestSystem U = balancedFullSystem(3, 2, 1);
  return U;
}
const ForestSystem& product3() {
  static const ForestSystem U = productSystem({fullTree(2, 1), fullTree(2, 1), fullTree(2, 1)});
  return U;
}

std::size_t projExhaustiveCount() { return (std::size_t{1} << balanced3().size()) + 4096; }

Outcome runProj(Rng& r, bool exhaustive, std::size_t ex) {
  ProjCase c;
  c.h = constBounds(3, 2);
  if (exhaustive) {
    const std::size_t nb = std::size_t{1} << balanced3().size();
    if (ex < nb) {
      c.U = balanced3();
      std::size_t i = 0;
      for (const auto& t : c.U.nodes)
        if (ex >> i++ & 1) c.B.insert(t);
    } else {
      // every pattern on the fiber over [0]; the other fibers take one of eight fixed shapes,
      // which is enough since both projections decide each first-coordinate fiber separately
      const std::size_t code = ex - nb, pat = code & 511, rest = code >> 9;
      c.U = product3();
      std::size_t i = 0;
      for (const auto& t : c.U.nodes) {
        if (t[0] == Str{0}) {
          if (pat >> i++ & 1) c.B.insert(t);
        } else if (t[0] == Str{1}) {
          const bool full = rest & 1, mirror = rest & 2;
          Tuple u({Str{0}, t[1], t[2]});
          std::size_t j = 0;
          for (const auto& x : c.U.nodes)
            if (x[0] == Str{0}) {
              if (x == u) break;
              ++j;
            }
          if (full || (mirror && (pat >> j & 1))) c.B.insert(t);
        } else if (rest & 4) {
          c.B.insert(t);
        }
      }
    }
  } else {
    c.U = productSystem({fullTree(static_cast<Sym>(rint(r, 2, 3)), 1), fullTree(static_cast<Sym>(rint(r, 2, 3)), 1),
                         fullTree(static_cast<Sym>(rint(r, 2, 3)), 1)});
    for (auto& x : c.h) x = BoundingFunction::constant(rint(r, 2, 3));
    for (const auto& t : c.U.nodes)
      if (rint(r, 0, 1)) c.B.insert(t);
  }
  return finish<ProjCase>(c, evalProj(c), &evalProj, &projInstance, {&ProjCase::B});
}

struct LemmaDef {
  std::size_t exhaustiveCount;
  bool expectCounterexamples;
  std::function<Outcome(Rng&, std::size_t idx, bool exhaustive, std::size_t ex)> run;
};

const LemmaDef& lemmaDef(const std::string& name) {
  static const std::map<std::string, LemmaDef> defs = [] {
    std::map<std::string, LemmaDef> d;
    d["bigSubset"] = {kBigSubsetExhaustive, false,
                      [](Rng& r, std::size_t, bool e, std::size_t x) { return runBigSubset(r, e, x); }};
    d["concat"] = {concatExhaustiveCount(), false,
                   [](Rng& r, std::size_t, bool e, std::size_t x) { return runConcat(r, e, x); }};
    d["weakConcat"] = {kWeakExhaustive, true,
                       [](Rng& r, std::size_t, bool e, std::size_t x) { return runWeakConcat(r, e, x); }};
    d["bigSubsetND"] = {kBigSubsetNDExhaustive, false,
                        [](Rng& r, std::size_t, bool e, std::size_t x) { return runBigSubsetND(r, e, x); }};
    // Extraction always samples. The random cases use the narrow universes (branching 9 and 7),
    // where shared children force E ∩ B to be big; the small class adds branching-12 cases whose
    // pairs can be disjoint, so the case analysis proper runs.
    d["extract1D"] = {50, false,
                      [](Rng& r, std::size_t i, bool e, std::size_t) { return runExtract1D(r, i, e ? 12 : 9); }};
    d["extractND"] = {10, false,
                      [](Rng& r, std::size_t i, bool e, std::size_t) { return runExtractND(r, i, e ? 12 : 7); }};
    d["projectComm"] = {projExhaustiveCount(), false,
                        [](Rng& r, std::size_t, bool e, std::size_t x) { return runProj(r, e, x); }};
    return d;
  }();
  auto it = defs.find(name);
  if (it == defs.end()) fail(ErrorKind::Validation, "unknown lemma '" + name + "'");
  return it->second;
}

}  // namespace

FuzzReport fuzzLemma(const std::string& lemma, const FuzzBudget& budget, std::uint64_t seed,
                     const std::string& persistDir, std::size_t maxMinimized) {
  const LemmaDef& def = lemmaDef(lemma);
  FuzzReport rep;
  rep.lemma = lemma;
  rep.seed = seed;
  rep.budget = budget;
  rep.expectCounterexamples = def.expectCounterexamples;
  const std::size_t ex = budget.exhaustive ? def.exhaustiveCount : 0;
  rep.cases = ex + budget.cases;
  std::vector<Outcome> out(rep.cases);
  parallelFor(rep.cases, [&](std::size_t i) {
    Rng r = caseRng(seed, lemma, i);
    out[i] = def.run(r, i, i < ex, i);
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Outcome& o = out[i];
    rep.hypothesisHeld += o.hypothesis;
    rep.checked += o.checked;
    if (!o.tally.empty()) ++rep.tally[o.tally];
    if (o.failure.empty()) continue;
    ++rep.failures;
    if (rep.counterexamples.size() >= maxMinimized || !o.minimize) continue;
    Counterexample cx = o.minimize();
    cx.caseIndex = i;
    if (!persistDir.empty()) {
      std::filesystem::create_directories(persistDir);
      const std::string name = lemma + "-s" + std::to_string(seed) + "-c" + std::to_string(i) + ".json";
      std::ofstream f(std::filesystem::path(persistDir) / name, std::ios::binary);
      f << canonicalDump(cx.instance);
      if (!f) fail(ErrorKind::Internal, "could not write " + name);
      cx.path = name;
    }
    rep.counterexamples.push_back(std::move(cx));
  }
  return rep;
}

std::vector<std::string> recheckWeakConcatFixture(const Instance& inst) {
  std::vector<std::string> r;
  const ForestSystem& U = inst.universe("U");
  const TupleSet& C = inst.set("C");
  const TupleSet& B = inst.set("B");
  const TupleSet& root = inst.set("root");
  const BoundVector g{inst.bound("g1"), inst.bound("g2")};
  if (U.n != 2) r.push_back("universe is not length 2");
  if (!validateSystem(U).ok()) r.push_back("universe is not a valid system");
  if (root.size() != 1) r.push_back("root set must hold exactly one tuple");
  if (!r.empty()) return r;
  if (!isOpenIn(memberOfND(C), U)) r.push_back("C is not open in U");
  TuplePred inC = memberOfND(C);
  for (const auto& t : B) {
    if (!U.contains(t)) r.push_back(to_text(t) + " in B lies outside U");
    else if (!isBigND(inC, t, g, U)) r.push_back("C is small above " + to_text(t) + " in B");
  }
  if (!decideBigND(B, root, g, U).big) r.push_back("B is small above the root");
  if (decideBigND(C, root, g, U).big) r.push_back("C is big above the root");
  if (r.empty()) {
    const std::string w = weakConstructionVerdict(U, B, C);
    if (w != "refused") r.push_back("weak concatenation did not refuse: " + w);
  }
  return r;
}

}  // namespace bushy
