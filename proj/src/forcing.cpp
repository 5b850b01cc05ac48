#include "bushy/forcing.hpp"

#include <algorithm>
#include <set>

namespace bushy {

// ---- mock jumps

// two oracle prefixes with a common extension: every component pair comparable
static bool compatible(const Tuple& a, const Tuple& b) {
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!comparable(a[i], b[i])) return false;
  return true;
}

std::optional<Sym> MockJump::at(const Tuple& oracle, std::int64_t e) const {
  for (const auto& [key, v] : entries)
    if (key.second == e && key.first.arity() == oracle.arity() && tuple_le(key.first, oracle)) return v;
  return std::nullopt;
}

std::vector<std::string> MockJump::validate() const {
  std::vector<std::string> d;
  for (auto a = entries.begin(); a != entries.end(); ++a)
    for (auto b = std::next(a); b != entries.end(); ++b) {
      const auto& [ka, va] = *a;
      const auto& [kb, vb] = *b;
      if (ka.second != kb.second || ka.first.arity() != kb.first.arity() || va == vb) continue;
      if (compatible(ka.first, kb.first))
        d.push_back("jump entries at " + to_text(ka.first) + " and " + to_text(kb.first) + " disagree on index " +
                    std::to_string(ka.second));
    }
  return d;
}

static bool consistentWith(const MockJump& J, const Tuple& p, std::int64_t e, Sym v) {
  for (const auto& [key, w] : J.entries)
    if (key.second == e && key.first.arity() == p.arity() && w != v &&
        compatible(key.first, p))
      return false;
  return true;
}

MockJump MockJump::random(std::mt19937_64& rng, std::size_t maxLen, Sym branching, std::size_t depth) {
  MockJump J;
  if (depth == 0 || branching == 0) return J;
  auto pick = [&](std::uint64_t k) { return rng() % k; };
  for (std::size_t e = 0; e < depth; ++e)
    if (pick(2)) J.entries[{Tuple{}, static_cast<std::int64_t>(e)}] = static_cast<Sym>(pick(branching));
  for (std::size_t a = 1; a < maxLen; ++a) {
    const std::size_t count = 2 * depth;
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<Str> comps;
      for (std::size_t c = 0; c < a; ++c) {
        Str s(pick(depth + 1));
        for (auto& x : s) x = static_cast<Sym>(pick(branching));
        comps.push_back(s);
      }
      Tuple p(comps);
      auto e = static_cast<std::int64_t>(pick(depth));
      auto v = static_cast<Sym>(pick(branching));
      if (consistentWith(J, p, e, v)) J.entries[{p, e}] = v;
    }
  }
  return J;
}

bool inBDnc(const MockJump& J, const Tuple& t) {
  for (std::size_t k = 0; k < t.arity(); ++k) {
    Tuple oracle = prefix_k(t, k);
    const Str& s = t[k];
    for (std::size_t e = 0; e < s.size(); ++e) {
      auto v = J.at(oracle, static_cast<std::int64_t>(e));
      if (v && *v == s[e]) return true;
    }
  }
  return false;
}

TupleSet bDncSet(const MockJump& J, std::size_t n, const ForestSystem& U) {
  if (U.n != n) fail(ErrorKind::Arity, "universe length differs from the requested length");
  TupleSet r(n);
  for (const auto& t : U.nodes)
    if (inBDnc(J, t)) r.insert(t);
  return r;
}

// ---- conditions

std::int64_t Condition::depth() const {
  if (system.depthBound >= 0) return system.depthBound;
  std::size_t h = 0;
  for (const auto& t : system.nodes) h = std::max(h, t.height());
  return static_cast<std::int64_t>(h);
}

static BoundVector vec(std::size_t n, const BoundingFunction& f) { return BoundVector(n, f); }

static void capped(std::vector<std::string>& out, std::size_t& count, const std::string& m) {
  if (count++ < 8) out.push_back(m);
}

Diagnostics validateCondition(const Condition& p, const MockJump& J) {
  Diagnostics d;
  const std::size_t n = p.n();
  const std::int64_t D = p.depth();
  if (p.stem.arity() != n || p.bad.arity() != n) {
    d.errors.push_back("stem, system and bad set differ in length");
    return d;
  }
  for (const auto& m : J.validate()) d.errors.push_back("mock jump: " + m);

  Diagnostics sd = validateSystem(p.system);
  for (const auto& e : sd.errors) d.errors.push_back("clause 1: " + e);
  for (const auto& e : sd.info) d.info.push_back(e);
  if (p.system.base != TupleSet(n, {p.stem})) d.errors.push_back("clause 1: the system is not above the stem");
  std::size_t cnt = 0;
  for (const auto& l : leavesND(p.system))
    for (const auto& c : l.comps)
      if (static_cast<std::int64_t>(c.size()) != D) {
        capped(d.errors, cnt, "clause 1: leaf " + to_text(l) + " stops short of the balanced depth " + std::to_string(D));
        break;
      }
  d.info.push_back("clauses checked relative to the depth bound " + std::to_string(D));

  if (!isBushyND(p.system, vec(n, p.h))) d.errors.push_back("clause 2: the system is not " + p.h.describe() + "-bushy");
  if (auto q = firstOutsideQ(p.h, D))
    d.info.push_back("h drops below 2^n at n=" + std::to_string(*q) + "; membership in Q is not enforced at truncation scale");

  cnt = 0;
  for (const auto& t : p.bad)
    if (!p.system.contains(t)) capped(d.errors, cnt, "clause 3: bad tuple " + to_text(t) + " lies outside the system");
  if (!isOpenIn(memberOfND(p.bad), p.system)) d.errors.push_back("clause 3: the bad set is not open in the system");
  cnt = 0;
  for (const auto& t : p.system.nodes)
    if (!p.bad.contains(t) && inBDnc(J, t))
      capped(d.errors, cnt, "clause 3: " + to_text(t) + " violates DNC but is not bad");

  if (decideBigND(p.bad, TupleSet(n, {p.stem}), vec(n, p.b), p.system).big)
    d.errors.push_back("clause 4: the bad set is " + p.b.describe() + "-big above the stem");
  if (auto q = firstOutsideQ(p.b, D))
    d.info.push_back("b drops below 2^n at n=" + std::to_string(*q) + "; membership in Q is not enforced at truncation scale");

  const auto from = static_cast<std::int64_t>(p.stem.norm());
  if (auto at = firstBelow(p.h, p.b, from, D))
    d.errors.push_back("clause 5: h < b at " + std::to_string(*at));
  GGReport gg = ggVerify(p.h, p.b, p.gg, p.ggK, D);
  if (!gg.pass) d.errors.push_back("clause 5: " + gg.note());
  return d;
}

Diagnostics extendsCondition(const Condition& q, const Condition& p) {
  Diagnostics d;
  if (q.n() != p.n()) {
    d.errors.push_back("conditions of different lengths");
    return d;
  }
  if (!tuple_le(p.stem, q.stem)) d.errors.push_back("stem " + to_text(q.stem) + " does not extend " + to_text(p.stem));
  std::size_t cnt = 0;
  for (const auto& t : q.system.nodes)
    if (!p.system.contains(t)) capped(d.errors, cnt, "tuple " + to_text(t) + " is not in the larger system");
  cnt = 0;
  for (const auto& t : q.system.nodes)
    if (p.bad.contains(t) && !q.bad.contains(t)) capped(d.errors, cnt, "bad tuple " + to_text(t) + " was dropped");
  const auto from = static_cast<std::int64_t>(q.stem.norm());
  const std::int64_t D = q.depth();
  if (auto at = firstBelow(p.h, q.h, from, D)) d.errors.push_back("h increases at " + std::to_string(*at));
  if (auto at = firstBelow(q.b, p.b, from, D)) d.errors.push_back("b decreases at " + std::to_string(*at));
  return d;
}

static void requireValid(const Condition& p, const char* what) {
  Diagnostics d = validateCondition(p);
  if (!d.ok()) fail(ErrorKind::Validation, std::string(what) + ": " + d.errors.front());
}

static void checkResult(const Condition& q, const char* what) {
  Diagnostics d = validateCondition(q);
  if (!d.ok()) fail(ErrorKind::Internal, std::string(what) + " produced an invalid condition: " + d.errors.front());
}

static TupleSet restrictTo(const TupleSet& bad, const ForestSystem& S) {
  TupleSet r(S.n);
  for (const auto& t : S.nodes)
    if (bad.contains(t)) r.insert(t);
  return r;
}

Condition extendToRectangle(const Condition& p, std::int64_t m) {
  requireValid(p, "extendToRectangle");
  Tuple tau = findSmallRectangle(p.system, memberOfND(p.bad), vec(p.n(), p.b), m);
  Condition q = p;
  q.stem = tau;
  q.system = fullSubsystem(p.system, tau);
  q.bad = restrictTo(p.bad, q.system);
  checkResult(q, "extendToRectangle");
  return q;
}

static void sandwich(const BoundingFunction& hi, const BoundingFunction& g, const BoundingFunction& lo,
                     std::int64_t from, std::int64_t to) {
  if (auto at = firstBelow(hi, g, from, to))
    fail(ErrorKind::Precondition, "bound sandwich violated: h < g at " + std::to_string(*at));
  if (auto at = firstBelow(g, lo, from, to))
    fail(ErrorKind::Precondition, "bound sandwich violated: g < b at " + std::to_string(*at));
}

Sigma1Result sigma1Decide(const Condition& p, const TupleSet& C, const Tuple& tau, const BoundingFunction& g,
                          const GrowthWitness& gw) {
  const std::size_t n = p.n();
  if (C.arity() != n || tau.arity() != n) fail(ErrorKind::Arity, "set or tuple length differs from the condition");
  if (!p.system.contains(tau)) fail(ErrorKind::Precondition, to_text(tau) + " is not in the system");
  if (!isOpenIn(memberOfND(C), p.system)) fail(ErrorKind::Precondition, "C is not open in the system");
  sandwich(p.h, g, p.b, static_cast<std::int64_t>(tau.norm()), p.depth());
  TuplePred inBC = [&](const Tuple& t) { return p.bad.contains(t) || C.contains(t); };
  Sigma1Result r;
  BigNDResult big = decideBigND(inBC, TupleSet(n, {tau}), vec(n, g), p.system);
  if (big.big) {
    r.big = true;
    r.witness = big.witness;
    return r;
  }
  Condition q = p;
  q.stem = tau;
  q.system = fullSubsystem(p.system, tau);
  q.bad = TupleSet(n);
  for (const auto& t : q.system.nodes)
    if (inBC(t)) q.bad.insert(t);
  q.b = g;
  q.gg = gw;
  Diagnostics d = validateCondition(q);
  if (!d.ok()) fail(ErrorKind::Internal, "divergence extension is not a condition: " + d.errors.front());
  r.extension = std::move(q);
  return r;
}

// ---- builders

namespace {

struct Builder {
  const Condition& p;
  BoundVector g;
  std::vector<std::int64_t> balanced;

  Builder(const Condition& cond, const BoundingFunction& gf)
      : p(cond), g(cond.n(), gf), balanced(balancedLevels(cond.system)) {}

  std::optional<std::int64_t> nextLevel(std::int64_t above) const {
    for (auto l : balanced)
      if (l > above) return l;
    return std::nullopt;
  }

  static std::int64_t heightOf(const ForestSystem& S) {
    std::size_t h = 0;
    for (const auto& t : S.nodes) h = std::max(h, t.height());
    return static_cast<std::int64_t>(h);
  }

  void requireAt(const ForestSystem& S, std::int64_t level) const {
    for (const auto& l : leavesND(S))
      for (const auto& c : l.comps)
        if (static_cast<std::int64_t>(c.size()) != level)
          fail(ErrorKind::Internal, "leaf " + to_text(l) + " missed the level " + std::to_string(level));
  }

  // end-extend S to the least balanced level above its height
  std::pair<ForestSystem, std::int64_t> pad(const ForestSystem& S, std::size_t round) const {
    const std::int64_t h = heightOf(S);
    auto l = nextLevel(h);
    if (!l)
      fail(ErrorKind::Truncation, "round " + std::to_string(round) + ": no balanced level above height " +
                                      std::to_string(h) + " within depth " + std::to_string(p.depth()));
    TupleSet target = upwardIn(levelSet(p.system, static_cast<std::size_t>(*l)), p.system);
    ForestSystem R = weakConcatExtend(S, target, g, p.system);
    requireAt(R, *l);
    return {R, *l};
  }

  Condition finish(const ForestSystem& S, std::int64_t depth, const BoundingFunction& gf,
                   const GrowthWitness& gw) const {
    Condition q = p;
    q.system = ForestSystem(S.base, S.nodes, depth);
    q.bad = restrictTo(p.bad, q.system);
    q.h = gf;
    q.gg = gw;
    return q;
  }
};

}  // namespace

BuildResult buildTotalitySystem(const Condition& p, const std::vector<TupleSet>& Cs, const BoundingFunction& g,
                                const GrowthWitness& gw) {
  requireValid(p, "buildTotalitySystem");
  const std::size_t n = p.n();
  const std::int64_t D = p.depth();
  sandwich(p.h, g, p.b, static_cast<std::int64_t>(p.stem.norm()), D);
  if (!ggVerify(g, p.b, gw, p.ggK, D).pass) fail(ErrorKind::Precondition, "the growth witness does not show g >> b");
  for (std::size_t k = 0; k < Cs.size(); ++k) {
    if (Cs[k].arity() != n) fail(ErrorKind::Arity, "C_" + std::to_string(k) + " has the wrong length");
    if (!isOpenIn(memberOfND(Cs[k]), p.system))
      fail(ErrorKind::Precondition, "C_" + std::to_string(k) + " is not open in the system");
  }
  Builder B(p, g);
  BuildResult res;
  ForestSystem S(TupleSet(n, {p.stem}), TupleSet(n, {p.stem}), -1);
  std::int64_t level = static_cast<std::int64_t>(p.stem.height());
  for (std::size_t k = 0; k < Cs.size(); ++k) {
    const std::size_t round = k + 1;
    TuplePred inBC = [&](const Tuple& t) { return p.bad.contains(t) || Cs[k].contains(t); };
    try {
      S = weakConcatExtend(S, inBC, B.g, p.system);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotBig) throw;
      fail(ErrorKind::NotBig, "round " + std::to_string(round) + ": " + e.what());
    }
    std::tie(S, level) = B.pad(S, round);
    res.rounds.push_back({round, level, leavesND(S).size(), "weak-concatenation", {}});
  }
  if (Cs.empty()) {
    std::tie(S, level) = B.pad(S, 1);
    res.rounds.push_back({1, level, leavesND(S).size(), "padding", {}});
  }
  res.condition = B.finish(S, level, g, gw);
  checkResult(res.condition, "buildTotalitySystem");
  auto v = totalityViolations(res.condition, Cs);
  if (!v.empty()) fail(ErrorKind::Internal, "totality scan failed: " + v.front());
  return res;
}

std::vector<std::string> totalityViolations(const Condition& q, const std::vector<TupleSet>& Cs) {
  std::vector<std::string> out;
  std::size_t cnt = 0;
  for (const auto& l : leavesND(q.system)) {
    if (q.bad.contains(l)) continue;
    for (std::size_t k = 0; k < Cs.size(); ++k)
      if (!Cs[k].contains(l)) capped(out, cnt, "leaf " + to_text(l) + " avoids C_" + std::to_string(k));
  }
  return out;
}

namespace {

Tuple cutAt(const Tuple& t, std::size_t level) {
  std::vector<Str> c;
  for (const auto& s : t.comps) c.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(std::min(level, s.size())));
  return Tuple(c);
}

// value clashes between nonbad tuples above different owners; local mode only compares
// tuples sharing their domain part
struct ClashIndex {
  PairwiseMode mode;
  std::size_t n;
  std::map<std::pair<Tuple, Str>, std::set<std::size_t>> owners;

  std::pair<Tuple, Str> key(const Tuple& t, const Str& v) const {
    return {mode == PairwiseMode::Local ? chop(t) : Tuple{}, v};
  }
  void add(const Tuple& t, const Str& v, std::size_t owner) { owners[key(t, v)].insert(owner); }

  bool clashes(const Tuple& t, const Str& v, std::size_t owner) const {
    auto k = key(t, v);
    auto other = [&](const std::set<std::size_t>& s) { return s.size() > 1 || (s.size() == 1 && *s.begin() != owner); };
    for (std::size_t l = 0; l <= v.size(); ++l) {
      auto it = owners.find({k.first, Str(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(l))});
      if (it != owners.end() && other(it->second)) return true;
    }
    for (auto it = owners.upper_bound(k); it != owners.end(); ++it) {
      if (it->first.first != k.first || !is_prefix(v, it->first.second)) break;
      if (other(it->second)) return true;
    }
    return false;
  }
};

}  // namespace

std::vector<std::string> splittingViolations(const Condition& q, const FunctionalTable& G,
                                             const std::vector<std::int64_t>& levels, PairwiseMode mode) {
  std::vector<std::string> out;
  std::size_t cnt = 0;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const auto lo = static_cast<std::size_t>(levels[k]), hi = static_cast<std::size_t>(levels[k + 1]);
    std::vector<Tuple> xs;
    for (const auto& t : levelSet(q.system, hi))
      if (!q.bad.contains(t)) xs.push_back(t);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = i + 1; j < xs.size(); ++j) {
        if (cutAt(xs[i], lo) == cutAt(xs[j], lo)) continue;
        if (mode == PairwiseMode::Local && chop(xs[i]) != chop(xs[j])) continue;
        if (comparable(G(xs[i]), G(xs[j])))
          capped(out, cnt, "level " + std::to_string(hi) + ": " + to_text(xs[i]) + " and " + to_text(xs[j]) +
                               " have comparable values");
      }
  }
  return out;
}

BuildResult buildSplittingSystem(const Condition& p, const FunctionalTable& G, const BoundingFunction& g,
                                 PairwiseMode mode, std::size_t rounds, const GrowthWitness& gw) {
  requireValid(p, "buildSplittingSystem");
  const std::size_t n = p.n();
  if (mode == PairwiseMode::OneD && n != 1) fail(ErrorKind::Arity, "1d mode needs a condition of length 1");
  if (mode == PairwiseMode::Local && n < 2) fail(ErrorKind::Arity, "local mode needs a condition of length at least 2");
  std::map<Tuple, Str> vals;
  for (const auto& t : p.system.nodes) {
    if (!G.defined(t)) fail(ErrorKind::Precondition, "the functional has no value at " + to_text(t));
    vals[t] = G(t);
  }
  const FunctionalTable Gp(p.system, vals);
  const std::int64_t D = p.depth();
  sandwich(p.h, g, p.b, static_cast<std::int64_t>(p.stem.norm()), D);
  if (!ggVerify(g, p.b, gw, p.ggK, D).pass) fail(ErrorKind::Precondition, "the growth witness does not show g >> b");

  Builder B(p, g);
  BuildResult res;
  ForestSystem S(TupleSet(n, {p.stem}), TupleSet(n, {p.stem}), -1);
  std::int64_t level;
  std::tie(S, level) = B.pad(S, 0);
  std::vector<std::int64_t> levels{level};
  res.rounds.push_back({0, level, leavesND(S).size(), "padding", {}});

  for (std::size_t r = 1; r <= rounds; ++r) {
    const TupleSet leafSet = leavesND(S);
    const std::vector<Tuple> leaves(leafSet.begin(), leafSet.end());
    std::map<Tuple, std::size_t> ownerOf;
    for (std::size_t i = 0; i < leaves.size(); ++i) ownerOf[leaves[i]] = i;
    BuildRound rec{r, 0, 0, "", {}};
    bool done = false;

    // direct: the first balanced level where the clash-free tuples are big above every leaf
    for (auto L : B.balanced) {
      if (L <= level) continue;
      const auto lv = static_cast<std::size_t>(L);
      const auto cut = static_cast<std::size_t>(level);
      ClashIndex idx{mode, n, {}};
      std::vector<std::pair<Tuple, std::size_t>> cand;
      for (const auto& t : levelSet(p.system, lv)) {
        auto it = ownerOf.find(cutAt(t, cut));
        if (it == ownerOf.end()) continue;
        cand.emplace_back(t, it->second);
        if (!p.bad.contains(t)) idx.add(t, Gp(t), it->second);
      }
      TupleSet kept(n);
      for (const auto& [t, o] : cand)
        if (p.bad.contains(t) || !idx.clashes(t, Gp(t), o)) kept.insert(t);
      try {
        S = weakConcatExtend(S, upwardIn(kept, p.system), B.g, p.system);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotBig) throw;
        continue;
      }
      B.requireAt(S, L);
      level = L;
      rec.method = "direct";
      rec.notes.push_back("clash-free tuples at level " + std::to_string(L) + " suffice");
      done = true;
      break;
    }

    if (!done) {
      try {
        TupleSet target(n);
        auto absorb = [&](const PairwiseResult& pr) {
          for (const auto& s : pr.sets)
            for (const auto& t : s) target.insert(t);
          for (const auto& line : pr.trace) rec.notes.push_back(line);
        };
        if (mode == PairwiseMode::Local) {
          std::map<Tuple, std::vector<Tuple>> groups;
          for (const auto& l : leaves) groups[chop(l)].push_back(l);
          for (const auto& [dom, group] : groups) absorb(findPairwiseSplittings(group, p.bad, Gp, B.g, mode));
        } else {
          absorb(findPairwiseSplittings(leaves, p.bad, Gp, B.g, n == 1 ? PairwiseMode::OneD : PairwiseMode::Global));
        }
        S = weakConcatExtend(S, upwardIn(target, p.system), B.g, p.system);
        std::tie(S, level) = B.pad(S, r);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Internal) throw;
        fail(ErrorKind::Truncation, "round " + std::to_string(r) + " above level " + std::to_string(level) +
                                        ": no pairwise splitting found: " + e.what());
      }
      rec.method = "lemma";
    }
    rec.level = level;
    rec.leaves = leavesND(S).size();
    levels.push_back(level);
    res.rounds.push_back(std::move(rec));
  }
  res.condition = B.finish(S, level, g, gw);
  checkResult(res.condition, "buildSplittingSystem");
  auto v = splittingViolations(res.condition, Gp, levels, n == 1 ? PairwiseMode::OneD : mode);
  if (!v.empty()) fail(ErrorKind::Internal, "splitting scan failed: " + v.front());
  if (!isBushyND(res.condition.system, B.g, true))
    res.rounds.back().notes.push_back("the system is not exactly bushy");
  return res;
}

// ---- restriction and homogenization

static TupleSet projectLast(const Condition& q) {
  return projectSuffix(memberOfND(q.bad), Tuple::of(q.stem.last()), {q.b}, q.system);
}

static Condition restrictRaw(const Condition& q) {
  Condition r = q;
  r.stem = chop(q.stem);
  r.system = domSystem(q.system);
  r.bad = projectLast(q);
  return r;
}

Condition restrictI(const Condition& q, const MockJump& J) {
  if (q.n() < 2) fail(ErrorKind::Arity, "restriction needs a condition of length at least 2");
  Diagnostics d = validateCondition(q, J);
  if (!d.ok()) fail(ErrorKind::Validation, "restriction of an invalid condition: " + d.errors.front());
  Condition r = restrictRaw(q);
  Diagnostics dr = validateCondition(r, J);
  if (!dr.ok()) fail(ErrorKind::Internal, "the restriction is not a condition: " + dr.errors.front());
  return r;
}

Condition nuHomogenize(const Condition& q) {
  requireValid(q, "nuHomogenize");
  const std::size_t n = q.n();
  if (n == 1) return q;
  const TuplePred inB = memberOfND(q.bad);
  std::vector<TupleSet> C;
  for (std::size_t k = 1; k < n; ++k)
    C.push_back(projectSuffix(inB, suffix_k(q.stem, k), BoundVector(n - k, q.b), q.system));
  Condition r = q;
  r.bad = TupleSet(n);
  for (const auto& t : q.system.nodes) {
    bool in = q.bad.contains(t);
    for (std::size_t k = 1; k < n && !in; ++k) in = C[k - 1].listed(prefix_k(t, k));
    if (in) r.bad.insert(t);
  }
  checkResult(r, "nuHomogenize");
  return r;
}

bool inQ(const Condition& q) {
  if (q.n() == 1) return true;
  const Str& mu = q.stem.last();
  TupleSet pointwise(q.n() - 1);
  for (const auto& tau : domSystem(q.system).nodes)
    if (q.bad.contains(append(tau, mu))) pointwise.insert(tau);
  if (projectLast(q) != pointwise) return false;
  return inQ(restrictRaw(q));
}

Condition composeRestrictions(const Condition& q, std::size_t m, const MockJump& J) {
  if (m < 1 || m > q.n()) fail(ErrorKind::Range, "target length " + std::to_string(m) + " is out of range");
  Condition r = q;
  while (r.n() > m) r = restrictI(r, J);
  return r;
}

Condition liftCondition(const Condition& p, const MockJump& J) {
  requireValid(p, "liftCondition");
  constexpr std::size_t kLimit = 2000000;
  // h-bounded strings by length, built once
  std::vector<std::vector<Str>> byLen{{Str{}}};
  std::size_t total = 0;
  auto upTo = [&](std::size_t L) {
    while (byLen.size() <= L) {
      const std::size_t i = byLen.size() - 1;
      Num w = p.h.at(static_cast<std::int64_t>(i));
      if (w.huge || w.v > static_cast<std::int64_t>(kLimit)) fail(ErrorKind::Limit, "fiber branching is too large to enumerate");
      std::vector<Str> next;
      for (const auto& s : byLen[i])
        for (std::int64_t x = 0; x < w.v; ++x) next.push_back(extend(s, static_cast<Sym>(x)));
      if (next.size() > kLimit) fail(ErrorKind::Limit, "lifted fibers exceed the node limit");
      byLen.push_back(std::move(next));
    }
  };
  const std::size_t n = p.n() + 1;
  Condition q = p;
  q.stem = append(p.stem, Str{});
  TupleSet nodes(n), bad(n);
  for (const auto& sigma : p.system.nodes) {
    const std::size_t L = sigma.norm();
    upTo(L);
    const bool allBad = p.bad.contains(sigma);
    for (std::size_t l = 0; l <= L; ++l)
      for (const auto& rho : byLen[l]) {
        Tuple t = append(sigma, rho);
        nodes.insert(t);
        if (++total > kLimit) fail(ErrorKind::Limit, "lifted system exceeds the node limit");
        bool b = allBad;
        for (std::size_t e = 0; e < rho.size() && !b; ++e) {
          auto v = J.at(sigma, static_cast<std::int64_t>(e));
          b = v && *v == rho[e];
        }
        if (b) bad.insert(t);
      }
  }
  q.system = ForestSystem(TupleSet(n, {q.stem}), nodes, p.system.depthBound);
  q.bad = bad;
  Diagnostics d = validateCondition(q, J);
  if (!d.ok()) fail(ErrorKind::Internal, "the lift is not a condition: " + d.errors.front());
  return q;
}

}  // namespace bushy
