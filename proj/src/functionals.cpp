#include "bushy/functionals.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace bushy {

// ---- tables

static bool binary(const Str& s) {
  for (auto x : s)
    if (x > 1) return false;
  return true;
}

// every tuple of the universe lying ⪯ t, other than t itself
template <class F>
static void forEachPrefixTuple(const Tuple& t, F&& f) {
  std::vector<std::size_t> len(t.arity(), 0);
  for (;;) {
    std::vector<Str> comps;
    bool same = true;
    for (std::size_t i = 0; i < t.arity(); ++i) {
      comps.emplace_back(t[i].begin(), t[i].begin() + static_cast<std::ptrdiff_t>(len[i]));
      if (len[i] != t[i].size()) same = false;
    }
    if (!same) f(Tuple(comps));
    std::size_t i = 0;
    while (i < t.arity() && len[i] == t[i].size()) len[i++] = 0;
    if (i == t.arity()) break;
    ++len[i];
  }
}

std::vector<std::string> FunctionalTable::validate(const ForestSystem& U, const std::map<Tuple, Str>& values) {
  std::vector<std::string> d;
  auto add = [&](const std::string& m) {
    if (d.size() < 20) d.push_back(m);
  };
  for (const auto& [t, v] : values) {
    if (!U.contains(t)) add("value given for " + to_text(t) + " outside the universe");
    if (!binary(v)) add("value " + to_text(v) + " at " + to_text(t) + " is not binary");
  }
  for (const auto& t : U.nodes) {
    auto it = values.find(t);
    if (it == values.end()) {
      add("no value for " + to_text(t));
      continue;
    }
    forEachPrefixTuple(t, [&](const Tuple& a) {
      auto ia = values.find(a);
      if (ia == values.end() || !U.contains(a)) return;
      if (!is_prefix(ia->second, it->second))
        add("not monotone: " + to_text(a) + " -> " + to_text(ia->second) + " but " + to_text(t) + " -> " +
            to_text(it->second));
    });
  }
  return d;
}

FunctionalTable::FunctionalTable(ForestSystem universe, std::map<Tuple, Str> values)
    : universe_(std::move(universe)), values_(std::move(values)) {
  auto d = validate(universe_, values_);
  if (!d.empty()) {
    std::string m = "invalid functional table: " + d.front();
    if (d.size() > 1) m += " (and " + std::to_string(d.size() - 1) + " more)";
    fail(ErrorKind::Validation, m);
  }
}

const Str& FunctionalTable::operator()(const Tuple& t) const {
  auto it = values_.find(t);
  if (it == values_.end()) fail(ErrorKind::Range, to_text(t) + " is outside the functional's universe");
  return it->second;
}

std::size_t FunctionalTable::maxLength() const {
  std::size_t m = 0;
  for (const auto& kv : values_) m = std::max(m, kv.second.size());
  return m;
}

const char* split_kind_name(SplitKind k) { return k == SplitKind::Global ? "global" : "local"; }
const char* pairwise_mode_name(PairwiseMode m) {
  switch (m) {
    case PairwiseMode::OneD: return "1d";
    case PairwiseMode::Local: return "local";
    case PairwiseMode::Global: return "global";
  }
  return "?";
}

// ---- splitting

bool isSplit(const TupleSet& A0, const TupleSet& A1, const TupleSet& B, const FunctionalTable& G, SplitKind kind) {
  const std::size_t n = G.universe().n;
  for (const auto* S : {&A0, &A1})
    for (const auto& t : *S) {
      if (t.arity() != n) fail(ErrorKind::Arity, "tuple " + to_text(t) + " has the wrong arity");
      if (!G.defined(t)) fail(ErrorKind::Range, to_text(t) + " is outside the functional's universe");
    }
  for (const auto& a : A0) {
    if (B.contains(a)) continue;
    for (const auto& b : A1) {
      if (B.contains(b)) continue;
      if (kind == SplitKind::Local && prefix_k(a, n - 1) != prefix_k(b, n - 1)) continue;
      if (comparable(G(a), G(b))) return false;
    }
  }
  return true;
}

static bool relHolds(const Str& v, const Str& alpha, Rel rel) {
  switch (rel) {
    case Rel::Extends: return is_prefix(alpha, v);
    case Rel::PrefixOf: return is_prefix(v, alpha);
    case Rel::Incomparable: return incomparable(v, alpha);
  }
  return false;
}

TupleSet valueSlice(const TupleSet& E, const TupleSet& B, const FunctionalTable& G, const Str& alpha, Rel rel) {
  TupleSet r(E.arity());
  for (const auto& x : E)
    if (B.contains(x) || relHolds(G(x), alpha, rel)) r.insert(x);
  return r;
}

namespace {

// cones of the binary value tree; state 0/1 assigns the cone to a side, 2 leaves it open
struct Cone {
  Str beta;
  int state;
};

struct SplitSearch {
  const ForestSystem& U;
  const Tuple& s;
  const BoundVector& g;
  std::vector<Tuple> items;  // candidates outside B above s
  std::vector<Str> vals;
  TupleSet inB;              // tuples of U above s lying in B
  std::size_t budget, used = 0;

  TupleSet side(const std::vector<Cone>& cones, int want) const {
    TupleSet r = inB;
    for (std::size_t i = 0; i < items.size(); ++i)
      for (const auto& c : cones)
        if ((c.state == want || c.state == 2) && is_prefix(c.beta, vals[i])) {
          r.insert(items[i]);
          break;
        }
    return r;
  }

  bool big(const TupleSet& S) {
    if (++used > budget) fail(ErrorKind::Limit, "single-split search exceeded its budget of " + std::to_string(budget));
    return decideBigND(S, TupleSet(U.n, {s}), g, U).big;
  }

  bool nonempty(const Str& beta) const {
    for (const auto& v : vals)
      if (is_prefix(beta, v)) return true;
    return false;
  }

  std::optional<std::vector<Cone>> run(std::vector<Cone> cones) {
    if (!big(side(cones, 0)) || !big(side(cones, 1))) return std::nullopt;
    std::size_t open = cones.size();
    for (std::size_t i = 0; i < cones.size(); ++i)
      if (cones[i].state == 2) {
        open = i;
        break;
      }
    if (open == cones.size()) return cones;
    const Str beta = cones[open].beta;
    {
      std::vector<Cone> next;
      for (std::size_t i = 0; i < cones.size(); ++i)
        if (i != open) next.push_back(cones[i]);
      for (Sym b = 0; b < 2; ++b) {
        Str c = extend(beta, b);
        if (nonempty(c)) next.push_back({c, 2});
      }
      if (auto r = run(next)) return r;
    }
    for (int st = 0; st < 2; ++st) {
      std::vector<Cone> next = cones;
      next[open].state = st;
      if (auto r = run(next)) return r;
    }
    return std::nullopt;
  }
};

}  // namespace

std::optional<SinglePair> findSingleSplit(const FunctionalTable& G, const TupleSet& B, const Tuple& prefix,
                                          const ForestSystem& U, const Tuple& s, const BoundVector& g,
                                          std::size_t budget) {
  if (!U.contains(s)) fail(ErrorKind::Precondition, to_text(s) + " is not in the search universe");
  SplitSearch S{U, s, g, {}, {}, TupleSet(U.n), budget};
  for (const auto& u : U.nodes) {
    if (!tuple_le(s, u)) continue;
    Tuple full = concat(prefix, u);
    if (B.contains(full)) {
      S.inB.insert(u);
    } else {
      S.items.push_back(u);
      S.vals.push_back(G(full));
    }
  }
  std::vector<Cone> start;
  if (!S.items.empty()) start.push_back({Str{}, 2});
  auto cones = S.run(start);
  if (!cones) return std::nullopt;
  SinglePair p;
  BigNDResult r0 = decideBigND(S.side(*cones, 0), TupleSet(U.n, {s}), g, U);
  BigNDResult r1 = decideBigND(S.side(*cones, 1), TupleSet(U.n, {s}), g, U);
  p.witness0 = *r0.witness;
  p.witness1 = *r1.witness;
  p.A0 = leavesND(p.witness0);
  p.A1 = leavesND(p.witness1);
  return p;
}

// the last-coordinate fiber over τ as a length-1 universe
static ForestSystem lastFiberSystem(const ForestSystem& U, const Tuple& tau) {
  TupleSet nd(1);
  for (const auto& t : U.nodes)
    if (prefix_k(t, U.n - 1) == tau) nd.insert(Tuple::of(t.last()));
  ForestSystem FS(nd.minimal().as_closed(), nd, U.depthBound);
  return FS;
}

TupleSet splitSet(const FunctionalTable& G, const TupleSet& B, const Str& mu, const BoundingFunction& g) {
  const ForestSystem& U = G.universe();
  if (U.n < 2) fail(ErrorKind::Arity, "split sets need a universe of length at least 2");
  TupleSet r(U.n - 1);
  for (const auto& tau : domSystem(U).nodes) {
    ForestSystem FS = lastFiberSystem(U, tau);
    if (!FS.contains(Tuple::of(mu))) continue;
    if (findSingleSplit(G, B, tau, FS, Tuple::of(mu), {g})) r.insert(tau);
  }
  return r;
}

Str computeTheta(const FunctionalTable& G, const TupleSet& B, const Str& mu, const BoundingFunction& g,
                 const Tuple& tau) {
  const ForestSystem& U = G.universe();
  if (tau.arity() + 1 != U.n) fail(ErrorKind::Arity, "the domain tuple must have length one less than the universe");
  ForestSystem FS = U.n == 1 ? U : lastFiberSystem(U, tau);
  Tuple m = Tuple::of(mu);
  if (!FS.contains(m)) fail(ErrorKind::Precondition, to_text(mu) + " is not in the fiber over " + to_text(tau));
  if (findSingleSplit(G, B, tau, FS, m, {g}))
    fail(ErrorKind::ExistsSplit, "the fiber over " + to_text(tau) + " holds a " + g.describe() +
                                     "-big splitting above " + to_text(mu));
  auto bigAt = [&](const Str& alpha) {
    TuplePred p = [&](const Tuple& x) {
      Tuple full = concat(tau, x);
      return B.contains(full) || is_prefix(alpha, G(full));
    };
    return isBigND(p, m, {g}, FS);
  };
  Str alpha;
  if (!bigAt(alpha)) fail(ErrorKind::NotBig, "the fiber over " + to_text(tau) + " is " + g.describe() + "-small above " + to_text(mu));
  const std::size_t cap = G.maxLength() + 2;
  for (;;) {
    if (alpha.size() > cap) fail(ErrorKind::Internal, "trace string grew past every value");
    bool grown = false;
    for (Sym b = 0; b < 2 && !grown; ++b) {
      Str c = extend(alpha, b);
      if (bigAt(c)) {
        alpha = c;
        grown = true;
      }
    }
    if (!grown) return alpha;
  }
}

// ---- the combinatorial extraction

static TupleSet unionOf(const std::vector<const TupleSet*>& v, std::size_t n) {
  TupleSet r(n);
  for (const auto* s : v)
    for (const auto& t : *s) r.insert(t);
  return r;
}

static TupleSet intersectB(const TupleSet& E, const TupleSet& B) {
  TupleSet r(E.arity());
  for (const auto& t : E)
    if (B.contains(t)) r.insert(t);
  return r;
}

static TupleSet above(const TupleSet& E, const Tuple& rho) {
  TupleSet r(E.arity());
  for (const auto& t : E)
    if (tuple_le(rho, t)) r.insert(t);
  return r;
}

SplittingCertificate extractSplitting(const TupleSet& A, const SplitFamily& Erho, const TupleSet& F,
                                      const TupleSet& B, const BoundVector& g, const BoundVector& h,
                                      const FunctionalTable& G, const Tuple& s, const Tuple& sStar) {
  const ForestSystem& U = G.universe();
  const std::size_t n = U.n;
  if (g.size() != n || h.size() != n || s.arity() != n || sStar.arity() != n)
    fail(ErrorKind::Arity, "extraction inputs disagree with the universe length");
  const BoundVector g3 = scaleBounds(3, g), h3 = scaleBounds(3, h);
  const TupleSet S1(n, {s}), S2(n, {sStar});

  if (!decideBigND(A, S1, g3, U).big)
    fail(ErrorKind::Hypothesis, "hypothesis on A fails: A is not " + describe(g3) + "-big above " + to_text(s));
  std::vector<const TupleSet*> parts;
  for (const auto& rho : A) {
    auto it = Erho.find(rho);
    if (it == Erho.end()) fail(ErrorKind::Hypothesis, "hypothesis on the splitting pairs fails: none given for " + to_text(rho));
    parts.push_back(&it->second[0]);
    parts.push_back(&it->second[1]);
  }
  if (n == 1) {
    for (const auto& rho : A) {
      const auto& pr = Erho.at(rho);
      for (int i = 0; i < 2; ++i)
        if (!decideBigND(pr[i], TupleSet(n, {rho}), g3, U).big)
          fail(ErrorKind::Hypothesis, "hypothesis on the splitting pairs fails: E(" + to_text(rho) + "," +
                                          std::to_string(i) + ") is not " + describe(g3) + "-big");
      if (!isSplit(pr[0], pr[1], B, G, SplitKind::Global))
        fail(ErrorKind::Hypothesis, "hypothesis on the splitting pairs fails: the pair above " + to_text(rho) + " does not split");
    }
  } else {
    std::vector<const TupleSet*> p0, p1;
    for (const auto& rho : A) {
      p0.push_back(&Erho.at(rho)[0]);
      p1.push_back(&Erho.at(rho)[1]);
    }
    TupleSet E0 = unionOf(p0, n), E1 = unionOf(p1, n);
    if (!uniformlyBig({memberOfND(E0), memberOfND(E1)}, A, g3, U))
      fail(ErrorKind::Hypothesis, "hypothesis on the splitting pairs fails: not uniformly " + describe(g3) + "-big above A");
    for (const auto& rho : A)
      if (!isSplit(above(E0, rho), above(E1, rho), B, G, SplitKind::Local))
        fail(ErrorKind::Hypothesis, "hypothesis on the splitting pairs fails: no local splitting above " + to_text(rho));
  }
  const TupleSet E = unionOf(parts, n);
  if (!decideBigND(F, S2, h3, U).big)
    fail(ErrorKind::Hypothesis, "hypothesis on F fails: F is not " + describe(h3) + "-big above " + to_text(sStar));
  for (const auto& x : F) {
    if (B.contains(x)) continue;
    for (const auto& y : E)
      if (!B.contains(y) && G(x).size() <= G(y).size())
        fail(ErrorKind::Hypothesis, "hypothesis on longer values fails: " + to_text(x) + " is not longer than " + to_text(y));
  }

  SplittingCertificate c;
  c.modSet = B;
  c.kind = SplitKind::Global;
  TupleSet Eo, Fo;
  const TupleSet FB = intersectB(F, B), EB = intersectB(E, B);
  auto bigE = [&](const TupleSet& X) { return decideBigND(X, S1, g, U).big; };
  auto bigF = [&](const TupleSet& X) { return decideBigND(X, S2, h, U).big; };
  if (bigF(FB)) {
    c.branch = "F-inside-B";
    Eo = E;
    Fo = FB;
  } else if (bigE(EB)) {
    c.branch = "E-inside-B";
    Eo = EB;
    Fo = F;
  } else {
    // candidates: every prefix of a value of F outside B, longest first
    std::set<Str> cand;
    for (const auto& x : F) {
      if (B.contains(x)) continue;
      const Str& v = G(x);
      for (std::size_t l = 0; l <= v.size(); ++l) cand.insert(Str(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(l)));
    }
    std::vector<Str> order(cand.begin(), cand.end());
    std::sort(order.begin(), order.end(), [](const Str& a, const Str& b) {
      if (a.size() != b.size()) return a.size() > b.size();
      return a < b;
    });
    std::optional<Str> alpha;
    for (const auto& a : order)
      if (bigF(valueSlice(F, B, G, a, Rel::Extends))) {
        alpha = a;
        break;
      }
    if (!alpha) fail(ErrorKind::Internal, "no value prefix keeps F big");
    c.alpha = *alpha;
    TupleSet Eperp = valueSlice(E, B, G, *alpha, Rel::Incomparable);
    if (bigE(valueSlice(E, B, G, *alpha, Rel::PrefixOf))) {
      c.branch = "case-1-below";
      if (!bigE(Eperp)) fail(ErrorKind::Internal, "E off the maximal value is small although E below it is big");
      Eo = Eperp;
      Fo = valueSlice(F, B, G, *alpha, Rel::Extends);
    } else if (bigE(Eperp)) {
      c.branch = "case-1";
      Eo = Eperp;
      Fo = valueSlice(F, B, G, *alpha, Rel::Extends);
    } else {
      c.branch = "case-2";
      Eo = valueSlice(E, B, G, *alpha, Rel::Extends);
      Fo = valueSlice(F, B, G, *alpha, Rel::Incomparable);
      if (!bigE(Eo)) fail(ErrorKind::Internal, "E above the maximal value is small in the second case");
      if (!bigF(Fo)) fail(ErrorKind::Internal, "F off the maximal value is small in the second case");
    }
  }
  BigNDResult we = decideBigND(Eo, S1, g, U), wf = decideBigND(Fo, S2, h, U);
  if (!we.big || !wf.big) fail(ErrorKind::Internal, "the chosen pair lost its bigness");
  c.witnessE = *we.witness;
  c.witnessF = *wf.witness;
  c.E = Eo;
  c.F = Fo;
  if (!isSplit(c.E, c.F, B, G, SplitKind::Global)) fail(ErrorKind::Internal, "the extracted pair does not split");
  return c;
}

// ---- many splittings

namespace {

struct Pairwise {
  const FunctionalTable& G;
  const TupleSet& B;
  std::size_t budget;
  std::vector<std::string>& trace;

  const ForestSystem& U() const { return G.universe(); }

  static std::int64_t pow3(std::size_t e) {
    std::int64_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= 3;
    return r;
  }

  // splitting pairs above every element of A (uniform over the domain when the length exceeds 1)
  SplitFamily family(const TupleSet& A, const BoundVector& g3) {
    const ForestSystem& u = U();
    SplitFamily fam;
    if (u.n == 1) {
      for (const auto& rho : A) {
        auto p = findSingleSplit(G, B, Tuple{}, u, rho, g3, budget);
        if (!p)
          fail(ErrorKind::Truncation, "no " + describe(g3) + "-big splitting above " + to_text(rho) +
                                          " inside the truncated universe");
        fam[rho] = {p->A0, p->A1};
      }
      return fam;
    }
    ForestSystem domU = domSystem(u);
    for (const auto& zeta : chop_set(A)) {
      std::vector<Str> nus;
      for (const auto& rho : A)
        if (chop(rho) == zeta) nus.push_back(rho.last());
      TupleSet Q(u.n - 1);
      std::map<Tuple, std::vector<SinglePair>> found;
      for (const auto& tau : domU.nodes) {
        if (!tuple_le(zeta, tau)) continue;
        ForestSystem FS = lastFiberSystem(u, tau);
        std::vector<SinglePair> ps;
        for (const auto& nu : nus) {
          if (!FS.contains(Tuple::of(nu))) break;
          auto p = findSingleSplit(G, B, tau, FS, Tuple::of(nu), {g3.back()}, budget);
          if (!p) break;
          ps.push_back(std::move(*p));
        }
        if (ps.size() == nus.size()) {
          Q.insert(tau);
          found.emplace(tau, std::move(ps));
        }
      }
      BigNDResult w = decideBigND(Q, TupleSet(u.n - 1, {zeta}), chopBounds(g3), domU);
      if (!w.big)
        fail(ErrorKind::Truncation, "local splittings above " + to_text(zeta) + " are not " +
                                        describe(chopBounds(g3)) + "-big inside the truncated universe");
      for (const auto& tau : leavesND(*w.witness)) {
        const auto& ps = found.at(tau);
        for (std::size_t i = 0; i < nus.size(); ++i) {
          auto& slot = fam[append(zeta, nus[i])];
          if (slot[0].arity() != u.n) slot = {TupleSet(u.n), TupleSet(u.n)};
          for (const auto& x : ps[i].A0) slot[0].insert(append(tau, x[0]));
          for (const auto& x : ps[i].A1) slot[1].insert(append(tau, x[0]));
        }
      }
    }
    return fam;
  }

  std::vector<TupleSet> run(const std::vector<Tuple>& taus, const BoundVector& g) {
    const ForestSystem& u = U();
    const std::size_t k = taus.size();
    if (k == 1) return {TupleSet(u.n, {taus[0]})};
    const BoundVector g3 = scaleBounds(3, g);
    std::vector<Tuple> head(taus.begin(), taus.end() - 1);
    std::vector<TupleSet> A = run(head, g3);
    std::vector<SplitFamily> fams;
    std::size_t maxLen = 0;
    bool anyE = false;
    for (std::size_t j = 0; j + 1 < k; ++j) {
      fams.push_back(family(A[j], g3));
      for (const auto& kv : fams.back())
        for (const auto& side : kv.second)
          for (const auto& x : side)
            if (!B.contains(x)) {
              maxLen = std::max(maxLen, G(x).size());
              anyE = true;
            }
    }
    const Tuple& star = taus.back();
    TupleSet Fc(u.n);
    for (const auto& t : u.nodes)
      if (tuple_le(star, t) && (B.contains(t) || !anyE || G(t).size() > maxLen)) Fc.insert(t);
    const BoundVector gF = scaleBounds(pow3(k - 1), g);
    BigNDResult wf = decideBigND(Fc, TupleSet(u.n, {star}), gF, u);
    if (!wf.big)
      fail(ErrorKind::Truncation, "values above " + to_text(star) + " longer than " + std::to_string(maxLen) +
                                      " are not " + describe(gF) + "-big inside the truncated universe");
    TupleSet F = leavesND(*wf.witness);
    trace.push_back("k=" + std::to_string(k) + ": F above " + to_text(star) + " has " + std::to_string(F.size()) +
                    " leaves with values longer than " + std::to_string(maxLen));
    std::vector<TupleSet> out(k, TupleSet(u.n));
    for (std::size_t j = k - 1; j-- > 0;) {
      SplittingCertificate c =
          extractSplitting(A[j], fams[j], F, B, g, scaleBounds(pow3(j), g), G, taus[j], star);
      trace.push_back("k=" + std::to_string(k) + ", j=" + std::to_string(j + 1) + ": " + c.branch +
                      (c.branch.rfind("case", 0) == 0 ? " at alpha " + to_text(c.alpha) : std::string()));
      // the witness leaves keep the later rounds small
      out[j] = leavesND(c.witnessE);
      F = leavesND(c.witnessF);
    }
    out[k - 1] = F;
    return out;
  }
};

}  // namespace

PairwiseResult findPairwiseSplittings(const std::vector<Tuple>& taus, const TupleSet& B, const FunctionalTable& G,
                                      const BoundVector& g, PairwiseMode mode, std::size_t budget) {
  const ForestSystem& U = G.universe();
  if (taus.empty()) fail(ErrorKind::Precondition, "no strings given");
  if (g.size() != U.n) fail(ErrorKind::Arity, "bound vector length differs from the universe length");
  for (const auto& t : taus)
    if (!U.contains(t)) fail(ErrorKind::Precondition, to_text(t) + " is not in the universe");
  if (!isOpenIn(memberOfND(B), U)) fail(ErrorKind::Precondition, "the set B is not open in the universe");
  if (mode == PairwiseMode::OneD && U.n != 1) fail(ErrorKind::Arity, "1d mode needs a universe of length 1");
  if (mode == PairwiseMode::Local && U.n < 2) fail(ErrorKind::Arity, "local mode needs a universe of length at least 2");

  PairwiseResult res;
  const std::size_t k = taus.size();
  if (k == 1) {
    res.sets.push_back(TupleSet(U.n, {taus[0]}));
    res.trace.push_back("single string: echoed");
    return res;
  }

  if (mode != PairwiseMode::Local) {
    // the largest bound the recursion asks for is 3^(k-1)·g
    std::int64_t e = 1;
    for (std::size_t i = 1; i < k; ++i) e *= 3;
    BoundVector gb = scaleBounds(e, g);
    TupleSet L = leavesND(U);
    for (const auto& t : taus)
      if (!decideBigND(L, TupleSet(U.n, {t}), gb, U).big)
        fail(ErrorKind::Hypothesis, "bound budget " + describe(gb) + " exceeds the bushiness of the universe above " + to_text(t));
    Pairwise P{G, B, budget, res.trace};
    res.sets = P.run(taus, g);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        if (!isSplit(res.sets[i], res.sets[j], B, G, SplitKind::Global))
          fail(ErrorKind::Internal, "sets " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " do not split");
    return res;
  }

  // local: run the one-dimensional recursion in each fiber over the shared domain tuple
  const Tuple sigma = chop(taus[0]);
  for (const auto& t : taus)
    if (chop(t) != sigma) fail(ErrorKind::Precondition, "local mode needs tuples sharing their domain part");
  ForestSystem domU = domSystem(U);
  TupleSet Q(U.n - 1);
  std::map<Tuple, std::vector<TupleSet>> perFiber;
  std::size_t failures = 0;
  for (const auto& tau : domU.nodes) {
    if (!tuple_le(sigma, tau)) continue;
    ForestSystem FS = lastFiberSystem(U, tau);
    std::map<Tuple, Str> vals;
    TupleSet Bf(1);
    for (const auto& x : FS.nodes) {
      vals[x] = G(append(tau, x[0]));
      if (B.contains(append(tau, x[0]))) Bf.insert(x);
    }
    std::vector<Tuple> mus;
    bool ok = true;
    for (const auto& t : taus) {
      mus.push_back(Tuple::of(t.last()));
      if (!FS.contains(mus.back())) ok = false;
    }
    if (!ok) continue;
    try {
      FunctionalTable Gf(FS, vals);
      PairwiseResult r = findPairwiseSplittings(mus, Bf, Gf, {g.back()}, PairwiseMode::OneD, budget);
      Q.insert(tau);
      perFiber.emplace(tau, std::move(r.sets));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Truncation && e.kind() != ErrorKind::Hypothesis) throw;
      ++failures;
    }
  }
  res.trace.push_back("local: " + std::to_string(Q.size()) + " domain tuples carry fiber splittings, " +
                      std::to_string(failures) + " do not");
  BigNDResult w = decideBigND(Q, TupleSet(U.n - 1, {sigma}), chopBounds(g), domU);
  if (!w.big)
    fail(ErrorKind::Truncation, "domain tuples with fiber splittings are not " + describe(chopBounds(g)) +
                                    "-big above " + to_text(sigma));
  res.sets.assign(k, TupleSet(U.n));
  for (const auto& tau : leavesND(*w.witness))
    for (std::size_t j = 0; j < k; ++j)
      for (const auto& x : perFiber.at(tau)[j]) res.sets[j].insert(append(tau, x[0]));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (!isSplit(res.sets[i], res.sets[j], B, G, SplitKind::Local))
        fail(ErrorKind::Internal, "sets " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " do not split locally");
  return res;
}

}  // namespace bushy
