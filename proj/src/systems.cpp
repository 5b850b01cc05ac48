#include "bushy/systems.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace bushy {

// ---- bound vectors and predicates

BoundVector chopBounds(const BoundVector& g) {
  if (g.size() < 2) fail(ErrorKind::Range, "cannot chop a bound vector of length " + std::to_string(g.size()));
  return BoundVector(g.begin(), g.end() - 1);
}

BoundVector constBounds(std::size_t n, std::int64_t c) {
  return BoundVector(n, BoundingFunction::constant(c));
}

BoundVector sumBounds(const BoundVector& a, const BoundVector& b) {
  if (a.size() != b.size()) fail(ErrorKind::Arity, "bound vectors of different lengths");
  BoundVector r;
  for (std::size_t i = 0; i < a.size(); ++i) r.push_back(BoundingFunction::sum(a[i], b[i]));
  return r;
}

BoundVector scaleBounds(std::int64_t c, const BoundVector& g) {
  BoundVector r;
  for (const auto& f : g) r.push_back(BoundingFunction::scale(c, f));
  return r;
}

std::string describe(const BoundVector& g) {
  std::string r = "(";
  for (std::size_t i = 0; i < g.size(); ++i) r += (i ? "," : "") + g[i].describe();
  return r + ")";
}

TuplePred memberOfND(const TupleSet& B) {
  return [&B](const Tuple& t) { return B.contains(t); };
}

// ---- parallel loop over independent decisions

static std::atomic<unsigned> g_threads{1};
static thread_local bool t_in_worker = false;

void setParallelism(unsigned threads) { g_threads = threads == 0 ? 1 : threads; }
unsigned parallelism() { return g_threads; }

void parallelFor(std::size_t count, const std::function<void(std::size_t)>& f) {
  std::size_t t = std::min<std::size_t>(g_threads.load(), count);
  if (t <= 1 || t_in_worker) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> ws;
  for (std::size_t w = 0; w < t; ++w)
    ws.emplace_back([&] {
      t_in_worker = true;
      for (;;) {
        std::size_t i = next++;
        if (i >= count) break;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& w : ws) w.join();
  if (err) std::rethrow_exception(err);
}

// ---- construction and views

ForestSystem::ForestSystem(TupleSet b, TupleSet nd, std::int64_t depth)
    : n(b.arity()), base(b.as_closed()), nodes(nd.as_closed()), depthBound(depth) {
  if (nodes.arity() != n) fail(ErrorKind::Arity, "system nodes and base differ in arity");
}

ForestSystem fromForest(const Forest& F) {
  TupleSet b(1), nd(1);
  for (const auto& s : F.base) b.insert(Tuple::of(s));
  for (const auto& s : F.nodes) nd.insert(Tuple::of(s));
  return ForestSystem(b, nd, F.depth);
}

Forest toForest(const ForestSystem& T) {
  if (T.n != 1) fail(ErrorKind::Arity, "expected a system of length 1");
  Forest F;
  for (const auto& t : T.base) F.base.insert(t[0]);
  for (const auto& t : T.nodes) F.nodes.insert(t[0]);
  F.depth = T.depthBound;
  return F;
}

ForestSystem domK(const ForestSystem& T, std::size_t k) {
  if (k < 1 || k >= T.n) fail(ErrorKind::Range, "domain restriction needs 1 <= k < length");
  return ForestSystem(dom_k(T.base, k), dom_k(T.nodes, k), T.depthBound);
}

ForestSystem domSystem(const ForestSystem& T) { return domK(T, T.n - 1); }

std::map<Tuple, StrSet> lastFibers(const ForestSystem& T) {
  std::map<Tuple, StrSet> m;
  for (const auto& t : T.nodes) m[prefix_k(t, T.n - 1)].insert(t.last());
  return m;
}

static std::map<Tuple, TupleSet> fibersAt(const ForestSystem& T, std::size_t k) {
  std::map<Tuple, TupleSet> m;
  for (const auto& t : T.nodes) {
    auto it = m.try_emplace(prefix_k(t, k), TupleSet(T.n - k)).first;
    it->second.insert(suffix_k(t, k));
  }
  return m;
}

static const Tuple* predIn(const TupleSet& D, const Tuple& t) {
  for (const auto& d : D)
    if (tuple_le(d, t)) return &d;
  return nullptr;
}

static TupleSet minimalOf(const TupleSet& A) {
  TupleSet m = A.minimal();
  return m.as_closed();
}

static Forest fiberForest(const std::map<Tuple, StrSet>& fibs, const Tuple& tau, const StrSet& roots) {
  auto it = fibs.find(tau);
  return Forest(roots, it == fibs.end() ? StrSet{} : it->second, -1);
}

static StrSet strSetOf(const TupleSet& A) {
  StrSet r;
  for (const auto& t : A) r.insert(t[0]);
  return r;
}

ForestSystem fiberSystem(const ForestSystem& T, const Tuple& prefix) {
  const std::size_t k = prefix.arity();
  if (k < 1 || k >= T.n) fail(ErrorKind::Range, "fiber prefix must be shorter than the system");
  const TupleSet dom = dom_k(T.base, k);
  const Tuple* s = predIn(dom, prefix);
  if (!s) fail(ErrorKind::NotAbove, to_text(prefix) + " is above no base element");
  TupleSet nd(T.n - k);
  for (const auto& t : T.nodes)
    if (prefix_k(t, k) == prefix) nd.insert(suffix_k(t, k));
  return ForestSystem(fiber(T.base, *s), nd, T.depthBound);
}

// ---- validation

static void validateInto(const ForestSystem& T, Diagnostics& d, const std::string& where) {
  auto err = [&](const std::string& m) { d.errors.push_back(where + m); };
  if (!isPrefixFree(T.base)) err("base is not prefix-free");
  for (const auto& b : T.base)
    if (!T.contains(b)) err("base element " + to_text(b) + " is not a node");
  for (const auto& t : T.nodes) {
    int above = 0;
    for (const auto& b : T.base)
      if (tuple_le(b, t)) ++above;
    if (above != 1) err("node " + to_text(t) + " extends " + std::to_string(above) + " base elements");
    if (T.depthBound >= 0 && t.height() > static_cast<std::size_t>(T.depthBound))
      err("node " + to_text(t) + " exceeds the depth bound");
  }
  if (!d.errors.empty()) return;
  if (T.n == 1) {
    for (const auto& m : validateForest(toForest(T))) err(m);
    return;
  }
  ForestSystem D = domSystem(T);
  validateInto(D, d, where + "domain: ");
  TupleSet chopBase = chop_set(T.base);
  auto fibs = lastFibers(T);
  std::map<Tuple, Forest> F;
  for (const auto& tau : D.nodes) {
    const Tuple* s = predIn(chopBase, tau);
    if (!s) {
      err("domain tuple " + to_text(tau) + " is above no base element");
      continue;
    }
    Forest f = fiberForest(fibs, tau, strSetOf(fiber(T.base, *s)));
    for (const auto& m : validateForest(f)) err("fiber over " + to_text(tau) + ": " + m);
    F.emplace(tau, std::move(f));
  }
  if (!d.errors.empty()) return;
  for (const auto& a : D.nodes)
    for (const auto& b : D.nodes) {
      if (a == b || !tuple_le(a, b)) continue;
      if (!isEndExtension(F.at(a), F.at(b)))
        err("fiber over " + to_text(b) + " does not end-extend the fiber over " + to_text(a) + " along " +
            to_text(a) + " < " + to_text(b));
    }
  // coherence at earlier breaking points is reported, not required
  for (std::size_t k = 1; k + 1 < T.n; ++k) {
    ForestSystem Dk = domK(T, k);
    std::size_t pairs = 0;
    for (const auto& a : Dk.nodes)
      for (const auto& b : Dk.nodes) {
        if (a == b || !tuple_le(a, b)) continue;
        if (++pairs > 4096) break;
        ForestSystem fa = fiberSystem(T, a), fb = fiberSystem(T, b);
        bool ok = fa.base == fb.base && isEndExtensionND(fa, fb);
        if (!ok)
          d.info.push_back(where + "breaking point " + std::to_string(k) + ": fiber over " + to_text(b) +
                           " does not end-extend the fiber over " + to_text(a));
      }
  }
}

Diagnostics validateSystem(const ForestSystem& T) {
  Diagnostics d;
  validateInto(T, d, "");
  return d;
}

// ---- structure

TupleSet leavesND(const ForestSystem& T) {
  TupleSet r(T.n);
  if (T.n == 1) {
    for (const auto& s : leaves(toForest(T))) r.insert(Tuple::of(s));
    return r;
  }
  TupleSet dl = leavesND(domSystem(T));
  auto fibs = lastFibers(T);
  for (const auto& tau : dl) {
    Forest f = fiberForest(fibs, tau, {});
    for (const auto& s : leaves(f)) r.insert(append(tau, s));
  }
  return r;
}

bool isBushyND(const ForestSystem& T, const BoundVector& g, bool exact) {
  if (g.size() != T.n) fail(ErrorKind::Arity, "bound vector length differs from the system length");
  if (T.n == 1) return isBushy(toForest(T), g[0], exact);
  ForestSystem D = domSystem(T);
  if (!isBushyND(D, chopBounds(g), exact)) return false;
  auto fibs = lastFibers(T);
  for (const auto& tau : D.nodes)
    if (!isBushy(fiberForest(fibs, tau, {}), g.back(), exact)) return false;
  return true;
}

bool isEndExtensionND(const ForestSystem& S, const ForestSystem& R) {
  if (S.n != R.n) fail(ErrorKind::Arity, "end-extension between systems of different lengths");
  if (S.base != R.base) fail(ErrorKind::BaseMismatch, "end-extension between systems with different bases");
  if (S.n == 1) return isEndExtension(toForest(S), toForest(R));
  ForestSystem dS = domSystem(S), dR = domSystem(R);
  if (!isEndExtensionND(dS, dR)) return false;
  TupleSet dl = leavesND(dS);
  auto fs = lastFibers(S), fr = lastFibers(R);
  TupleSet chopBase = chop_set(S.base);
  for (const auto& tau : dS.nodes) {
    const Tuple* s = predIn(chopBase, tau);
    StrSet roots = s ? strSetOf(fiber(S.base, *s)) : StrSet{};
    Forest a = fiberForest(fs, tau, roots), b = fiberForest(fr, tau, roots);
    if (!dl.listed(tau)) {
      if (a.nodes != b.nodes) return false;
    } else if (!isEndExtension(a, b)) {
      return false;
    }
  }
  return true;
}

ForestSystem fullSubsystem(const ForestSystem& T, const Tuple& s) {
  if (!T.contains(s)) fail(ErrorKind::Precondition, to_text(s) + " is not in the system");
  TupleSet nd(T.n);
  for (const auto& t : T.nodes)
    if (tuple_le(s, t)) nd.insert(t);
  return ForestSystem(TupleSet(T.n, {s}), nd, T.depthBound);
}

TupleSet upwardIn(const TupleSet& A, const ForestSystem& U) {
  TupleSet r(U.n);
  for (const auto& t : U.nodes)
    if (predIn(A, t)) r.insert(t);
  return r;
}

TupleSet levelSet(const ForestSystem& U, std::size_t level) {
  TupleSet r(U.n);
  for (const auto& t : U.nodes) {
    bool ok = true;
    for (const auto& c : t.comps)
      if (c.size() != level) ok = false;
    if (ok) r.insert(t);
  }
  return r;
}

// ---- universes

ForestSystem productSystem(const std::vector<Forest>& factors) {
  if (factors.empty()) fail(ErrorKind::Arity, "a product needs at least one factor");
  std::vector<Tuple> base{Tuple{}}, nodes{Tuple{}};
  std::int64_t depth = -1;
  for (const auto& f : factors) {
    std::vector<Tuple> nb, nn;
    for (const auto& t : base)
      for (const auto& s : f.base) nb.push_back(append(t, s));
    for (const auto& t : nodes)
      for (const auto& s : f.nodes) nn.push_back(append(t, s));
    base = std::move(nb);
    nodes = std::move(nn);
    depth = std::max(depth, f.depth);
  }
  const std::size_t n = factors.size();
  return ForestSystem(TupleSet(n, base), TupleSet(n, nodes), depth);
}

ForestSystem balancedFullSystem(std::size_t n, Sym branching, std::size_t depth) {
  if (n == 0) fail(ErrorKind::Arity, "length must be positive");
  std::vector<std::vector<Str>> byLen(depth + 1);
  byLen[0].push_back(Str{});
  for (std::size_t l = 1; l <= depth; ++l)
    for (const auto& s : byLen[l - 1])
      for (Sym x = 0; x < branching; ++x) byLen[l].push_back(extend(s, x));
  TupleSet nodes(n);
  std::vector<Str> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t maxLen) {
    if (cur.size() == n) {
      nodes.insert(Tuple(cur));
      return;
    }
    for (std::size_t l = 0; l <= maxLen; ++l)
      for (const auto& s : byLen[l]) {
        cur.push_back(s);
        rec(l);
        cur.pop_back();
      }
  };
  rec(depth);
  TupleSet base(n, {Tuple(std::vector<Str>(n, Str{}))});
  return ForestSystem(base, nodes, static_cast<std::int64_t>(depth));
}

// ---- bigness

static BigNDResult decideBigImpl(const TuplePred& inB, const TupleSet& A, const BoundVector& g,
                                 const ForestSystem& U);

// fiber witnesses for the given domain tuples: each τ maps to a witness that B(τ) is big above
// A(τ^{-chop A}) inside U(τ), or nothing
static std::vector<std::optional<Forest>> fiberDecisions(const TuplePred& inB, const TupleSet& Am,
                                                         const TupleSet& D, const BoundingFunction& h,
                                                         const std::map<Tuple, StrSet>& fibs,
                                                         const std::vector<Tuple>& taus) {
  std::vector<std::optional<Forest>> out(taus.size());
  parallelFor(taus.size(), [&](std::size_t i) {
    const Tuple& tau = taus[i];
    const Tuple* s = predIn(D, tau);
    if (!s) return;
    std::vector<Str> roots = strings_of(fiber(Am, *s));
    Forest F = fiberForest(fibs, tau, StrSet(roots.begin(), roots.end()));
    for (const auto& r : roots)
      if (!F.contains(r)) return;
    StrPred p = [&](const Str& x) { return inB(append(tau, x)); };
    BigResult r = decideBigPred(p, roots, h, F);
    if (r.big) out[i] = std::move(r.witness->forest);
  });
  return out;
}

// two-phase assembly: the domain witness first, then fibers
static ForestSystem assemble(const ForestSystem& domW, const TupleSet& Am, const TupleSet& D,
                             const std::map<Tuple, Forest>& leafFibers) {
  TupleSet nodes(Am.arity());
  TupleSet dl = leavesND(domW);
  for (const auto& tau : domW.nodes) {
    if (dl.listed(tau)) {
      for (const auto& s : leafFibers.at(tau).nodes) nodes.insert(append(tau, s));
    } else {
      const Tuple* s = predIn(D, tau);
      for (const auto& m : fiber(Am, *s)) nodes.insert(append(tau, m[0]));
    }
  }
  return ForestSystem(Am, nodes, -1);
}

static BigNDResult decideBigImpl(const TuplePred& inB, const TupleSet& A, const BoundVector& g,
                                 const ForestSystem& U) {
  const std::size_t n = U.n;
  if (g.size() != n) fail(ErrorKind::Arity, "bound vector length differs from the universe length");
  if (A.arity() != n) fail(ErrorKind::Arity, "base set arity differs from the universe length");
  TupleSet Am = minimalOf(A);
  for (const auto& a : Am)
    if (!U.contains(a)) fail(ErrorKind::Precondition, to_text(a) + " is not in the universe");
  BigNDResult res;
  res.smallAbove = TupleSet(n);
  if (n == 1) {
    StrPred p = [&](const Str& s) { return inB(Tuple::of(s)); };
    BigResult r = decideBigPred(p, strings_of(Am), g[0], toForest(U));
    res.big = r.big;
    res.projection = TupleSet(1);
    for (const auto& s : r.smallAbove) res.smallAbove.insert(Tuple::of(s));
    if (r.big) res.witness = fromForest(r.witness->forest);
    return res;
  }
  TupleSet D = chop_set(Am);
  if (!isPrefixFree(D)) fail(ErrorKind::NotPrefixFree, "the domain of the base set is not prefix-free");
  ForestSystem domU = domSystem(U);
  auto fibs = lastFibers(U);
  std::vector<Tuple> taus;
  for (const auto& t : domU.nodes)
    if (predIn(D, t)) taus.push_back(t);
  auto dec = fiberDecisions(inB, Am, D, g.back(), fibs, taus);
  TupleSet P(n - 1);
  std::map<Tuple, Forest> wits;
  for (std::size_t i = 0; i < taus.size(); ++i)
    if (dec[i]) {
      P.insert(taus[i]);
      wits.emplace(taus[i], std::move(*dec[i]));
    }
  BigNDResult sub = decideBigImpl(memberOfND(P), D, chopBounds(g), domU);
  res.projection = P;
  for (const auto& a : Am)
    if (sub.smallAbove.listed(chop(a))) res.smallAbove.insert(a);
  res.big = sub.big;
  if (sub.big) res.witness = assemble(*sub.witness, Am, D, wits);
  return res;
}

BigNDResult decideBigND(const TuplePred& inB, const TupleSet& A, const BoundVector& g, const ForestSystem& U) {
  return decideBigImpl(inB, A, g, U);
}

BigNDResult decideBigND(const TupleSet& B, const TupleSet& A, const BoundVector& g, const ForestSystem& U) {
  if (B.arity() != U.n) fail(ErrorKind::Arity, "target arity differs from the universe length");
  return decideBigImpl(memberOfND(B), A, g, U);
}

bool isBigND(const TuplePred& inB, const Tuple& s, const BoundVector& g, const ForestSystem& U) {
  return decideBigImpl(inB, TupleSet(U.n, {s}), g, U).big;
}

std::vector<std::string> checkWitnessND(const ForestSystem& W, const TuplePred& inB, const TupleSet& A,
                                        const BoundVector& g, const ForestSystem& U) {
  Diagnostics d = validateSystem(W);
  std::vector<std::string> r = d.errors;
  if (W.base != minimalOf(A)) r.push_back("witness base differs from the minimal elements of A");
  for (const auto& t : W.nodes)
    if (!U.contains(t)) r.push_back("witness tuple " + to_text(t) + " lies outside the universe");
  if (!r.empty()) return r;
  if (!isBushyND(W, g)) r.push_back("witness is not " + describe(g) + "-bushy");
  for (const auto& l : leavesND(W))
    if (!inB(l)) r.push_back("witness leaf " + to_text(l) + " is not in the target");
  return r;
}

// ---- projections

TupleSet project(const TuplePred& inB, const TupleSet& A, const BoundVector& h, const ForestSystem& U) {
  const std::size_t n = U.n, m = h.size();
  if (A.arity() != n) fail(ErrorKind::Arity, "base set arity differs from the universe length");
  if (m < 1 || m >= n) fail(ErrorKind::Arity, "projection bounds must cover a proper suffix");
  const std::size_t k = n - m;
  TupleSet Am = minimalOf(A);
  TupleSet D = dom_k(Am, k);
  if (!isPrefixFree(D)) fail(ErrorKind::NotPrefixFree, "the domain of the base set is not prefix-free");
  auto fibs = fibersAt(U, k);
  std::vector<const std::pair<const Tuple, TupleSet>*> items;
  for (const auto& kv : fibs)
    if (predIn(D, kv.first)) items.push_back(&kv);
  std::vector<char> good(items.size(), 0);
  parallelFor(items.size(), [&](std::size_t i) {
    const Tuple& tau = items[i]->first;
    const Tuple* s = predIn(D, tau);
    TupleSet roots = fiber(Am, *s);
    ForestSystem FU(roots, items[i]->second, U.depthBound);
    for (const auto& r : roots)
      if (!FU.contains(r)) return;
    TuplePred p = [&](const Tuple& x) { return inB(concat(tau, x)); };
    good[i] = decideBigImpl(p, roots, h, FU).big;
  });
  TupleSet r(k);
  for (std::size_t i = 0; i < items.size(); ++i)
    if (good[i]) r.insert(items[i]->first);
  return r;
}

TupleSet projectSuffix(const TuplePred& inB, const Tuple& mu, const BoundVector& h, const ForestSystem& U) {
  const std::size_t n = U.n, m = mu.arity();
  if (h.size() != m) fail(ErrorKind::Arity, "bound vector length differs from the suffix length");
  if (m < 1 || m >= n) fail(ErrorKind::Arity, "suffix must be a proper part of the tuple");
  const std::size_t k = n - m;
  auto fibs = fibersAt(U, k);
  std::vector<const std::pair<const Tuple, TupleSet>*> items;
  for (const auto& kv : fibs)
    if (kv.second.listed(mu)) items.push_back(&kv);
  std::vector<char> good(items.size(), 0);
  parallelFor(items.size(), [&](std::size_t i) {
    const Tuple& tau = items[i]->first;
    TupleSet roots(m, {mu});
    ForestSystem FU(roots, items[i]->second, U.depthBound);
    TuplePred p = [&](const Tuple& x) { return inB(concat(tau, x)); };
    good[i] = decideBigImpl(p, roots, h, FU).big;
  });
  TupleSet r(k);
  for (std::size_t i = 0; i < items.size(); ++i)
    if (good[i]) r.insert(items[i]->first);
  return r;
}

// ---- big subsets

SubsetSplitND bigSubsetSplitND(const TuplePred& inB, const TuplePred& inC, const Tuple& s,
                               const BoundVector& g, const BoundVector& g2, const ForestSystem& U) {
  const std::size_t n = U.n;
  if (s.arity() != n || g.size() != n || g2.size() != n) fail(ErrorKind::Arity, "arity mismatch in split");
  SubsetSplitND out;
  if (n == 1) {
    StrPred pb = [&](const Str& x) { return inB(Tuple::of(x)); };
    StrPred pc = [&](const Str& x) { return inC(Tuple::of(x)); };
    SubsetSplit r = bigSubsetSplitPred(pb, pc, s[0], g[0], g2[0], toForest(U));
    out.side = r.side;
    out.witness = fromForest(r.witness.forest);
    return out;
  }
  BoundVector sum = sumBounds(g, g2);
  TuplePred inBC = [&](const Tuple& t) { return inB(t) || inC(t); };
  if (!isBigND(inBC, s, sum, U))
    fail(ErrorKind::Hypothesis, "the union is not " + describe(sum) + "-big above " + to_text(s));
  Tuple mu = Tuple::of(s.last());
  TupleSet PB = projectSuffix(inB, mu, {g.back()}, U);
  TupleSet PC = projectSuffix(inC, mu, {g2.back()}, U);
  ForestSystem domU = domSystem(U);
  SubsetSplitND sub = bigSubsetSplitND(memberOfND(PB), memberOfND(PC), chop(s), chopBounds(g),
                                       chopBounds(g2), domU);
  out.side = sub.side;
  const bool b = sub.side == SplitSide::B;
  const TuplePred& side = b ? inB : inC;
  const BoundingFunction& h = b ? g.back() : g2.back();
  TupleSet dl = leavesND(sub.witness);
  std::vector<Tuple> taus(dl.begin(), dl.end());
  TupleSet Am(n, {s});
  TupleSet D = chop_set(Am);
  auto dec = fiberDecisions(side, Am, D, h, lastFibers(U), taus);
  std::map<Tuple, Forest> wits;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!dec[i]) fail(ErrorKind::Internal, "projection member " + to_text(taus[i]) + " lost its fiber witness");
    wits.emplace(taus[i], std::move(*dec[i]));
  }
  out.witness = assemble(sub.witness, Am, D, wits);
  return out;
}

SubsetSplitND bigSubsetSplitND(const TupleSet& B, const TupleSet& C, const Tuple& s, const BoundVector& g,
                               const BoundVector& g2, const ForestSystem& U) {
  return bigSubsetSplitND(memberOfND(B), memberOfND(C), s, g, g2, U);
}

SubsetSplitND bigSubsetSplitND(const TupleSet& B, const TupleSet& C, const TupleSet& A, const BoundVector& g,
                               const BoundVector& g2, const ForestSystem& U) {
  if (A.size() != 1)
    fail(ErrorKind::Precondition, "splitting works above a single tuple, got " + std::to_string(A.size()));
  return bigSubsetSplitND(B, C, *A.begin(), g, g2, U);
}

// ---- concatenation

ForestSystem concatSystems(const ForestSystem& S, const ForestSystem& R) {
  if (S.n != R.n) fail(ErrorKind::Arity, "concatenating systems of different lengths");
  TupleSet L = leavesND(S);
  if (R.base != L) fail(ErrorKind::BaseMismatch, "the second system is not above the leaves of the first");
  // a truncation only when both parts are
  const std::int64_t depth = S.depthBound < 0 || R.depthBound < 0 ? -1 : std::max(S.depthBound, R.depthBound);
  if (S.n == 1) {
    TupleSet nd = S.nodes;
    for (const auto& t : R.nodes) nd.insert(t);
    return ForestSystem(S.base, nd, depth);
  }
  ForestSystem dS = domSystem(S), dR = domSystem(R);
  TupleSet chopL = chop_set(L);
  auto fs = lastFibers(S), fr = lastFibers(R);
  TupleSet nd(S.n);
  for (const auto& tau : dS.nodes) {
    if (chopL.listed(tau)) continue;
    for (const auto& x : fs[tau]) nd.insert(append(tau, x));
  }
  for (const auto& tau : dR.nodes) {
    const Tuple* s = predIn(chopL, tau);
    if (!s) fail(ErrorKind::Internal, "domain tuple " + to_text(tau) + " is above no leaf");
    for (const auto& x : fs[*s]) nd.insert(append(tau, x));
    for (const auto& x : fr[tau]) nd.insert(append(tau, x));
  }
  return ForestSystem(S.base, nd, depth);
}

bool isOpenIn(const TuplePred& inC, const ForestSystem& U) {
  for (const auto& u : U.nodes) {
    if (inC(u)) continue;
    // any proper prefix-tuple of u that is a U-member of C breaks openness
    std::vector<std::size_t> len(u.arity(), 0);
    for (;;) {
      std::vector<Str> comps;
      bool same = true;
      for (std::size_t i = 0; i < u.arity(); ++i) {
        comps.emplace_back(u[i].begin(), u[i].begin() + static_cast<std::ptrdiff_t>(len[i]));
        if (len[i] != u[i].size()) same = false;
      }
      Tuple p(comps);
      if (!same && U.contains(p) && inC(p)) return false;
      std::size_t i = 0;
      while (i < u.arity() && len[i] == u[i].size()) len[i++] = 0;
      if (i == u.arity()) break;
      ++len[i];
    }
  }
  return true;
}

ForestSystem weakConcatExtend(const ForestSystem& S, const TuplePred& inC, const BoundVector& g,
                              const ForestSystem& U) {
  for (const auto& t : S.nodes)
    if (!U.contains(t)) fail(ErrorKind::Precondition, "tuple " + to_text(t) + " lies outside the universe");
  if (!isOpenIn(inC, U)) fail(ErrorKind::Precondition, "the target set is not open in the universe");
  TupleSet L = leavesND(S);
  BigNDResult r = decideBigND(inC, L, g, U);
  if (r.big) return concatSystems(S, *r.witness);
  for (const auto& t : upwardIn(L, U))
    if (!isBigND(inC, t, g, U))
      fail(ErrorKind::NotBig, "target is " + describe(g) + "-small above " + to_text(t));
  fail(ErrorKind::Internal, "extension failed although the target is big above every tuple above the leaves");
}

ForestSystem weakConcatExtend(const ForestSystem& S, const TupleSet& C, const BoundVector& g,
                              const ForestSystem& U) {
  return weakConcatExtend(S, memberOfND(C), g, U);
}

// ---- balanced levels and small rectangles

static std::int64_t depthOf(const ForestSystem& T) {
  if (T.depthBound >= 0) return T.depthBound;
  std::size_t h = 0;
  for (const auto& t : T.nodes) h = std::max(h, t.height());
  return static_cast<std::int64_t>(h);
}

std::vector<std::int64_t> balancedLevels(const ForestSystem& T) {
  const std::int64_t depth = depthOf(T);
  std::vector<std::int64_t> r;
  if (T.n == 1) {
    for (std::int64_t m = 0; m <= depth; ++m) r.push_back(m);
    return r;
  }
  auto fibs = fibersAt(T, 1);
  std::vector<char> bad(static_cast<std::size_t>(depth + 1), 0);
  for (const auto& [tau, F] : fibs) {
    const std::size_t m = tau[0].size();
    if (m > static_cast<std::size_t>(depth)) continue;
    ForestSystem FS(minimalOf(F), F, -1);
    for (const auto& l : leavesND(FS))
      for (const auto& c : l.comps)
        if (c.size() != m) bad[m] = 1;
  }
  for (std::int64_t m = 0; m <= depth; ++m)
    if (!bad[static_cast<std::size_t>(m)]) r.push_back(m);
  return r;
}

Tuple findSmallRectangle(const ForestSystem& T, const TuplePred& inB, const BoundVector& b, std::int64_t m) {
  if (!isOpenIn(inB, T)) fail(ErrorKind::Precondition, "the set is not open in the system");
  if (decideBigND(inB, T.base, b, T).big)
    fail(ErrorKind::Precondition, "the set is " + describe(b) + "-big above the base");
  std::optional<std::int64_t> level;
  for (auto l : balancedLevels(T))
    if (l >= m) {
      level = l;
      break;
    }
  if (!level) fail(ErrorKind::Truncation, "no balanced level >= " + std::to_string(m) + " within the depth bound");
  for (const auto& t : levelSet(T, static_cast<std::size_t>(*level)))
    if (!isBigND(inB, t, b, T)) return t;
  for (const auto& t : T.nodes)
    if (static_cast<std::int64_t>(t.norm()) >= m && !isBigND(inB, t, b, T)) return t;
  fail(ErrorKind::Truncation, "no tuple with components of length >= " + std::to_string(m) +
                                  " carries a small cone inside the truncation");
}

// ---- uniform bigness

TupleSet uniformProjection(const std::vector<TuplePred>& sets, const TupleSet& A, const BoundVector& g,
                           const ForestSystem& U) {
  if (U.n < 2) fail(ErrorKind::Range, "uniform projection needs length at least 2");
  TupleSet P(U.n - 1);
  bool first = true;
  for (const auto& E : sets) {
    TupleSet Q = project(E, A, {g.back()}, U);
    if (first) {
      P = Q;
      first = false;
    } else {
      P = set_intersection(P, Q);
    }
  }
  if (first) P = domSystem(U).nodes;
  return P;
}

bool uniformlyBig(const std::vector<TuplePred>& sets, const TupleSet& A, const BoundVector& g,
                  const ForestSystem& U) {
  if (U.n == 1) {
    for (const auto& E : sets)
      if (!decideBigND(E, A, g, U).big) return false;
    return true;
  }
  TupleSet P = uniformProjection(sets, A, g, U);
  return decideBigND(P, chop_set(minimalOf(A)), chopBounds(g), domSystem(U)).big;
}

std::string to_text(const ForestSystem& T) {
  return "system{n=" + std::to_string(T.n) + " base=" + to_text(T.base) + " nodes=" + to_text(T.nodes) + "}";
}

}  // namespace bushy
