#include "bushy/largeness.hpp"

#include <algorithm>

namespace bushy {

StrPred memberOf(const TupleSet& B) {
  if (B.arity() != 1) fail(ErrorKind::Arity, "expected a set of strings");
  return [&B](const Str& s) { return B.contains(s); };
}

static Num need_at(const BoundingFunction& h, const Str& s) {
  return h.at(static_cast<std::int64_t>(s.size()));
}

StrSet goodMarking(const StrPred& inB, const BoundingFunction& h, const Forest& U) {
  StrSet good;
  for (auto it = U.nodes.rbegin(); it != U.nodes.rend(); ++it) {
    const Str& t = *it;
    if (inB(t)) {
      good.insert(t);
      continue;
    }
    std::int64_t n = 0;
    for (const auto& c : U.children(t))
      if (good.count(c)) ++n;
    if (n > 0 && Num::of(n) >= need_at(h, t)) good.insert(t);
  }
  return good;
}

Forest witnessFromMarking(const StrSet& good, const StrPred& inB, const BoundingFunction& h,
                          const Forest& U, const std::vector<Str>& roots) {
  Forest W(StrSet(roots.begin(), roots.end()), {}, -1);
  std::vector<Str> stack(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    Str t = std::move(stack.back());
    stack.pop_back();
    if (!good.count(t)) fail(ErrorKind::Internal, "witness walk reached a bad node " + to_text(t));
    W.nodes.insert(t);
    if (inB(t)) continue;
    Num need = need_at(h, t);
    std::vector<Str> picked;
    for (const auto& c : U.children(t)) {
      if (Num::of(static_cast<std::int64_t>(picked.size())) >= need) break;
      if (good.count(c)) picked.push_back(c);
    }
    if (Num::of(static_cast<std::int64_t>(picked.size())) < need)
      fail(ErrorKind::Internal, "good node " + to_text(t) + " lacks good children");
    for (auto c = picked.rbegin(); c != picked.rend(); ++c) stack.push_back(*c);
  }
  return W;
}

static std::vector<Str> minimal_strings(const std::vector<Str>& A) {
  std::vector<Str> r;
  for (const auto& a : A) {
    bool min = true;
    for (const auto& b : A)
      if (b != a && is_prefix(b, a)) {
        min = false;
        break;
      }
    if (min) r.push_back(a);
  }
  std::sort(r.begin(), r.end(), str_less);
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

BigResult decideBigPred(const StrPred& inB, const std::vector<Str>& A, const BoundingFunction& h,
                        const Forest& U) {
  std::vector<Str> roots = minimal_strings(A);
  for (const auto& a : roots)
    if (!U.contains(a)) fail(ErrorKind::Precondition, to_text(a) + " is not in the universe");
  StrSet all = goodMarking(inB, h, U);
  BigResult r;
  for (const auto& t : all)
    for (const auto& a : roots)
      if (is_prefix(a, t)) {
        r.good.insert(t);
        break;
      }
  for (const auto& a : roots)
    if (!all.count(a)) r.smallAbove.push_back(a);
  r.big = r.smallAbove.empty();
  if (r.big) {
    LargenessWitness w;
    w.forest = witnessFromMarking(all, inB, h, U, roots);
    w.bound = h;
    r.witness = std::move(w);
  }
  return r;
}

BigResult decideBig(const TupleSet& B, const TupleSet& A, const BoundingFunction& h, const Forest& U) {
  if (A.arity() != 1) fail(ErrorKind::Arity, "expected a set of strings above which to decide");
  BigResult r = decideBigPred(memberOf(B), strings_of(A), h, U);
  if (r.witness) r.witness->target = B;
  return r;
}

bool isBig(const TupleSet& B, const Str& s, const BoundingFunction& h, const Forest& U) {
  return decideBigPred(memberOf(B), {s}, h, U).big;
}

std::vector<std::string> checkWitness(const Forest& W, const StrPred& inB, const std::vector<Str>& A,
                                      const BoundingFunction& h, const Forest& U) {
  std::vector<std::string> d = validateForest(W);
  std::vector<Str> roots = minimal_strings(A);
  if (W.base != StrSet(roots.begin(), roots.end())) d.push_back("witness base differs from the minimal elements of A");
  for (const auto& s : W.nodes)
    if (!U.contains(s)) d.push_back("witness node " + to_text(s) + " lies outside the universe");
  if (!isBushy(W, h)) d.push_back("witness is not bushy for " + h.describe());
  for (const auto& l : leaves(W))
    if (!inB(l)) d.push_back("witness leaf " + to_text(l) + " is not in the target");
  return d;
}

const char* side_name(SplitSide s) { return s == SplitSide::B ? "B" : "C"; }

SubsetSplit bigSubsetSplitPred(const StrPred& inB, const StrPred& inC, const Str& s,
                               const BoundingFunction& h, const BoundingFunction& g, const Forest& U) {
  BoundingFunction hg = BoundingFunction::sum(h, g);
  StrPred inBC = [&](const Str& t) { return inB(t) || inC(t); };
  BigResult u = decideBigPred(inBC, {s}, hg, U);
  if (!u.big)
    fail(ErrorKind::Hypothesis, "the union is not (" + hg.describe() + ")-big above " + to_text(s));
  const Forest& T = u.witness->forest;

  // bottom-up labels on the union witness
  StrSet labB;
  std::vector<Str> order(T.nodes.rbegin(), T.nodes.rend());
  for (const auto& t : order) {
    auto kids = T.children(t);
    if (kids.empty()) {
      if (inB(t)) labB.insert(t);
      continue;
    }
    std::int64_t n = 0;
    for (const auto& c : kids)
      if (labB.count(c)) ++n;
    if (Num::of(n) >= need_at(h, t)) labB.insert(t);
  }

  SubsetSplit out;
  out.unionWitness = T;
  out.side = labB.count(s) ? SplitSide::B : SplitSide::C;
  const bool wantB = out.side == SplitSide::B;
  const BoundingFunction& bound = wantB ? h : g;

  Forest W(StrSet{s}, {}, -1);
  std::vector<Str> stack{s};
  while (!stack.empty()) {
    Str t = std::move(stack.back());
    stack.pop_back();
    W.nodes.insert(t);
    auto kids = T.children(t);
    if (kids.empty()) continue;
    Num need = need_at(bound, t);
    std::vector<Str> picked;
    for (const auto& c : kids) {
      if (Num::of(static_cast<std::int64_t>(picked.size())) >= need) break;
      if (labB.count(c) == (wantB ? 1u : 0u)) picked.push_back(c);
    }
    if (Num::of(static_cast<std::int64_t>(picked.size())) < need)
      fail(ErrorKind::Internal, "labelling left " + to_text(t) + " short of children");
    for (auto c = picked.rbegin(); c != picked.rend(); ++c) stack.push_back(*c);
  }
  out.witness.forest = std::move(W);
  out.witness.bound = bound;
  return out;
}

SubsetSplit bigSubsetSplit(const TupleSet& B, const TupleSet& C, const Str& s,
                           const BoundingFunction& h, const BoundingFunction& g, const Forest& U) {
  SubsetSplit r = bigSubsetSplitPred(memberOf(B), memberOf(C), s, h, g, U);
  r.witness.target = r.side == SplitSide::B ? B : C;
  return r;
}

Forest concatExtend(const Forest& S, const TupleSet& C, const BoundingFunction& h, const Forest& U) {
  if (!isBushy(S, h)) fail(ErrorKind::Precondition, "the forest to extend is not " + h.describe() + "-bushy");
  for (const auto& s : S.nodes)
    if (!U.contains(s)) fail(ErrorKind::Precondition, "node " + to_text(s) + " lies outside the universe");
  StrPred inC = memberOf(C);
  StrSet all = goodMarking(inC, h, U);
  Forest R = S;
  for (const auto& l : leaves(S)) {
    if (!all.count(l))
      fail(ErrorKind::NotBig, "target is " + h.describe() + "-small above leaf " + to_text(l));
    Forest ext = witnessFromMarking(all, inC, h, U, {l});
    R.nodes.insert(ext.nodes.begin(), ext.nodes.end());
  }
  return R;
}

TupleSet gClosure(const TupleSet& A, const BoundingFunction& g, const Forest& U) {
  StrSet good = goodMarking(memberOf(A), g, U);
  TupleSet r(1);
  for (const auto& t : good) r.insert(Tuple::of(t));
  return r;
}

}  // namespace bushy
