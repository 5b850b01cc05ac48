#include "bushy/forests.hpp"

#include <algorithm>

namespace bushy {

Forest Forest::point(const Str& s) { return Forest(StrSet{s}, StrSet{s}, -1); }

Forest Forest::closure(const StrSet& base, const std::vector<Str>& strings, std::int64_t depth) {
  Forest f(base, base, depth);
  for (const auto& s : strings) {
    const Str* root = nullptr;
    for (const auto& b : base)
      if (is_prefix(b, s)) {
        root = &b;
        break;
      }
    if (!root) fail(ErrorKind::NotAbove, to_text(s) + " extends no base element");
    for (std::size_t len = root->size(); len <= s.size(); ++len)
      f.nodes.insert(Str(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(len)));
  }
  return f;
}

std::vector<Str> Forest::children(const Str& s) const {
  std::vector<Str> r;
  Str lo = extend(s, 0);
  for (auto it = nodes.lower_bound(lo); it != nodes.end(); ++it) {
    if (it->size() != lo.size() || !is_prefix(s, *it)) break;
    r.push_back(*it);
  }
  return r;
}

std::size_t Forest::child_count(const Str& s) const {
  std::size_t n = 0;
  Str lo = extend(s, 0);
  for (auto it = nodes.lower_bound(lo); it != nodes.end(); ++it) {
    if (it->size() != lo.size() || !is_prefix(s, *it)) break;
    ++n;
  }
  return n;
}

std::size_t Forest::height() const { return nodes.empty() ? 0 : nodes.rbegin()->size(); }

std::vector<std::string> validateForest(const Forest& T) {
  std::vector<std::string> d;
  std::vector<Str> b(T.base.begin(), T.base.end());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (i != j && is_prefix(b[i], b[j]))
        d.push_back("base is not prefix-free: " + to_text(b[i]) + " below " + to_text(b[j]));
  for (const auto& s : T.base)
    if (!T.contains(s)) d.push_back("base element " + to_text(s) + " is not a node");
  for (const auto& s : T.nodes) {
    int above = 0;
    for (const auto& x : T.base)
      if (is_prefix(x, s)) ++above;
    if (above != 1) {
      d.push_back("node " + to_text(s) + " extends " + std::to_string(above) + " base elements");
      continue;
    }
    if (!T.base.count(s) && !T.contains(parent_of(s)))
      d.push_back("node " + to_text(s) + " is missing its parent");
    if (T.depth >= 0 && s.size() > static_cast<std::size_t>(T.depth))
      d.push_back("node " + to_text(s) + " exceeds the depth bound");
  }
  return d;
}

bool isLeaf(const Forest& T, const Str& s) { return T.contains(s) && T.child_count(s) == 0; }

std::vector<Str> leaves(const Forest& T) {
  std::vector<Str> r;
  for (const auto& s : T.nodes)
    if (T.child_count(s) == 0) r.push_back(s);
  return r;
}

bool isBushy(const Forest& T, const BoundingFunction& h, bool exact) {
  for (const auto& s : T.nodes) {
    std::size_t c = T.child_count(s);
    if (c == 0) continue;
    Num need = h.at(static_cast<std::int64_t>(s.size()));
    Num have = Num::of(static_cast<std::int64_t>(c));
    if (exact ? have != need : have < need) return false;
  }
  return true;
}

bool isEndExtension(const Forest& S, const Forest& R) {
  if (S.base != R.base) fail(ErrorKind::BaseMismatch, "end-extension between forests with different bases");
  for (const auto& s : S.nodes)
    if (!R.contains(s)) return false;
  std::vector<Str> lv = leaves(S);
  for (const auto& r : R.nodes) {
    if (S.contains(r)) continue;
    bool ok = false;
    for (const auto& l : lv)
      if (is_prefix(l, r)) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

Forest fullSubforest(const Forest& T, const Str& t) {
  if (!T.contains(t)) fail(ErrorKind::Precondition, to_text(t) + " is not a node of the forest");
  Forest r(StrSet{t}, StrSet{}, T.depth);
  for (auto it = T.nodes.find(t); it != T.nodes.end(); ++it)
    if (is_prefix(t, *it)) r.nodes.insert(*it);
  return r;
}

Forest fullForest(const StrSet& base, Sym branching, std::size_t depthAbove) {
  Forest f(base, {}, -1);
  std::size_t top = 0;
  for (const auto& b : base) {
    std::vector<Str> layer{b};
    f.nodes.insert(b);
    for (std::size_t d = 0; d < depthAbove; ++d) {
      std::vector<Str> next;
      for (const auto& s : layer)
        for (Sym x = 0; x < branching; ++x) next.push_back(extend(s, x));
      f.nodes.insert(next.begin(), next.end());
      layer = std::move(next);
    }
    top = std::max(top, b.size() + depthAbove);
  }
  f.depth = static_cast<std::int64_t>(top);
  return f;
}

Forest fullTree(Sym branching, std::size_t depth) { return fullForest(StrSet{Str{}}, branching, depth); }

TupleSet nodesAsSet(const Forest& T) {
  TupleSet r(1);
  for (const auto& s : T.nodes) r.insert(Tuple::of(s));
  return r;
}

std::string to_text(const Forest& T) {
  std::string r = "forest{base=";
  bool first = true;
  for (const auto& b : T.base) {
    r += (first ? "" : ";") + to_text(b);
    first = false;
  }
  r += " nodes=";
  first = true;
  for (const auto& s : T.nodes) {
    r += (first ? "" : ";") + to_text(s);
    first = false;
  }
  return r + "}";
}

}  // namespace bushy
