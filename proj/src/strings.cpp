#include "bushy/strings.hpp"

#include <algorithm>
#include <cctype>

namespace bushy {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Arity: return "arity";
    case ErrorKind::Range: return "range";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Hypothesis: return "hypothesis";
    case ErrorKind::NotAbove: return "not-above";
    case ErrorKind::NotPrefixFree: return "not-prefix-free";
    case ErrorKind::BaseMismatch: return "base-mismatch";
    case ErrorKind::NotBig: return "not-big";
    case ErrorKind::ExistsSplit: return "exists-split";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Limit: return "limit";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

bool str_less(const Str& a, const Str& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool is_prefix(const Str& a, const Str& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

Str parent_of(const Str& s) {
  if (s.empty()) fail(ErrorKind::Internal, "parent of the empty string");
  return Str(s.begin(), s.end() - 1);
}

Str extend(const Str& s, Sym x) {
  Str r = s;
  r.push_back(x);
  return r;
}

std::size_t Tuple::norm() const {
  std::size_t m = comps.empty() ? 0 : comps[0].size();
  for (const auto& c : comps) m = std::min(m, c.size());
  return m;
}

std::size_t Tuple::height() const {
  std::size_t m = 0;
  for (const auto& c : comps) m = std::max(m, c.size());
  return m;
}

bool Tuple::operator<(const Tuple& o) const {
  if (comps.size() != o.comps.size()) return comps.size() < o.comps.size();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (str_less(comps[i], o.comps[i])) return true;
    if (str_less(o.comps[i], comps[i])) return false;
  }
  return false;
}

bool tuple_le(const Tuple& a, const Tuple& b) {
  for (std::size_t i = 0; i < a.comps.size(); ++i)
    if (!is_prefix(a.comps[i], b.comps[i])) return false;
  return true;
}

bool extendsTuple(const Tuple& a, const Tuple& b) {
  if (a.arity() != b.arity())
    fail(ErrorKind::Arity, "arity mismatch: " + to_text(a) + " vs " + to_text(b));
  return tuple_le(a, b);
}

Tuple chopRestrict(const Tuple& t, std::size_t k, Side side) {
  const std::size_t n = t.arity();
  if (side == Side::Lower) {
    if (k < 1 || k >= n)
      fail(ErrorKind::Range, "lower restriction needs 1 <= k < arity, got k=" +
                                 std::to_string(k) + ", arity " + std::to_string(n));
    return prefix_k(t, k);
  }
  if (k >= n)
    fail(ErrorKind::Range, "upper restriction needs 0 <= k < arity, got k=" +
                               std::to_string(k) + ", arity " + std::to_string(n));
  return suffix_k(t, k);
}

Tuple chop(const Tuple& t) { return chopRestrict(t, t.arity() - 1, Side::Lower); }

Tuple prefix_k(const Tuple& t, std::size_t k) {
  return Tuple(std::vector<Str>(t.comps.begin(), t.comps.begin() + k));
}

Tuple suffix_k(const Tuple& t, std::size_t k) {
  return Tuple(std::vector<Str>(t.comps.begin() + k, t.comps.end()));
}

Tuple concat(const Tuple& a, const Tuple& b) {
  Tuple r = a;
  r.comps.insert(r.comps.end(), b.comps.begin(), b.comps.end());
  return r;
}

Tuple append(const Tuple& a, const Str& s) {
  Tuple r = a;
  r.comps.push_back(s);
  return r;
}

TupleSet::TupleSet(std::size_t arity, const TupleList& elems, bool open)
    : arity_(arity), open_(open) {
  for (const auto& t : elems) insert(t);
}

TupleSet TupleSet::of_strings(const std::vector<Str>& v, bool open) {
  TupleSet r(1, open);
  for (const auto& s : v) r.insert(Tuple::of(s));
  return r;
}

void TupleSet::insert(const Tuple& t) {
  if (t.arity() != arity_)
    fail(ErrorKind::Arity, "tuple " + to_text(t) + " does not have arity " +
                               std::to_string(arity_));
  elems_.insert(t);
}

bool TupleSet::contains(const Tuple& t) const {
  if (t.arity() != arity_) return false;
  if (!open_) return elems_.count(t) != 0;
  if (elems_.count(t)) return true;
  for (const auto& e : elems_)
    if (tuple_le(e, t)) return true;
  return false;
}

TupleSet TupleSet::minimal() const {
  TupleSet r(arity_, open_);
  for (const auto& e : elems_) {
    bool min = true;
    for (const auto& f : elems_)
      if (f != e && tuple_le(f, e)) {
        min = false;
        break;
      }
    if (min) r.elems_.insert(e);
  }
  return r;
}

TupleSet TupleSet::as_closed() const {
  TupleSet r = *this;
  r.open_ = false;
  return r;
}

TupleSet set_union(const TupleSet& a, const TupleSet& b) {
  if (a.arity() != b.arity()) fail(ErrorKind::Arity, "union of sets of different arity");
  if (a.open() != b.open())
    fail(ErrorKind::Precondition, "union of an open and a listed set");
  TupleSet r = a;
  for (const auto& t : b) r.insert(t);
  return r;
}

TupleSet set_intersection(const TupleSet& a, const TupleSet& b) {
  if (a.arity() != b.arity())
    fail(ErrorKind::Arity, "intersection of sets of different arity");
  TupleSet r(a.arity());
  for (const auto& t : a)
    if (b.contains(t)) r.insert(t);
  for (const auto& t : b)
    if (a.contains(t)) r.insert(t);
  return r;
}

TupleSet chop_set(const TupleSet& A) { return dom_k(A, A.arity() - 1); }

TupleSet dom_k(const TupleSet& A, std::size_t k) {
  TupleSet r(k);
  for (const auto& t : A) r.insert(prefix_k(t, k));
  return r;
}

TupleSet fiber(const TupleSet& A, const Tuple& pre) {
  const std::size_t k = pre.arity();
  TupleSet r(A.arity() - k);
  for (const auto& t : A)
    if (prefix_k(t, k) == pre) r.insert(suffix_k(t, k));
  return r;
}

std::vector<Str> strings_of(const TupleSet& A) {
  if (A.arity() != 1) fail(ErrorKind::Arity, "expected a set of strings");
  std::vector<Str> r;
  for (const auto& t : A) r.push_back(t[0]);
  return r;
}

static bool strings_prefix_free(const TupleSet& A) {
  std::vector<Str> v = strings_of(A);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (i != j && is_prefix(v[i], v[j])) return false;
  return true;
}

bool isPrefixFree(const TupleSet& A) {
  if (A.arity() == 1) return strings_prefix_free(A);
  TupleSet c = chop_set(A);
  if (!isPrefixFree(c)) return false;
  for (const auto& t : c)
    if (!strings_prefix_free(fiber(A, t))) return false;
  return true;
}

bool isPrefixFreeAt(const TupleSet& A, std::size_t k) {
  if (k < 1 || k >= A.arity())
    fail(ErrorKind::Range, "breaking point out of range");
  TupleSet d = dom_k(A, k);
  if (!isPrefixFree(d)) return false;
  for (const auto& t : d)
    if (!isPrefixFree(fiber(A, t))) return false;
  return true;
}

Tuple predecessorIn(const TupleSet& A, const Tuple& t) {
  if (!isPrefixFree(A)) fail(ErrorKind::NotPrefixFree, "set is not prefix-free");
  const Tuple* found = nullptr;
  for (const auto& a : A) {
    if (a.arity() != t.arity()) fail(ErrorKind::Arity, "arity mismatch");
    if (tuple_le(a, t)) {
      if (found) fail(ErrorKind::Internal, "two predecessors in a prefix-free set");
      found = &a;
    }
  }
  if (!found) fail(ErrorKind::NotAbove, to_text(t) + " is not above any element");
  return *found;
}

std::string to_text(const Str& s) {
  std::string r = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) r += ",";
    r += std::to_string(s[i]);
  }
  return r + "]";
}

std::string to_text(const Tuple& t) {
  std::string r = "(";
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) r += ",";
    r += to_text(t[i]);
  }
  return r + ")";
}

std::string to_text(const TupleSet& A) {
  std::string r = A.open() ? "open{" : "{";
  bool first = true;
  for (const auto& t : A) {
    if (!first) r += ",";
    first = false;
    r += to_text(t);
  }
  return r + "}";
}

namespace {

struct Reader {
  const std::string& s;
  std::size_t i = 0;
  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  [[noreturn]] void bad(const std::string& msg) {
    fail(ErrorKind::Parse, msg + " at column " + std::to_string(i + 1) + " in '" + s + "'");
  }
  void expect(char c) {
    ws();
    if (i >= s.size() || s[i] != c) bad(std::string("expected '") + c + "'");
    ++i;
  }
  bool peek(char c) {
    ws();
    return i < s.size() && s[i] == c;
  }
  Str str() {
    expect('[');
    Str r;
    if (peek(']')) {
      ++i;
      return r;
    }
    for (;;) {
      ws();
      if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) bad("expected a digit");
      std::uint64_t v = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        v = v * 10 + static_cast<unsigned>(s[i] - '0');
        if (v > 0xffffffffull) bad("symbol too large");
        ++i;
      }
      r.push_back(static_cast<Sym>(v));
      if (peek(',')) {
        ++i;
        continue;
      }
      expect(']');
      return r;
    }
  }
  void done() {
    ws();
    if (i != s.size()) bad("trailing characters");
  }
};

}  // namespace

Str parse_str(const std::string& text) {
  Reader r{text};
  Str s = r.str();
  r.done();
  return s;
}

Tuple parse_tuple(const std::string& text) {
  Reader r{text};
  Tuple t;
  r.expect('(');
  if (r.peek(')')) {  // the empty tuple
    ++r.i;
    r.done();
    return t;
  }
  for (;;) {
    t.comps.push_back(r.str());
    if (r.peek(',')) {
      ++r.i;
      continue;
    }
    r.expect(')');
    break;
  }
  r.done();
  return t;
}

}  // namespace bushy
