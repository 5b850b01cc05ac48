#pragma once

// Strings of naturals, tuples of strings and sets of tuples.
//
// Canonical order: strings compare by length first, then lexicographically;
// tuples compare component by component in that order. Every container in the
// library iterates in canonical order so that output is reproducible.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "bushy/error.hpp"

namespace bushy {

using Sym = std::uint32_t;
using Str = std::vector<Sym>;

// length-lexicographic
bool str_less(const Str& a, const Str& b);
struct StrLess {
  bool operator()(const Str& a, const Str& b) const { return str_less(a, b); }
};
using StrSet = std::set<Str, StrLess>;

bool is_prefix(const Str& a, const Str& b);  // a ⪯ b
inline bool comparable(const Str& a, const Str& b) {
  return is_prefix(a, b) || is_prefix(b, a);
}
inline bool incomparable(const Str& a, const Str& b) { return !comparable(a, b); }
Str parent_of(const Str& s);  // drops the last symbol; s must be nonempty
Str extend(const Str& s, Sym x);

struct Tuple {
  std::vector<Str> comps;

  Tuple() = default;
  explicit Tuple(std::vector<Str> c) : comps(std::move(c)) {}
  static Tuple of(const Str& s) { return Tuple({s}); }

  std::size_t arity() const { return comps.size(); }
  const Str& operator[](std::size_t i) const { return comps[i]; }
  const Str& last() const { return comps.back(); }
  // |σ⃗|: the shortest component length
  std::size_t norm() const;
  std::size_t height() const;  // the longest component length

  bool operator==(const Tuple& o) const { return comps == o.comps; }
  bool operator!=(const Tuple& o) const { return comps != o.comps; }
  bool operator<(const Tuple& o) const;
};

using TupleList = std::vector<Tuple>;

// componentwise prefix order; throws on arity mismatch
bool extendsTuple(const Tuple& a, const Tuple& b);
// same, without the arity check (caller guarantees equal arity)
bool tuple_le(const Tuple& a, const Tuple& b);

enum class Side { Lower, Upper };
// τ⃗↾k (lower) or τ⃗↾(k,n] (upper)
Tuple chopRestrict(const Tuple& t, std::size_t k, Side side);
Tuple chop(const Tuple& t);          // τ⃗↾(n−1)
Tuple prefix_k(const Tuple& t, std::size_t k);   // no range checks, k may equal arity
Tuple suffix_k(const Tuple& t, std::size_t k);   // comps k..n-1
Tuple concat(const Tuple& a, const Tuple& b);
Tuple append(const Tuple& a, const Str& s);

class TupleSet {
 public:
  TupleSet() = default;
  explicit TupleSet(std::size_t arity, bool open = false)
      : arity_(arity), open_(open) {}
  TupleSet(std::size_t arity, const TupleList& elems, bool open = false);
  static TupleSet of_strings(const std::vector<Str>& v, bool open = false);

  std::size_t arity() const { return arity_; }
  bool open() const { return open_; }
  const std::set<Tuple>& elements() const { return elems_; }
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }

  void insert(const Tuple& t);
  void erase(const Tuple& t) { elems_.erase(t); }
  bool listed(const Tuple& t) const { return elems_.count(t) != 0; }
  // open: t extends a listed element; closed: t is listed
  bool contains(const Tuple& t) const;
  bool contains(const Str& s) const { return contains(Tuple::of(s)); }

  // the ⪯-minimal listed elements
  TupleSet minimal() const;
  TupleSet as_closed() const;   // same listing, openFlag cleared

  bool operator==(const TupleSet& o) const {
    return arity_ == o.arity_ && open_ == o.open_ && elems_ == o.elems_;
  }
  bool operator!=(const TupleSet& o) const { return !(*this == o); }

  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }

 private:
  std::size_t arity_ = 1;
  bool open_ = false;
  std::set<Tuple> elems_;
};

TupleSet set_union(const TupleSet& a, const TupleSet& b);
TupleSet set_intersection(const TupleSet& a, const TupleSet& b);

bool isPrefixFree(const TupleSet& A);
// prefix-freeness of dom_k A and of every fiber A(τ⃗), for one breaking point k
bool isPrefixFreeAt(const TupleSet& A, std::size_t k);
Tuple predecessorIn(const TupleSet& A, const Tuple& t);

// chop(A) and the fiber A(τ⃗) = {ρ⃗ : (τ⃗,ρ⃗) ∈ A}
TupleSet chop_set(const TupleSet& A);
TupleSet dom_k(const TupleSet& A, std::size_t k);
TupleSet fiber(const TupleSet& A, const Tuple& prefix);
std::vector<Str> strings_of(const TupleSet& A);  // arity 1 only

// text forms: [0,1] and ([0],[1])
std::string to_text(const Str& s);
std::string to_text(const Tuple& t);
std::string to_text(const TupleSet& A);
Str parse_str(const std::string& text);
Tuple parse_tuple(const std::string& text);

}  // namespace bushy
