#pragma once

#include <doctest.h>

#include "bushy/forcing.hpp"

namespace test {

inline bushy::Str S(const char* text) { return bushy::parse_str(text); }
inline bushy::Tuple T(const char* text) { return bushy::parse_tuple(text); }
inline bushy::TupleSet set1(std::initializer_list<const char*> strs, bool open = false) {
  bushy::TupleSet r(1, open);
  for (const char* s : strs) r.insert(bushy::Tuple::of(S(s)));
  return r;
}
inline bushy::TupleSet setN(std::size_t n, std::initializer_list<const char*> tuples, bool open = false) {
  bushy::TupleSet r(n, open);
  for (const char* t : tuples) r.insert(T(t));
  return r;
}
inline bushy::StrSet strs(std::initializer_list<const char*> v) {
  bushy::StrSet r;
  for (const char* s : v) r.insert(S(s));
  return r;
}
inline bushy::BoundingFunction C(std::int64_t c) { return bushy::BoundingFunction::constant(c); }

template <class F>
bushy::ErrorKind kindOf(F&& f) {
  try {
    f();
  } catch (const bushy::Error& e) {
    return e.kind();
  }
  return bushy::ErrorKind::Internal;  // nothing thrown; no test expects Internal
}

}  // namespace test
