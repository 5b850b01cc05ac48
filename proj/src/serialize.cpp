#include "bushy/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bushy {

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& msg) {
  fail(ErrorKind::Validation, where + ": " + msg);
}

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema(where, std::string("missing key '") + key + "'");
  return *it;
}

std::int64_t asInt(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) schema(where, "expected an integer");
  return j.get<std::int64_t>();
}

std::string asString(const Json& j, const std::string& where) {
  if (!j.is_string()) schema(where, "expected a string");
  return j.get<std::string>();
}

Json numJson(const Num& x) { return x.huge ? Json("huge") : Json(x.v); }

Num numFromJson(const Json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "huge") return Num::inf();
  return Num::of(asInt(j, where));
}

template <class F>
auto withPath(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Validation) throw;
    schema(where, e.what());
  }
}

}  // namespace

Json toJson(const Str& s) { return to_text(s); }
Json toJson(const Tuple& t) { return to_text(t); }

Json toJson(const TupleSet& A) {
  Json tuples = Json::array();
  for (const auto& t : A) tuples.push_back(to_text(t));
  return Json{{"arity", A.arity()}, {"open", A.open()}, {"tuples", tuples}};
}

Json toJson(const BoundingFunction& f) {
  using K = BoundingFunction::Kind;
  Json j;
  switch (f.kind()) {
    case K::Const: j = {{"kind", "Const"}, {"c", f.param_a()}}; break;
    case K::Pow2: j = {{"kind", "Pow2"}}; break;
    case K::Linear: j = {{"kind", "Linear"}, {"a", f.param_a()}, {"b", f.param_b()}}; break;
    case K::Iterate: j = {{"kind", "Iterate"}, {"base", toJson(f.base())}, {"k", f.param_a()}}; break;
    case K::DiagIter: j = {{"kind", "DiagIter"}, {"base", toJson(f.base())}}; break;
    case K::PiecewiseIterate: {
      Json th = Json::array();
      for (const auto& x : f.thresholds()) th.push_back(numJson(x));
      j = {{"kind", "PiecewiseIterate"}, {"base", toJson(f.base())}, {"thresholds", th}};
      break;
    }
    case K::FiniteTable: j = {{"kind", "FiniteTable"}, {"values", f.values()}, {"tail", toJson(f.base())}}; break;
    case K::Sum: j = {{"kind", "Sum"}, {"a", toJson(f.base())}, {"b", toJson(f.second())}}; break;
    case K::Scale: j = {{"kind", "Scale"}, {"c", f.param_a()}, {"base", toJson(f.base())}}; break;
  }
  if (f.cap() != kDefaultCap) j["cap"] = f.cap();
  return j;
}

Json toJson(const BoundVector& g) {
  Json a = Json::array();
  for (const auto& f : g) a.push_back(toJson(f));
  return a;
}

BoundingFunction boundFromJson(const Json& j) {
  const std::string where = "bound";
  if (j.is_number_integer()) return BoundingFunction::constant(j.get<std::int64_t>());
  if (j.is_string()) {
    if (j.get<std::string>() == "Pow2") return BoundingFunction::pow2();
    schema(where, "unknown bound literal '" + j.get<std::string>() + "'");
  }
  const std::string kind = asString(need(j, "kind", where), where);
  BoundingFunction f;
  if (kind == "Const") f = BoundingFunction::constant(asInt(need(j, "c", where), where));
  else if (kind == "Pow2") f = BoundingFunction::pow2();
  else if (kind == "Linear") f = BoundingFunction::linear(asInt(need(j, "a", where), where), asInt(need(j, "b", where), where));
  else if (kind == "Iterate") f = BoundingFunction::iterate(boundFromJson(need(j, "base", where)), asInt(need(j, "k", where), where));
  else if (kind == "DiagIter") f = BoundingFunction::diag_iter(boundFromJson(need(j, "base", where)));
  else if (kind == "PiecewiseIterate") {
    std::vector<Num> th;
    for (const auto& x : need(j, "thresholds", where)) th.push_back(numFromJson(x, where));
    f = BoundingFunction::piecewise(boundFromJson(need(j, "base", where)), th);
  } else if (kind == "FiniteTable") {
    std::vector<std::int64_t> v;
    for (const auto& x : need(j, "values", where)) v.push_back(asInt(x, where));
    f = BoundingFunction::table(v, boundFromJson(need(j, "tail", where)));
  } else if (kind == "Sum") f = BoundingFunction::sum(boundFromJson(need(j, "a", where)), boundFromJson(need(j, "b", where)));
  else if (kind == "Scale") f = BoundingFunction::scale(asInt(need(j, "c", where), where), boundFromJson(need(j, "base", where)));
  else schema(where, "unknown bound kind '" + kind + "'");
  if (j.contains("cap")) f = f.with_cap(asInt(j["cap"], where));
  return f;
}

Json toJson(const GrowthWitness& w) {
  using K = GrowthWitness::Kind;
  switch (w.kind()) {
    case K::Linear: return {{"kind", "Linear"}, {"a", w.a()}, {"b", w.b()}};
    case K::Table: return {{"kind", "Table"}, {"values", w.values()}};
    case K::SquareIndex: return {{"kind", "SquareIndex"}, {"inner", toJson(w.inner())}};
    case K::Shifted: {
      Json th = Json::array();
      for (const auto& x : w.thresholds()) th.push_back(numJson(x));
      return {{"kind", "Shifted"}, {"thresholds", th}};
    }
  }
  return {};
}

GrowthWitness witnessFromJson(const Json& j) {
  const std::string where = "growth witness";
  const std::string kind = asString(need(j, "kind", where), where);
  if (kind == "Linear") return GrowthWitness::linear(asInt(need(j, "a", where), where), asInt(need(j, "b", where), where));
  if (kind == "Table") {
    std::vector<std::int64_t> v;
    for (const auto& x : need(j, "values", where)) v.push_back(asInt(x, where));
    return GrowthWitness::table(v);
  }
  if (kind == "SquareIndex") return GrowthWitness::square_index(witnessFromJson(need(j, "inner", where)));
  if (kind == "Shifted") {
    std::vector<Num> th;
    for (const auto& x : need(j, "thresholds", where)) th.push_back(numFromJson(x, where));
    return GrowthWitness::shifted(th);
  }
  schema(where, "unknown witness kind '" + kind + "'");
}

Str strFromJson(const Json& j) {
  if (!j.is_string()) schema("string", "expected text such as \"[0,1]\"");
  return parse_str(j.get<std::string>());
}

Tuple tupleFromJson(const Json& j) {
  if (!j.is_string()) schema("tuple", "expected text such as \"([0],[1])\"");
  return parse_tuple(j.get<std::string>());
}

Json toJson(const ForestSystem& T) {
  Json base = Json::array(), nodes = Json::array();
  for (const auto& t : T.base) base.push_back(to_text(t));
  for (const auto& t : T.nodes) nodes.push_back(to_text(t));
  return Json{{"kind", "explicit"}, {"length", T.n}, {"base", base}, {"nodes", nodes}, {"depthBound", T.depthBound}};
}

Json toJson(const Forest& F) { return toJson(fromForest(F)); }

static ForestSystem systemFromJson(const Json& j, const std::string& where) {
  return withPath(where, [&]() -> ForestSystem {
    const std::string kind = asString(need(j, "kind", where), where);
    if (kind == "full") {
      const auto n = asInt(need(j, "length", where), where);
      const auto b = asInt(need(j, "branching", where), where);
      const auto d = asInt(need(j, "depth", where), where);
      if (n < 1 || b < 1 || d < 0) schema(where, "length, branching and depth must be positive");
      if (n == 1) return fromForest(fullTree(static_cast<Sym>(b), d));
      return balancedFullSystem(static_cast<std::size_t>(n), static_cast<Sym>(b), static_cast<std::size_t>(d));
    }
    if (kind == "product") {
      std::vector<Forest> fs;
      for (const auto& f : need(j, "factors", where))
        fs.push_back(fullTree(static_cast<Sym>(asInt(need(f, "branching", where), where)),
                              asInt(need(f, "depth", where), where)));
      if (fs.empty()) schema(where, "a product needs at least one factor");
      return productSystem(fs);
    }
    if (kind == "explicit") {
      const auto n = static_cast<std::size_t>(asInt(need(j, "length", where), where));
      TupleSet base(n), nodes(n);
      for (const auto& t : need(j, "base", where)) base.insert(tupleFromJson(t));
      for (const auto& t : need(j, "nodes", where)) nodes.insert(tupleFromJson(t));
      std::int64_t d = j.contains("depthBound") ? asInt(j["depthBound"], where) : -1;
      return ForestSystem(base, nodes, d);
    }
    schema(where, "unknown universe kind '" + kind + "'");
  });
}

Json toJson(const MockJump& J) {
  Json a = Json::array();
  for (const auto& [key, v] : J.entries)
    a.push_back(Json{{"oracle", to_text(key.first)}, {"index", key.second}, {"value", v}});
  return a;
}

MockJump jumpFromJson(const Json& j) {
  const std::string where = "jump";
  if (!j.is_array()) schema(where, "expected a list of entries");
  MockJump J;
  for (const auto& e : j) {
    Tuple p = tupleFromJson(need(e, "oracle", where));
    J.entries[{p, asInt(need(e, "index", where), where)}] = static_cast<Sym>(asInt(need(e, "value", where), where));
  }
  auto d = J.validate();
  if (!d.empty()) schema(where, d.front());
  return J;
}

Json toJson(const FunctionalTable& G) {
  Json vals = Json::object();
  for (const auto& [t, v] : G.values()) vals[to_text(t)] = to_text(v);
  return Json{{"universe", toJson(G.universe())}, {"values", vals}};
}

Json toJson(const Condition& c) {
  return Json{{"stem", to_text(c.stem)}, {"universe", toJson(c.system)}, {"bad", toJson(c.bad)},
              {"h", toJson(c.h)},         {"b", toJson(c.b)},              {"gg", toJson(c.gg)},
              {"ggK", c.ggK}};
}

// ---- instances

const ForestSystem& Instance::universe(const std::string& name) const {
  auto it = universes.find(name);
  if (it == universes.end()) fail(ErrorKind::Validation, "no universe named '" + name + "'");
  return it->second;
}
const TupleSet& Instance::set(const std::string& name) const {
  auto it = sets.find(name);
  if (it == sets.end()) fail(ErrorKind::Validation, "no set named '" + name + "'");
  return it->second;
}
const FunctionalTable& Instance::functional(const std::string& name) const {
  auto it = functionals.find(name);
  if (it == functionals.end()) fail(ErrorKind::Validation, "no functional named '" + name + "'");
  return it->second;
}
const Condition& Instance::condition(const std::string& name) const {
  auto it = conditions.find(name);
  if (it == conditions.end()) fail(ErrorKind::Validation, "no condition named '" + name + "'");
  return it->second;
}
const MockJump& Instance::jump(const std::string& name) const {
  auto it = jumps.find(name);
  if (it == jumps.end()) fail(ErrorKind::Validation, "no jump named '" + name + "'");
  return it->second;
}
BoundingFunction Instance::bound(const std::string& s) const {
  auto it = bounds.find(s);
  if (it != bounds.end()) return it->second;
  if (s == "Pow2") return BoundingFunction::pow2();
  if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos)
    return BoundingFunction::constant(std::stoll(s));
  fail(ErrorKind::Validation, "no bound named '" + s + "'");
}

namespace {

// fixed-width binary code of each symbol: injective, monotone, and distinct
// strings of equal length get incomparable values
Str binaryCode(const Str& s, const ForestSystem& U) {
  Sym top = 1;
  for (const auto& t : U.nodes)
    for (const auto& c : t.comps)
      for (Sym x : c) top = std::max(top, x);
  std::size_t width = 0;
  while ((Sym{1} << width) <= top) ++width;
  Str r;
  for (Sym x : s)
    for (std::size_t i = width; i-- > 0;) r.push_back(x >> i & 1);
  return r;
}

const ForestSystem& universeRef(const Instance& inst, const Json& j, std::map<std::string, ForestSystem>& inlineStore,
                                const std::string& where) {
  if (j.is_string()) return inst.universe(j.get<std::string>());
  auto& slot = inlineStore[where];
  slot = systemFromJson(j, where);
  return slot;
}

TupleSet generated(const Instance& inst, const Json& j, const std::string& where) {
  const std::string kind = asString(j["kind"], where);
  const ForestSystem& U = inst.universe(asString(need(j, "universe", where), where));
  if (kind == "level") {
    TupleSet L = levelSet(U, static_cast<std::size_t>(asInt(need(j, "level", where), where)));
    return j.value("upward", false) ? upwardIn(L, U) : L;
  }
  if (kind == "bdnc") return bDncSet(inst.jump(asString(need(j, "jump", where), where)), U.n, U);
  if (kind == "leaves") return leavesND(U);
  if (kind == "upward") {
    TupleSet A(U.n);
    for (const auto& t : need(j, "of", where)) A.insert(tupleFromJson(t));
    return upwardIn(A, U);
  }
  schema(where, "unknown set kind '" + kind + "'");
}

TupleSet setFromJson(const Instance& inst, const Json& j, const std::string& where) {
  return withPath(where, [&]() -> TupleSet {
    if (j.is_string()) return inst.set(j.get<std::string>());
    if (j.is_array()) {
      if (j.empty()) schema(where, "an empty list has no length; use the object form");
      TupleSet A(tupleFromJson(j.front()).arity());
      for (const auto& t : j) A.insert(tupleFromJson(t));
      return A;
    }
    if (j.contains("kind")) {
      TupleSet A = generated(inst, j, where);
      if (!j.value("open", false)) return A;
      const TupleSet m = A.minimal();
      return TupleSet(A.arity(), TupleList(m.begin(), m.end()), true);
    }
    const auto n = static_cast<std::size_t>(asInt(need(j, "arity", where), where));
    TupleSet A(n, {}, j.value("open", false));
    for (const auto& t : need(j, "tuples", where)) A.insert(tupleFromJson(t));
    return A;
  });
}

}  // namespace

static std::pair<std::size_t, std::size_t> lineCol(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Instance parseInstance(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    auto [line, col] = lineCol(text, e.byte > 0 ? e.byte - 1 : 0);
    fail(ErrorKind::Parse, "malformed instance at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  if (!j.is_object()) fail(ErrorKind::Parse, "the instance must be a JSON object");
  if (j.contains("version") && j["version"] != kInstanceVersion)
    schema("version", "unsupported version " + j["version"].dump());
  static const std::set<std::string> known{"version",   "universes", "sets",         "bounds",
                                           "witnesses", "jumps",     "functionals", "conditions"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) schema("instance", "unknown section '" + k + "'");

  Instance inst;
  auto section = [&](const char* name) -> const Json& {
    static const Json empty = Json::object();
    auto it = j.find(name);
    if (it == j.end()) return empty;
    if (!it->is_object()) schema(name, "expected an object of named entries");
    return *it;
  };
  for (const auto& [k, v] : section("bounds").items())
    inst.bounds.emplace(k, withPath("bounds." + k, [&] { return boundFromJson(v); }));
  for (const auto& [k, v] : section("witnesses").items())
    inst.witnesses.emplace(k, withPath("witnesses." + k, [&] { return witnessFromJson(v); }));
  for (const auto& [k, v] : section("jumps").items())
    inst.jumps.emplace(k, withPath("jumps." + k, [&] { return jumpFromJson(v); }));
  for (const auto& [k, v] : section("universes").items()) inst.universes.emplace(k, systemFromJson(v, "universes." + k));
  for (const auto& [k, v] : section("sets").items()) inst.sets.emplace(k, setFromJson(inst, v, "sets." + k));
  std::map<std::string, ForestSystem> inlines;
  for (const auto& [k, v] : section("functionals").items()) {
    const std::string where = "functionals." + k;
    const ForestSystem& U = universeRef(inst, need(v, "universe", where), inlines, where);
    std::map<Tuple, Str> vals;
    withPath(where, [&] {
      if (v.contains("rule")) {
        const std::string rule = asString(v["rule"], where);
        for (const auto& t : U.nodes) {
          if (rule == "last") vals[t] = t.last();
          else if (rule == "code") vals[t] = binaryCode(t.last(), U);
          else if (rule == "constant") vals[t] = strFromJson(need(v, "value", where));
          else schema(where, "unknown rule '" + rule + "'");
        }
      } else {
        for (const auto& [tk, tv] : need(v, "values", where).items()) vals[parse_tuple(tk)] = strFromJson(tv);
      }
      return 0;
    });
    inst.functionals.emplace(k, FunctionalTable(U, vals));
  }
  for (const auto& [k, v] : section("conditions").items()) {
    const std::string where = "conditions." + k;
    Condition c;
    c.system = universeRef(inst, need(v, "universe", where), inlines, where);
    withPath(where, [&] {
      c.stem = tupleFromJson(need(v, "stem", where));
      c.bad = v.contains("bad") ? setFromJson(inst, v["bad"], where + ".bad") : TupleSet(c.system.n);
      c.h = v.contains("h") ? (v["h"].is_string() ? inst.bound(v["h"].get<std::string>()) : boundFromJson(v["h"]))
                            : BoundingFunction::constant(2);
      c.b = v.contains("b") ? (v["b"].is_string() ? inst.bound(v["b"].get<std::string>()) : boundFromJson(v["b"]))
                            : BoundingFunction::constant(2);
      if (v.contains("gg")) c.gg = witnessFromJson(v["gg"]);
      if (v.contains("ggK")) c.ggK = asInt(v["ggK"], where);
      return 0;
    });
    inst.conditions.emplace(k, c);
  }
  return inst;
}

Instance loadInstance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Parse, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseInstance(ss.str());
}

Json toJson(const Instance& inst) {
  Json j = Json::object();
  j["version"] = kInstanceVersion;
  auto put = [&](const char* name, const auto& m) {
    Json o = Json::object();
    for (const auto& [k, v] : m) o[k] = toJson(v);
    if (!o.empty()) j[name] = o;
  };
  put("universes", inst.universes);
  put("sets", inst.sets);
  put("bounds", inst.bounds);
  put("witnesses", inst.witnesses);
  put("jumps", inst.jumps);
  put("functionals", inst.functionals);
  put("conditions", inst.conditions);
  return j;
}

std::string canonicalDump(const Json& j) { return j.dump(2) + "\n"; }

std::string hashText(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string instanceHash(const Instance& inst) { return hashText(toJson(inst).dump()); }

}  // namespace bushy
