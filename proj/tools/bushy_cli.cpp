// Batch frontend: one subcommand per operation, canonical JSON on output.
// Exit status: 0 positive, 1 negative (small, no split, failed hypothesis), 2 usage or input error.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bushy/oracle.hpp"

using namespace bushy;

namespace {

struct Common {
  std::string instance;
  std::string out;
  std::string trace;
  std::int64_t cap = 0;
  unsigned threads = 0;
};

std::int64_t envInt(const char* name, std::int64_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != std::string(v).size() || x < 0) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(ErrorKind::Validation, std::string("environment variable ") + name + " is not a non-negative integer");
  }
}

// a whole run: the loaded instance plus output plumbing
class Run {
 public:
  explicit Run(const Common& c) : c_(c) {
    cap_ = c.cap > 0 ? c.cap : envInt("BUSHY_ARITH_CAP", 0);
    const auto t = c.threads > 0 ? c.threads : static_cast<unsigned>(envInt("BUSHY_THREADS", 1));
    setParallelism(t);
    if (!c.instance.empty()) {
      inst_ = loadInstance(c.instance);
      hash_ = instanceHash(inst_);
    }
  }

  const Instance& inst() const {
    if (c_.instance.empty()) fail(ErrorKind::Validation, "this command needs --instance");
    return inst_;
  }

  BoundingFunction bound(const std::string& s) const {
    BoundingFunction f = c_.instance.empty() ? Instance{}.bound(s) : inst_.bound(s);
    return cap_ > 0 ? f.with_cap(cap_) : f;
  }

  // comma-separated bounds; empty means Const(2) in every coordinate
  BoundVector bounds(const std::string& list, std::size_t n) const {
    if (list.empty()) return constBounds(n, 2);
    BoundVector g;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) g.push_back(bound(item));
    if (g.size() != n)
      fail(ErrorKind::Arity, "expected " + std::to_string(n) + " bounds, got " + std::to_string(g.size()));
    return g;
  }

  const ForestSystem& universe(const std::string& name) const {
    if (!name.empty()) return inst().universe(name);
    if (inst().universes.size() != 1) fail(ErrorKind::Validation, "several universes; choose one with --universe");
    return inst().universes.begin()->second;
  }

  // a named set, or a tuple literal standing for the one-element set
  TupleSet setOrTuple(const std::string& text, std::size_t n) const {
    if (!text.empty() && text.front() == '(') {
      Tuple t = parse_tuple(text);
      if (t.arity() != n) fail(ErrorKind::Arity, "tuple " + text + " has the wrong length");
      return TupleSet(n, {t});
    }
    const TupleSet& A = inst().set(text);
    if (A.arity() != n) fail(ErrorKind::Arity, "set " + text + " has the wrong arity");
    return A;
  }

  Tuple tuple(const std::string& text, std::size_t n) const {
    TupleSet A = setOrTuple(text, n);
    if (A.size() != 1) fail(ErrorKind::Validation, text + " must name exactly one tuple");
    return *A.begin();
  }

  const FunctionalTable& functional(const std::string& name) const {
    if (!name.empty()) return inst().functional(name);
    if (inst().functionals.size() != 1) fail(ErrorKind::Validation, "several functionals; choose one with --functional");
    return inst().functionals.begin()->second;
  }

  Condition condition(const std::string& name) const {
    Condition p = inst().condition(name);
    if (cap_ > 0) {
      p.h = p.h.with_cap(cap_);
      p.b = p.b.with_cap(cap_);
    }
    return p;
  }

  MockJump jump(const std::string& name) const { return name.empty() ? MockJump{} : inst().jump(name); }

  GrowthWitness witness(const std::string& name) const {
    if (name.empty()) return {};
    auto it = inst().witnesses.find(name);
    if (it == inst().witnesses.end()) fail(ErrorKind::Validation, "no growth witness named '" + name + "'");
    return it->second;
  }

  void trace(const Json& record) {
    if (c_.trace.empty()) return;
    if (!traceFile_.is_open()) traceFile_.open(c_.trace, std::ios::binary);
    traceFile_ << record.dump() << "\n";
  }

  int emit(const std::string& command, const Json& result, bool positive) {
    Json doc{{"command", command}, {"positive", positive}, {"result", result}};
    doc["instanceHash"] = hash_.empty() ? Json(nullptr) : Json(hash_);
    const std::string text = canonicalDump(doc);
    if (c_.out.empty() || c_.out == "-") {
      std::cout << text;
    } else {
      std::ofstream f(c_.out, std::ios::binary);
      f << text;
      if (!f) fail(ErrorKind::Validation, "cannot write " + c_.out);
    }
    return positive ? 0 : 1;
  }

 private:
  const Common& c_;
  Instance inst_;
  std::string hash_;
  std::int64_t cap_ = 0;
  std::ofstream traceFile_;
};

Json diagnosticsJson(const Diagnostics& d) { return Json{{"errors", d.errors}, {"info", d.info}, {"ok", d.ok()}}; }

Json roundsJson(const std::vector<BuildRound>& rounds) {
  Json a = Json::array();
  for (const auto& r : rounds)
    a.push_back(Json{{"round", r.round}, {"level", r.level}, {"leaves", r.leaves}, {"method", r.method}, {"notes", r.notes}});
  return a;
}

PairwiseMode modeOf(const std::string& m) {
  if (m == "1d") return PairwiseMode::OneD;
  if (m == "local") return PairwiseMode::Local;
  if (m == "global") return PairwiseMode::Global;
  fail(ErrorKind::Validation, "mode must be 1d, local or global");
}

int exitFor(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotBig:
    case ErrorKind::ExistsSplit:
    case ErrorKind::Hypothesis:
    case ErrorKind::Truncation:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact bigness, splitting and forcing-condition computations on finite tree systems"};
  app.require_subcommand(1);
  Common common;
  auto addCommon = [&](CLI::App* s, bool needsInstance = true) {
    auto* o = s->add_option("-i,--instance", common.instance, "instance document");
    if (needsInstance) o->required();
    s->add_option("-o,--out", common.out, "write the result here instead of standard output");
    s->add_option("--trace", common.trace, "line-delimited trace records");
    s->add_option("--cap", common.cap, "arithmetic cap for bounds (env BUSHY_ARITH_CAP)");
    s->add_option("--threads", common.threads, "worker threads (env BUSHY_THREADS)");
  };

  std::function<int(Run&)> action;
  std::string U, setB, setC, above, boundsArg, bounds2Arg, boundArg, functionalArg, condArg, jumpArg, witnessArg,
      modeArg = "1d", muArg, tauArg, sStarArg, familyArg = "E", fArg, setsArg, lemmaArg, budgetArg = "100",
      persistArg;
  std::int64_t toLevel = -1;
  std::size_t rounds = 1, searchBudget = 200000;
  std::uint64_t seed = 1;

  auto* s = app.add_subcommand("check-big", "decide whether a set is big above another and print a witness");
  addCommon(s);
  s->add_option("--universe", U);
  s->add_option("--set", setB, "target set")->required();
  s->add_option("--above", above, "base set or tuple literal")->required();
  s->add_option("--bounds", boundsArg, "comma-separated bounds, one per coordinate");
  s->callback([&] {
    action = [&](Run& r) {
      const ForestSystem& T = r.universe(U);
      BigNDResult res = decideBigND(r.setOrTuple(setB, T.n), r.setOrTuple(above, T.n), r.bounds(boundsArg, T.n), T);
      Json j{{"big", res.big}, {"smallAbove", toJson(res.smallAbove)}};
      if (res.witness) j["witness"] = toJson(*res.witness);
      return r.emit("check-big", j, res.big);
    };
  });

  s = app.add_subcommand("split", "given B ∪ C big for the summed bounds, find the big side");
  addCommon(s);
  s->add_option("--universe", U);
  s->add_option("--B", setB)->required();
  s->add_option("--C", setC)->required();
  s->add_option("--at", above, "tuple literal or one-element set")->required();
  s->add_option("--bounds", boundsArg, "bounds for B");
  s->add_option("--bounds2", bounds2Arg, "bounds for C");
  s->callback([&] {
    action = [&](Run& r) {
      const ForestSystem& T = r.universe(U);
      SubsetSplitND sp = bigSubsetSplitND(r.setOrTuple(setB, T.n), r.setOrTuple(setC, T.n), r.tuple(above, T.n),
                                          r.bounds(boundsArg, T.n), r.bounds(bounds2Arg, T.n), T);
      return r.emit("split", Json{{"side", side_name(sp.side)}, {"witness", toJson(sp.witness)}}, true);
    };
  });

  s = app.add_subcommand("concat", "extend a witness for one set so its leaves land in another");
  addCommon(s);
  s->add_option("--universe", U);
  s->add_option("--set", setB, "set witnessed first")->required();
  s->add_option("--above", above)->required();
  s->add_option("--target", setC, "set the leaves must reach")->required();
  s->add_option("--bounds", boundsArg);
  s->callback([&] {
    action = [&](Run& r) {
      const ForestSystem& T = r.universe(U);
      const BoundVector g = r.bounds(boundsArg, T.n);
      const TupleSet C = r.setOrTuple(setC, T.n);
      BigNDResult first = decideBigND(r.setOrTuple(setB, T.n), r.setOrTuple(above, T.n), g, T);
      if (!first.big) fail(ErrorKind::NotBig, setB + " is small above " + above);
      ForestSystem out;
      std::string how;
      if (T.n == 1) {
        out = fromForest(concatExtend(toForest(*first.witness), C, g[0], toForest(T)));
        how = "concatenation";
      } else {
        out = weakConcatExtend(*first.witness, C, g, T);
        how = "weak concatenation";
      }
      return r.emit("concat", Json{{"method", how}, {"first", toJson(*first.witness)}, {"witness", toJson(out)}}, true);
    };
  });

  s = app.add_subcommand("project", "project a set over a suffix of coordinates");
  addCommon(s);
  s->add_option("--universe", U);
  s->add_option("--set", setB)->required();
  s->add_option("--above", above)->required();
  s->add_option("--bounds", boundsArg, "bounds for the projected suffix")->required();
  s->callback([&] {
    action = [&](Run& r) {
      const ForestSystem& T = r.universe(U);
      const std::size_t m = static_cast<std::size_t>(std::count(boundsArg.begin(), boundsArg.end(), ',') + 1);
      const TupleSet B = r.setOrTuple(setB, T.n);
      TupleSet P = project(memberOfND(B), r.setOrTuple(above, T.n), r.bounds(boundsArg, m), T);
      return r.emit("project", Json{{"projection", toJson(P)}}, true);
    };
  });

  s = app.add_subcommand("closure", "every node above which a set of strings is big");
  addCommon(s);
  s->add_option("--universe", U);
  s->add_option("--set", setB)->required();
  s->add_option("--bound", boundArg, "bound (default 2)");
  s->callback([&] {
    action = [&](Run& r) {
      const ForestSystem& T = r.universe(U);
      if (T.n != 1) fail(ErrorKind::Arity, "closure is defined for strings only");
      TupleSet Cl = gClosure(r.setOrTuple(setB, 1), r.bound(boundArg.empty() ? "2" : boundArg), toForest(T));
      return r.emit("closure", Json{{"closure", toJson(Cl)}}, true);
    };
  });

  s = app.add_subcommand("theta", "the longest value prefix whose fiber part is big above a string");
  addCommon(s);
  s->add_option("--functional", functionalArg);
  s->add_option("--mod", setB, "set split modulo")->required();
  s->add_option("--mu", muArg, "string literal")->required();
  s->add_option("--tau", tauArg, "domain tuple literal")->required();
  s->add_option("--bound", boundArg);
  s->callback([&] {
    action = [&](Run& r) {
      const FunctionalTable& G = r.functional(functionalArg);
      const std::size_t n = G.universe().n;
      Str a = computeTheta(G, r.setOrTuple(setB, n), parse_str(muArg), r.bound(boundArg.empty() ? "2" : boundArg),
                           parse_tuple(tauArg));
      return r.emit("theta", Json{{"theta", toJson(a)}}, true);
    };
  });

  s = app.add_subcommand("extract-splitting", "the splitting pair built from the extraction hypotheses");
  addCommon(s);
  s->add_option("--functional", functionalArg);
  s->add_option("--A", above, "set of pair roots")->required();
  s->add_option("--F", fArg, "set of longer-valued tuples")->required();
  s->add_option("--mod", setB, "set split modulo")->required();
  s->add_option("--s", tauArg, "tuple below A")->required();
  s->add_option("--sstar", sStarArg, "tuple below F")->required();
  s->add_option("--family", familyArg, "pair sets are named <family>0<root> and <family>1<root>");
  s->add_option("--bounds", boundsArg);
  s->add_option("--bounds2", bounds2Arg, "bounds for F");
  s->callback([&] {
    action = [&](Run& r) {
      const FunctionalTable& G = r.functional(functionalArg);
      const std::size_t n = G.universe().n;
      const TupleSet A = r.setOrTuple(above, n);
      SplitFamily fam;
      for (const auto& rho : A)
        fam[rho] = {r.inst().set(familyArg + "0" + to_text(rho)), r.inst().set(familyArg + "1" + to_text(rho))};
      SplittingCertificate c = extractSplitting(A, fam, r.setOrTuple(fArg, n), r.setOrTuple(setB, n),
                                                r.bounds(boundsArg, n), r.bounds(bounds2Arg, n), G,
                                                r.tuple(tauArg, n), r.tuple(sStarArg, n));
      Json j{{"branch", c.branch}, {"alpha", toJson(c.alpha)}, {"kind", split_kind_name(c.kind)},
             {"E", toJson(c.E)},   {"F", toJson(c.F)},          {"mod", toJson(c.modSet)},
             {"witnessE", toJson(c.witnessE)}, {"witnessF", toJson(c.witnessF)}};
      return r.emit("extract-splitting", j, true);
    };
  });

  s = app.add_subcommand("find-splittings", "big sets above each listed tuple that pairwise split");
  addCommon(s);
  s->add_option("--functional", functionalArg);
  s->add_option("--taus", above, "set whose tuples get one split set each")->required();
  s->add_option("--mod", setB)->required();
  s->add_option("--bounds", boundsArg);
  s->add_option("--mode", modeArg, "1d, local or global");
  s->add_option("--search-budget", searchBudget, "node budget of each single-split search");
  s->callback([&] {
    action = [&](Run& r) {
      const FunctionalTable& G = r.functional(functionalArg);
      const std::size_t n = G.universe().n;
      const TupleSet taus = r.setOrTuple(above, n);
      PairwiseResult res = findPairwiseSplittings(std::vector<Tuple>(taus.begin(), taus.end()), r.setOrTuple(setB, n),
                                                  G, r.bounds(boundsArg, n), modeOf(modeArg), searchBudget);
      for (const auto& line : res.trace) r.trace(Json{{"command", "find-splittings"}, {"step", line}});
      Json sets = Json::array();
      for (const auto& A : res.sets) sets.push_back(toJson(A));
      return r.emit("find-splittings", Json{{"sets", sets}, {"trace", res.trace}}, true);
    };
  });

  s = app.add_subcommand("validate-condition", "check the condition clauses at the truncation");
  addCommon(s);
  s->add_option("--condition", condArg)->required();
  s->add_option("--jump", jumpArg);
  s->callback([&] {
    action = [&](Run& r) {
      Diagnostics d = validateCondition(r.condition(condArg), r.jump(jumpArg));
      return r.emit("validate-condition", diagnosticsJson(d), d.ok());
    };
  });

  s = app.add_subcommand("extend", "extend a condition to a rectangle above a level");
  addCommon(s);
  s->add_option("--condition", condArg)->required();
  s->add_option("--to", toLevel, "least component length")->required();
  s->callback([&] {
    action = [&](Run& r) {
      const Condition p = r.condition(condArg);
      Condition q = extendToRectangle(p, toLevel);
      return r.emit("extend", Json{{"condition", toJson(q)}, {"extends", diagnosticsJson(extendsCondition(q, p))}}, true);
    };
  });

  s = app.add_subcommand("sigma1", "decide bigness of B ∪ C above a tuple, or extend to avoid C");
  addCommon(s);
  s->add_option("--condition", condArg)->required();
  s->add_option("--set", setC)->required();
  s->add_option("--at", above)->required();
  s->add_option("--bound", boundArg);
  s->add_option("--witness", witnessArg, "growth witness for the bound");
  s->callback([&] {
    action = [&](Run& r) {
      const Condition p = r.condition(condArg);
      Sigma1Result res = sigma1Decide(p, r.setOrTuple(setC, p.n()), r.tuple(above, p.n()),
                                      r.bound(boundArg.empty() ? "2" : boundArg), r.witness(witnessArg));
      Json j{{"big", res.big}};
      if (res.witness) j["witness"] = toJson(*res.witness);
      if (res.extension) j["extension"] = toJson(*res.extension);
      return r.emit("sigma1", j, res.big);
    };
  });

  s = app.add_subcommand("build-totality", "extend a condition so every path meets each listed open set");
  addCommon(s);
  s->add_option("--condition", condArg)->required();
  s->add_option("--sets", setsArg, "comma-separated open sets")->required();
  s->add_option("--bound", boundArg);
  s->add_option("--witness", witnessArg);
  s->callback([&] {
    action = [&](Run& r) {
      const Condition p = r.condition(condArg);
      std::vector<TupleSet> Cs;
      std::stringstream ss(setsArg);
      for (std::string item; std::getline(ss, item, ',');) Cs.push_back(r.setOrTuple(item, p.n()));
      BuildResult b = buildTotalitySystem(p, Cs, r.bound(boundArg.empty() ? "2" : boundArg), r.witness(witnessArg));
      for (const auto& rd : b.rounds) r.trace(Json{{"command", "build-totality"}, {"round", rd.round}, {"level", rd.level}});
      Json j{{"condition", toJson(b.condition)}, {"rounds", roundsJson(b.rounds)},
             {"violations", totalityViolations(b.condition, Cs)}};
      return r.emit("build-totality", j, true);
    };
  });

  s = app.add_subcommand("build-splitting", "extend a condition so same-level nodes get split values");
  addCommon(s);
  s->add_option("--condition", condArg)->required();
  s->add_option("--functional", functionalArg);
  s->add_option("--bound", boundArg);
  s->add_option("--mode", modeArg);
  s->add_option("--rounds", rounds, "splitting rounds");
  s->add_option("--witness", witnessArg);
  s->callback([&] {
    action = [&](Run& r) {
      const Condition p = r.condition(condArg);
      const FunctionalTable& G = r.functional(functionalArg);
      const PairwiseMode mode = modeOf(modeArg);
      BuildResult b = buildSplittingSystem(p, G, r.bound(boundArg.empty() ? "2" : boundArg), mode, rounds,
                                           r.witness(witnessArg));
      std::vector<std::int64_t> levels;
      for (const auto& rd : b.rounds) {
        levels.push_back(rd.level);
        r.trace(Json{{"command", "build-splitting"}, {"round", rd.round}, {"level", rd.level}, {"method", rd.method}});
      }
      Json j{{"condition", toJson(b.condition)}, {"rounds", roundsJson(b.rounds)},
             {"violations", splittingViolations(b.condition, G, levels, mode)}};
      return r.emit("build-splitting", j, true);
    };
  });

  s = app.add_subcommand("restrict", "drop trailing coordinates of a condition");
  addCommon(s);
  s->add_option("--condition", condArg)->required();
  s->add_option("--jump", jumpArg);
  s->add_option("--to", toLevel, "target length (default: one less)");
  s->callback([&] {
    action = [&](Run& r) {
      const Condition p = r.condition(condArg);
      const MockJump J = r.jump(jumpArg);
      Condition q = toLevel < 0 ? restrictI(p, J) : composeRestrictions(p, static_cast<std::size_t>(toLevel), J);
      return r.emit("restrict", Json{{"condition", toJson(q)}}, true);
    };
  });

  s = app.add_subcommand("homogenize", "close the bad set under the fiber projections");
  addCommon(s);
  s->add_option("--condition", condArg)->required();
  s->callback([&] {
    action = [&](Run& r) {
      Condition q = nuHomogenize(r.condition(condArg));
      return r.emit("homogenize", Json{{"condition", toJson(q)}, {"homogeneous", inQ(q)}}, true);
    };
  });

  s = app.add_subcommand("fuzz", "seeded cases for a lemma, with counterexamples minimized");
  addCommon(s, false);
  s->add_option("lemma", lemmaArg, "bigSubset, concat, weakConcat, bigSubsetND, extract1D, extractND, projectComm")
      ->required();
  s->add_option("--budget", budgetArg, "case count, exhaustive-small or exhaustive-small+N");
  s->add_option("--seed", seed);
  s->add_option("--persist", persistArg, "directory for counterexample fixtures");
  s->callback([&] {
    action = [&](Run& r) {
      FuzzReport rep = fuzzLemma(lemmaArg, FuzzBudget::parse(budgetArg), seed, persistArg);
      return r.emit("fuzz", rep.toJson(), rep.asExpected());
    };
  });

  s = app.add_subcommand("bdnc", "the tuples a mock jump marks as failing to be DNC");
  addCommon(s);
  s->add_option("--universe", U);
  s->add_option("--jump", jumpArg)->required();
  s->callback([&] {
    action = [&](Run& r) {
      const ForestSystem& T = r.universe(U);
      const TupleSet B = bDncSet(r.jump(jumpArg), T.n, T);
      const bool small = !decideBigND(B, TupleSet(T.n, {*T.base.begin()}), constBounds(T.n, 2), T).big;
      return r.emit("bdnc", Json{{"bad", toJson(B)}, {"smallAboveRoot", small}}, small);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    Run run(common);
    return action(run);
  } catch (const Error& e) {
    std::cerr << "error: " << error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return exitFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
