#include "bushy/quickgrow.hpp"

#include "bushy/error.hpp"

namespace bushy {

std::string Num::str() const { return huge ? "huge" : std::to_string(v); }

Num sat_add(Num a, Num b, std::int64_t cap) {
  if (a.huge || b.huge) return Num::inf();
  std::int64_t r;
  if (__builtin_add_overflow(a.v, b.v, &r) || r > cap) return Num::inf();
  return Num::of(r);
}

Num sat_mul(Num a, Num b, std::int64_t cap) {
  if ((!a.huge && a.v == 0) || (!b.huge && b.v == 0)) return Num::of(0);
  if (a.huge || b.huge) return Num::inf();
  std::int64_t r;
  if (__builtin_mul_overflow(a.v, b.v, &r) || r > cap) return Num::inf();
  return Num::of(r);
}

Num sat_pow2(Num n, std::int64_t cap) {
  if (n.huge || n.v >= 63) return Num::inf();
  if (n.v <= 0) return Num::of(1);
  std::int64_t r = std::int64_t{1} << n.v;
  if (r > cap) return Num::inf();
  return Num::of(r);
}

struct BoundingFunction::Node {
  Kind kind;
  std::int64_t a = 0, b = 0;
  std::vector<Num> thresholds{};
  std::vector<std::int64_t> values{};
  std::shared_ptr<const Node> base{}, second{};
};

using NodeP = std::shared_ptr<const BoundingFunction::Node>;

static NodeP make(BoundingFunction::Node n) {
  return std::make_shared<const BoundingFunction::Node>(std::move(n));
}

BoundingFunction::BoundingFunction() : BoundingFunction(constant(2)) {}

BoundingFunction BoundingFunction::constant(std::int64_t c) {
  if (c < 2) fail(ErrorKind::Precondition, "Const(c) needs c >= 2");
  return BoundingFunction(make({Kind::Const, c}));
}

BoundingFunction BoundingFunction::pow2() { return BoundingFunction(make({Kind::Pow2})); }

BoundingFunction BoundingFunction::linear(std::int64_t a, std::int64_t b) {
  if (a < 0 || b < 2) fail(ErrorKind::Precondition, "Linear(a,b) needs a >= 0 and b >= 2");
  return BoundingFunction(make({Kind::Linear, a, b}));
}

BoundingFunction BoundingFunction::iterate(const BoundingFunction& base, std::int64_t k) {
  if (k < 1) fail(ErrorKind::Precondition, "Iterate needs k >= 1");
  Node n{Kind::Iterate, k};
  n.base = base.node_;
  return BoundingFunction(make(std::move(n)), base.cap_);
}

BoundingFunction BoundingFunction::diag_iter(const BoundingFunction& base) {
  Node n{Kind::DiagIter};
  n.base = base.node_;
  return BoundingFunction(make(std::move(n)), base.cap_);
}

BoundingFunction BoundingFunction::piecewise(const BoundingFunction& base, std::vector<Num> th) {
  for (std::size_t i = 1; i < th.size(); ++i)
    if (th[i] < th[i - 1]) fail(ErrorKind::Precondition, "thresholds must be nondecreasing");
  Node n{Kind::PiecewiseIterate};
  n.base = base.node_;
  n.thresholds = std::move(th);
  return BoundingFunction(make(std::move(n)), base.cap_);
}

BoundingFunction BoundingFunction::table(std::vector<std::int64_t> values,
                                         const BoundingFunction& tail) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 2) fail(ErrorKind::Precondition, "table values must be >= 2");
    if (i && values[i] < values[i - 1]) fail(ErrorKind::Precondition, "table must be nondecreasing");
  }
  Node n{Kind::FiniteTable};
  n.values = std::move(values);
  n.base = tail.node_;
  return BoundingFunction(make(std::move(n)), tail.cap_);
}

BoundingFunction BoundingFunction::sum(const BoundingFunction& a, const BoundingFunction& b) {
  Node n{Kind::Sum};
  n.base = a.node_;
  n.second = b.node_;
  return BoundingFunction(make(std::move(n)), std::min(a.cap_, b.cap_));
}

BoundingFunction BoundingFunction::scale(std::int64_t c, const BoundingFunction& base) {
  if (c < 1) fail(ErrorKind::Precondition, "Scale needs c >= 1");
  if (c == 1) return base;
  Node n{Kind::Scale, c};
  n.base = base.node_;
  return BoundingFunction(make(std::move(n)), base.cap_);
}

BoundingFunction::Kind BoundingFunction::kind() const { return node_->kind; }

BoundingFunction BoundingFunction::with_cap(std::int64_t cap) const {
  if (cap < 2) fail(ErrorKind::Precondition, "cap must be >= 2");
  return BoundingFunction(node_, cap);
}

std::int64_t BoundingFunction::param_a() const { return node_->a; }
std::int64_t BoundingFunction::param_b() const { return node_->b; }
const std::vector<Num>& BoundingFunction::thresholds() const { return node_->thresholds; }
const std::vector<std::int64_t>& BoundingFunction::values() const { return node_->values; }
BoundingFunction BoundingFunction::base() const {
  if (!node_->base) fail(ErrorKind::Precondition, describe() + " has no base rule");
  return BoundingFunction(node_->base, cap_);
}
BoundingFunction BoundingFunction::second() const {
  if (!node_->second) fail(ErrorKind::Precondition, describe() + " has no second rule");
  return BoundingFunction(node_->second, cap_);
}

static Num eval_node(const BoundingFunction::Node& nd, Num n, std::int64_t cap);

static Num iterate_node(const BoundingFunction::Node& base, Num n, std::int64_t k, std::int64_t cap) {
  Num x = n;
  for (std::int64_t i = 0; i < k; ++i) {
    Num y = eval_node(base, x, cap);
    if (y.huge) return y;
    if (y == x) return y;  // fixed point: further iterations change nothing
    x = y;
  }
  return x;
}

static Num eval_node(const BoundingFunction::Node& nd, Num n, std::int64_t cap) {
  using K = BoundingFunction::Kind;
  switch (nd.kind) {
    case K::Const:
      return nd.a > cap ? Num::inf() : Num::of(nd.a);
    case K::Pow2: {
      Num r = sat_pow2(n, cap);
      if (!r.huge && r.v < 2) r = Num::of(2);
      return r;
    }
    case K::Linear:
      if (n.huge) return nd.a > 0 ? Num::inf() : Num::of(nd.b);
      return sat_add(sat_mul(Num::of(nd.a), n, cap), Num::of(nd.b), cap);
    case K::Iterate:
      return iterate_node(*nd.base, n, nd.a, cap);
    case K::DiagIter: {
      if (n.huge) return iterate_node(*nd.base, n, 64, cap);
      return iterate_node(*nd.base, n, std::max<std::int64_t>(n.v, 1), cap);
    }
    case K::PiecewiseIterate: {
      std::int64_t k = static_cast<std::int64_t>(nd.thresholds.size()) + 1;
      for (std::size_t i = 0; i < nd.thresholds.size(); ++i)
        if (n <= nd.thresholds[i]) {
          k = static_cast<std::int64_t>(i) + 1;
          break;
        }
      return iterate_node(*nd.base, n, k, cap);
    }
    case K::FiniteTable:
      if (!n.huge && n.v >= 0 && n.v < static_cast<std::int64_t>(nd.values.size())) {
        std::int64_t v = nd.values[static_cast<std::size_t>(n.v)];
        return v > cap ? Num::inf() : Num::of(v);
      }
      return eval_node(*nd.base, n, cap);
    case K::Sum:
      return sat_add(eval_node(*nd.base, n, cap), eval_node(*nd.second, n, cap), cap);
    case K::Scale:
      return sat_mul(Num::of(nd.a), eval_node(*nd.base, n, cap), cap);
  }
  fail(ErrorKind::Internal, "unknown rule");
}

Num BoundingFunction::eval(Num n, std::int64_t cap) const { return eval_node(*node_, n, cap); }
Num BoundingFunction::operator()(Num n) const { return eval_node(*node_, n, cap_); }

static std::string describe_node(const BoundingFunction::Node& nd) {
  using K = BoundingFunction::Kind;
  switch (nd.kind) {
    case K::Const: return "Const(" + std::to_string(nd.a) + ")";
    case K::Pow2: return "Pow2";
    case K::Linear: return "Linear(" + std::to_string(nd.a) + "," + std::to_string(nd.b) + ")";
    case K::Iterate: return "Iterate(" + describe_node(*nd.base) + "," + std::to_string(nd.a) + ")";
    case K::DiagIter: return "DiagIter(" + describe_node(*nd.base) + ")";
    case K::PiecewiseIterate: {
      std::string s = "PiecewiseIterate(" + describe_node(*nd.base) + ",[";
      for (std::size_t i = 0; i < nd.thresholds.size(); ++i) {
        if (i) s += ",";
        s += nd.thresholds[i].str();
      }
      return s + "])";
    }
    case K::FiniteTable: {
      std::string s = "FiniteTable([";
      for (std::size_t i = 0; i < nd.values.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(nd.values[i]);
      }
      return s + "]," + describe_node(*nd.base) + ")";
    }
    case K::Sum: return "Sum(" + describe_node(*nd.base) + "," + describe_node(*nd.second) + ")";
    case K::Scale: return "Scale(" + std::to_string(nd.a) + "," + describe_node(*nd.base) + ")";
  }
  return "?";
}

std::string BoundingFunction::describe() const { return describe_node(*node_); }

Num evalIterateNum(const BoundingFunction& f, std::int64_t k, Num n, std::int64_t cap) {
  if (k < 1) fail(ErrorKind::Precondition, "iterate count must be >= 1");
  Num x = n;
  for (std::int64_t i = 0; i < k; ++i) {
    Num y = f.eval(x, cap);
    if (y.huge || y == x) return y;
    x = y;
  }
  return x;
}

Num evalIterate(const BoundingFunction& f, std::int64_t k, std::int64_t n,
                std::optional<std::int64_t> cap) {
  if (n < 0) fail(ErrorKind::Precondition, "argument must be >= 0");
  return evalIterateNum(f, k, Num::of(n), cap.value_or(f.cap()));
}

std::optional<std::int64_t> firstNonBound(const BoundingFunction& f, std::int64_t to) {
  Num prev = Num::of(0);
  for (std::int64_t n = 0; n <= to; ++n) {
    Num v = f.at(n);
    if (v < Num::of(2) || v < prev) return n;
    prev = v;
  }
  return std::nullopt;
}

std::optional<std::int64_t> firstOutsideQ(const BoundingFunction& f, std::int64_t to) {
  if (auto bad = firstNonBound(f, to)) return bad;
  for (std::int64_t n = 0; n <= to; ++n)
    if (f.at(n) < sat_pow2(Num::of(n), f.cap())) return n;
  return std::nullopt;
}

std::optional<std::int64_t> firstBelow(const BoundingFunction& lhs, const BoundingFunction& rhs,
                                       std::int64_t from, std::int64_t to) {
  for (std::int64_t n = std::max<std::int64_t>(from, 0); n <= to; ++n)
    if (lhs.at(n) < rhs.at(n)) return n;
  return std::nullopt;
}

GrowthWitness::GrowthWitness() = default;

GrowthWitness GrowthWitness::linear(std::int64_t a, std::int64_t b) {
  GrowthWitness w;
  w.kind_ = Kind::Linear;
  w.a_ = a;
  w.b_ = b;
  return w;
}

GrowthWitness GrowthWitness::table(std::vector<std::int64_t> values) {
  if (values.empty()) fail(ErrorKind::Precondition, "empty witness table");
  GrowthWitness w;
  w.kind_ = Kind::Table;
  w.values_ = std::move(values);
  return w;
}

GrowthWitness GrowthWitness::square_index(const GrowthWitness& inner) {
  GrowthWitness w;
  w.kind_ = Kind::SquareIndex;
  w.inner_ = std::make_shared<const GrowthWitness>(inner);
  return w;
}

GrowthWitness GrowthWitness::shifted(std::vector<Num> thresholds) {
  GrowthWitness w;
  w.kind_ = Kind::Shifted;
  w.thresholds_ = std::move(thresholds);
  return w;
}

Num GrowthWitness::operator()(std::int64_t k) const {
  switch (kind_) {
    case Kind::Linear: {
      std::int64_t r;
      if (__builtin_mul_overflow(a_, k, &r) || __builtin_add_overflow(r, b_, &r)) return Num::inf();
      return Num::of(r);
    }
    case Kind::Table: {
      std::size_t i = k < 1 ? 0 : static_cast<std::size_t>(k - 1);
      if (i >= values_.size()) i = values_.size() - 1;
      return Num::of(values_[i]);
    }
    case Kind::SquareIndex:
      if (k > 3037000499) return Num::inf();
      return (*inner_)(k * k);
    case Kind::Shifted:
      if (k <= 1) return Num::of(-1);
      if (static_cast<std::size_t>(k - 1) <= thresholds_.size()) return thresholds_[static_cast<std::size_t>(k - 2)];
      return Num::inf();
  }
  return Num::inf();
}

std::string GrowthWitness::describe() const {
  switch (kind_) {
    case Kind::Linear: return "Linear(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
    case Kind::Table: {
      std::string s = "Table([";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(values_[i]);
      }
      return s + "])";
    }
    case Kind::SquareIndex: return "SquareIndex(" + inner_->describe() + ")";
    case Kind::Shifted: {
      std::string s = "Shifted([";
      for (std::size_t i = 0; i < thresholds_.size(); ++i) {
        if (i) s += ",";
        s += thresholds_[i].str();
      }
      return s + "])";
    }
  }
  return "?";
}

std::string GGReport::note() const {
  std::string h = "verified up to horizon K=" + std::to_string(K) + ", N=" + std::to_string(N);
  if (pass) return h;
  return "fails at k=" + std::to_string(failK) + ", n=" + std::to_string(failN) + " (" + h + ")";
}

GGReport ggVerify(const BoundingFunction& h, const BoundingFunction& g, const GrowthWitness& w,
                  std::int64_t K, std::int64_t N) {
  if (K < 1) fail(ErrorKind::Precondition, "ggVerify needs K >= 1");
  if (N < 0) fail(ErrorKind::Precondition, "ggVerify needs N >= 0");
  GGReport rep;
  rep.K = K;
  rep.N = N;
  const std::int64_t cap = std::min(h.cap(), g.cap());
  for (std::int64_t k = 1; k <= K; ++k) {
    Num d = w(k);
    if (d.huge) continue;
    for (std::int64_t n = std::max<std::int64_t>(d.v + 1, 0); n <= N; ++n) {
      if (h.eval(Num::of(n), cap) < evalIterateNum(g, k, Num::of(n), cap)) {
        rep.pass = false;
        rep.failK = k;
        rep.failN = n;
        return rep;
      }
    }
  }
  return rep;
}

Density densityConstruct(const BoundingFunction& h, const BoundingFunction& g,
                         const GrowthWitness& w, std::int64_t K, std::int64_t N, DensityMode mode) {
  GGReport in = ggVerify(h, g, w, K, N);
  if (!in.pass) fail(ErrorKind::Hypothesis, "input witness does not show h >> g: " + in.note());
  const std::int64_t cap = g.cap();
  std::vector<Num> th;
  for (std::int64_t k = 1; k <= 64; ++k) {
    Num d = w((k + 1) * (k + 1));
    std::int64_t iters = mode == DensityMode::Stated ? k * k : k * k - k;
    Num a = d;
    if (!d.huge && iters > 0) a = evalIterateNum(g, iters, Num::of(std::max<std::int64_t>(d.v, 0)), cap);
    if (!th.empty() && a < th.back()) a = th.back();
    th.push_back(a);
    if (a.huge) break;
  }
  Density out{BoundingFunction::piecewise(g, th), GrowthWitness::shifted(th),
              GrowthWitness::square_index(w), th};
  return out;
}

ProductReport boundedProductBound(const BoundingFunction& h, std::int64_t N) {
  if (N < 0) fail(ErrorKind::Precondition, "N must be >= 0");
  const std::int64_t horizon = std::max<std::int64_t>(N, 8);
  if (auto bad = firstOutsideQ(h, horizon))
    fail(ErrorKind::Precondition, h.describe() + " is not in Q: fails at n=" + std::to_string(*bad));
  ProductReport rep;
  rep.N = N;
  const std::int64_t cap = h.cap();
  Num g = Num::of(1);
  std::int64_t threshold = 0;
  for (std::int64_t n = 0; n <= N; ++n) {
    if (n > 0) g = sat_mul(g, h.at(n - 1), cap);
    Num third = evalIterate(h, 3, n);
    rep.products.push_back(g);
    rep.third.push_back(third);
    // with both sides saturated the comparison is undecided at this cap; count it as held
    if (third < g) threshold = n + 1;
  }
  rep.threshold = threshold;
  rep.holds = threshold <= N;
  return rep;
}

}  // namespace bushy
