#pragma once

// Bounding functions with saturating evaluation, iterates, the uniform
// iterate-domination relation h ≫ g with explicit witnesses, and the
// interpolation f with h ≫ f ≫ g.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bushy {

constexpr std::int64_t kDefaultCap = std::numeric_limits<std::int64_t>::max();

// A saturating integer. `huge` is sticky and compares above every finite value.
struct Num {
  std::int64_t v = 0;
  bool huge = false;

  static Num of(std::int64_t x) { return Num{x, false}; }
  static Num inf() { return Num{0, true}; }

  bool operator==(const Num& o) const { return huge == o.huge && (huge || v == o.v); }
  bool operator!=(const Num& o) const { return !(*this == o); }
  bool operator<(const Num& o) const {
    if (huge) return false;
    if (o.huge) return true;
    return v < o.v;
  }
  bool operator<=(const Num& o) const { return !(o < *this); }
  bool operator>(const Num& o) const { return o < *this; }
  bool operator>=(const Num& o) const { return !(*this < o); }
  std::string str() const;
};

Num sat_add(Num a, Num b, std::int64_t cap);
Num sat_mul(Num a, Num b, std::int64_t cap);
Num sat_pow2(Num n, std::int64_t cap);

class BoundingFunction {
 public:
  enum class Kind { Const, Pow2, Linear, Iterate, DiagIter, PiecewiseIterate, FiniteTable, Sum, Scale };

  BoundingFunction();  // Const(2)
  static BoundingFunction constant(std::int64_t c);
  // n ↦ 2^n, floored at 2 so the value at 0 is a legal bound
  static BoundingFunction pow2();
  static BoundingFunction linear(std::int64_t a, std::int64_t b);
  static BoundingFunction iterate(const BoundingFunction& base, std::int64_t k);
  // n ↦ base^(max(n,1))(n)
  static BoundingFunction diag_iter(const BoundingFunction& base);
  // base^(k) on (a_{k-1}, a_k], a_0 = -1; past the last listed threshold k = m+1
  static BoundingFunction piecewise(const BoundingFunction& base, std::vector<Num> thresholds);
  static BoundingFunction table(std::vector<std::int64_t> values, const BoundingFunction& tail);
  static BoundingFunction sum(const BoundingFunction& a, const BoundingFunction& b);
  static BoundingFunction scale(std::int64_t c, const BoundingFunction& base);

  Kind kind() const;
  std::int64_t cap() const { return cap_; }
  BoundingFunction with_cap(std::int64_t cap) const;

  Num operator()(Num n) const;
  Num at(std::int64_t n) const { return (*this)(Num::of(n)); }
  Num eval(Num n, std::int64_t cap) const;

  // structural accessors, used by serialization
  std::int64_t param_a() const;
  std::int64_t param_b() const;
  const std::vector<Num>& thresholds() const;
  const std::vector<std::int64_t>& values() const;
  BoundingFunction base() const;
  BoundingFunction second() const;

  std::string describe() const;
  bool operator==(const BoundingFunction& o) const { return describe() == o.describe() && cap_ == o.cap_; }
  bool operator!=(const BoundingFunction& o) const { return !(*this == o); }

  struct Node;

 private:
  explicit BoundingFunction(std::shared_ptr<const Node> n, std::int64_t cap = kDefaultCap)
      : node_(std::move(n)), cap_(cap) {}
  std::shared_ptr<const Node> node_;
  std::int64_t cap_ = kDefaultCap;
};

// f^(k)(n), saturating; cap defaults to f's own cap
Num evalIterate(const BoundingFunction& f, std::int64_t k, std::int64_t n,
                std::optional<std::int64_t> cap = std::nullopt);
Num evalIterateNum(const BoundingFunction& f, std::int64_t k, Num n, std::int64_t cap);

// first point of [from, to] where f decreases or drops below 2
std::optional<std::int64_t> firstNonBound(const BoundingFunction& f, std::int64_t to);
// first n ≤ to with f(n) < 2^n (𝒬 membership at the horizon)
std::optional<std::int64_t> firstOutsideQ(const BoundingFunction& f, std::int64_t to);
// first n in [from, to] with lhs(n) < rhs(n)
std::optional<std::int64_t> firstBelow(const BoundingFunction& lhs, const BoundingFunction& rhs,
                                       std::int64_t from, std::int64_t to);

class GrowthWitness {
 public:
  enum class Kind { Linear, Table, SquareIndex, Shifted };
  GrowthWitness();  // d_k = k
  static GrowthWitness linear(std::int64_t a, std::int64_t b);  // d_k = a·k + b
  // listed d_1..d_m, then d_k = d_m for k > m
  static GrowthWitness table(std::vector<std::int64_t> values);
  static GrowthWitness square_index(const GrowthWitness& inner);  // k ↦ inner(k²)
  // k ↦ a_{k-1} from a threshold list with a_0 = -1; beyond the list the value is huge
  static GrowthWitness shifted(std::vector<Num> thresholds);

  Kind kind() const { return kind_; }
  Num operator()(std::int64_t k) const;
  std::string describe() const;

  std::int64_t a() const { return a_; }
  std::int64_t b() const { return b_; }
  const std::vector<std::int64_t>& values() const { return values_; }
  const std::vector<Num>& thresholds() const { return thresholds_; }
  const GrowthWitness& inner() const { return *inner_; }

 private:
  Kind kind_ = Kind::Linear;
  std::int64_t a_ = 1, b_ = 0;
  std::vector<std::int64_t> values_;
  std::vector<Num> thresholds_;
  std::shared_ptr<const GrowthWitness> inner_;
};

struct GGReport {
  bool pass = true;
  std::int64_t failK = 0;
  std::int64_t failN = 0;
  std::int64_t K = 0, N = 0;
  std::string note() const;
};

// checks h(n) ≥ g^(k)(n) on (d_k, N] for every k ≤ K
GGReport ggVerify(const BoundingFunction& h, const BoundingFunction& g, const GrowthWitness& w,
                  std::int64_t K, std::int64_t N);

struct Density {
  BoundingFunction f;
  GrowthWitness wf;  // f ≫ g
  GrowthWitness wh;  // h ≫ f
  std::vector<Num> thresholds;
};

enum class DensityMode { Stated, Tight };
Density densityConstruct(const BoundingFunction& h, const BoundingFunction& g,
                         const GrowthWitness& w, std::int64_t K, std::int64_t N,
                         DensityMode mode = DensityMode::Stated);

struct ProductReport {
  bool holds = true;             // g(n) ≤ h^(3)(n) for every n in [threshold, N]
  std::int64_t threshold = 0;    // least t with domination on all of [t, N]
  std::int64_t N = 0;
  std::vector<Num> products;     // g(0..N)
  std::vector<Num> third;        // h^(3)(0..N)
};

// g(n) = ∏_{m<n} h(m) against h^(3); throws Precondition if h leaves 𝒬 on the horizon
ProductReport boundedProductBound(const BoundingFunction& h, std::int64_t N);

}  // namespace bushy
