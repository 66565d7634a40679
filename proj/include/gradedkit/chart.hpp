#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Parity : unsigned char { Even = 0, Odd = 1 };

constexpr Parity operator+(Parity a, Parity b) {
  return static_cast<Parity>((static_cast<int>(a) + static_cast<int>(b)) & 1);
}
constexpr int bit(Parity p) { return static_cast<int>(p); }
/// (-1)^(a*b)
constexpr int koszul(Parity a, Parity b) { return (bit(a) & bit(b)) ? -1 : 1; }
std::string toString(Parity p);

/// Signed multi-degree. Used for vector fields, brackets and weight audits,
/// where negative components are legitimate.
class Shift {
 public:
  Shift() = default;
  explicit Shift(std::vector<int> components) : c_(std::move(components)) {}
  static Shift zero(std::size_t arity) { return Shift(std::vector<int>(arity, 0)); }

  std::size_t arity() const { return c_.size(); }
  int operator[](std::size_t i) const { return c_.at(i); }
  const std::vector<int>& components() const { return c_; }
  int total() const;

  Shift operator+(const Shift& o) const;
  Shift operator-(const Shift& o) const;
  Shift operator-() const;
  Shift scaled(int factor) const;
  auto operator<=>(const Shift&) const = default;
  bool operator==(const Shift&) const = default;

  std::string str() const;

 private:
  std::vector<int> c_;
};

/// Non-negative multi-weight of a coordinate or of a homogeneous function.
class Weight {
 public:
  Weight() = default;
  /// Throws gk::Error when a component is negative.
  explicit Weight(std::vector<int> components);
  static Weight zero(std::size_t arity) { return Weight(std::vector<int>(arity, 0)); }
  /// Checked narrowing of a shift.
  static Weight fromShift(const Shift& s) { return Weight(s.components()); }

  std::size_t arity() const { return c_.size(); }
  int operator[](std::size_t i) const { return c_.at(i); }
  const std::vector<int>& components() const { return c_; }
  int total() const;
  bool isZero() const;

  Weight operator+(const Weight& o) const;
  Weight scaled(int factor) const;
  /// Componentwise maximum.
  Weight join(const Weight& o) const;
  /// Componentwise <=.
  bool dominatedBy(const Weight& o) const;
  Shift shift() const { return Shift(c_); }

  auto operator<=>(const Weight&) const = default;
  bool operator==(const Weight&) const = default;

  std::string str() const;

 private:
  std::vector<int> c_;
};

int totalWeight(const Weight& w);

struct Coordinate {
  std::string name;
  Weight weight;
  Parity parity = Parity::Even;
  /// Formal parameters (the t of a homogeneity action) are carried as even
  /// weight-zero variables but are not coordinates of the bundle.
  bool parameter = false;
};

/// A coordinate and its conjugate momentum on a cotangent-type chart.
struct ConjugatePair {
  int coord = -1;
  int momentum = -1;
};

class Chart;
using ChartPtr = std::shared_ptr<const Chart>;

/// Ordered coordinates with multi-weights and parities: one global chart of
/// a graded (super)bundle.
///
/// Internally coordinates are indexed in canonical order, sorted by
/// (total weight, parity, name); declaration order is kept for printing.
class Chart {
 public:
  struct Options {
    std::optional<Weight> degreeBound;
    /// When set, the parity of every coordinate must equal the value of this
    /// weight component mod 2.
    std::optional<std::size_t> parityComponent;
    std::vector<std::pair<std::string, std::string>> conjugates;  // (coord, momentum)
    Parity bracketParity = Parity::Even;
  };

  static ChartPtr make(std::size_t arity, std::vector<Coordinate> coords);
  static ChartPtr make(std::size_t arity, std::vector<Coordinate> coords, const Options& opts);

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return coords_.size(); }
  const Coordinate& coord(std::size_t canonicalIndex) const { return coords_.at(canonicalIndex); }
  const std::vector<Coordinate>& coords() const { return coords_; }
  /// Canonical indices in declaration order.
  const std::vector<int>& declarationOrder() const { return declOrder_; }
  std::optional<int> find(const std::string& name) const;
  /// Like find, but throws on unknown names.
  int index(const std::string& name) const;
  const Weight& degreeBound() const { return bound_; }
  std::optional<std::size_t> parityComponent() const { return parityComponent_; }

  const std::vector<ConjugatePair>& conjugates() const { return conjugates_; }
  bool hasConjugates() const { return !conjugates_.empty(); }
  Parity bracketParity() const { return bracketParity_; }
  std::optional<int> momentumOf(int coord) const;
  std::optional<int> conjugateOf(int momentum) const;
  bool isMomentum(int idx) const { return conjugateOf(idx).has_value(); }

  /// A copy of this chart with extra formal parameters (even, weight zero).
  ChartPtr withParameters(const std::vector<std::string>& names) const;
  bool hasParameters() const;
  /// Coordinates without the formal parameters.
  ChartPtr withoutParameters() const;

  /// Rebuilds declaration data; used by chart transformers.
  std::vector<Coordinate> declaredCoords() const;
  Options options() const;

  bool sameAs(const Chart& o) const;

  /// Multi-line table, declaration order.
  std::string describe() const;

 private:
  Chart() = default;

  std::size_t arity_ = 0;
  std::vector<Coordinate> coords_;
  std::vector<int> declOrder_;
  Weight bound_;
  std::optional<std::size_t> parityComponent_;
  std::vector<ConjugatePair> conjugates_;
  std::vector<int> conjOfMomentum_;
  std::vector<int> momentumOfCoord_;
  Parity bracketParity_ = Parity::Even;
};

/// Validated chart whose degree bound is the componentwise max of the weights.
ChartPtr mkChart(std::size_t arity, std::vector<Coordinate> coords);

bool sameChart(const ChartPtr& a, const ChartPtr& b);

}  // namespace gk
