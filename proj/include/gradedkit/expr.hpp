#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gradedkit/chart.hpp"

namespace gk {

using Rational = mpq_class;

std::string toString(const Rational& q);

/// One factor of a monomial: a coordinate power, or a power of an opaque
/// function symbol (possibly differentiated) applied to weight-zero even
/// coordinates.
struct Factor {
  int var = -1;             // canonical coordinate index; -1 for a function application
  std::string fn;           // function name when var < 0
  std::vector<int> args;    // coordinate indices of the arguments
  std::vector<int> derivs;  // derivative order per argument
  int exp = 1;

  bool isVar() const { return var >= 0; }
  /// Ordering key ignoring the exponent.
  bool sameBase(const Factor& o) const;
  bool baseLess(const Factor& o) const;
  auto operator<=>(const Factor& o) const = default;
  bool operator==(const Factor& o) const = default;
};

/// Canonically ordered product of factors. Function applications come first,
/// then coordinates in chart canonical order; odd coordinates appear at most
/// once.
struct Monomial {
  std::vector<Factor> factors;
  auto operator<=>(const Monomial& o) const = default;
  bool operator==(const Monomial& o) const = default;
  bool isOne() const { return factors.empty(); }
};

/// Graded-commutative polynomial with exact rational coefficients over a chart.
class Expr {
 public:
  using Terms = std::map<Monomial, Rational>;

  Expr() = default;
  explicit Expr(ChartPtr chart) : chart_(std::move(chart)) {}

  static Expr constant(ChartPtr chart, const Rational& c);
  static Expr var(ChartPtr chart, int index);
  static Expr var(ChartPtr chart, const std::string& name);
  /// Opaque function symbol; arguments must be weight-zero even coordinates.
  static Expr fn(ChartPtr chart, const std::string& name, const std::vector<std::string>& args);
  static Expr fromTerm(ChartPtr chart, Monomial m, const Rational& c);

  const ChartPtr& chart() const { return chart_; }
  const Terms& terms() const { return terms_; }
  bool isZero() const { return terms_.empty(); }
  /// True when the expression is a rational constant (zero included).
  bool isConstant() const;
  Rational constantTerm() const;
  std::size_t size() const { return terms_.size(); }

  Expr operator+(const Expr& o) const;
  Expr operator-(const Expr& o) const;
  Expr operator-() const;
  Expr operator*(const Expr& o) const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr scaled(const Rational& c) const;
  Expr pow(int n) const;

  bool operator==(const Expr& o) const;
  bool operator!=(const Expr& o) const { return !(*this == o); }

  /// Parity of every term, when all terms agree; absent for zero or mixed.
  std::optional<Parity> parity() const;
  /// Sum of the terms of the given parity.
  Expr parityPart(Parity p) const;
  /// Terms containing the given coordinate.
  bool dependsOn(int var) const;
  /// Largest power of the coordinate among the terms.
  int degreeIn(int var) const;
  /// Coefficient of var^n, as an expression free of var.
  Expr coefficientOf(int var, int n) const;

  /// Canonical text: terms in monomial order, reduced fractions.
  std::string str() const;

  void addTerm(const Monomial& m, const Rational& c);

 private:
  void requireSameChart(const Expr& o) const;

  ChartPtr chart_;
  Terms terms_;
};

Parity monomialParity(const Chart& chart, const Monomial& m);
Weight monomialWeight(const Chart& chart, const Monomial& m);
bool monomialHasParameter(const Chart& chart, const Monomial& m);
std::string monomialStr(const Chart& chart, const Monomial& m);

/// Product of two canonical monomials; returns the Koszul sign (0 when an odd
/// coordinate repeats) and the canonical product.
std::pair<int, Monomial> multiply(const Chart& chart, const Monomial& a, const Monomial& b);

// ---------------------------------------------------------------------------
// Raw expression trees, as produced by the parser or built by hand.

struct RawExpr;
using RawPtr = std::shared_ptr<const RawExpr>;

struct RawExpr {
  enum class Kind { Number, Symbol, Call, Add, Sub, Mul, Div, Neg, Pow };
  Kind kind = Kind::Number;
  Rational number;
  std::string name;
  std::vector<std::string> derivs;  // derivative argument names for Call
  std::vector<RawPtr> children;
  int exponent = 0;
};

namespace raw {
RawPtr num(const Rational& q);
RawPtr sym(const std::string& name);
RawPtr call(const std::string& name, std::vector<RawPtr> args, std::vector<std::string> derivs = {});
RawPtr add(RawPtr a, RawPtr b);
RawPtr sub(RawPtr a, RawPtr b);
RawPtr mul(RawPtr a, RawPtr b);
RawPtr div(RawPtr a, RawPtr b);
RawPtr neg(RawPtr a);
RawPtr pow(RawPtr a, int n);
}  // namespace raw

/// Canonical form of a raw tree over a chart. Odd squares vanish silently;
/// unbound names and division by non-constants throw.
Expr normalize(const RawExpr& e, const ChartPtr& chart);

// ---------------------------------------------------------------------------

/// Left partial derivative with respect to a coordinate:
/// d(fg) = (df)g + (-1)^{|c||f|} f (dg).
Expr derivative(const Expr& e, int var);
Expr derivative(const Expr& e, const std::string& name);

/// Homomorphism given by images of the coordinates of `from` as expressions
/// over `to`. Coordinates without an explicit image map to the coordinate of
/// the same name in `to`.
class Substitution {
 public:
  Substitution() = default;
  Substitution(ChartPtr from, ChartPtr to);

  const ChartPtr& from() const { return from_; }
  const ChartPtr& to() const { return to_; }
  /// Throws when the image parity differs from the coordinate parity.
  void set(int var, const Expr& image);
  void set(const std::string& name, const Expr& image);
  bool hasExplicit(int var) const { return images_.at(var).has_value(); }
  Expr image(int var) const;
  Expr image(const std::string& name) const { return image(from_->index(name)); }

 private:
  ChartPtr from_;
  ChartPtr to_;
  std::vector<std::optional<Expr>> images_;
};

Expr substitute(const Expr& e, const Substitution& s);
/// The substitution c -> second(first(c)), i.e. first applied, then second.
Substitution compose(const Substitution& first, const Substitution& second);
Substitution identitySubstitution(const ChartPtr& chart);

/// Re-expresses an expression over another chart by coordinate name.
Expr rechart(const Expr& e, const ChartPtr& to);

/// Homogeneous components, keyed by weight. Rejects formal parameters.
std::map<Weight, Expr> weightDecompose(const Expr& e);
std::optional<Weight> isHomogeneous(const Expr& e);

/// Sum of the parts of e whose weight in `component` equals `value`.
Expr componentPart(const Expr& e, std::size_t component, int value);

}  // namespace gk
