#pragma once

#include <map>
#include <optional>

#include "gradedkit/expr.hpp"
#include "gradedkit/report.hpp"

namespace gk {

/// A derivation sum_c X^c d/dc of the chart algebra (left derivatives).
class VecField {
 public:
  VecField() = default;
  explicit VecField(ChartPtr chart);

  const ChartPtr& chart() const { return chart_; }
  const Expr& component(int var) const { return comps_.at(var); }
  const Expr& component(const std::string& name) const { return comps_.at(chart_->index(name)); }
  void set(int var, const Expr& e);
  void set(const std::string& name, const Expr& e) { set(chart_->index(name), e); }
  /// d/dc for a single coordinate.
  static VecField coordinate(const ChartPtr& chart, const std::string& name);

  bool isZero() const;
  std::optional<Parity> parity() const;
  VecField parityPart(Parity p) const;
  /// Weight of every term of X^c minus the weight of c, when uniform.
  std::optional<Shift> shift() const;
  std::map<Shift, VecField> shiftDecompose() const;

  Expr operator()(const Expr& f) const;
  VecField operator+(const VecField& o) const;
  VecField operator-(const VecField& o) const;
  VecField operator-() const { return scaled(Rational(-1)); }
  VecField scaled(const Rational& c) const;
  /// The field f*X.
  VecField leftMultiplied(const Expr& f) const;
  bool operator==(const VecField& o) const;

  /// Canonical text "X^c*d/dc" terms in coordinate order.
  std::string str() const;

 private:
  ChartPtr chart_;
  std::vector<Expr> comps_;
};

Expr apply(const VecField& x, const Expr& f);
/// Graded commutator X Y - (-1)^{|X||Y|} Y X.
VecField lieBracket(const VecField& x, const VecField& y);
/// Residual [Q,Q]; requires Q odd.
CheckReport isHomological(const VecField& q);
/// [[Q,A],B].
VecField derivedBracket(const VecField& q, const VecField& a, const VecField& b);
/// Re-expresses a field on another chart by coordinate name.
VecField rechart(const VecField& x, const ChartPtr& to);

// ---------------------------------------------------------------------------
// Cotangent-type charts (those carrying conjugate pairs).

/// Canonical bracket with {p_c, c} = 1. On charts whose momenta have the
/// opposite parity to their coordinates this is the odd (Schouten) bracket.
Expr poisson(const Expr& f, const Expr& g);
/// The derivation {H, .}.
VecField hamiltonianField(const Expr& h);
/// sum_c X^c p_c, with X given on a chart whose coordinates appear in `cot`.
Expr symbol(const VecField& x, const ChartPtr& cot);
/// {{a,theta},b}.
Expr derivedBracketHam(const Expr& theta, const Expr& a, const Expr& b);
/// Weight of the symplectic pairing {p_c, c}: weight(c) + weight(p_c).
Weight pairingWeight(const Chart& cot);

}  // namespace gk
