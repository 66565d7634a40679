#pragma once

#include <string>
#include <vector>

#include "gradedkit/lifts.hpp"

namespace gk {

/// A (weighted) Lie algebroid as a homological field on a shifted GL-bundle
/// chart of arity 2: component 0 is the h-weight, component 1 the linear
/// weight; fiber coordinates are those of linear weight 1.
struct AlgebroidData {
  ChartPtr chart;
  VecField q;
  int degree = 1;

  std::vector<int> fiber() const;
  std::vector<int> base() const;
};

/// Anchor rho_a^A and structure functions C_ab^c, indexed by the fiber and
/// base coordinate lists.
struct AlgebroidStructure {
  std::vector<std::string> fiber;
  std::vector<std::string> base;
  std::vector<std::vector<Expr>> anchor;                  // [a][A]
  std::vector<std::vector<std::vector<Expr>>> structure;  // [a][b][c] = C_ab^c

  bool operator==(const AlgebroidStructure& o) const;
};

/// Q = theta^a rho_a^A d/dx^A + 1/2 theta^a theta^b C_ba^c d/dtheta^c, after
/// antisymmetrizing C in its lower indices.
AlgebroidData algebroidFromStructure(const ChartPtr& chart, const AlgebroidStructure& s, int degree);
/// Inverse reading; throws when Q is not of algebroid form.
AlgebroidStructure structureFromQ(const AlgebroidData& a);

CheckReport verifyWeightedAlgebroid(const AlgebroidData& a);
/// Restriction to the coordinates of h-weight below j.
AlgebroidData towerProject(const AlgebroidData& a, int j);

struct Section {
  VecField field;  // sum_a s^a(x) d/dtheta^a
  int weight = 0;
};
/// Builds an interior-product field; the weight is read from the components.
Section makeSection(const AlgebroidData& a, const std::vector<std::pair<std::string, Expr>>& components);
/// Every homogeneous section whose coefficients are monomials in the base
/// coordinates of degree at most maxDegree and whose weight lies in weights.
std::vector<Section> basisSections(const AlgebroidData& a, const std::vector<int>& weights, int maxDegree);
/// i_{[s1,s2]} = [[Q, i_s1], i_s2].
Section sectionBracket(const AlgebroidData& a, const Section& s1, const Section& s2);
/// rho(s)[f] = [Q, i_s](f).
Expr anchorApply(const AlgebroidData& a, const Section& s, const Expr& f);
/// rho(s) as a field along the base coordinates.
VecField anchorField(const AlgebroidData& a, const Section& s);

// ---------------------------------------------------------------------------

/// Hamiltonians on the cotangent chart of a shifted GL-bundle chart (arity 3).
struct BiAlgebroidData {
  ChartPtr cot;
  Expr q;  // tri-weight (k-1,2,1)
  Expr s;  // tri-weight (k-1,1,2)
  int degree = 1;
};

CheckReport verifyBiAlgebroid(const BiAlgebroidData& b);
/// The pair (A, A*) with S = {P, symbol(Q)} for P quadratic in the fiber momenta.
BiAlgebroidData triangularBiAlgebroid(const AlgebroidData& a, const Expr& p);
/// Schouten self-bracket {{P, Q}, P} of the algebroid.
Expr schoutenSquare(const BiAlgebroidData& b, const Expr& p);
/// The same pair read from the dual side: roles of the two Hamiltonians and of
/// the last two weight components exchanged.
BiAlgebroidData dualBiAlgebroid(const BiAlgebroidData& b);

struct SharpMap {
  ChartPtr target;     // shifted tangent of the shifted GL-bundle
  Substitution map;    // target -> cot: dx -> dS/dp_x, dtheta -> dS/dchi
  CheckReport report;  // Q-morphism and weight audits
};
SharpMap sharpMap(const BiAlgebroidData& b);

struct CourantData {
  ChartPtr chart;  // collapsed bi-weight
  Expr theta;      // Q + lambda S
  Rational lambda;
  int degree = 1;
};
CourantData courantFromBiAlgebroid(const BiAlgebroidData& b, const Rational& lambda);
CheckReport verifyCourant(const CourantData& c);
/// Base coordinates of the Courant chart (second weight 0, not momenta).
bool isBaseFunction(const CourantData& c, const Expr& f);
/// Linear in the degree-one coordinates with base coefficients.
bool isCourantSection(const CourantData& c, const Expr& s);
Expr courantPairing(const CourantData& c, const Expr& s1, const Expr& s2);
Expr courantDorfman(const CourantData& c, const Expr& s1, const Expr& s2);
Expr courantAnchor(const CourantData& c, const Expr& s, const Expr& f);
/// Sections of bi-degree (k-1,1) with monomial base coefficients up to maxDegree.
std::vector<Expr> courantBasisSections(const CourantData& c, int maxDegree);

}  // namespace gk
