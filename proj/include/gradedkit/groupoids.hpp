#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradedkit/algebroids.hpp"

namespace gk {

/// A polynomial Lie groupoid in source-adapted coordinates. Every map is a
/// pullback (a Substitution from the target of the pullback's images):
///   source, target : base -> gamma     s^*(b), t^*(b)
///   unit           : gamma -> base     i^*(c)
///   inverse        : gamma -> gamma    optional
///   p1, p2, mult   : gamma -> composable
/// Source-adapted means s^*(b) = b and i^*(b) = b, i^*(Y) = 0 for the fiber
/// block Y (the gamma coordinates not named in base).
struct GroupoidSpec {
  std::string name;
  ChartPtr gamma;
  ChartPtr base;
  Substitution source;
  Substitution target;
  Substitution unit;
  std::optional<Substitution> inverse;
  ChartPtr composable;
  Substitution p1;
  Substitution p2;
  Substitution mult;

  std::vector<int> fiber() const;  // gamma indices of the fiber block
};

/// How the composable chart is parametrized. It is adapted when p2 renames
/// gamma and p1 renames the fiber block: composable = (b, p1-fiber, p2-fiber).
struct ComposableRoles {
  enum class Kind { Base, First, Second };
  struct Role {
    Kind kind = Kind::Base;
    int gammaIndex = -1;
  };
  bool adapted = false;
  std::string reason;
  std::vector<Role> roles;  // per composable canonical index
};
ComposableRoles composableRoles(const GroupoidSpec& g);

/// The structure identities as residuals. Unit, inverse and associativity laws
/// need an adapted composable chart; the triple-composable chart is built from it.
CheckReport verifyGroupoid(const GroupoidSpec& g);

struct WeightedGroupoid {
  GroupoidSpec spec;
  HomAction action;  // on gamma
};
/// The action induced on the base through the units.
HomAction baseAction(const WeightedGroupoid& w);
/// The action induced on the composable chart: (g1, g2) -> (h g1, h g2).
HomAction composableAction(const WeightedGroupoid& w);
CheckReport verifyWeightedGroupoid(const WeightedGroupoid& w);

/// Pi(ker Ts) restricted to the units, with fiber coordinates prefix+Y.
/// Brackets come from right-invariant fields.
AlgebroidData lieFunctor(const GroupoidSpec& g, const std::string& prefix = "d");
/// The linearized action on lieFunctor(w.spec).chart.
HomAction lieFunctorAction(const WeightedGroupoid& w, const std::string& prefix = "d");
/// verifyWeightedAlgebroid plus the commutation of Q with a supplied action.
CheckReport verifyWeightedAlgebroid(const AlgebroidData& a, const HomAction& h);

struct AlgebroidMorphism {
  Substitution map;  // A(H) -> A(G), pullback
  CheckReport report;
};
/// phi : gammaH -> gammaG pullback of a groupoid morphism G -> H.
AlgebroidMorphism lieFunctorMorphism(const GroupoidSpec& g, const GroupoidSpec& h, const Substitution& phi,
                                     const std::string& prefix = "d");

/// Structural weight audit of a bivector written with odd momenta on the
/// shifted cotangent chart of gamma.
CheckReport poissonWeightAudit(const WeightedGroupoid& w, const Expr& lambda);

// Constructions.

/// M x M over the base chart: gamma = (b, Yb) with t = b + Yb.
GroupoidSpec pairGroupoid(const ChartPtr& base, const std::string& name = "pair");
/// Keeps the coordinates of total weight below j.
GroupoidSpec truncateGroupoid(const GroupoidSpec& g, int j);
WeightedGroupoid truncateGroupoid(const WeightedGroupoid& w, int j);
/// First tangent groupoid; the new weight component is appended.
GroupoidSpec tangentGroupoid(const GroupoidSpec& g, const std::string& prefix = "d");

}  // namespace gk
