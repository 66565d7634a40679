#pragma once

#include "gradedkit/groupoids.hpp"
#include "support.hpp"

namespace gk::testing {

/// x weight 0, y weight 1.
inline ChartPtr f1Chart() { return mkChart(1, {even("x", {0}), even("y", {1})}); }

inline WeightedGroupoid weightedPair() {
  WeightedGroupoid w;
  w.spec = pairGroupoid(f1Chart(), "pairF1");
  w.action = canonicalAction(w.spec.gamma);
  return w;
}

/// The affine group a x + b over a point, with a = 1 + Y1 and b = Y2.
inline GroupoidSpec axbGroupoid() {
  GroupoidSpec g;
  g.name = "axb";
  g.base = mkChart(1, {});
  g.gamma = mkChart(1, {even("Y1", {0}), even("Y2", {0})});
  g.composable = mkChart(1, {even("Y1", {0}), even("Y2", {0}), even("Z1", {0}), even("Z2", {0})});
  g.source = Substitution(g.base, g.gamma);
  g.target = Substitution(g.base, g.gamma);
  g.unit = Substitution(g.gamma, g.base);
  g.unit.set("Y1", Expr(g.base));
  g.unit.set("Y2", Expr(g.base));
  auto C = [&](const std::string& n) { return V(g.composable, n); };
  g.p1 = Substitution(g.gamma, g.composable);
  g.p2 = Substitution(g.gamma, g.composable);
  g.p2.set("Y1", C("Z1"));
  g.p2.set("Y2", C("Z2"));
  g.mult = Substitution(g.gamma, g.composable);
  g.mult.set("Y1", C("Y1") + C("Z1") + C("Y1") * C("Z1"));
  g.mult.set("Y2", (K(g.composable, 1) + C("Y1")) * C("Z2") + C("Y2"));
  return g;
}

/// The multiplicative group acting on the line by scaling: b of weight 1,
/// a = 1 + Y of weight 0, t(b, Y) = (1 + Y) b.
inline WeightedGroupoid scalingActionGroupoid() {
  GroupoidSpec g;
  g.name = "scaling";
  g.base = mkChart(1, {even("b", {1})});
  g.gamma = mkChart(1, {even("b", {1}), even("Y", {0})});
  g.composable = mkChart(1, {even("b", {1}), even("Y", {0}), even("Z", {0})});
  auto G = [&](const std::string& n) { return V(g.gamma, n); };
  auto C = [&](const std::string& n) { return V(g.composable, n); };
  g.source = Substitution(g.base, g.gamma);
  g.target = Substitution(g.base, g.gamma);
  g.target.set("b", (K(g.gamma, 1) + G("Y")) * G("b"));
  g.unit = Substitution(g.gamma, g.base);
  g.unit.set("Y", Expr(g.base));
  g.p2 = Substitution(g.gamma, g.composable);
  g.p2.set("Y", C("Z"));
  g.p1 = Substitution(g.gamma, g.composable);
  g.p1.set("b", (K(g.composable, 1) + C("Z")) * C("b"));
  g.mult = Substitution(g.gamma, g.composable);
  g.mult.set("Y", C("Y") + C("Z") + C("Y") * C("Z"));
  WeightedGroupoid w{g, canonicalAction(g.gamma)};
  return w;
}

/// Every structure map the identity.
inline WeightedGroupoid unitGroupoid() {
  GroupoidSpec g;
  g.name = "unit";
  g.base = f1Chart();
  g.gamma = f1Chart();
  g.composable = f1Chart();
  g.source = Substitution(g.base, g.gamma);
  g.target = Substitution(g.base, g.gamma);
  g.unit = Substitution(g.gamma, g.base);
  g.inverse = Substitution(g.gamma, g.gamma);
  g.p1 = Substitution(g.gamma, g.composable);
  g.p2 = Substitution(g.gamma, g.composable);
  g.mult = Substitution(g.gamma, g.composable);
  return {g, canonicalAction(g.gamma)};
}

}  // namespace gk::testing
