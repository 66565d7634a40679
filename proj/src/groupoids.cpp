#include "gradedkit/groupoids.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace gk {

namespace {

std::optional<int> asCoordinate(const Expr& e) {
  if (e.size() != 1) return std::nullopt;
  const auto& [m, c] = *e.terms().begin();
  if (c != 1 || m.factors.size() != 1 || !m.factors[0].isVar() || m.factors[0].exp != 1) return std::nullopt;
  return m.factors[0].var;
}

/// The same substitution between the parameter-extended charts.
Substitution extend(const Substitution& s, const ChartPtr& fromT, const ChartPtr& toT) {
  Substitution out(fromT, toT);
  for (std::size_t i = 0; i < s.from()->size(); ++i) {
    const auto& c = s.from()->coord(i);
    if (c.parameter) continue;
    out.set(c.name, rechart(s.image(static_cast<int>(i)), toT));
  }
  return out;
}

std::vector<std::pair<std::string, Expr>> difference(const ChartPtr& from, const std::function<Expr(int)>& a,
                                                     const std::function<Expr(int)>& b) {
  std::vector<std::pair<std::string, Expr>> parts;
  for (int idx : from->declarationOrder()) {
    if (from->coord(idx).parameter) continue;
    parts.emplace_back(from->coord(idx).name, a(idx) - b(idx));
  }
  return parts;
}

std::vector<std::pair<std::string, Expr>> difference(const Substitution& a, const Substitution& b) {
  return difference(
      a.from(), [&](int i) { return a.image(i); }, [&](int i) { return b.image(i); });
}

/// Where the composable coordinates of an adapted chart come from, for the
/// pair (gA, gB) of gamma-points given as pullbacks gamma -> X.
Substitution pairSubstitution(const GroupoidSpec& g, const ComposableRoles& r, const Substitution& gA,
                              const Substitution& gB) {
  Substitution out(g.composable, gA.to());
  for (std::size_t i = 0; i < g.composable->size(); ++i) {
    if (g.composable->coord(i).parameter) continue;
    const auto& role = r.roles[i];
    const Substitution& src = role.kind == ComposableRoles::Kind::First ? gA : gB;
    out.set(static_cast<int>(i), src.image(role.gammaIndex));
  }
  return out;
}

/// m(gA, gB) as a pullback gamma -> X.
Substitution product(const GroupoidSpec& g, const ComposableRoles& r, const Substitution& gA, const Substitution& gB) {
  Substitution pair = pairSubstitution(g, r, gA, gB);
  Substitution out(g.gamma, gA.to());
  for (std::size_t i = 0; i < g.gamma->size(); ++i)
    if (!g.gamma->coord(i).parameter) out.set(static_cast<int>(i), substitute(g.mult.image(static_cast<int>(i)), pair));
  return out;
}

/// Composable-chart map induced by a gamma map phi (gamma -> gamma' pullback)
/// given the embeddings p1X, p2X of gamma' into the target composable chart.
Substitution induceComposable(const GroupoidSpec& g, const ComposableRoles& r, const Substitution& phi,
                              const Substitution& p1X, const Substitution& p2X) {
  Substitution out(g.composable, p1X.to());
  for (std::size_t i = 0; i < g.composable->size(); ++i) {
    if (g.composable->coord(i).parameter) continue;
    const auto& role = r.roles[i];
    const Substitution& emb = role.kind == ComposableRoles::Kind::First ? p1X : p2X;
    out.set(static_cast<int>(i), substitute(phi.image(role.gammaIndex), emb));
  }
  return out;
}

std::string uniqueName(const std::set<std::string>& taken, std::string n) {
  while (taken.count(n)) n += "'";
  return n;
}

bool sourceAdapted(const GroupoidSpec& g, std::string& why) {
  for (std::size_t i = 0; i < g.base->size(); ++i) {
    const auto& b = g.base->coord(i);
    if (b.parameter) continue;
    auto gi = g.gamma->find(b.name);
    if (!gi) {
      why = "base coordinate '" + b.name + "' is not a gamma coordinate";
      return false;
    }
    if (g.source.image(static_cast<int>(i)) != Expr::var(g.gamma, *gi)) {
      why = "source does not forget the fiber at '" + b.name + "'";
      return false;
    }
    if (g.unit.image(*gi) != Expr::var(g.base, static_cast<int>(i))) {
      why = "unit does not fix '" + b.name + "'";
      return false;
    }
  }
  for (int y : g.fiber())
    if (!g.unit.image(y).isZero()) {
      why = "unit does not vanish on the fiber coordinate '" + g.gamma->coord(y).name + "'";
      return false;
    }
  return true;
}

void requireAdapted(const GroupoidSpec& g, const ComposableRoles& r, const char* what) {
  std::string why;
  if (!sourceAdapted(g, why)) throw Error(std::string(what) + ": chart is not source-adapted: " + why);
  if (!r.adapted) throw Error(std::string(what) + ": composable chart is not adapted: " + r.reason);
}

}  // namespace

std::vector<int> GroupoidSpec::fiber() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < gamma->size(); ++i) {
    const auto& c = gamma->coord(i);
    if (!c.parameter && !base->find(c.name)) out.push_back(static_cast<int>(i));
  }
  return out;
}

ComposableRoles composableRoles(const GroupoidSpec& g) {
  ComposableRoles r;
  r.roles.assign(g.composable->size(), {});
  std::vector<int> seen(g.composable->size(), 0);
  auto assign = [&](const Expr& img, ComposableRoles::Kind kind, int gi, const std::string& what) {
    auto c = asCoordinate(img);
    if (!c) {
      r.reason = what + " of '" + g.gamma->coord(gi).name + "' is not a single coordinate";
      return false;
    }
    if (seen[*c]++) {
      r.reason = "composable coordinate '" + g.composable->coord(*c).name + "' is used twice";
      return false;
    }
    r.roles[*c] = {kind, gi};
    return true;
  };
  for (std::size_t i = 0; i < g.base->size(); ++i) {
    if (g.base->coord(i).parameter) continue;
    auto gi = g.gamma->find(g.base->coord(i).name);
    if (!gi) {
      r.reason = "base coordinate missing from gamma";
      return r;
    }
    if (!assign(g.p2.image(*gi), ComposableRoles::Kind::Base, *gi, "p2 image")) return r;
  }
  for (int y : g.fiber()) {
    if (!assign(g.p2.image(y), ComposableRoles::Kind::Second, y, "p2 image")) return r;
    if (!assign(g.p1.image(y), ComposableRoles::Kind::First, y, "p1 image")) return r;
  }
  for (std::size_t i = 0; i < g.composable->size(); ++i)
    if (!g.composable->coord(i).parameter && !seen[i]) {
      r.reason = "composable coordinate '" + g.composable->coord(i).name + "' is not reached";
      return r;
    }
  r.adapted = true;
  return r;
}

CheckReport verifyGroupoid(const GroupoidSpec& g) {
  CheckReport rep;
  rep.kind = "groupoid";
  rep.id = g.name;
  std::string why;
  bool adaptedChart = sourceAdapted(g, why);
  rep.audit("source-adapted chart", "yes", adaptedChart ? "yes" : "no: " + why);

  auto baseDiff = [&](const std::string& name, const Substitution& via1, const Substitution& s1,
                      const Substitution& via2, const Substitution& s2) {
    rep.residual(name, difference(
                           g.base, [&](int b) { return substitute(s1.image(b), via1); },
                           [&](int b) { return substitute(s2.image(b), via2); }));
  };
  baseDiff("s p1 - t p2", g.p1, g.source, g.p2, g.target);
  baseDiff("s m - s p2", g.mult, g.source, g.p2, g.source);
  baseDiff("t m - t p1", g.mult, g.target, g.p1, g.target);
  Substitution idBase = identitySubstitution(g.base);
  rep.residual("s i - id", difference(
                               g.base, [&](int b) { return substitute(g.source.image(b), g.unit); },
                               [&](int b) { return idBase.image(b); }));
  rep.residual("t i - id", difference(
                               g.base, [&](int b) { return substitute(g.target.image(b), g.unit); },
                               [&](int b) { return idBase.image(b); }));
  if (g.inverse) {
    baseDiff("s inv - t", *g.inverse, g.source, identitySubstitution(g.gamma), g.target);
    baseDiff("t inv - s", *g.inverse, g.target, identitySubstitution(g.gamma), g.source);
  }

  ComposableRoles r = composableRoles(g);
  if (!r.adapted) {
    std::string reason = "composable chart is not adapted (" + r.reason + ")";
    rep.notChecked("unit laws", reason);
    rep.notChecked("inverse laws", reason);
    rep.notChecked("associativity", reason);
    return rep;
  }
  Substitution id = identitySubstitution(g.gamma);
  Substitution unitT = compose(g.unit, g.target);
  Substitution unitS = compose(g.unit, g.source);
  rep.residual("m(i t g, g) - g", difference(product(g, r, unitT, id), id));
  rep.residual("m(g, i s g) - g", difference(product(g, r, id, unitS), id));
  if (g.inverse) {
    rep.residual("m(g, inv g) - i t g", difference(product(g, r, id, *g.inverse), unitT));
    rep.residual("m(inv g, g) - i s g", difference(product(g, r, *g.inverse, id), unitS));
  } else {
    rep.notChecked("inverse laws", "no inverse supplied");
  }

  // triple (g1, g2, g3) with s(g1) = t(g2), s(g2) = t(g3)
  std::set<std::string> taken;
  for (const auto& c : g.gamma->coords()) taken.insert(c.name);
  std::vector<Coordinate> coords;
  for (const auto& c : g.base->declaredCoords())
    if (!c.parameter) coords.push_back(c);
  auto fib = g.fiber();
  std::vector<std::vector<std::string>> names(3);
  for (int k = 0; k < 3; ++k)
    for (int y : fib) {
      auto c = g.gamma->coord(y);
      c.name = uniqueName(taken, c.name + "_" + std::to_string(k + 1));
      taken.insert(c.name);
      names[k].push_back(c.name);
      coords.push_back(c);
    }
  ChartPtr triple = Chart::make(g.gamma->arity(), coords);
  std::vector<Substitution> el(3, Substitution(g.gamma, triple));
  for (int k = 2; k >= 0; --k) {
    for (std::size_t i = 0; i < g.base->size(); ++i) {
      const auto& b = g.base->coord(i);
      if (b.parameter) continue;
      Expr img = k == 2 ? Expr::var(triple, b.name) : substitute(g.target.image(static_cast<int>(i)), el[k + 1]);
      el[k].set(b.name, img);
    }
    for (std::size_t j = 0; j < fib.size(); ++j) el[k].set(fib[j], Expr::var(triple, names[k][j]));
  }
  Substitution lhs = product(g, r, product(g, r, el[0], el[1]), el[2]);
  Substitution rhs = product(g, r, el[0], product(g, r, el[1], el[2]));
  rep.residual("(g1 g2) g3 - g1 (g2 g3)", difference(lhs, rhs));
  return rep;
}

HomAction baseAction(const WeightedGroupoid& w) {
  const auto& g = w.spec;
  const auto& h = w.action;
  HomAction out = HomAction::identity(g.base, h.param);
  for (std::size_t i = 0; i < g.base->size(); ++i) {
    const auto& b = g.base->coord(i);
    if (b.parameter) continue;
    Expr img = h.map.image(g.gamma->index(b.name));
    for (int y : g.fiber())
      if (img.dependsOn(h.withT->index(g.gamma->coord(y).name)))
        throw Error("the action does not restrict to the base: the image of '" + b.name + "' depends on '" +
                    g.gamma->coord(y).name + "'");
    out.map.set(b.name, rechart(img, out.withT));
  }
  return out;
}

HomAction composableAction(const WeightedGroupoid& w) {
  const auto& g = w.spec;
  ComposableRoles r = composableRoles(g);
  if (!r.adapted) throw Error("composableAction: composable chart is not adapted: " + r.reason);
  HomAction out = HomAction::identity(g.composable, w.action.param);
  Substitution p1T = extend(g.p1, w.action.withT, out.withT);
  Substitution p2T = extend(g.p2, w.action.withT, out.withT);
  out.map = induceComposable(g, r, w.action.map, p1T, p2T);
  return out;
}

CheckReport verifyWeightedGroupoid(const WeightedGroupoid& w) {
  const auto& g = w.spec;
  const auto& h = w.action;
  CheckReport rep;
  rep.kind = "weighted-groupoid";
  rep.id = g.name;
  rep.absorb(verifyAction(h), "action: ");
  HomAction gb;
  try {
    gb = baseAction(w);
    rep.audit("action restricts to the base", "yes", "yes");
  } catch (const Error& e) {
    rep.audit("action restricts to the base", "yes", std::string("no: ") + e.what());
    return rep;
  }
  rep.absorb(verifyAction(gb), "base action: ");

  ChartPtr gammaT = h.withT, baseT = gb.withT;
  Substitution sT = extend(g.source, baseT, gammaT);
  Substitution tT = extend(g.target, baseT, gammaT);
  Substitution iT = extend(g.unit, gammaT, baseT);
  auto inter = [&](const std::string& name, const Substitution& mapT, const Substitution& map) {
    rep.residual(name, difference(
                           g.base, [&](int b) { return substitute(map.image(b), h.map); },
                           [&](int b) { return substitute(gb.map.image(b), mapT); }));
  };
  inter("s h - g s", sT, g.source);
  inter("t h - g t", tT, g.target);
  rep.residual("h i - i g", difference(
                                g.gamma, [&](int c) { return substitute(h.map.image(c), iT); },
                                [&](int c) { return substitute(g.unit.image(c), gb.map); }));

  ComposableRoles r = composableRoles(g);
  if (!r.adapted) {
    rep.notChecked("multiplicativity", "composable chart is not adapted (" + r.reason + ")");
    return rep;
  }
  HomAction hc = composableAction(w);
  Substitution mT = extend(g.mult, gammaT, hc.withT);
  rep.residual("h m - m (h x h)", difference(
                                      g.gamma, [&](int c) { return substitute(h.map.image(c), mT); },
                                      [&](int c) { return substitute(g.mult.image(c), hc.map); }));
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

ChartPtr algebroidChart(const GroupoidSpec& g, const std::string& prefix) {
  std::vector<Coordinate> coords;
  auto ext = [](const Weight& w, int last) {
    auto v = w.components();
    v.push_back(last);
    return Weight(v);
  };
  for (auto c : g.base->declaredCoords()) {
    if (c.parameter) continue;
    c.weight = ext(c.weight, 0);
    coords.push_back(c);
  }
  for (int idx : g.gamma->declarationOrder()) {
    auto c = g.gamma->coord(idx);
    if (c.parameter || g.base->find(c.name)) continue;
    c.name = prefix + c.name;
    c.weight = ext(c.weight, 1);
    c.parity = c.parity + Parity::Odd;
    coords.push_back(c);
  }
  return Chart::make(g.gamma->arity() + 1, coords);
}

int groupoidDegree(const GroupoidSpec& g) {
  int k = 0;
  for (const auto& c : g.gamma->coords())
    if (!c.parameter) k = std::max(k, c.weight.total());
  return k;
}

}  // namespace

AlgebroidData lieFunctor(const GroupoidSpec& g, const std::string& prefix) {
  ComposableRoles r = composableRoles(g);
  requireAdapted(g, r, "lieFunctor");
  ChartPtr chart = algebroidChart(g, prefix);
  auto fib = g.fiber();
  // declaration order of the fiber block
  std::vector<int> order;
  for (int idx : g.gamma->declarationOrder())
    if (std::find(fib.begin(), fib.end(), idx) != fib.end()) order.push_back(idx);

  AlgebroidStructure s;
  for (const auto& c : g.base->declaredCoords())
    if (!c.parameter) s.base.push_back(c.name);
  for (int y : order) s.fiber.push_back(prefix + g.gamma->coord(y).name);

  for (int y : order) {
    std::vector<Expr> row;
    for (const auto& b : s.base) {
      Expr t = g.target.image(g.base->index(b));
      row.push_back(rechart(substitute(derivative(t, y), g.unit), chart));
    }
    s.anchor.push_back(row);
  }

  // right-invariant fields of the constant sections: m(h, g) differentiated in
  // the h-fiber at h = i(t(g))
  std::vector<int> firstOf(g.gamma->size(), -1);
  for (std::size_t i = 0; i < r.roles.size(); ++i)
    if (!g.composable->coord(i).parameter && r.roles[i].kind == ComposableRoles::Kind::First)
      firstOf[r.roles[i].gammaIndex] = static_cast<int>(i);
  Substitution atG(g.composable, g.gamma);
  for (std::size_t i = 0; i < r.roles.size(); ++i) {
    if (g.composable->coord(i).parameter) continue;
    const auto& role = r.roles[i];
    if (role.kind == ComposableRoles::Kind::First)
      atG.set(static_cast<int>(i), Expr(g.gamma));
    else
      atG.set(static_cast<int>(i), Expr::var(g.gamma, role.gammaIndex));
  }
  std::vector<VecField> right;
  for (int y : order) {
    VecField ri(g.gamma);
    for (int z : order) ri.set(z, substitute(derivative(g.mult.image(z), firstOf[y]), atG));
    right.push_back(ri);
  }
  const std::size_t n = order.size();
  s.structure.assign(n, std::vector<std::vector<Expr>>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      VecField br = lieBracket(right[a], right[b]);
      for (int z : order) s.structure[a][b].push_back(rechart(substitute(br.component(z), g.unit), chart));
    }
  return algebroidFromStructure(chart, s, groupoidDegree(g) + 1);
}

HomAction lieFunctorAction(const WeightedGroupoid& w, const std::string& prefix) {
  const auto& g = w.spec;
  const auto& h = w.action;
  HomAction gb = baseAction(w);
  ChartPtr chart = algebroidChart(g, prefix);
  HomAction out = HomAction::identity(chart, h.param);
  for (const auto& b : g.base->coords())
    if (!b.parameter) out.map.set(b.name, rechart(gb.map.image(b.name), out.withT));
  Substitution iT = extend(g.unit, h.withT, gb.withT);
  auto fib = g.fiber();
  for (int z : fib) {
    Expr img(out.withT);
    for (int y : fib) {
      Expr coef = substitute(derivative(h.map.image(z), h.withT->index(g.gamma->coord(y).name)), iT);
      if (coef.isZero()) continue;
      img += Expr::var(out.withT, prefix + g.gamma->coord(y).name) * rechart(coef, out.withT);
    }
    out.map.set(prefix + g.gamma->coord(z).name, img);
  }
  return out;
}

CheckReport verifyWeightedAlgebroid(const AlgebroidData& a, const HomAction& h) {
  CheckReport rep = verifyWeightedAlgebroid(a);
  if (!sameChart(h.chart, a.chart)) throw Error("verifyWeightedAlgebroid: the action lives on another chart");
  rep.absorb(verifyAction(h), "action: ");
  VecField qt = rechart(a.q, h.withT);
  rep.residual("Q h^* - h^* Q (supplied action)", difference(
                                                      a.chart, [&](int c) { return qt(h.map.image(c)); },
                                                      [&](int c) { return substitute(a.q.component(c), h.map); }));
  HomAction canon = canonicalAction(a.chart, {0});
  bool same = true;
  for (std::size_t i = 0; i < a.chart->size(); ++i)
    if (!a.chart->coord(i).parameter &&
        h.map.image(static_cast<int>(i)).str() != canon.map.image(static_cast<int>(i)).str())
      same = false;
  rep.audit("supplied action is the canonical action of the h-weights", "yes", same ? "yes" : "no");
  return rep;
}

AlgebroidMorphism lieFunctorMorphism(const GroupoidSpec& g, const GroupoidSpec& h, const Substitution& phi,
                                     const std::string& prefix) {
  if (!sameChart(phi.from(), h.gamma) || !sameChart(phi.to(), g.gamma))
    throw Error("lieFunctorMorphism: the map must pull gamma of the target back to gamma of the source");
  AlgebroidData ag = lieFunctor(g, prefix), ah = lieFunctor(h, prefix);
  AlgebroidMorphism out;
  CheckReport& rep = out.report;
  rep.kind = "groupoid-morphism";

  Substitution phiBase(h.base, g.base);
  for (const auto& b : h.base->coords())
    if (!b.parameter) phiBase.set(b.name, substitute(phi.image(h.gamma->index(b.name)), g.unit));
  auto inter = [&](const std::string& name, const Substitution& mh, const Substitution& mg) {
    rep.residual(name, difference(
                           h.base, [&](int b) { return substitute(mh.image(b), phi); },
                           [&](int b) { return substitute(phiBase.image(b), mg); }));
  };
  inter("s phi - phi0 s", h.source, g.source);
  inter("t phi - phi0 t", h.target, g.target);
  ComposableRoles rg = composableRoles(g), rh = composableRoles(h);
  if (rg.adapted && rh.adapted) {
    Substitution phi2 = induceComposable(h, rh, phi, g.p1, g.p2);
    rep.residual("phi m - m (phi x phi)", difference(
                                              h.gamma, [&](int c) { return substitute(phi.image(c), g.mult); },
                                              [&](int c) { return substitute(h.mult.image(c), phi2); }));
  } else {
    rep.notChecked("multiplicativity", "composable chart is not adapted");
  }

  out.map = Substitution(ah.chart, ag.chart);
  for (const auto& b : h.base->coords())
    if (!b.parameter) out.map.set(b.name, rechart(phiBase.image(b.name), ag.chart));
  auto fg = g.fiber();
  for (int z : h.fiber()) {
    Expr img(ag.chart);
    for (int y : fg) {
      Expr coef = substitute(derivative(phi.image(z), y), g.unit);
      if (!coef.isZero()) img += Expr::var(ag.chart, prefix + g.gamma->coord(y).name) * rechart(coef, ag.chart);
    }
    out.map.set(prefix + h.gamma->coord(z).name, img);
  }
  rep.residual("Q_G phi' - phi' Q_H", difference(
                                          ah.chart, [&](int c) { return ag.q(out.map.image(c)); },
                                          [&](int c) { return substitute(ah.q.component(c), out.map); }));
  return out;
}

CheckReport poissonWeightAudit(const WeightedGroupoid& w, const Expr& lambda) {
  CheckReport rep;
  rep.kind = "poisson-weight";
  rep.id = w.spec.name;
  const ChartPtr& cot = lambda.chart();
  if (!cot || cot->bracketParity() != Parity::Odd) throw Error("poissonWeightAudit: expected odd momenta");
  for (const auto& c : w.spec.gamma->coords())
    if (!c.parameter && !cot->find(c.name))
      throw Error("poissonWeightAudit: '" + c.name + "' is missing from the bivector chart");
  const int k = actionDegree(w.action);
  rep.residual("[L,L]", poisson(lambda, lambda));
  if (lambda.isZero()) {
    rep.audit("natural weight", std::to_string(-k), "0 (vacuous)", true);
  } else {
    auto md = momentumDegree(lambda);
    rep.audit("momentum degree", "2", md ? std::to_string(*md) : "mixed");
    auto ns = naturalShift(lambda);
    rep.audit("natural weight", std::to_string(-k), ns ? std::to_string(ns->total()) : "inhomogeneous");
    for (const auto& pr : cot->conjugates()) {
      Expr d = derivative(lambda, pr.momentum);
      if (d.isZero()) continue;
      const auto& c = cot->coord(pr.coord);
      auto s = naturalShift(d);
      auto m = momentumDegree(d);
      std::string actual = s && m ? std::to_string(s->total() + k * *m) : "inhomogeneous";
      rep.audit("sharp image of d" + c.name, std::to_string(c.weight.total()), actual);
    }
  }
  rep.notChecked("multiplicativity", "coisotropy of the graph of the multiplication is not tested");
  return rep;
}

// ---------------------------------------------------------------------------

GroupoidSpec pairGroupoid(const ChartPtr& base, const std::string& name) {
  std::vector<Coordinate> gc, cc;
  std::set<std::string> taken;
  for (const auto& c : base->coords()) taken.insert(c.name);
  std::vector<std::pair<std::string, std::string>> fy;  // base name -> (Y, Z)
  std::vector<std::string> zs;
  for (const auto& c : base->declaredCoords()) {
    if (c.parameter) continue;
    gc.push_back(c);
    cc.push_back(c);
  }
  for (const auto& c : base->declaredCoords()) {
    if (c.parameter) continue;
    auto y = c, z = c;
    y.name = uniqueName(taken, "Y" + c.name);
    taken.insert(y.name);
    z.name = uniqueName(taken, "Z" + c.name);
    taken.insert(z.name);
    gc.push_back(y);
    cc.push_back(y);
    cc.push_back(z);
    fy.emplace_back(c.name, y.name);
    zs.push_back(z.name);
  }
  GroupoidSpec g;
  g.name = name;
  g.base = base;
  g.gamma = Chart::make(base->arity(), gc);
  g.composable = Chart::make(base->arity(), cc);
  g.source = Substitution(base, g.gamma);
  g.target = Substitution(base, g.gamma);
  g.unit = Substitution(g.gamma, base);
  g.inverse = Substitution(g.gamma, g.gamma);
  g.p1 = Substitution(g.gamma, g.composable);
  g.p2 = Substitution(g.gamma, g.composable);
  g.mult = Substitution(g.gamma, g.composable);
  auto G = [&](const std::string& n) { return Expr::var(g.gamma, n); };
  auto C = [&](const std::string& n) { return Expr::var(g.composable, n); };
  for (std::size_t i = 0; i < fy.size(); ++i) {
    const auto& [b, y] = fy[i];
    const auto& z = zs[i];
    g.source.set(b, G(b));
    g.target.set(b, G(b) + G(y));
    g.unit.set(b, Expr::var(base, b));
    g.unit.set(y, Expr(base));
    g.inverse->set(b, G(b) + G(y));
    g.inverse->set(y, -G(y));
    g.p2.set(b, C(b));
    g.p2.set(y, C(z));
    g.p1.set(b, C(b) + C(z));
    g.p1.set(y, C(y));
    g.mult.set(b, C(b));
    g.mult.set(y, C(y) + C(z));
  }
  return g;
}

namespace {

ChartPtr restrictChart(const ChartPtr& c, int j) { return truncateChart(c, j - 1).chart; }

Substitution restrictSubstitution(const Substitution& s, const ChartPtr& from, const ChartPtr& to) {
  Substitution out(from, to);
  for (const auto& c : from->coords()) {
    if (c.parameter) continue;
    try {
      out.set(c.name, rechart(s.image(s.from()->index(c.name)), to));
    } catch (const Error&) {
      throw Error("truncation: the image of '" + c.name + "' depends on discarded coordinates");
    }
  }
  return out;
}

}  // namespace

GroupoidSpec truncateGroupoid(const GroupoidSpec& g, int j) {
  if (j < 1) throw Error("truncateGroupoid: level must be positive");
  GroupoidSpec out;
  out.name = g.name;
  out.gamma = restrictChart(g.gamma, j);
  out.base = restrictChart(g.base, j);
  out.composable = restrictChart(g.composable, j);
  out.source = restrictSubstitution(g.source, out.base, out.gamma);
  out.target = restrictSubstitution(g.target, out.base, out.gamma);
  out.unit = restrictSubstitution(g.unit, out.gamma, out.base);
  if (g.inverse) out.inverse = restrictSubstitution(*g.inverse, out.gamma, out.gamma);
  out.p1 = restrictSubstitution(g.p1, out.gamma, out.composable);
  out.p2 = restrictSubstitution(g.p2, out.gamma, out.composable);
  out.mult = restrictSubstitution(g.mult, out.gamma, out.composable);
  return out;
}

WeightedGroupoid truncateGroupoid(const WeightedGroupoid& w, int j) {
  WeightedGroupoid out;
  out.spec = truncateGroupoid(w.spec, j);
  out.action = HomAction::identity(out.spec.gamma, w.action.param);
  out.action.map = restrictSubstitution(w.action.map, out.spec.gamma, out.action.withT);
  return out;
}

GroupoidSpec tangentGroupoid(const GroupoidSpec& g, const std::string& prefix) {
  GroupoidSpec out;
  out.name = g.name;
  out.gamma = higherTangentChart(g.gamma, 1, prefix);
  out.base = higherTangentChart(g.base, 1, prefix);
  out.composable = higherTangentChart(g.composable, 1, prefix);
  auto lift = [&](const Substitution& s, const ChartPtr& from, const ChartPtr& to) {
    return liftSubstitution(s, 1, from, to, prefix);
  };
  out.source = lift(g.source, out.base, out.gamma);
  out.target = lift(g.target, out.base, out.gamma);
  out.unit = lift(g.unit, out.gamma, out.base);
  if (g.inverse) out.inverse = lift(*g.inverse, out.gamma, out.gamma);
  out.p1 = lift(g.p1, out.gamma, out.composable);
  out.p2 = lift(g.p2, out.gamma, out.composable);
  out.mult = lift(g.mult, out.gamma, out.composable);
  return out;
}

}  // namespace gk
