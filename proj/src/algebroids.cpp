#include "gradedkit/algebroids.hpp"

#include <functional>

namespace gk {

namespace {

void requireArity(const Chart& c, std::size_t n, const char* what) {
  if (c.arity() != n) throw Error(std::string(what) + ": expected a chart of arity " + std::to_string(n));
}

std::vector<int> coordsWithLinearWeight(const Chart& c, int value) {
  std::vector<int> out;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!c.coord(i).parameter && c.coord(i).weight[c.arity() - 1] == value) out.push_back(static_cast<int>(i));
  return out;
}

int fiberDegree(const Chart& c, const Monomial& m) {
  int d = 0;
  for (const auto& f : m.factors)
    if (f.isVar() && c.coord(f.var).weight[c.arity() - 1] > 0) d += f.exp;
  return d;
}

bool hasFiberDegree(const Expr& e, int d) {
  for (const auto& [m, k] : e.terms())
    if (fiberDegree(*e.chart(), m) != d) return false;
  return true;
}

/// Monomials in the given coordinates of total degree <= maxDegree, constant first.
std::vector<Expr> monomials(const ChartPtr& chart, const std::vector<int>& vars, int maxDegree) {
  std::vector<Expr> out;
  std::function<void(std::size_t, int, Expr)> rec = [&](std::size_t from, int left, Expr m) {
    out.push_back(m);
    if (left == 0) return;
    for (std::size_t i = from; i < vars.size(); ++i) {
      if (chart->coord(vars[i]).parity == Parity::Odd) continue;
      rec(i, left - 1, m * Expr::var(chart, vars[i]));
    }
  };
  rec(0, maxDegree, Expr::constant(chart, Rational(1)));
  return out;
}

std::string weightText(const std::optional<Weight>& w) { return w ? w->str() : "inhomogeneous"; }

}  // namespace

std::vector<int> AlgebroidData::fiber() const { return coordsWithLinearWeight(*chart, 1); }
std::vector<int> AlgebroidData::base() const { return coordsWithLinearWeight(*chart, 0); }

bool AlgebroidStructure::operator==(const AlgebroidStructure& o) const {
  return fiber == o.fiber && base == o.base && anchor == o.anchor && structure == o.structure;
}

AlgebroidData algebroidFromStructure(const ChartPtr& chart, const AlgebroidStructure& s, int degree) {
  if (chart->arity() < 2) throw Error("algebroidFromStructure: the chart needs a linear weight component");
  const std::size_t nf = s.fiber.size(), nb = s.base.size();
  if (s.anchor.size() != nf) throw Error("anchor has the wrong number of rows");
  for (const auto& row : s.anchor)
    if (row.size() != nb) throw Error("anchor has the wrong number of columns");
  if (s.structure.size() != nf) throw Error("structure functions have the wrong shape");
  for (const auto& m : s.structure) {
    if (m.size() != nf) throw Error("structure functions have the wrong shape");
    for (const auto& v : m)
      if (v.size() != nf) throw Error("structure functions have the wrong shape");
  }
  for (const auto& f : s.fiber)
    if (chart->coord(chart->index(f)).weight[chart->arity() - 1] != 1) throw Error("'" + f + "' is not a fiber coordinate");

  auto th = [&](std::size_t a) { return Expr::var(chart, s.fiber[a]); };
  AlgebroidData out{chart, VecField(chart), degree};
  for (std::size_t A = 0; A < nb; ++A) {
    Expr comp(chart);
    for (std::size_t a = 0; a < nf; ++a)
      if (!s.anchor[a][A].isZero()) comp += th(a) * rechart(s.anchor[a][A], chart);
    out.q.set(s.base[A], comp);
  }
  for (std::size_t c = 0; c < nf; ++c) {
    Expr comp(chart);
    for (std::size_t a = 0; a < nf; ++a)
      for (std::size_t b = 0; b < nf; ++b) {
        Expr anti = s.structure[b][a][c] - s.structure[a][b][c];
        if (anti.isZero()) continue;
        comp += (th(a) * th(b) * rechart(anti, chart)).scaled(Rational(1, 4));
      }
    out.q.set(s.fiber[c], comp);
  }
  return out;
}

AlgebroidStructure structureFromQ(const AlgebroidData& a) {
  const ChartPtr& chart = a.chart;
  AlgebroidStructure s;
  auto fib = a.fiber(), bas = a.base();
  for (int i : fib) s.fiber.push_back(chart->coord(i).name);
  for (int i : bas) s.base.push_back(chart->coord(i).name);
  for (int A : bas)
    if (!hasFiberDegree(a.q.component(A), 1))
      throw Error("Q is not of algebroid form: the d/d" + chart->coord(A).name + " component is not linear in the fiber");
  for (int c : fib)
    if (!hasFiberDegree(a.q.component(c), 2))
      throw Error("Q is not of algebroid form: the d/d" + chart->coord(c).name +
                  " component is not quadratic in the fiber");
  s.anchor.assign(fib.size(), {});
  for (std::size_t i = 0; i < fib.size(); ++i)
    for (int A : bas) s.anchor[i].push_back(derivative(a.q.component(A), fib[i]));
  s.structure.assign(fib.size(), std::vector<std::vector<Expr>>(fib.size()));
  for (std::size_t i = 0; i < fib.size(); ++i)
    for (std::size_t j = 0; j < fib.size(); ++j)
      for (int c : fib) s.structure[i][j].push_back(derivative(derivative(a.q.component(c), fib[j]), fib[i]));
  return s;
}

CheckReport verifyWeightedAlgebroid(const AlgebroidData& a) {
  CheckReport rep;
  rep.kind = "weighted-algebroid";
  const ChartPtr& chart = a.chart;
  rep.audit("chart arity", "2", std::to_string(chart->arity()));
  if (chart->arity() != 2) return rep;
  bool parities = true;
  for (std::size_t i = 0; i < chart->size(); ++i) {
    const auto& c = chart->coord(i);
    if (c.parameter) continue;
    if (c.weight[1] > 1 || (c.weight[1] == 1) != (c.parity == Parity::Odd)) parities = false;
  }
  rep.audit("fiber coordinates odd and linear", "yes", parities ? "yes" : "no");
  Weight bound({a.degree - 1, 1});
  Weight actual = Weight::zero(2);
  for (const auto& c : chart->coords())
    if (!c.parameter) actual = actual.join(c.weight);
  rep.audit("weights within degree bound", bound.str(), actual.str(), actual.dominatedBy(bound));

  rep.residual("[Q,Q]", a.q.isZero() ? a.q : lieBracket(a.q, a.q));

  Shift target({0, 1});
  VecField off(chart);
  for (const auto& [s, part] : a.q.shiftDecompose())
    if (s != target) off = off + part;
  rep.residual("Q minus its bi-weight (0,1) part", off);

  for (std::size_t comp : {std::size_t(0), std::size_t(1)}) {
    HomAction h = canonicalAction(chart, {comp});
    VecField qt = rechart(a.q, h.withT);
    std::vector<std::pair<std::string, Expr>> parts;
    Expr scale = comp == 0 ? Expr::constant(h.withT, Rational(1)) : h.t();
    for (int idx : chart->declarationOrder()) {
      const auto& c = chart->coord(idx);
      if (c.parameter) continue;
      Expr lhs = scale * qt(h.map.image(idx));
      Expr rhs = substitute(a.q.component(idx), h.map);
      parts.emplace_back(c.name, lhs - rhs);
    }
    rep.residual(comp == 0 ? "Q h_t^* - h_t^* Q" : "s Q l_s^* - l_s^* Q", parts);
  }
  return rep;
}

AlgebroidData towerProject(const AlgebroidData& a, int j) {
  if (j < 1 || j >= a.degree) throw Error("towerProject: level must satisfy 1 <= j < degree");
  std::vector<Coordinate> coords;
  for (const auto& c : a.chart->declaredCoords())
    if (!c.parameter && c.weight[0] < j) coords.push_back(c);
  ChartPtr chart = Chart::make(2, coords);
  AlgebroidData out{chart, VecField(chart), j};
  for (std::size_t i = 0; i < a.chart->size(); ++i) {
    const auto& c = a.chart->coord(i);
    if (c.parameter || c.weight[0] >= j) continue;
    const Expr& comp = a.q.component(static_cast<int>(i));
    for (std::size_t k = 0; k < a.chart->size(); ++k)
      if (a.chart->coord(k).weight[0] >= j && comp.dependsOn(static_cast<int>(k)))
        throw Error("towerProject: the d/d" + c.name + " component depends on the discarded coordinate '" +
                    a.chart->coord(k).name + "'");
    out.q.set(c.name, rechart(comp, chart));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool isInteriorForm(const AlgebroidData& a, const VecField& x) {
  auto fib = a.fiber();
  for (std::size_t i = 0; i < a.chart->size(); ++i) {
    const Expr& c = x.component(static_cast<int>(i));
    if (c.isZero()) continue;
    if (a.chart->coord(i).weight[1] != 1) return false;
    for (int f : fib)
      if (c.dependsOn(f)) return false;
  }
  return true;
}

int sectionWeightOf(const AlgebroidData& a, const VecField& x) {
  auto s = x.shift();
  if (!s) throw Error("section is not homogeneous");
  if ((*s)[1] != -1) throw Error("section field does not have linear weight -1");
  return (*s)[0] + a.degree;
}

}  // namespace

Section makeSection(const AlgebroidData& a, const std::vector<std::pair<std::string, Expr>>& components) {
  Section s{VecField(a.chart), 0};
  for (const auto& [name, e] : components) s.field.set(name, rechart(e, a.chart));
  if (!isInteriorForm(a, s.field)) throw Error("section is not of interior-product form");
  if (!s.field.isZero()) s.weight = sectionWeightOf(a, s.field);
  return s;
}

std::vector<Section> basisSections(const AlgebroidData& a, const std::vector<int>& weights, int maxDegree) {
  std::vector<Section> out;
  auto mons = monomials(a.chart, a.base(), maxDegree);
  for (int f : a.fiber()) {
    int v = a.chart->coord(f).weight[0];
    for (const auto& m : mons) {
      int r = isHomogeneous(m)->components()[0] - v + a.degree;
      if (std::find(weights.begin(), weights.end(), r) == weights.end()) continue;
      Section s{VecField(a.chart), r};
      s.field.set(f, m);
      out.push_back(s);
    }
  }
  return out;
}

Section sectionBracket(const AlgebroidData& a, const Section& s1, const Section& s2) {
  VecField r = derivedBracket(a.q, s1.field, s2.field);
  if (!isInteriorForm(a, r))
    throw Error("section bracket is not of interior-product form: Q is not a weighted algebroid field");
  Section out{r, s1.weight + s2.weight - a.degree};
  if (!r.isZero()) out.weight = sectionWeightOf(a, r);
  return out;
}

Expr anchorApply(const AlgebroidData& a, const Section& s, const Expr& f) {
  Expr g = rechart(f, a.chart);
  for (int i : a.fiber())
    if (g.dependsOn(i)) throw Error("anchorApply: the function depends on fiber coordinates");
  return lieBracket(a.q, s.field)(g);
}

VecField anchorField(const AlgebroidData& a, const Section& s) {
  VecField qs = lieBracket(a.q, s.field);
  VecField out(a.chart);
  for (int A : a.base()) out.set(A, qs.component(A));
  return out;
}

// ---------------------------------------------------------------------------

CheckReport verifyBiAlgebroid(const BiAlgebroidData& b) {
  CheckReport rep;
  rep.kind = "bialgebroid";
  const int k = b.degree;
  rep.residual("{Q,Q}", poisson(b.q, b.q));
  rep.residual("{S,S}", poisson(b.s, b.s));
  rep.residual("{Q,S}", poisson(b.q, b.s));
  auto audit = [&](const std::string& name, const Expr& e, const Weight& w) {
    if (e.isZero()) {
      rep.audit(name, w.str(), "0 (vacuous)", true);
      return;
    }
    rep.audit(name, w.str(), weightText(isHomogeneous(e)));
    rep.audit(name + " parity", "odd", e.parity() ? toString(*e.parity()) : "mixed");
  };
  audit("tri-weight of Q", b.q, Weight({k - 1, 2, 1}));
  audit("tri-weight of S", b.s, Weight({k - 1, 1, 2}));
  return rep;
}

BiAlgebroidData triangularBiAlgebroid(const AlgebroidData& a, const Expr& p) {
  ChartPtr cot = cotangentChart(a.chart);
  Expr q = symbol(a.q, cot);
  Expr pp = rechart(p, cot);
  return BiAlgebroidData{cot, q, poisson(pp, q), a.degree};
}

Expr schoutenSquare(const BiAlgebroidData& b, const Expr& p) {
  Expr pp = rechart(p, b.cot);
  return poisson(poisson(pp, b.q), pp);
}

BiAlgebroidData dualBiAlgebroid(const BiAlgebroidData& b) {
  const Chart& c = *b.cot;
  requireArity(c, 3, "dualBiAlgebroid");
  std::vector<Coordinate> coords;
  for (auto co : c.declaredCoords()) {
    co.weight = Weight({co.weight[0], co.weight[2], co.weight[1]});
    coords.push_back(co);
  }
  Chart::Options o;
  o.bracketParity = c.bracketParity();
  for (const auto& pr : c.conjugates()) {
    const auto& x = c.coord(pr.coord);
    const auto& p = c.coord(pr.momentum);
    if (x.weight[1] == 1)
      o.conjugates.emplace_back(p.name, x.name);
    else
      o.conjugates.emplace_back(x.name, p.name);
  }
  ChartPtr dual = Chart::make(3, coords, o);
  return BiAlgebroidData{dual, rechart(b.s, dual), rechart(b.q, dual), b.degree};
}

SharpMap sharpMap(const BiAlgebroidData& b) {
  const Chart& cot = *b.cot;
  requireArity(cot, 3, "sharpMap");
  std::vector<Coordinate> baseCoords;
  for (const auto& pr : cot.conjugates()) {
    auto c = cot.coord(pr.coord);
    c.weight = Weight({c.weight[0], c.weight[1]});
    baseCoords.push_back(c);
  }
  ChartPtr d = Chart::make(2, baseCoords);
  SharpMap out;
  std::string prefix = "d";
  auto clashes = [&](const std::string& pre) {
    for (const auto& c : d->coords())
      if (d->find(liftedName(c.name, 1, pre))) return true;
    return false;
  };
  while (clashes(prefix)) prefix = prefix == "d" ? "D" : prefix + "d";
  out.target = parityReverse(tangentChart(d, prefix), 2);
  const ChartPtr& tgt = out.target;
  out.map = Substitution(tgt, b.cot);
  for (const auto& pr : cot.conjugates()) {
    const std::string& name = cot.coord(pr.coord).name;
    out.map.set(liftedName(name, 1, prefix), derivative(b.s, pr.momentum));
  }

  // L_Q = [i_Q, d] on the shifted tangent chart
  VecField dd(tgt), iq(tgt);
  for (const auto& c : d->coords()) {
    std::string dn = liftedName(c.name, 1, prefix);
    dd.set(c.name, Expr::var(tgt, dn));
    Expr qc = poisson(b.q, Expr::var(b.cot, c.name));
    iq.set(dn, rechart(qc, tgt));
  }
  VecField lq = lieBracket(iq, dd);
  VecField q0 = hamiltonianField(b.q);

  CheckReport& rep = out.report;
  rep.kind = "sharp";
  std::vector<std::pair<std::string, Expr>> parts;
  for (int idx : tgt->declarationOrder()) {
    const auto& g = tgt->coord(idx);
    Expr pulled = out.map.image(idx);
    parts.emplace_back(g.name, q0(pulled) - substitute(lq.component(idx), out.map));
    if (!pulled.isZero()) rep.audit("weight of pullback of " + g.name, g.weight.str(), weightText(isHomogeneous(pulled)));
  }
  rep.residual("{Q,.} S# - S# L_Q", parts);
  return out;
}

// ---------------------------------------------------------------------------

CourantData courantFromBiAlgebroid(const BiAlgebroidData& b, const Rational& lambda) {
  ChartPtr chart = collapseWeights(b.cot, {1, 2});
  return CourantData{chart, rechart(b.q + b.s.scaled(lambda), chart), lambda, b.degree};
}

CheckReport verifyCourant(const CourantData& c) {
  CheckReport rep;
  rep.kind = "courant";
  const int k = c.degree;
  rep.residual("{Theta,Theta}", poisson(c.theta, c.theta));
  if (!c.theta.isZero()) rep.audit("bi-degree of Theta", Weight({k - 1, 3}).str(), weightText(isHomogeneous(c.theta)));
  rep.audit("bi-degree of the symplectic pairing", Weight({k - 1, 2}).str(), pairingWeight(*c.chart).str());
  bool n = true;
  for (const auto& co : c.chart->coords())
    if (!co.parameter && (co.weight[1] & 1) != bit(co.parity)) n = false;
  rep.audit("parity given by the second weight", "yes", n ? "yes" : "no");
  VecField q = hamiltonianField(c.theta);
  if (!q.isZero()) {
    auto s = q.shift();
    rep.audit("bi-weight of Q_lambda", Shift({0, 1}).str(), s ? s->str() : "inhomogeneous");
  }
  return rep;
}

bool isBaseFunction(const CourantData& c, const Expr& f) {
  for (const auto& [m, k] : f.terms())
    for (const auto& fa : m.factors)
      if (fa.isVar() && c.chart->coord(fa.var).weight[1] != 0) return false;
  return true;
}

bool isCourantSection(const CourantData& c, const Expr& s) {
  for (const auto& [m, k] : s.terms()) {
    int ones = 0;
    for (const auto& fa : m.factors) {
      if (!fa.isVar()) continue;
      int w = c.chart->coord(fa.var).weight[1];
      if (w == 1)
        ones += fa.exp;
      else if (w != 0)
        return false;
    }
    if (ones != 1) return false;
  }
  return true;
}

Expr courantPairing(const CourantData& c, const Expr& s1, const Expr& s2) {
  if (!isCourantSection(c, s1) || !isCourantSection(c, s2)) throw Error("courantPairing: argument is not a section");
  Expr r = poisson(rechart(s1, c.chart), rechart(s2, c.chart));
  if (!isBaseFunction(c, r)) throw Error("courantPairing: result is not a base function");
  return r;
}

Expr courantDorfman(const CourantData& c, const Expr& s1, const Expr& s2) {
  if (!isCourantSection(c, s1) || !isCourantSection(c, s2)) throw Error("courantDorfman: argument is not a section");
  Expr r = derivedBracketHam(c.theta, rechart(s1, c.chart), rechart(s2, c.chart));
  if (!isCourantSection(c, r)) throw Error("courantDorfman: bracket is not closed on sections");
  return r;
}

Expr courantAnchor(const CourantData& c, const Expr& s, const Expr& f) {
  Expr g = rechart(f, c.chart);
  if (!isBaseFunction(c, g)) throw Error("courantAnchor: the function is not a base function");
  return derivedBracketHam(c.theta, rechart(s, c.chart), g);
}

std::vector<Expr> courantBasisSections(const CourantData& c, int maxDegree) {
  std::vector<int> base;
  for (std::size_t i = 0; i < c.chart->size(); ++i)
    if (!c.chart->coord(i).parameter && c.chart->coord(i).weight[1] == 0) base.push_back(static_cast<int>(i));
  auto mons = monomials(c.chart, base, maxDegree);
  std::vector<Expr> out;
  for (int idx : c.chart->declarationOrder()) {
    const auto& co = c.chart->coord(idx);
    if (co.weight[1] != 1) continue;
    for (const auto& m : mons)
      if (isHomogeneous(m)->components()[0] + co.weight[0] == c.degree - 1)
        out.push_back(m * Expr::var(c.chart, idx));
  }
  return out;
}

}  // namespace gk
