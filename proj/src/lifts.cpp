#include "gradedkit/lifts.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace gk {

namespace {

std::string freshName(const Chart& c, std::string base) {
  while (c.find(base)) base += "_";
  return base;
}

std::vector<int> extended(const Weight& w, int last) {
  std::vector<int> v = w.components();
  v.push_back(last);
  return v;
}

Chart::Options plainOptions(const Chart& c) {
  Chart::Options o;
  o.degreeBound = c.degreeBound();
  o.parityComponent = c.parityComponent();
  return o;
}

}  // namespace

HomAction HomAction::identity(const ChartPtr& chart, const std::string& param) {
  HomAction h;
  h.chart = chart;
  h.param = param;
  h.withT = chart->withParameters({param});
  h.map = Substitution(chart, h.withT);
  return h;
}

HomAction canonicalAction(const ChartPtr& chart, const std::vector<std::size_t>& components) {
  HomAction h = HomAction::identity(chart, freshName(*chart, "t"));
  Expr t = h.t();
  for (std::size_t i = 0; i < chart->size(); ++i) {
    const auto& c = chart->coord(i);
    if (c.parameter) continue;
    int w = 0;
    if (components.empty())
      w = c.weight.total();
    else
      for (auto k : components) w += c.weight[k];
    h.map.set(static_cast<int>(i), t.pow(w) * Expr::var(h.withT, c.name));
  }
  return h;
}

CheckReport verifyAction(const HomAction& h) {
  CheckReport rep;
  rep.kind = "action";
  const std::string s = freshName(*h.withT, "s");
  ChartPtr cts = h.withT->withParameters({s});
  Expr tv = Expr::var(cts, h.param), sv = Expr::var(cts, s);

  Substitution unit(h.withT, h.chart);
  unit.set(h.param, Expr::constant(h.chart, Rational(1)));
  Substitution toS(h.withT, cts);
  toS.set(h.param, sv);
  Substitution toTS(h.withT, cts);
  toTS.set(h.param, tv * sv);
  Substitution outer(cts, cts);
  for (std::size_t i = 0; i < h.chart->size(); ++i) {
    const auto& c = h.chart->coord(i);
    if (!c.parameter) outer.set(c.name, rechart(h.map.image(static_cast<int>(i)), cts));
  }

  std::vector<std::pair<std::string, Expr>> unitParts, compParts;
  for (int idx : h.chart->declarationOrder()) {
    const auto& c = h.chart->coord(idx);
    if (c.parameter) continue;
    Expr hc = h.map.image(idx);
    unitParts.emplace_back(c.name, substitute(hc, unit) - Expr::var(h.chart, idx));
    Expr lhs = substitute(substitute(hc, toS), outer);
    compParts.emplace_back(c.name, lhs - substitute(hc, toTS));
  }
  rep.residual("h_1 - id", unitParts);
  rep.residual("h_t h_s - h_ts", compParts);
  return rep;
}

int actionDegree(const HomAction& h) {
  if (!verifyAction(h).passed()) throw Error("actionDegree: the family is not a homogeneity structure");
  int tIdx = h.withT->index(h.param);
  int d = 0;
  for (std::size_t i = 0; i < h.chart->size(); ++i)
    if (!h.chart->coord(i).parameter) d = std::max(d, h.map.image(static_cast<int>(i)).degreeIn(tIdx));
  return d;
}

TaylorFrame taylorFrame(const HomAction& h) {
  int deg = actionDegree(h);
  int tIdx = h.withT->index(h.param);
  TaylorFrame frame;
  for (int idx : h.chart->declarationOrder()) {
    const auto& c = h.chart->coord(idx);
    if (c.parameter) continue;
    Expr img = h.map.image(idx);
    std::vector<Expr> row;
    for (int i = 0; i <= deg; ++i) row.push_back(rechart(img.coefficientOf(tIdx, i), h.chart));
    frame.emplace_back(c.name, std::move(row));
  }
  return frame;
}

Homogenization homogenize(const HomAction& h) {
  Homogenization out;
  out.report.kind = "homogenize";
  CheckReport v = verifyAction(h);
  if (!v.passed()) {
    out.reason = "the family is not a homogeneity structure";
    out.report.absorb(v, "action: ");
    return out;
  }
  const ChartPtr& chart = h.chart;
  const int n = static_cast<int>(chart->size());
  int tIdx = h.withT->index(h.param);

  std::vector<Expr> phi(n), rest(n);
  std::vector<std::vector<int>> deps(n);
  for (int i = 0; i < n; ++i) {
    const auto& c = chart->coord(i);
    if (c.parameter) continue;
    phi[i] = rechart(h.map.image(i).coefficientOf(tIdx, c.weight.total()), chart);
    rest[i] = phi[i] - Expr::var(chart, i);
    if (rest[i].dependsOn(i)) {
      out.reason = "the order-" + std::to_string(c.weight.total()) + " coefficient of '" + c.name +
                   "' is not '" + c.name + "' plus terms in other coordinates";
      return out;
    }
    for (int j = 0; j < n; ++j)
      if (j != i && rest[i].dependsOn(j)) deps[i].push_back(j);
  }

  // topological order of the dependency graph; a cycle is outside the supported class
  std::vector<int> state(n, 0), order;
  std::function<bool(int)> visit = [&](int i) {
    if (state[i] == 2) return true;
    if (state[i] == 1) return false;
    state[i] = 1;
    for (int j : deps[i])
      if (!visit(j)) return false;
    state[i] = 2;
    order.push_back(i);
    return true;
  };
  for (int i = 0; i < n; ++i) {
    if (chart->coord(i).parameter) continue;
    if (!visit(i)) {
      out.reason = "coordinate changes depend on each other cyclically";
      return out;
    }
  }

  out.change = Substitution(chart, chart);
  out.inverse = Substitution(chart, chart);
  for (int i : order) {
    out.change.set(i, phi[i]);
    out.inverse.set(i, Expr::var(chart, i) - substitute(rest[i], out.inverse));
  }

  CheckReport& rep = out.report;
  std::vector<std::pair<std::string, Expr>> fwd, bwd, canon;
  Substitution inverseT(h.withT, h.withT);
  for (int i = 0; i < n; ++i)
    if (!chart->coord(i).parameter) inverseT.set(chart->coord(i).name, rechart(out.inverse.image(i), h.withT));
  Expr t = h.t();
  for (int idx : chart->declarationOrder()) {
    const auto& c = chart->coord(idx);
    if (c.parameter) continue;
    Expr x = Expr::var(chart, idx);
    fwd.emplace_back(c.name, substitute(substitute(x, out.inverse), out.change) - x);
    bwd.emplace_back(c.name, substitute(substitute(x, out.change), out.inverse) - x);
    Expr moved = substitute(substitute(out.change.image(idx), h.map), inverseT);
    canon.emplace_back(c.name, moved - t.pow(c.weight.total()) * Expr::var(h.withT, c.name));
  }
  rep.residual("change after inverse - id", fwd);
  rep.residual("inverse after change - id", bwd);
  rep.residual("transformed action - canonical action", canon);
  rep.absorb(verifyAction(canonicalAction(chart)), "canonical: ");
  out.supported = true;
  return out;
}

VecField weightVectorField(const ChartPtr& chart, std::size_t component) {
  if (component >= chart->arity()) throw Error("weight component out of range");
  VecField x(chart);
  for (std::size_t i = 0; i < chart->size(); ++i) {
    int w = chart->coord(i).weight[component];
    if (w != 0) x.set(static_cast<int>(i), Expr::var(chart, static_cast<int>(i)).scaled(w));
  }
  return x;
}

// ---------------------------------------------------------------------------

std::string liftedName(const std::string& name, int level, const std::string& prefix) {
  std::string p;
  for (int i = 0; i < level; ++i) p += prefix;
  return p + name;
}

ChartPtr higherTangentChart(const ChartPtr& chart, int k, const std::string& prefix) {
  if (k < 0) throw Error("negative tangent order");
  if (k == 0) return chart;
  std::vector<Coordinate> coords;
  for (const auto& c : chart->declaredCoords()) {
    if (c.parameter) {
      coords.push_back({c.name, Weight(extended(c.weight, 0)), c.parity, true});
      continue;
    }
    for (int i = 0; i <= k; ++i)
      coords.push_back({liftedName(c.name, i, prefix), Weight(extended(c.weight, i)), c.parity, false});
  }
  Chart::Options o = plainOptions(*chart);
  o.degreeBound = Weight(extended(chart->degreeBound(), k));
  return Chart::make(chart->arity() + 1, std::move(coords), o);
}

ChartPtr tangentChart(const ChartPtr& chart, const std::string& prefix) { return higherTangentChart(chart, 1, prefix); }

std::string momentumName(const std::string& coord, const std::string& prefix) { return prefix + coord; }

ChartPtr cotangentChart(const ChartPtr& chart, bool shifted, const std::string& prefix) {
  const Weight& d = chart->degreeBound();
  std::vector<Coordinate> coords, momenta;
  Chart::Options o;
  o.bracketParity = shifted ? Parity::Odd : Parity::Even;
  for (const auto& c : chart->declaredCoords()) {
    coords.push_back({c.name, Weight(extended(c.weight, 0)), c.parity, c.parameter});
    if (c.parameter) continue;
    std::vector<int> w(d.arity());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = d[i] - c.weight[i];
    w.push_back(1);
    std::string p = momentumName(c.name, prefix);
    momenta.push_back({p, Weight(w), c.parity + o.bracketParity, false});
    o.conjugates.emplace_back(c.name, p);
  }
  coords.insert(coords.end(), momenta.begin(), momenta.end());
  o.degreeBound = Weight(extended(d, 1));
  return Chart::make(chart->arity() + 1, std::move(coords), o);
}

ChartPtr parityReverse(const ChartPtr& chart, std::size_t component) {
  if (component >= chart->arity()) throw Error("weight component out of range");
  std::vector<Coordinate> coords;
  for (auto c : chart->declaredCoords()) {
    if (!c.parameter) {
      int w = c.weight[component];
      if (w > 1) throw Error("parityReverse: component " + std::to_string(component) + " is not linear ('" + c.name +
                             "' has weight " + c.weight.str() + ")");
      if (w == 1) c.parity = c.parity + Parity::Odd;
    }
    coords.push_back(c);
  }
  Chart::Options o;
  o.degreeBound = chart->degreeBound();
  return Chart::make(chart->arity(), std::move(coords), o);
}

namespace {

ChartPtr remapWeights(const ChartPtr& chart, std::size_t newArity,
                      const std::function<std::vector<int>(const Weight&)>& f, Chart::Options o) {
  std::vector<Coordinate> coords;
  for (auto c : chart->declaredCoords()) {
    c.weight = Weight(f(c.weight));
    coords.push_back(c);
  }
  o.degreeBound = Weight(f(chart->degreeBound()));
  return Chart::make(newArity, std::move(coords), o);
}

Chart::Options keepPairs(const Chart& c) {
  Chart::Options o = c.options();
  o.parityComponent.reset();
  return o;
}

}  // namespace

ChartPtr collapseWeights(const ChartPtr& chart, std::vector<std::size_t> components) {
  std::sort(components.begin(), components.end());
  components.erase(std::unique(components.begin(), components.end()), components.end());
  if (components.empty()) return chart;
  if (components.back() >= chart->arity()) throw Error("weight component out of range");
  std::set<std::size_t> sel(components.begin(), components.end());
  auto f = [&](const Weight& w) {
    std::vector<int> v;
    for (std::size_t i = 0; i < w.arity(); ++i) {
      if (!sel.count(i)) {
        v.push_back(w[i]);
      } else if (i == components.front()) {
        int s = 0;
        for (auto k : components) s += w[k];
        v.push_back(s);
      }
    }
    return v;
  };
  return remapWeights(chart, chart->arity() - components.size() + 1, f, keepPairs(*chart));
}

ChartPtr reorderWeights(const ChartPtr& chart, const std::vector<std::size_t>& perm) {
  if (perm.size() != chart->arity()) throw Error("reorderWeights: permutation has the wrong length");
  std::vector<std::size_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != i) throw Error("reorderWeights: not a permutation");
  auto f = [&](const Weight& w) {
    std::vector<int> v;
    for (auto k : perm) v.push_back(w[k]);
    return v;
  };
  return remapWeights(chart, chart->arity(), f, keepPairs(*chart));
}

Truncation truncateChart(const ChartPtr& chart, int level) {
  std::vector<Coordinate> coords;
  std::set<std::string> kept;
  for (const auto& c : chart->declaredCoords()) {
    if (c.parameter || c.weight.total() <= level) {
      coords.push_back(c);
      kept.insert(c.name);
    }
  }
  Chart::Options o;
  o.parityComponent = chart->parityComponent();
  o.bracketParity = chart->bracketParity();
  for (const auto& [c, p] : chart->options().conjugates)
    if (kept.count(c) && kept.count(p)) o.conjugates.emplace_back(c, p);
  Truncation t;
  t.chart = Chart::make(chart->arity(), std::move(coords), o);
  t.projection = Substitution(t.chart, chart);
  return t;
}

// ---------------------------------------------------------------------------

namespace {

/// Substitution base -> lifted+eps, c -> sum_j eps^j c^{(j)}.
Substitution expansion(const ChartPtr& base, const ChartPtr& liftedEps, const std::string& eps, int k,
                       const std::string& prefix) {
  Substitution s(base, liftedEps);
  Expr e = Expr::var(liftedEps, eps);
  for (std::size_t i = 0; i < base->size(); ++i) {
    const auto& c = base->coord(i);
    if (c.parameter) continue;
    Expr img(liftedEps);
    for (int j = 0; j <= k; ++j) img += e.pow(j) * Expr::var(liftedEps, liftedName(c.name, j, prefix));
    s.set(static_cast<int>(i), img);
  }
  return s;
}

}  // namespace

Expr higherLift(const Expr& f, const ChartPtr& lifted, int level, int k, const std::string& prefix) {
  if (k == 0) return rechart(f, lifted);
  std::string eps = freshName(*lifted, "eps");
  ChartPtr le = lifted->withParameters({eps});
  Expr img = substitute(f, expansion(f.chart(), le, eps, k, prefix));
  return rechart(img.coefficientOf(le->index(eps), level), lifted);
}

Substitution liftSubstitution(const Substitution& s, int k, const ChartPtr& liftedFrom, const ChartPtr& liftedTo,
                              const std::string& prefix) {
  Substitution out(liftedFrom, liftedTo);
  const ChartPtr& from = s.from();
  for (std::size_t i = 0; i < from->size(); ++i) {
    const auto& c = from->coord(i);
    Expr img = s.image(static_cast<int>(i));
    if (c.parameter) {
      out.set(c.name, rechart(img, liftedTo));
      continue;
    }
    if (k == 0) {
      out.set(c.name, rechart(img, liftedTo));
      continue;
    }
    std::string eps = freshName(*liftedTo, "eps");
    ChartPtr le = liftedTo->withParameters({eps});
    Expr full = substitute(img, expansion(s.to(), le, eps, k, prefix));
    int e = le->index(eps);
    for (int j = 0; j <= k; ++j) out.set(liftedName(c.name, j, prefix), rechart(full.coefficientOf(e, j), liftedTo));
  }
  return out;
}

VecField higherLiftField(const VecField& x, const ChartPtr& lifted, int k, const std::string& prefix) {
  VecField r(lifted);
  const ChartPtr& base = x.chart();
  for (std::size_t i = 0; i < base->size(); ++i) {
    const Expr& comp = x.component(static_cast<int>(i));
    if (comp.isZero()) continue;
    for (int j = 0; j <= k; ++j)
      r.set(liftedName(base->coord(i).name, j, prefix), higherLift(comp, lifted, j, k, prefix));
  }
  return r;
}

HomAction liftAction(const HomAction& h, const ChartPtr& lifted, int k, const std::string& prefix) {
  HomAction out;
  out.chart = lifted;
  out.param = h.param;
  out.withT = lifted->withParameters({h.param});
  out.map = liftSubstitution(h.map, k, lifted, out.withT, prefix);
  return out;
}

Expr tangentLiftPoisson(const Expr& p, int k) {
  const ChartPtr& cot = p.chart();
  if (!cot->hasConjugates()) throw Error("tangentLiftPoisson: chart has no conjugate pairs");
  if (k == 0) return p;
  // recover the base chart
  std::vector<Coordinate> baseCoords;
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& c : cot->declaredCoords()) {
    int idx = cot->index(c.name);
    if (cot->isMomentum(idx)) continue;
    auto w = c.weight.components();
    w.pop_back();
    baseCoords.push_back({c.name, Weight(w), c.parity, c.parameter});
  }
  ChartPtr base = Chart::make(cot->arity() - 1, baseCoords);
  ChartPtr tb = higherTangentChart(base, k);
  ChartPtr out = cotangentChart(tb, cot->bracketParity() == Parity::Odd);
  std::string eps = freshName(*out, "eps");
  ChartPtr le = out->withParameters({eps});
  Expr e = Expr::var(le, eps);

  Substitution s(cot, le);
  for (const auto& pair : cot->conjugates()) {
    const std::string& name = cot->coord(pair.coord).name;
    Expr xc(le), pc(le);
    for (int j = 0; j <= k; ++j) {
      std::string lj = liftedName(name, j);
      xc += e.pow(j) * Expr::var(le, lj);
      pc += e.pow(k - j) * Expr::var(le, momentumName(lj));
    }
    s.set(pair.coord, xc);
    s.set(pair.momentum, pc);
  }
  Expr full = substitute(p, s);
  return rechart(full.coefficientOf(le->index(eps), k), out);
}

std::optional<Shift> naturalShift(const Expr& e) {
  const Chart& c = *e.chart();
  std::optional<Shift> out;
  for (const auto& [m, k] : e.terms()) {
    Shift s = Shift::zero(c.arity() - 1);
    for (const auto& f : m.factors) {
      if (!f.isVar()) continue;
      auto conj = c.conjugateOf(f.var);
      const Weight& w = c.coord(conj ? *conj : f.var).weight;
      std::vector<int> v(w.components().begin(), w.components().end() - 1);
      Shift ws = Shift(v).scaled(f.exp);
      s = conj ? s - ws : s + ws;
    }
    if (out && *out != s) return std::nullopt;
    out = s;
  }
  return out;
}

std::optional<int> momentumDegree(const Expr& e) {
  std::optional<int> out;
  for (const auto& [m, k] : e.terms()) {
    int d = 0;
    for (const auto& f : m.factors)
      if (f.isVar() && e.chart()->isMomentum(f.var)) d += f.exp;
    if (out && *out != d) return std::nullopt;
    out = d;
  }
  return out;
}

}  // namespace gk
