#include "gradedkit/commands.hpp"

#include <chrono>
#include <future>
#include <json.hpp>
#include <numeric>
#include <sstream>

namespace gk {

namespace {

using json = nlohmann::json;

std::string statusName(Residual::Status s) {
  switch (s) {
    case Residual::Status::Zero:
      return "zero";
    case Residual::Status::Nonzero:
      return "nonzero";
    case Residual::Status::NotChecked:
      return "not-checked";
  }
  return "?";
}

json reportJson(const CheckReport& r) {
  json j;
  j["id"] = r.id;
  j["kind"] = r.kind;
  j["verdict"] = toString(r.verdict());
  j["residuals"] = json::array();
  for (const auto& res : r.residuals)
    j["residuals"].push_back({{"name", res.name}, {"status", statusName(res.status)}, {"terms", res.terms}});
  j["audits"] = json::array();
  for (const auto& a : r.audits)
    j["audits"].push_back({{"name", a.name}, {"expected", a.expected}, {"actual", a.actual}, {"ok", a.ok}});
  j["notes"] = r.notes;
  return j;
}

std::string weightTable(const Chart& c) {
  std::string out;
  for (int idx : c.declarationOrder()) {
    const auto& co = c.coord(idx);
    if (co.parameter) continue;
    if (!out.empty()) out += ", ";
    out += co.name + " " + co.weight.str() + " " + toString(co.parity);
  }
  return out;
}

// One-line chart signature for audits.
std::string signature(const Chart& c) {
  std::string b = chartBlock("_", c);
  b = b.substr(b.find('\n') + 1);
  std::string out = "arity " + std::to_string(c.arity());
  std::size_t pos = 0;
  while (pos < b.size()) {
    std::size_t nl = b.find('\n', pos);
    std::string line = b.substr(pos, nl - pos);
    pos = nl + 1;
    if (line == "end") break;
    line = line.substr(2);
    if (line.rfind("coord ", 0) == 0) line = line.substr(6);
    out += "; " + line;
  }
  return out;
}

// Compares two algebroids as canonical declarations.
void compareAlgebroids(CheckReport& rep, const AlgebroidData& got, const AlgebroidData& want, const std::string& what) {
  rep.audit(what + " chart", signature(*want.chart), signature(*got.chart));
  rep.audit(what + " degree", std::to_string(want.degree), std::to_string(got.degree));
  if (sameChart(got.chart, want.chart))
    rep.residual(what + " Q difference", got.q - rechart(want.q, got.chart));
  else
    rep.notChecked(what + " Q difference", "charts differ");
}

CheckReport bracketWeights(const AlgebroidData& a, int maxDegree) {
  CheckReport rep;
  std::vector<int> weights(a.degree);
  std::iota(weights.begin(), weights.end(), 1);
  auto secs = basisSections(a, weights, maxDegree);
  int pairs = 0, ok = 0, nonzero = 0;
  for (const auto& s1 : secs)
    for (const auto& s2 : secs) {
      ++pairs;
      Section r = sectionBracket(a, s1, s2);
      bool good = r.weight == s1.weight + s2.weight - a.degree && (r.field.isZero() || r.field.shift().has_value());
      if (!r.field.isZero()) ++nonzero;
      if (good)
        ++ok;
      else if (rep.notes.size() < 5)
        rep.notes.push_back("weights (" + std::to_string(s1.weight) + "," + std::to_string(s2.weight) + ") bracket " +
                            r.field.str() + " has weight " + std::to_string(r.weight));
    }
  rep.audit("basis sections", "nonempty", secs.empty() ? "empty" : std::to_string(secs.size()) + " sections", !secs.empty());
  rep.audit("pairs with bracket weight r1+r2-" + std::to_string(a.degree), std::to_string(pairs), std::to_string(ok));
  rep.notes.push_back(std::to_string(nonzero) + " nonzero brackets");
  return rep;
}

CheckReport courantSuite(const CourantData& c, int maxDegree) {
  CheckReport rep = verifyCourant(c);
  auto secs = courantBasisSections(c, maxDegree);
  Shift pairShift({c.degree - 1, 2}), dorfShift({c.degree - 1, 1});
  int pairs = 0, symmetric = 0, pairOk = 0, dorfOk = 0;
  for (const auto& s1 : secs)
    for (const auto& s2 : secs) {
      ++pairs;
      Shift w1 = isHomogeneous(s1)->shift(), w2 = isHomogeneous(s2)->shift();
      Expr pr = courantPairing(c, s1, s2);
      if (pr == courantPairing(c, s2, s1)) ++symmetric;
      auto wp = isHomogeneous(pr);
      if (pr.isZero() || (wp && wp->shift() == w1 + w2 - pairShift)) ++pairOk;
      Expr br = courantDorfman(c, s1, s2);
      auto wb = isHomogeneous(br);
      if (br.isZero() || (wb && wb->shift() == w1 + w2 - dorfShift)) ++dorfOk;
    }
  rep.audit("basis sections", "nonempty", secs.empty() ? "empty" : std::to_string(secs.size()) + " sections", !secs.empty());
  rep.audit("symmetric pairings", std::to_string(pairs), std::to_string(symmetric));
  rep.audit("pairings of bi-weight " + (-pairShift).str(), std::to_string(pairs), std::to_string(pairOk));
  rep.audit("Dorfman brackets of bi-weight " + (-dorfShift).str(), std::to_string(pairs), std::to_string(dorfOk));
  std::vector<std::pair<std::string, Expr>> loday;
  for (std::size_t i = 0; i < secs.size(); ++i)
    for (std::size_t j = 0; j < secs.size(); ++j)
      for (std::size_t k = 0; k < secs.size(); ++k) {
        const Expr &a = secs[i], &b = secs[j], &d = secs[k];
        Expr diff = courantDorfman(c, a, courantDorfman(c, b, d)) - courantDorfman(c, courantDorfman(c, a, b), d) -
                    courantDorfman(c, b, courantDorfman(c, a, d));
        loday.emplace_back(a.str() + ", " + b.str() + ", " + d.str(), diff);
      }
  rep.residual("Loday identity on basis triples", loday);
  return rep;
}

CheckReport equalCheck(const Document& d, const std::string& x, const std::string& y) {
  CheckReport rep;
  std::string kx = d.kindOf(x), ky = d.kindOf(y);
  rep.audit("declaration kinds", kx, ky);
  if (kx != ky) return rep;
  if (kx == "chart") {
    rep.audit("charts", signature(*d.charts.at(x)), signature(*d.charts.at(y)));
  } else if (kx == "algebroid") {
    compareAlgebroids(rep, d.algebroids.at(y), d.algebroids.at(x), "algebroids");
  } else if (kx == "expr" || kx == "field") {
    ChartPtr cx = kx == "expr" ? d.exprs.at(x).chart() : d.fields.at(x).chart();
    ChartPtr cy = kx == "expr" ? d.exprs.at(y).chart() : d.fields.at(y).chart();
    rep.audit("charts", signature(*cx), signature(*cy));
    if (!sameChart(cx, cy))
      rep.notChecked("difference", "charts differ");
    else if (kx == "expr")
      rep.residual("difference", d.exprs.at(x) - rechart(d.exprs.at(y), cx));
    else
      rep.residual("difference", d.fields.at(x) - rechart(d.fields.at(y), cx));
  } else {
    const HomAction& hx = d.actions.at(x);
    const HomAction& hy = d.actions.at(y);
    rep.audit("charts", signature(*hx.chart), signature(*hy.chart));
    if (!sameChart(hx.chart, hy.chart)) {
      rep.notChecked("difference", "charts differ");
      return rep;
    }
    // compare with a common parameter name
    ChartPtr common = hx.withT;
    std::vector<std::pair<std::string, Expr>> parts;
    for (int idx : hx.chart->declarationOrder()) {
      const std::string& n = hx.chart->coord(idx).name;
      Substitution ren(hy.withT, common);
      ren.set(hy.param, hx.t());
      parts.emplace_back(n, hx.image(n) - substitute(hy.image(n), ren));
    }
    rep.residual("difference", parts);
  }
  return rep;
}

CheckReport dispatch(const Document& d, const CheckDirective& c) {
  const auto& a = c.args;
  auto num = [&](std::size_t i) { return std::stoi(a.at(i)); };
  const std::string& k = c.kind;
  if (k == "action") return verifyAction(d.actions.at(a[0]));
  if (k == "degree") {
    const HomAction& h = d.actions.at(a[0]);
    CheckReport rep = verifyAction(h);
    if (rep.passed()) rep.audit("action degree", a[1], std::to_string(actionDegree(h)));
    return rep;
  }
  if (k == "homogeneous") {
    const HomAction& h = d.actions.at(a[0]);
    Expr f = rechart(d.exprs.at(a[1]), h.chart);
    CheckReport rep;
    auto w = isHomogeneous(f);
    rep.audit("homogeneous", "yes", w ? "yes, weight " + w->str() : "no", w.has_value());
    if (w)
      rep.residual("f(h(t,.)) - t^w f", substitute(f, h.map) - h.t().pow(w->total()) * rechart(f, h.withT));
    return rep;
  }
  if (k == "homogenize") {
    const HomAction& h = d.actions.at(a[0]);
    Homogenization hz = homogenize(h);
    CheckReport rep = hz.report;
    rep.audit("supported", "yes", hz.supported ? "yes" : "no: " + hz.reason);
    if (hz.supported)
      for (int idx : h.chart->declarationOrder()) {
        const auto& co = h.chart->coord(idx);
        Expr img = hz.change.image(idx);
        if (img != Expr::var(h.chart, idx)) rep.notes.push_back(co.name + " -> " + img.str());
      }
    return rep;
  }
  if (k == "homological") return isHomological(d.fields.at(a[0]));
  if (k == "algebroid") {
    const AlgebroidData& alg = d.algebroids.at(a[0]);
    return a.size() > 1 ? verifyWeightedAlgebroid(alg, d.actions.at(a[1])) : verifyWeightedAlgebroid(alg);
  }
  if (k == "bracket-weights") return bracketWeights(d.algebroids.at(a[0]), num(1));
  if (k == "groupoid") return verifyGroupoid(d.groupoids.at(a[0]));
  if (k == "weighted") return verifyWeightedGroupoid(d.weighted.at(a[0]));
  if (k == "lie") {
    CheckReport rep;
    if (d.groupoids.count(a[0])) {
      AlgebroidData alg = lieFunctor(d.groupoids.at(a[0]));
      rep.absorb(isHomological(alg.q), "homological: ");
      if (alg.chart->arity() == 2) rep.absorb(verifyWeightedAlgebroid(alg), "algebroid: ");
      rep.notes.push_back("weights: " + weightTable(*alg.chart));
      return rep;
    }
    const WeightedGroupoid& w = d.weighted.at(a[0]);
    AlgebroidData alg = lieFunctor(w.spec);
    HomAction h = lieFunctorAction(w);
    if (alg.chart->arity() == 2) {
      rep.absorb(verifyWeightedAlgebroid(alg, h), "algebroid: ");
    } else {
      rep.absorb(isHomological(alg.q), "homological: ");
      rep.notChecked("weighted algebroid axioms", "algebroid chart has arity " + std::to_string(alg.chart->arity()) +
                                                      "; the axioms are stated for one h-weight component");
    }
    rep.audit("algebroid degree", std::to_string(actionDegree(w.action) + 1), std::to_string(alg.degree));
    rep.notes.push_back("weights: " + weightTable(*alg.chart));
    return rep;
  }
  if (k == "derive") {
    CheckReport rep;
    compareAlgebroids(rep, lieFunctor(d.groupoids.at(a[0])), d.algebroids.at(a[1]), "derived vs declared");
    return rep;
  }
  if (k == "tower") {
    const WeightedGroupoid& w = d.weighted.at(a[0]);
    int j = num(1);
    CheckReport rep;
    WeightedGroupoid low = truncateGroupoid(w, j);
    rep.absorb(verifyWeightedGroupoid(low), "truncated groupoid: ");
    compareAlgebroids(rep, lieFunctor(low.spec), towerProject(lieFunctor(w.spec), j), "lie of truncation vs projection");
    Substitution proj(low.spec.gamma, w.spec.gamma);
    rep.absorb(lieFunctorMorphism(w.spec, low.spec, proj).report, "projection morphism: ");
    return rep;
  }
  if (k == "tangent-lift") {
    const GroupoidSpec& g = d.groupoids.at(a[0]);
    CheckReport rep;
    GroupoidSpec tg = tangentGroupoid(g);
    rep.absorb(verifyGroupoid(tg), "tangent groupoid: ");
    AlgebroidData lifted = lieFunctor(tg);
    AlgebroidData base = lieFunctor(g);
    ChartPtr ta = higherTangentChart(base.chart, 1);
    VecField tq = higherLiftField(base.q, ta, 1);
    // identification: the tangent component moves before the linear one
    std::vector<std::size_t> perm(ta->arity());
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[perm.size() - 1], perm[perm.size() - 2]);
    ChartPtr ident = reorderWeights(ta, perm);
    AlgebroidData viaLift{ident, rechart(tq, ident), lifted.degree};
    compareAlgebroids(rep, lifted, viaLift, "lie of tangent vs tangent of lie");
    rep.absorb(isHomological(lifted.q), "homological: ");
    return rep;
  }
  if (k == "morphism")
    return lieFunctorMorphism(d.groupoids.at(a[0]), d.groupoids.at(a[1]), d.maps.at(a[2])).report;
  if (k == "bialgebroid") return verifyBiAlgebroid(d.bialgebroids.at(a[0]));
  if (k == "sharp") return sharpMap(d.bialgebroids.at(a[0])).report;
  if (k == "schouten") {
    CheckReport rep;
    rep.residual("{{P,Q},P}", schoutenSquare(d.bialgebroids.at(a[0]), d.exprs.at(a[1])));
    return rep;
  }
  if (k == "courant") return courantSuite(d.courants.at(a[0]), a.size() > 1 ? num(1) : 1);
  if (k == "generator") {
    const CourantData& cd = d.courants.at(a[0]);
    CheckReport rep;
    rep.residual("{Theta,.} - declared field", hamiltonianField(cd.theta) - rechart(d.fields.at(a[1]), cd.chart));
    return rep;
  }
  if (k == "poisson") {
    const WeightedGroupoid& w = d.weighted.at(a[0]);
    return poissonWeightAudit(w, d.exprs.at(a[1]));
  }
  if (k == "equal") return equalCheck(d, a[0], a[1]);
  throw Error("unknown check kind '" + k + "'");
}

}  // namespace

bool CommandResult::failed() const {
  for (const auto& c : checks)
    if (c.verdict() == Verdict::Fail) return true;
  return false;
}

std::string CommandResult::json(bool timing) const {
  nlohmann::json j;
  j["version"] = 1;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) j["checks"].push_back(reportJson(c));
  if (!output.empty()) j["output"] = output;
  if (timing) {
    nlohmann::json t;
    for (std::size_t i = 0; i < checks.size() && i < seconds.size(); ++i) t[checks[i].id] = seconds[i];
    j["timing"] = t;
  }
  return j.dump(2) + "\n";
}

std::string CommandResult::text() const {
  std::string out = output;
  for (const auto& c : checks) out += c.text();
  if (!checks.empty()) {
    int pass = 0, fail = 0, skipped = 0;
    for (const auto& c : checks) {
      auto v = c.verdict();
      (v == Verdict::Pass ? pass : v == Verdict::Fail ? fail : skipped)++;
    }
    out += std::to_string(checks.size()) + " checks: " + std::to_string(pass) + " pass, " + std::to_string(fail) +
           " fail, " + std::to_string(skipped) + " not checked\n";
  }
  return out;
}

CheckReport runCheck(const Document& d, const CheckDirective& c) {
  CheckReport rep;
  try {
    rep = dispatch(d, c);
  } catch (const Error& e) {
    rep = CheckReport{};
    rep.audit("evaluation", "completes", std::string("error: ") + e.what(), false);
  }
  rep.id = c.id();
  rep.kind = c.kind;
  return rep;
}

CommandResult runChecks(const Document& d, const std::string& filter) {
  std::vector<const CheckDirective*> selected;
  for (const auto& c : d.checks)
    if (filter.empty() || std::find(c.args.begin(), c.args.end(), filter) != c.args.end()) selected.push_back(&c);
  using Clock = std::chrono::steady_clock;
  std::vector<std::future<std::pair<CheckReport, double>>> jobs;
  for (const auto* c : selected)
    jobs.push_back(std::async(std::launch::async, [&d, c] {
      auto t0 = Clock::now();
      CheckReport r = runCheck(d, *c);
      return std::make_pair(std::move(r), std::chrono::duration<double>(Clock::now() - t0).count());
    }));
  CommandResult out;
  for (auto& j : jobs) {
    auto [r, s] = j.get();
    out.checks.push_back(std::move(r));
    out.seconds.push_back(s);
  }
  return out;
}

CommandResult deriveCommand(const Document& d, const std::string& groupoid, const std::string& name) {
  AlgebroidData a;
  CheckReport rep;
  if (d.groupoids.count(groupoid)) {
    a = lieFunctor(d.groupoids.at(groupoid));
    rep.absorb(isHomological(a.q), "homological: ");
  } else if (d.weighted.count(groupoid)) {
    const WeightedGroupoid& w = d.weighted.at(groupoid);
    a = lieFunctor(w.spec);
    rep.absorb(verifyWeightedAlgebroid(a, lieFunctorAction(w)), "algebroid: ");
  } else {
    throw Error("no groupoid named '" + groupoid + "'");
  }
  std::string n = name.empty() ? "A_" + groupoid : name;
  if (d.has(n) || d.has(n + "_chart") || d.has(n + "_Q")) throw Error("name '" + n + "' clashes with a declaration");
  CommandResult out;
  out.output = chartBlock(n + "_chart", *a.chart) + fieldBlock(n + "_Q", n + "_chart", a.q) +
               algebroidLine(n, n + "_chart", a.degree, n + "_Q");
  rep.id = "derive " + groupoid;
  rep.kind = "derive";
  out.checks.push_back(rep);
  out.seconds.push_back(0);
  return out;
}

CommandResult liftCommand(const Document& d, const std::string& target, const std::string& how, int k,
                          const std::string& name) {
  auto liftChart = [&](const ChartPtr& c) -> ChartPtr {
    if (how == "tangent") return tangentChart(c);
    if (how == "higher") return higherTangentChart(c, k);
    if (how == "cotangent") return cotangentChart(c, false);
    if (how == "shifted-cotangent") return cotangentChart(c, true);
    throw Error("unknown lift '" + how + "' (tangent, higher, cotangent, shifted-cotangent)");
  };
  CommandResult out;
  std::string n = name.empty() ? (how == "higher" ? "T" + std::to_string(k) : how == "tangent" ? "T" : "Tstar") + "_" + target
                               : name;
  if (d.charts.count(target)) {
    out.output = chartBlock(n, *liftChart(d.charts.at(target)));
    return out;
  }
  if (d.actions.count(target)) {
    if (how != "tangent" && how != "higher") throw Error("actions lift along tangent functors only");
    const HomAction& h = d.actions.at(target);
    int order = how == "tangent" ? 1 : k;
    ChartPtr c = liftChart(h.chart);
    HomAction lifted = liftAction(h, c, order);
    CheckReport rep = verifyAction(lifted);
    rep.id = "lift " + target;
    rep.kind = "action";
    out.output = chartBlock(n + "_chart", *c) + actionBlock(n, n + "_chart", lifted);
    out.checks.push_back(rep);
    out.seconds.push_back(0);
    return out;
  }
  throw Error("no chart or action named '" + target + "'");
}

CommandResult bracketCommand(const Document& d, const std::string& q, const std::string& s1, const std::string& s2,
                             const std::string& name) {
  if (!d.fields.count(s1)) throw Error("no field named '" + s1 + "'");
  if (!d.fields.count(s2)) throw Error("no field named '" + s2 + "'");
  const VecField& x1 = d.fields.at(s1);
  const VecField& x2 = d.fields.at(s2);
  CommandResult out;
  std::string n = name.empty() ? "bracket_" + s1 + "_" + s2 : name;
  CheckReport rep;
  rep.id = "bracket " + q + " " + s1 + " " + s2;
  rep.kind = "bracket";
  VecField r;
  std::string chartName;
  if (d.algebroids.count(q)) {
    const AlgebroidData& a = d.algebroids.at(q);
    auto section = [&](const VecField& x) {
      std::vector<std::pair<std::string, Expr>> comps;
      for (int f : a.fiber()) {
        const std::string& fn = a.chart->coord(f).name;
        if (auto i = x.chart()->find(fn)) comps.emplace_back(fn, x.component(*i));
      }
      Section s = makeSection(a, comps);
      if (rechart(s.field, x.chart()) != x) throw Error("field is not along the fiber coordinates");
      return s;
    };
    Section a1 = section(x1), a2 = section(x2);
    Section b = sectionBracket(a, a1, a2);
    r = b.field;
    rep.audit("bracket weight r1+r2-k", std::to_string(a1.weight + a2.weight - a.degree), std::to_string(b.weight));
  } else if (d.fields.count(q)) {
    const VecField& qf = d.fields.at(q);
    r = derivedBracket(qf, rechart(x1, qf.chart()), rechart(x2, qf.chart()));
    if (auto sh = r.shift()) rep.notes.push_back("shift " + sh->str());
  } else {
    throw Error("no algebroid or field named '" + q + "'");
  }
  for (const auto& [cn, c] : d.charts)
    if (sameChart(c, r.chart())) {
      chartName = cn;
      break;
    }
  if (chartName.empty()) {
    chartName = n + "_chart";
    out.output = chartBlock(chartName, *r.chart());
  }
  out.output += fieldBlock(n, chartName, r);
  out.checks.push_back(rep);
  out.seconds.push_back(0);
  return out;
}

CommandResult homogenizeCommand(const Document& d, const std::string& action, const std::string& name) {
  if (!d.actions.count(action)) throw Error("no action named '" + action + "'");
  const HomAction& h = d.actions.at(action);
  CheckDirective c{"homogenize", {action}, 0};
  CommandResult out;
  out.checks.push_back(runCheck(d, c));
  out.seconds.push_back(0);
  Homogenization hz = homogenize(h);
  if (hz.supported) {
    std::string chartName;
    for (const auto& [cn, ch] : d.charts)
      if (sameChart(ch, h.chart)) chartName = cn;
    std::string n = name.empty() ? "homogeneous_" + action : name;
    std::string text = "map " + n + " from " + chartName + " to " + chartName + "\n";
    for (int idx : h.chart->declarationOrder()) {
      Expr img = hz.change.image(idx);
      if (img != Expr::var(h.chart, idx)) text += "  " + h.chart->coord(idx).name + ": " + img.str() + "\n";
    }
    out.output = text + "end\n";
  }
  return out;
}

}  // namespace gk
