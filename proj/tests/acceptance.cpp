// Acceptance run: one line per criterion, exact equality throughout, with time limits.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "gradedkit/commands.hpp"
#include "support.hpp"

using namespace gk;
using namespace gk::testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Document fixture(const std::string& name) { return parseDocument(slurp(fs::path(GK_FIXTURES) / name)); }

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

// 1. f(h_t) = t^w f for homogeneous f on T2M.
Outcome homogeneityLaw() {
  Outcome o;
  Document d = fixture("t2m_chart.gk");
  const ChartPtr& c = d.charts.at("T2M");
  const HomAction& h = d.actions.at("h");
  std::mt19937 rng(20261016);
  int done = 0, maxWeight = 0;
  while (done < 50) {
    Expr f = randomPolynomial(rng, c, 6, 5);
    auto parts = weightDecompose(f);
    if (parts.empty()) continue;
    const auto& [w, part] = *std::max_element(parts.begin(), parts.end(),
                                              [](const auto& a, const auto& b) { return a.second.size() < b.second.size(); });
    auto hw = isHomogeneous(part);
    o.require(hw && *hw == w, "weight decomposition not homogeneous");
    o.require(substitute(part, h.map) == h.t().pow(w.total()) * rechart(part, h.withT), "pullback differs for " + part.str());
    maxWeight = std::max(maxWeight, w.total());
    ++done;
  }
  if (o.ok) o.detail = "50 polynomials, weights up to " + std::to_string(maxWeight);
  return o;
}

// 2. Homogenization of x, y, w with h_t(w) = t^2 w + (t^2 - t) x y.
Outcome homogenization() {
  Outcome o;
  Document d = fixture("homogenize_xyw.gk");
  const HomAction& h = d.actions.at("h");
  const ChartPtr& c = h.chart;
  o.require(verifyAction(h).passed(), "verifyAction");
  o.require(actionDegree(h) == 2, "actionDegree " + std::to_string(actionDegree(h)));
  Homogenization hz = homogenize(h);
  o.require(hz.supported, "unsupported: " + hz.reason);
  if (!hz.supported) return o;
  o.require(hz.report.passed(), "homogenize report:\n" + hz.report.text());
  o.require(hz.change.image("w") == V(c, "w") - V(c, "x") * V(c, "y"), "w -> " + hz.change.image("w").str());
  o.require(hz.change.image("x") == V(c, "x") && hz.change.image("y") == V(c, "y"), "x or y moved");
  // the new coordinates scale as t^{w(c)} under h
  for (int i : c->declarationOrder()) {
    Expr u = hz.change.image(i);
    int w = c->coord(i).weight.total();
    o.require(substitute(u, h.map) == h.t().pow(w) * rechart(u, h.withT), "new " + c->coord(i).name + " not homogeneous");
    o.require(substitute(hz.inverse.image(i), hz.change) == V(c, c->coord(i).name), "inverse of " + c->coord(i).name);
  }
  // h read in the new coordinates is the canonical diagonal action
  Substitution back(h.withT, h.withT);
  for (int i : c->declarationOrder()) back.set(c->coord(i).name, rechart(hz.inverse.image(i), h.withT));
  HomAction moved = HomAction::identity(c, h.param);
  HomAction canon = canonicalAction(c);
  for (int i : c->declarationOrder()) {
    const std::string& n = c->coord(i).name;
    moved.map.set(n, rechart(substitute(substitute(hz.change.image(i), h.map), back), moved.withT));
    o.require(rechart(moved.image(n), canon.withT) == canon.image(n), "conjugated image of " + n + ": " + moved.image(n).str());
  }
  o.require(verifyAction(moved).passed(), "verifyAction on the conjugated action");
  o.require(!runChecks(d).failed(), "fixture report fails");
  if (o.ok) o.detail = "w -> " + hz.change.image("w").str() + ", degree 2";
  return o;
}

// 3. Q-manifolds: de Rham and so(3) square to zero, a perturbed so(3) does not.
Outcome qManifolds() {
  Outcome o;
  Document d = fixture("derham_so3.gk");
  for (const auto& name : {"d", "Qso3"}) {
    const VecField& q = d.fields.at(name);
    o.require(lieBracket(q, q).isZero(), std::string("[Q,Q] nonzero for ") + name);
    o.require(isHomological(q).passed(), std::string("isHomological ") + name);
  }
  // brute-force Jacobi on the structure constants read off Q
  AlgebroidStructure st = structureFromQ(d.algebroids.at("so3alg"));
  auto C = [&](int a, int b, int k) { return st.structure[a][b][k].constantTerm(); };
  int nonzero = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int k = 0; k < 3; ++k) nonzero += C(a, b, k) != 0;
  o.require(nonzero == 6, "so(3) has " + std::to_string(nonzero) + " nonzero constants");
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int e = 0; e < 3; ++e)
        for (int m = 0; m < 3; ++m) {
          Rational s = 0;
          for (int k = 0; k < 3; ++k) s += C(a, b, k) * C(k, e, m) + C(b, e, k) * C(k, a, m) + C(e, a, k) * C(k, b, m);
          o.require(s == 0, "Jacobi oracle fails");
        }
  Document bad = fixture("neg_so3_perturbed.gk");
  const VecField& qb = bad.fields.at("Qbad");
  CheckReport r = isHomological(qb);
  o.require(!r.passed(), "perturbed so(3) passed");
  o.require(!lieBracket(qb, qb).isZero(), "perturbed [Q,Q] is zero");
  std::string text = r.text();
  o.require(text.find("nonzero") != std::string::npos, "perturbed residual not printed");
  if (o.ok) o.detail = "perturbed [Q,Q] = " + lieBracket(qb, qb).str();
  return o;
}

// 4. Section brackets on T(PiTM) have weight r1 + r2 - 2.
Outcome bracketWeight() {
  Outcome o;
  Document d = fixture("tpitm.gk");
  const AlgebroidData& a = d.algebroids.at("T");
  o.require(a.degree == 2, "degree");
  auto secs = basisSections(a, {1, 2}, 2);
  int pairs = 0, nonzero = 0;
  for (const auto& s1 : secs)
    for (const auto& s2 : secs) {
      ++pairs;
      Section r = sectionBracket(a, s1, s2);
      if (r.field.isZero()) continue;
      ++nonzero;
      auto sh = r.field.shift();
      o.require(sh.has_value(), "inhomogeneous bracket " + r.field.str());
      if (!sh) continue;
      int expect = s1.weight + s2.weight - 2;
      // i_s of a weight-r section shifts weights by (r - 2, -1)
      o.require(*sh == Shift({expect - 2, -1}), "bracket shift of " + r.field.str());
      o.require(r.weight == expect, "bracket weight of " + r.field.str());
    }
  o.require(nonzero > 0, "all brackets vanish");
  if (o.ok) o.detail = std::to_string(secs.size()) + " sections, " + std::to_string(nonzero) + "/" + std::to_string(pairs) + " brackets nonzero";
  return o;
}

// Polynomials in s, u truncated at s^2 u^1; independent of the library's Expr.
struct Series {
  std::map<std::pair<int, int>, Rational> c;
  static Series of(int ds, int du, long v) {
    Series r;
    r.c[{ds, du}] = v;
    return r;
  }
  Series operator*(const Series& o) const {
    Series r;
    for (const auto& [k1, v1] : c)
      for (const auto& [k2, v2] : o.c) {
        std::pair<int, int> k{k1.first + k2.first, k1.second + k2.second};
        if (k.first <= 2 && k.second <= 1) r.c[k] += v1 * v2;
      }
    return r;
  }
  Series operator+(const Series& o) const {
    Series r = *this;
    for (const auto& [k, v] : o.c) r.c[k] += v;
    return r;
  }
  Series operator-() const {
    Series r = *this;
    for (auto& [k, v] : r.c) v = -v;
    return r;
  }
  Rational coeff(int ds, int du) const {
    auto it = c.find({ds, du});
    return it == c.end() ? Rational(0) : it->second;
  }
};

// Left-invariant bracket of ax+b directions i, j (0 = a, 1 = b): the mixed
// derivative of g(s) h(u) g(s)^{-1} at the identity, component k.
Rational affineBracket(int i, int j, int k) {
  using G = std::pair<Series, Series>;  // x -> a x + b
  Series one = Series::of(0, 0, 1), zero;
  auto curve = [&](int dir, const Series& p) { return dir == 0 ? G{one + p, zero} : G{one, p}; };
  auto mul = [](const G& p, const G& q) { return G{p.first * q.first, p.first * q.second + p.second}; };
  G g = curve(i, Series::of(1, 0, 1)), h = curve(j, Series::of(0, 1, 1));
  Series da = g.first + (-one);
  Series inva = one + (-da) + da * da;
  G gi{inva, -(inva * g.second)};
  G r = mul(mul(g, h), gi);
  return (k == 0 ? r.first : r.second).coeff(1, 1);
}

// 5. Lie functor: the pair groupoid of the plane gives TM; ax+b gives aff(1).
Outcome lieFunctorOracle() {
  Outcome o;
  Document d = fixture("pair2.gk");
  CommandResult r = deriveCommand(d, "pair2");
  o.require(!r.failed(), "derive report");
  o.require(r.output == printDocument(fixture("tm_algebroid.gk")), "derived block differs from the TM fixture");
  AlgebroidStructure st = structureFromQ(lieFunctor(d.groupoids.at("pair2")));
  for (std::size_t i = 0; i < st.anchor.size(); ++i)
    for (std::size_t j = 0; j < st.anchor[i].size(); ++j)
      o.require(st.anchor[i][j].constantTerm() == Rational(i == j ? 1 : 0) && st.anchor[i][j].size() <= 1,
                "pair anchor is not the identity");
  for (const auto& m : st.structure)
    for (const auto& v : m)
      for (const auto& e : v) o.require(e.isZero(), "pair structure functions nonzero");

  Document ax = fixture("axb.gk");
  AlgebroidData b = lieFunctor(ax.groupoids.at("axb"));
  AlgebroidStructure sb = structureFromQ(b);
  o.require(sb.base.empty() && sb.fiber.size() == 2, "ax+b algebroid shape");
  o.require(isHomological(b.q).passed(), "ax+b Q not homological");
  // right-invariant fields bracket with the opposite sign
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        Rational expect = -affineBracket(i, j, k);
        const Expr& got = sb.structure[i][j][k];
        o.require(got.constantTerm() == expect && got.size() <= 1,
                  "C_" + std::to_string(i + 1) + std::to_string(j + 1) + "^" + std::to_string(k + 1) + " = " + got.str() +
                      ", oracle " + toString(expect));
      }
  if (o.ok) o.detail = "TM block matches; ax+b C_12^2 = " + sb.structure[0][1][1].str() + " (oracle agrees)";
  return o;
}

// 6. Weighted Lie functor of the pair groupoid of F1.
Outcome weightedLieFunctor() {
  Outcome o;
  Document d = fixture("weighted_pair_f1.gk");
  const WeightedGroupoid& w = d.weighted.at("W");
  o.require(verifyWeightedGroupoid(w).passed(), "weighted groupoid");
  AlgebroidData a = lieFunctor(w.spec);
  HomAction h = lieFunctorAction(w);
  o.require(a.degree == 2, "degree " + std::to_string(a.degree));
  CheckReport rep = verifyWeightedAlgebroid(a, h);
  o.require(rep.passed(), "verifyWeightedAlgebroid:\n" + rep.text());
  ChartPtr tf = tangentChart(d.charts.at("F1"));
  o.require(a.chart->size() == tf->size(), "coordinate count");
  std::string table;
  for (const auto& [mine, theirs] :
       std::vector<std::pair<std::string, std::string>>{{"x", "x"}, {"y", "y"}, {"dYx", "dx"}, {"dYy", "dy"}}) {
    const auto& c1 = a.chart->coord(a.chart->index(mine));
    const auto& c2 = tf->coord(tf->index(theirs));
    // fibers are parity-reversed tangent fibers
    bool parityOk = (c1.parity == c2.parity) == (c2.weight[1] == 0);
    o.require(c1.weight == c2.weight && parityOk, "weight of " + mine + " " + c1.weight.str() + " vs " + c2.weight.str());
    table += (table.empty() ? "" : ", ") + mine + " " + c1.weight.str();
  }
  if (o.ok) o.detail = table;
  return o;
}

std::string declaration(const AlgebroidData& a) {
  return chartBlock("A_chart", *a.chart) + fieldBlock("A_Q", "A_chart", a.q) + algebroidLine("A", "A_chart", a.degree, "A_Q");
}

// 7. Lie functor commutes with truncation of the tower.
Outcome towerCoherence() {
  Outcome o;
  Document f1 = fixture("weighted_pair_f1.gk");
  // a pair groupoid with a three-step tower
  Document f2 = parseDocument(
      "chart F2 arity 1\n  coord x weight (0)\n  coord y weight (1)\n  coord z weight (2)\nend\n"
      "groupoid P = pair F2\nweighted W groupoid P canonical\n");
  int levels = 0;
  for (const Document* d : {&f1, &f2}) {
    const WeightedGroupoid& w = d->weighted.at("W");
    AlgebroidData full = lieFunctor(w.spec);
    for (int j = 1; j < full.degree; ++j) {
      WeightedGroupoid low = truncateGroupoid(w, j);
      o.require(verifyWeightedGroupoid(low).passed(), "truncated groupoid at " + std::to_string(j));
      std::string viaGroupoid = declaration(lieFunctor(low.spec));
      std::string viaAlgebroid = declaration(towerProject(full, j));
      o.require(viaGroupoid == viaAlgebroid, "level " + std::to_string(j) + ":\n" + viaGroupoid + "vs\n" + viaAlgebroid);
      ++levels;
    }
  }
  if (o.ok) o.detail = std::to_string(levels) + " proper levels of F1 x F1 and F2 x F2 agree as declarations";
  return o;
}

// 8. Bi-algebroid and Courant checks.
Outcome courantCriteria() {
  Outcome o;
  Document tri = fixture("triangular.gk");
  for (const auto& [name, b] : tri.bialgebroids) o.require(verifyBiAlgebroid(b).passed(), "bi-algebroid " + name);
  o.require(!tri.bialgebroids.empty(), "no bi-algebroid in the triangular fixture");
  Document d = fixture("courant_ttm.gk");
  const CourantData& c = d.courants.at("TTM");
  o.require(verifyBiAlgebroid(d.bialgebroids.at("B")).passed(), "bi-algebroid B");
  o.require(verifyCourant(c).passed(), "verifyCourant");
  const ChartPtr& k = c.chart;
  o.require(c.theta == V(k, "xi") * V(k, "p_x") + V(k, "dxi") * V(k, "p_dx"), "Theta = " + c.theta.str());
  o.require(hamiltonianField(c.theta) == rechart(d.fields.at("X"), k), "generator " + hamiltonianField(c.theta).str());
  auto secs = courantBasisSections(c, 2);
  o.require(secs.size() >= 4, "too few basis sections");
  for (const auto& s1 : secs)
    for (const auto& s2 : secs) {
      Shift w1 = isHomogeneous(s1)->shift(), w2 = isHomogeneous(s2)->shift();
      Expr pr = courantPairing(c, s1, s2);
      if (!pr.isZero())
        o.require(isHomogeneous(pr) && isHomogeneous(pr)->shift() == w1 + w2 + Shift({-1, -2}), "pairing weight");
      Expr br = courantDorfman(c, s1, s2);
      if (!br.isZero())
        o.require(isHomogeneous(br) && isHomogeneous(br)->shift() == w1 + w2 + Shift({-1, -1}), "Dorfman weight");
    }
  std::size_t triples = 0;
  for (const auto& a : secs)
    for (const auto& b : secs)
      for (const auto& e : secs) {
        ++triples;
        Expr lhs = courantDorfman(c, a, courantDorfman(c, b, e));
        Expr rhs = courantDorfman(c, courantDorfman(c, a, b), e) + courantDorfman(c, b, courantDorfman(c, a, e));
        o.require(lhs == rhs, "Loday fails on " + a.str() + ", " + b.str() + ", " + e.str());
      }
  if (o.ok) o.detail = std::to_string(secs.size()) + " sections, " + std::to_string(triples) + " Loday triples";
  return o;
}

// 9. Lie functor of the tangent groupoid equals the tangent lift of the Lie functor.
Outcome tangentCompatibility() {
  Outcome o;
  Document d = fixture("tangent_pair_line.gk");
  const GroupoidSpec& g = d.groupoids.at("P");
  GroupoidSpec tg = tangentGroupoid(g);
  o.require(verifyGroupoid(tg).passed(), "tangent groupoid");
  AlgebroidData lifted = lieFunctor(tg);
  AlgebroidData a = lieFunctor(g);
  ChartPtr ta = higherTangentChart(a.chart, 1);
  VecField tq = higherLiftField(a.q, ta, 1);
  // the tangent component moves before the linear one
  ChartPtr ident = reorderWeights(ta, {0, 2, 1});
  bool same = sameChart(ident, lifted.chart);
  o.require(same, "charts differ:\n" + chartBlock("TA", *ident) + chartBlock("AT", *lifted.chart));
  if (same) o.require(rechart(tq, lifted.chart) == lifted.q, "Q differs: " + tq.str() + " vs " + lifted.q.str());
  o.require(isHomological(lifted.q).passed(), "lifted Q not homological");
  if (o.ok) o.detail = "Q = " + lifted.q.str();
  return o;
}

// 10. Byte-identical reports across runs and against the library, whole corpus.
Outcome determinism() {
  Outcome o;
  fs::path tmp = fs::temp_directory_path() / ("gradedkit_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  std::vector<fs::path> corpus;
  for (const auto& e : fs::directory_iterator(GK_FIXTURES))
    if (e.path().extension() == ".gk") corpus.push_back(e.path());
  std::sort(corpus.begin(), corpus.end());
  for (const auto& p : corpus) {
    std::string outs[2];
    bool negative = p.stem().string().rfind("neg_", 0) == 0;
    for (int run = 0; run < 2; ++run) {
      fs::path json = tmp / (p.stem().string() + "_" + std::to_string(run) + ".json");
      std::string cmd = std::string("\"") + GK_CLI + "\" check \"" + p.string() + "\" -q --json \"" + json.string() + "\"";
      int rc = std::system(cmd.c_str());
      int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
      o.require(code == (negative ? 1 : 0), p.filename().string() + " exit code " + std::to_string(code));
      outs[run] = slurp(json);
    }
    o.require(!outs[0].empty() && outs[0] == outs[1], p.filename().string() + " reports differ between runs");
    std::string lib = runChecks(parseDocument(slurp(p))).json(false);
    o.require(lib == outs[0] || lib + "\n" == outs[0], p.filename().string() + " library and CLI reports differ");
  }
  fs::remove_all(tmp);
  if (o.ok) o.detail = std::to_string(corpus.size()) + " fixtures, two CLI runs each";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    double limit;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria = {
      {"homogeneity law on T2M", 1, homogeneityLaw},
      {"homogenization of (x, y, w)", 1, homogenization},
      {"Q-manifolds: de Rham, so(3), perturbed so(3)", 1, qManifolds},
      {"section bracket weight r1+r2-2 on T(PiTM)", 5, bracketWeight},
      {"Lie functor oracles: pair plane and ax+b", 5, lieFunctorOracle},
      {"weighted Lie functor of F1 x F1", 5, weightedLieFunctor},
      {"tower coherence", 5, towerCoherence},
      {"bi-algebroid and Courant suite", 30, courantCriteria},
      {"tangent functor compatibility", 10, tangentCompatibility},
      {"determinism and corpus runtime", 120, determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("error: ") + e.what();
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool inTime = s < c.limit;
    bool pass = o.ok && inTime;
    failed += !pass;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3fs, limit %gs", s, c.limit);
    std::cout << (pass ? "PASS" : "FAIL") << " " << (i + 1) << ". " << c.name << " [" << timing << "]"
              << (inTime ? "" : " time limit exceeded") << (o.detail.empty() ? "" : ": " + o.detail) << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
