#include <gtest/gtest.h>

#include <random>

#include "gradedkit/lifts.hpp"
#include "support.hpp"

using namespace gk;
using namespace gk::testing;

namespace {

ChartPtr t2m() { return mkChart(1, {even("x", {0}), even("xd", {1}), even("xdd", {2})}); }

HomAction xywAction() {
  auto c = mkChart(1, {even("x", {0}), even("y", {1}), even("w", {2})});
  auto h = HomAction::identity(c);
  auto T = h.withT;
  auto t = h.t();
  h.map.set("y", t * V(T, "y"));
  h.map.set("w", t.pow(2) * V(T, "w") + (t - t.pow(2)) * V(T, "x") * V(T, "y"));
  return h;
}

std::vector<std::string> names(const ChartPtr& c) {
  std::vector<std::string> out;
  for (const auto& co : c->declaredCoords()) out.push_back(co.name + ":" + co.weight.str() + ":" + toString(co.parity));
  return out;
}

}  // namespace

TEST(Action, CanonicalSecondTangent) {
  auto h = canonicalAction(t2m());
  EXPECT_TRUE(verifyAction(h).passed());
  EXPECT_EQ(actionDegree(h), 2);
  auto frame = taylorFrame(h);
  ASSERT_EQ(frame.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_EQ(frame[i].second[j].isZero(), i != j) << frame[i].first << " order " << j;
  EXPECT_EQ(frame[2].second[2], V(t2m(), "xdd"));
}

TEST(Action, IdentityHasDegreeZero) {
  auto h = HomAction::identity(t2m());
  EXPECT_TRUE(verifyAction(h).passed());
  EXPECT_EQ(actionDegree(h), 0);
}

TEST(Action, NonHomogeneousCoordinates) {
  auto h = xywAction();
  EXPECT_TRUE(verifyAction(h).passed());
  EXPECT_EQ(actionDegree(h), 2);
  auto frame = taylorFrame(h);
  const auto& c = h.chart;
  ASSERT_EQ(frame[2].first, "w");
  EXPECT_TRUE(frame[2].second[0].isZero());
  EXPECT_EQ(frame[2].second[1], V(c, "x") * V(c, "y"));
  EXPECT_EQ(frame[2].second[2], V(c, "w") - V(c, "x") * V(c, "y"));
  EXPECT_EQ(*isHomogeneous(frame[2].second[2] + V(c, "x") * V(c, "y")), Weight({2}));
  // the order-0 row is the projection to the base
  EXPECT_EQ(frame[0].second[0], V(c, "x"));
  EXPECT_TRUE(frame[1].second[0].isZero());
}

TEST(Action, TranslationFails) {
  auto c = mkChart(1, {even("x", {0})});
  auto h = HomAction::identity(c);
  h.map.set("x", V(h.withT, "x") + h.t());
  auto rep = verifyAction(h);
  EXPECT_FALSE(rep.passed());
  ASSERT_EQ(rep.residuals.size(), 2u);
  EXPECT_EQ(rep.residuals[0].terms, std::vector<std::string>{"x: 1"});
  // oracle: h_t(h_s(x)) - h_ts(x) = (x + s + t) - (x + ts)
  EXPECT_EQ(rep.residuals[1].terms, std::vector<std::string>{"x: s - s*t + t"});
  EXPECT_THROW(actionDegree(h), Error);
}

TEST(Homogenize, TriangularCase) {
  auto h = xywAction();
  auto r = homogenize(h);
  ASSERT_TRUE(r.supported) << r.reason;
  EXPECT_TRUE(r.report.passed()) << r.report.text();
  const auto& c = h.chart;
  EXPECT_EQ(r.change.image("w"), V(c, "w") - V(c, "x") * V(c, "y"));
  EXPECT_EQ(r.change.image("x"), V(c, "x"));
  EXPECT_EQ(r.change.image("y"), V(c, "y"));
  EXPECT_EQ(r.inverse.image("w"), V(c, "w") + V(c, "x") * V(c, "y"));
}

TEST(Homogenize, CanonicalGivesIdentity) {
  auto r = homogenize(canonicalAction(t2m()));
  ASSERT_TRUE(r.supported);
  for (const auto& n : {"x", "xd", "xdd"}) EXPECT_EQ(r.change.image(n), V(t2m(), n));
}

TEST(Homogenize, SwappedWeightsRefused) {
  auto c = mkChart(1, {even("x", {0}), even("a", {1}), even("b", {2})});
  auto h = HomAction::identity(c);
  h.map.set("a", h.t().pow(2) * V(h.withT, "a"));
  h.map.set("b", h.t() * V(h.withT, "b"));
  EXPECT_TRUE(verifyAction(h).passed());
  auto r = homogenize(h);
  EXPECT_FALSE(r.supported);
  EXPECT_FALSE(r.reason.empty());
}

TEST(Homogenize, LowerWeightDependency) {
  // a = u + v, b = v with u, v homogeneous of weights 1, 2
  auto c = mkChart(1, {even("a", {1}), even("b", {2})});
  auto h = HomAction::identity(c);
  auto t = h.t();
  auto T = h.withT;
  h.map.set("a", t * (V(T, "a") - V(T, "b")) + t.pow(2) * V(T, "b"));
  h.map.set("b", t.pow(2) * V(T, "b"));
  ASSERT_TRUE(verifyAction(h).passed());
  auto r = homogenize(h);
  ASSERT_TRUE(r.supported) << r.reason;
  EXPECT_TRUE(r.report.passed());
  EXPECT_EQ(r.change.image("a"), V(c, "a") - V(c, "b"));
}

TEST(Action, HomogeneityLawOnRandomPolynomials) {
  auto c = t2m();
  auto h = canonicalAction(c);
  std::mt19937 rng(2024);
  int done = 0;
  while (done < 50) {
    Expr f = randomPolynomial(rng, c, 5, 4);
    auto parts = weightDecompose(f);
    if (parts.empty()) continue;
    const auto& [w, part] = *parts.begin();
    Expr lhs = substitute(part, h.map);
    EXPECT_EQ(lhs, h.t().pow(w.total()) * rechart(part, h.withT));
    ++done;
  }
}

TEST(WeightVectorField, Examples) {
  auto c = t2m();
  auto e = weightVectorField(c, 0);
  EXPECT_EQ(e.str(), "xd*d/dxd + 2*xdd*d/dxdd");
  EXPECT_TRUE(weightVectorField(mkChart(1, {even("x", {0})}), 0).isZero());
  auto gl = tangentChart(mkChart(1, {even("x", {0}), even("y", {1})}));
  EXPECT_TRUE(lieBracket(weightVectorField(gl, 0), weightVectorField(gl, 1)).isZero());
  // eigenfunctions
  std::mt19937 rng(8);
  for (int i = 0; i < 20; ++i) {
    Expr f = randomMonomial(rng, c);
    EXPECT_EQ(e(f), f.scaled(isHomogeneous(f)->total()));
  }
}

TEST(ChartLifts, Tangent) {
  auto c = mkChart(1, {even("x", {0}), even("y", {1})});
  EXPECT_EQ(names(tangentChart(c)),
            (std::vector<std::string>{"x:(0,0):even", "dx:(0,1):even", "y:(1,0):even", "dy:(1,1):even"}));
  EXPECT_EQ(names(tangentChart(mkChart(1, {even("x", {0})}))),
            (std::vector<std::string>{"x:(0,0):even", "dx:(0,1):even"}));
}

TEST(ChartLifts, HigherTangent) {
  auto point = mkChart(1, {even("x", {0})});
  auto t2 = higherTangentChart(point, 2);
  auto collapsed = collapseWeights(t2, {0, 1});
  EXPECT_EQ(names(collapsed), (std::vector<std::string>{"x:(0):even", "dx:(1):even", "ddx:(2):even"}));
  EXPECT_EQ(collapsed->degreeBound(), Weight({2}));
  EXPECT_TRUE(sameChart(higherTangentChart(point, 0), point));
  // iterated tangent, summed to total weight
  auto tt = tangentChart(tangentChart(point), "v");
  auto total = collapseWeights(tt, {0, 1, 2});
  EXPECT_EQ(names(total),
            (std::vector<std::string>{"x:(0):even", "vx:(1):even", "dx:(1):even", "vdx:(2):even"}));
}

TEST(ChartLifts, Cotangent) {
  auto point = mkChart(1, {even("x", {0})});
  EXPECT_EQ(names(cotangentChart(point)), (std::vector<std::string>{"x:(0,0):even", "p_x:(0,1):even"}));
  // shifted D_k with k = 3: x_u, theta_{u+1} for u = 0, 1, 2
  auto pid = mkChart(2, {even("x0", {0, 0}), even("x1", {1, 0}), even("x2", {2, 0}), odd("th0", {0, 1}),
                         odd("th1", {1, 1}), odd("th2", {2, 1})});
  auto cot = cotangentChart(pid);
  for (int u = 0; u <= 2; ++u) {
    auto s = std::to_string(u);
    EXPECT_EQ(cot->coord(cot->index("p_x" + s)).weight, Weight({2 - u, 1, 1}));
    EXPECT_EQ(cot->coord(cot->index("p_th" + s)).weight, Weight({2 - u, 0, 1}));
    EXPECT_EQ(cot->coord(cot->index("p_th" + s)).parity, Parity::Odd);
    EXPECT_EQ(cot->coord(cot->index("th" + s)).weight, Weight({u, 1, 0}));
  }
  EXPECT_EQ(pairingWeight(*cot), Weight({2, 1, 1}));
  for (const auto& pr : cot->conjugates())
    EXPECT_EQ(cot->coord(pr.coord).weight + cot->coord(pr.momentum).weight, Weight({2, 1, 1}));
}

TEST(ChartLifts, ParityReverse) {
  auto tm = tangentChart(mkChart(1, {even("x", {0})}));
  auto ptm = parityReverse(tm, 1);
  EXPECT_EQ(names(ptm), (std::vector<std::string>{"x:(0,0):even", "dx:(0,1):odd"}));
  EXPECT_TRUE(sameChart(parityReverse(ptm, 1), tm));
  EXPECT_THROW(parityReverse(t2m(), 0), Error);
}

TEST(ChartLifts, CollapseAndTruncate) {
  auto c = tangentChart(t2m());
  EXPECT_TRUE(sameChart(collapseWeights(c, {1}), c));
  auto tr = truncateChart(t2m(), 1);
  EXPECT_EQ(names(tr.chart), (std::vector<std::string>{"x:(0):even", "xd:(1):even"}));
  EXPECT_EQ(substitute(V(tr.chart, "xd"), tr.projection), V(t2m(), "xd"));
  EXPECT_EQ(names(truncateChart(t2m(), 0).chart), (std::vector<std::string>{"x:(0):even"}));
  EXPECT_TRUE(sameChart(truncateChart(t2m(), 2).chart, t2m()));
}

TEST(ChartLifts, TruncationCommutesWithTangent) {
  auto c = t2m();
  auto a = truncateChart(tangentChart(c), 1).chart;
  auto b = tangentChart(truncateChart(c, 1).chart);
  // total weight <= 1 on TF keeps x, dx, xd only, while T(F_1) also has dxd of total weight 2
  EXPECT_EQ(names(truncateChart(b, 1).chart), names(a));
}

TEST(Lift, FunctionsAndFields) {
  auto base = mkChart(1, {even("x", {0}), odd("xi", {1})});
  auto tb = tangentChart(base);
  VecField q(base);
  q.set("x", V(base, "xi"));
  auto tq = higherLiftField(q, tb, 1);
  EXPECT_EQ(tq.str(), "xi*d/dx + dxi*d/ddx");
  EXPECT_TRUE(isHomological(tq).passed());
  // (x^2)' = 2 x dx, (x^2)'' on T^2 = dx^2 + 2 x ddx
  auto t2 = higherTangentChart(base, 2);
  EXPECT_EQ(higherLift(V(base, "x").pow(2), tb, 1, 1), (V(tb, "x") * V(tb, "dx")).scaled(2));
  EXPECT_EQ(higherLift(V(base, "x").pow(2), t2, 2, 2),
            V(t2, "dx").pow(2) + (V(t2, "x") * V(t2, "ddx")).scaled(2));
}

TEST(Lift, ActionLiftsToGLBundle) {
  auto f = mkChart(1, {even("x", {0}), even("y", {1})});
  auto tf = tangentChart(f);
  auto h = liftAction(canonicalAction(f), tf, 1);
  EXPECT_TRUE(verifyAction(h).passed());
  // the lifted action is the canonical action in the first component
  auto can = canonicalAction(tf, {0});
  for (const auto& n : {"x", "y", "dx", "dy"}) EXPECT_EQ(h.image(n), rechart(can.image(n), h.withT));
}

TEST(Lift, Bivectors) {
  std::vector<Coordinate> cs{even("x", {0, 0}), even("y", {0, 0}), odd("p_x", {0, 1}), odd("p_y", {0, 1})};
  Chart::Options o;
  o.bracketParity = Parity::Odd;
  o.conjugates = {{"x", "p_x"}, {"y", "p_y"}};
  auto c = Chart::make(2, cs, o);
  Expr pi = V(c, "p_x") * V(c, "p_y");
  Expr l = tangentLiftPoisson(pi, 1);
  auto lc = l.chart();
  EXPECT_EQ(l, V(lc, "p_x") * V(lc, "p_dy") + V(lc, "p_dx") * V(lc, "p_y"));
  EXPECT_EQ(tangentLiftPoisson(pi, 0), pi);
  EXPECT_EQ(*naturalShift(l), Shift({0, -1}));

  Expr lin = V(c, "x") * pi;
  EXPECT_TRUE(poisson(lin, lin).isZero());
  for (int k = 1; k <= 2; ++k) {
    Expr lk = tangentLiftPoisson(lin, k);
    EXPECT_TRUE(poisson(lk, lk).isZero()) << k;
    EXPECT_EQ(*naturalShift(lk), Shift({0, -k}));
    EXPECT_EQ(*momentumDegree(lk), 2);
  }
  // oracle: the tangent lift of x d_x ^ d_y is x (d_x ^ d_dy + d_dx ^ d_y) + dx d_dx ^ d_dy
  Expr l1 = tangentLiftPoisson(lin, 1);
  auto L = l1.chart();
  EXPECT_EQ(l1, V(L, "x") * (V(L, "p_x") * V(L, "p_dy") + V(L, "p_dx") * V(L, "p_y")) +
                    V(L, "dx") * V(L, "p_dx") * V(L, "p_dy"));
}
