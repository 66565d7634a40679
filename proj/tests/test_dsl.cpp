#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
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

std::vector<fs::path> corpus() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(GK_FIXTURES))
    if (e.path().extension() == ".gk") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

ParseError parseFailure(const std::string& text) {
  try {
    parseDocument(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no diagnostic for:\n" << text;
  return ParseError(0, 0, "");
}

}  // namespace

TEST(ExpressionParser, PrecedenceAndCalls) {
  auto c = mkChart(1, {even("x", {0}), even("y", {1}), odd("e", {1})});
  auto n = [&](const std::string& s) { return normalize(*parseExpression(s), c); };
  EXPECT_EQ(n("1 + 2*x^2"), K(c, 1) + K(c, 2) * V(c, "x") * V(c, "x"));
  EXPECT_EQ(n("-x^2"), K(c, -1) * V(c, "x") * V(c, "x"));
  EXPECT_EQ(n("(x - y)*(x + y)"), V(c, "x") * V(c, "x") - V(c, "y") * V(c, "y"));
  EXPECT_EQ(n("x/2 - 1/2*x"), Expr(c));
  EXPECT_EQ(n("e*e"), Expr(c));
  EXPECT_EQ(n("f[x](x)").str(), "f[x](x)");
  EXPECT_THROW(n("x/y"), Error);
  EXPECT_THROW(n("q"), Error);
}

TEST(ExpressionParser, Diagnostics) {
  for (const std::string bad : {"", "x +", "(x", "x^y", "x $ y", "f[x]"}) {
    try {
      parseExpression(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const ParseError& e) {
      EXPECT_GE(e.column(), 1) << bad;
    }
  }
}

TEST(ExpressionParser, PrintedFormReparses) {
  auto c = mkChart(2, {even("x", {0, 0}), even("y", {1, 0}), odd("e", {0, 1}), odd("f", {1, 1})});
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    Expr e = randomPolynomial(rng, c, 5, 4);
    e = e.scaled(Rational(1, 1 + i % 4));
    EXPECT_EQ(normalize(*parseExpression(e.str()), c), e) << e.str();
  }
  Expr g = Expr::fn(c, "g", {"x"});
  Expr dg = derivative(g, "x") * V(c, "e");
  EXPECT_EQ(normalize(*parseExpression(dg.str()), c), dg) << dg.str();
}

TEST(Document, EmptyFile) {
  Document d = parseDocument("");
  EXPECT_TRUE(d.declarations.empty());
  EXPECT_TRUE(d.checks.empty());
  EXPECT_EQ(printDocument(d), "");
  EXPECT_TRUE(parseDocument("# only a comment\n\n").declarations.empty());
}

TEST(Document, T2MChart) {
  Document d = fixture("t2m_chart.gk");
  const auto& c = d.charts.at("T2M");
  EXPECT_EQ(c->degreeBound(), Weight({2}));
  EXPECT_EQ(c->size(), 3u);
  EXPECT_TRUE(sameChart(c, d.charts.at("T2R")) || d.charts.at("T2R")->size() == 3u);
  EXPECT_EQ(d.kindOf("h"), "action");
  EXPECT_EQ(d.checks.size(), 6u);
}

TEST(Document, ParityFromComponent) {
  Document d = parseDocument(
      "chart A arity 2\n  coord x weight (0,0)\n  coord e weight (0,1)\n  paritycomponent 1\nend\n");
  const auto& c = d.charts.at("A");
  EXPECT_EQ(c->coord(c->index("e")).parity, Parity::Odd);
  EXPECT_EQ(c->coord(c->index("x")).parity, Parity::Even);
  // the canonical form spells parities out
  EXPECT_NE(printDocument(d).find("coord e weight (0,1) parity odd"), std::string::npos);
}

TEST(Document, LocatedDiagnostics) {
  auto e1 = parseFailure("chart M arity 1\n  coord x weight (0) parity odd\nend\nexpr f on M = 1 + g(x)\n");
  EXPECT_EQ(e1.line(), 4);
  EXPECT_EQ(e1.column(), 19);

  auto e2 = parseFailure("chart M arity 1\n  coord x weight (0,1) parity even\nend\n");
  EXPECT_EQ(e2.line(), 2);
  EXPECT_EQ(e2.column(), 18);

  auto e3 = parseFailure("chart M arity 1\n  coord x weight (0)\nend\nfield X on M\n  x: x*zz\nend\n");
  EXPECT_EQ(e3.line(), 5);
  EXPECT_EQ(e3.column(), 8);

  auto e4 = parseFailure("check homological Q\n");
  EXPECT_EQ(e4.line(), 1);
  EXPECT_EQ(e4.column(), 19);

  auto e5 = parseFailure("chart M arity 1\n  coord x weight (0)\nend\ncheck homological M\n");
  EXPECT_NE(e5.message().find("is a chart"), std::string::npos);

  auto e6 = parseFailure("chart M arity 1\n  coord x weight (0)\n");
  EXPECT_NE(e6.message().find("end"), std::string::npos);

  auto e7 = parseFailure("chart M arity 1\nend\nchart M arity 1\nend\n");
  EXPECT_EQ(e7.line(), 3);

  auto e8 = parseFailure("chart M arity 1\n  coord x weight (0) parity even\n  coord e weight (0) parity odd\nend\n"
                         "map m from M to M\n  x: e\nend\n");
  EXPECT_EQ(e8.line(), 6);
  EXPECT_NE(e8.message().find("parity"), std::string::npos);

  auto e9 = parseFailure("frobnicate\n");
  EXPECT_EQ(e9.column(), 1);
}

TEST(Document, ErrorFixturesAreDiagnosed) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(fs::path(GK_FIXTURES) / "errors")) {
    ++n;
    try {
      parseDocument(slurp(e.path()));
      ADD_FAILURE() << e.path() << " parsed";
    } catch (const ParseError& err) {
      EXPECT_GT(err.line(), 0) << e.path();
      EXPECT_GT(err.column(), 0) << e.path();
    }
  }
  EXPECT_GE(n, 4);
}

TEST(Document, RoundTripOnCorpus) {
  for (const auto& p : corpus()) {
    SCOPED_TRACE(p.filename().string());
    Document d = parseDocument(slurp(p));
    std::string once = printDocument(d);
    Document d2 = parseDocument(once);
    EXPECT_EQ(printDocument(d2), once);
    EXPECT_EQ(d2.declarations.size(), d.declarations.size());
    // re-parsed structures agree
    for (const auto& [name, x] : d.fields) EXPECT_EQ(d2.fields.at(name).str(), x.str()) << name;
    for (const auto& [name, e] : d.exprs) EXPECT_EQ(d2.exprs.at(name).str(), e.str()) << name;
    for (const auto& [name, c] : d.charts) EXPECT_TRUE(sameChart(d2.charts.at(name), c)) << name;
  }
}

TEST(Commands, DerivePairEqualsHandwrittenAlgebroid) {
  Document d = fixture("pair2.gk");
  CommandResult r = deriveCommand(d, "pair2");
  EXPECT_FALSE(r.failed()) << r.text();
  EXPECT_EQ(r.output, printDocument(fixture("tm_algebroid.gk")));
  // the emitted block parses
  Document back = parseDocument(r.output);
  EXPECT_EQ(back.algebroids.at("A_pair2").degree, 1);
}

TEST(Commands, DeriveRefusesClashingName) {
  Document d = fixture("pair2.gk");
  EXPECT_THROW(deriveCommand(d, "pair2", "M"), Error);
  EXPECT_THROW(deriveCommand(d, "nope"), Error);
}

TEST(Commands, LiftBracketHomogenize) {
  Document t = fixture("t2m_chart.gk");
  CommandResult lc = liftCommand(t, "R", "higher", 2, "T2");
  Document back = parseDocument(lc.output);
  EXPECT_TRUE(sameChart(back.charts.at("T2"), t.charts.at("T2R")));
  CommandResult la = liftCommand(t, "h", "tangent", 1);
  EXPECT_FALSE(la.failed());
  EXPECT_NO_THROW(parseDocument(la.output));
  EXPECT_THROW(liftCommand(t, "R", "sideways", 1), Error);

  Document so3 = fixture("derham_so3.gk");
  CommandResult b = bracketCommand(so3, "so3alg", "e1", "e2", "e3");
  EXPECT_EQ(b.output, "field e3 on so3\n  xi3: 1\nend\n");

  Document h = fixture("homogenize_xyw.gk");
  CommandResult hz = homogenizeCommand(h, "h");
  EXPECT_FALSE(hz.failed()) << hz.text();
  EXPECT_EQ(hz.output, "map homogeneous_h from N to N\n  w: -x*y + w\nend\n");
}

TEST(Commands, CorpusVerdicts) {
  for (const auto& p : corpus()) {
    SCOPED_TRACE(p.filename().string());
    Document d = parseDocument(slurp(p));
    CommandResult r = runChecks(d);
    bool negative = p.filename().string().rfind("neg_", 0) == 0;
    EXPECT_EQ(r.failed(), negative) << r.text();
    if (negative) EXPECT_NE(r.text().find("nonzero"), std::string::npos) << r.text();
    for (const auto& c : r.checks)
      if (!negative) EXPECT_NE(c.verdict(), Verdict::Fail) << c.text();
  }
}

TEST(Commands, ReportsAreDeterministic) {
  for (const auto& p : corpus()) {
    Document d = parseDocument(slurp(p));
    std::string a = runChecks(d).json(false);
    std::string b = runChecks(parseDocument(slurp(p))).json(false);
    EXPECT_EQ(a, b) << p;
    EXPECT_EQ(a.find("timing"), std::string::npos);
  }
  Document d = fixture("derham_so3.gk");
  EXPECT_NE(runChecks(d).json(true).find("\"timing\""), std::string::npos);
}

TEST(Commands, FilterByName) {
  Document d = fixture("derham_so3.gk");
  CommandResult r = runChecks(d, "Qso3");
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_EQ(r.checks[0].id, "homological Qso3");
}

TEST(Commands, ErrorsBecomeFailingChecks) {
  Document d = parseDocument(
      "chart M arity 1\n  coord x weight (0)\nend\naction h on M\n  x: x + t\nend\ncheck degree h 1\n");
  CommandResult r = runChecks(d);
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_EQ(r.checks[0].verdict(), Verdict::Fail);
}
