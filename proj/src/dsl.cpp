#include "gradedkit/dsl.hpp"

#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace gk {

ParseError::ParseError(int line, int column, const std::string& message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

// ---------------------------------------------------------------------------
// Expressions

namespace {

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool identChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

bool isIdentifier(const std::string& s) {
  if (s.empty() || !identStart(s[0])) return false;
  for (char c : s)
    if (!identChar(c)) return false;
  return true;
}

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  RawPtr parse() {
    skip();
    if (pos_ == s_.size()) fail("empty expression");
    RawPtr e = sum();
    skip();
    if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(0, static_cast<int>(pos_) + 1, msg); }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  RawPtr sum() {
    RawPtr e = product();
    for (;;) {
      if (eat('+'))
        e = raw::add(e, product());
      else if (eat('-'))
        e = raw::sub(e, product());
      else
        return e;
    }
  }
  RawPtr product() {
    RawPtr e = unary();
    for (;;) {
      if (eat('*'))
        e = raw::mul(e, unary());
      else if (eat('/'))
        e = raw::div(e, unary());
      else
        return e;
    }
  }
  RawPtr unary() {
    if (eat('-')) return raw::neg(unary());
    if (eat('+')) return unary();
    return power();
  }
  RawPtr power() {
    RawPtr e = atom();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a non-negative integer exponent");
      if (pos_ - start > 6) fail("exponent too large");
      e = raw::pow(e, std::stoi(s_.substr(start, pos_ - start)));
    }
    return e;
  }
  std::string ident() {
    skip();
    if (pos_ >= s_.size() || !identStart(s_[pos_])) fail("expected an identifier");
    std::size_t start = pos_;
    while (pos_ < s_.size() && identChar(s_[pos_])) ++pos_;
    return s_.substr(start, pos_ - start);
  }
  RawPtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      RawPtr e = sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return raw::num(Rational(s_.substr(start, pos_ - start)));
    }
    if (!identStart(c)) fail(std::string("unexpected '") + c + "'");
    std::string name = ident();
    std::vector<std::string> derivs;
    bool isCall = false;
    if (eat('[')) {
      isCall = true;
      if (!eat(']')) {
        do derivs.push_back(ident());
        while (eat(','));
        expect(']');
      }
    }
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      std::vector<RawPtr> args;
      if (!eat(')')) {
        do args.push_back(sum());
        while (eat(','));
        expect(')');
      }
      return raw::call(name, std::move(args), std::move(derivs));
    }
    if (isCall) fail("expected '(' after derivative list");
    return raw::sym(name);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

RawPtr parseExpression(const std::string& text) { return ExprParser(text).parse(); }

std::string CheckDirective::id() const {
  std::string out = kind;
  for (const auto& a : args) out += " " + a;
  return out;
}

bool Document::has(const std::string& name) const { return !kindOf(name).empty(); }

std::string Document::kindOf(const std::string& name) const {
  if (charts.count(name)) return "chart";
  if (exprs.count(name)) return "expr";
  if (fields.count(name)) return "field";
  if (actions.count(name)) return "action";
  if (maps.count(name)) return "map";
  if (algebroids.count(name)) return "algebroid";
  if (groupoids.count(name)) return "groupoid";
  if (weighted.count(name)) return "weighted";
  if (bialgebroids.count(name)) return "bialgebroid";
  if (courants.count(name)) return "courant";
  return "";
}

// ---------------------------------------------------------------------------
// Canonical blocks

namespace {

std::string imageLines(const Substitution& s, const std::string& indent) {
  std::string out;
  const Chart& from = *s.from();
  for (int idx : from.declarationOrder()) {
    if (from.coord(idx).parameter || !s.hasExplicit(idx)) continue;
    out += indent + from.coord(idx).name + ": " + s.image(idx).str() + "\n";
  }
  return out;
}

}  // namespace

std::string chartBlock(const std::string& name, const Chart& c) {
  std::string out = "chart " + name + " arity " + std::to_string(c.arity()) + "\n";
  Weight join = Weight::zero(c.arity());
  for (int idx : c.declarationOrder()) {
    const auto& co = c.coord(idx);
    out += "  coord " + co.name + " weight " + co.weight.str() + " parity " + toString(co.parity);
    if (co.parameter)
      out += " parameter";
    else
      join = join.join(co.weight);
    out += "\n";
  }
  if (c.degreeBound() != join) out += "  bound " + c.degreeBound().str() + "\n";
  if (c.parityComponent()) out += "  paritycomponent " + std::to_string(*c.parityComponent()) + "\n";
  if (c.bracketParity() == Parity::Odd) out += "  bracket odd\n";
  for (const auto& [x, p] : c.options().conjugates) out += "  conjugate " + x + " " + p + "\n";
  return out + "end\n";
}

std::string fieldBlock(const std::string& name, const std::string& chart, const VecField& x) {
  std::string out = "field " + name + " on " + chart + "\n";
  const Chart& c = *x.chart();
  for (int idx : c.declarationOrder()) {
    if (c.coord(idx).parameter || x.component(idx).isZero()) continue;
    out += "  " + c.coord(idx).name + ": " + x.component(idx).str() + "\n";
  }
  return out + "end\n";
}

std::string actionBlock(const std::string& name, const std::string& chart, const HomAction& h) {
  return "action " + name + " on " + chart + " param " + h.param + "\n" + imageLines(h.map, "  ") + "end\n";
}

std::string algebroidLine(const std::string& name, const std::string& chart, int degree, const std::string& field) {
  return "algebroid " + name + " chart " + chart + " degree " + std::to_string(degree) + " field " + field + "\n";
}

// ---------------------------------------------------------------------------
// Document parser

namespace {

struct Tok {
  std::string s;
  int col = 1;
};

struct Line {
  int no = 0;
  std::string text;  // comment stripped
  std::vector<Tok> toks;
};

std::vector<Tok> tokenize(const std::string& text, int lineNo) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (text[i] == '(') {
      while (i < text.size() && text[i] != ')') ++i;
      if (i == text.size()) throw ParseError(lineNo, static_cast<int>(start) + 1, "unterminated '('");
      ++i;
      std::string t;
      for (std::size_t k = start; k < i; ++k)
        if (!std::isspace(static_cast<unsigned char>(text[k]))) t += text[k];
      out.push_back({t, static_cast<int>(start) + 1});
      continue;
    }
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    out.push_back({text.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

std::string joinToks(const std::vector<Tok>& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) out += (i ? " " : "") + toks[i].s;
  return out;
}

struct Component {
  const Line* line;
  std::string name;
  int nameCol;
  std::string expr;
  int exprCol;
};

// Check directive signatures; "?" marks an optional trailing argument.
const std::map<std::string, std::vector<std::string>>& checkSignatures() {
  static const std::map<std::string, std::vector<std::string>> sigs = {
      {"action", {"action"}},
      {"degree", {"action", "int"}},
      {"homogeneous", {"action", "expr"}},
      {"homogenize", {"action"}},
      {"homological", {"field"}},
      {"algebroid", {"algebroid", "?action"}},
      {"bracket-weights", {"algebroid", "int"}},
      {"groupoid", {"groupoid"}},
      {"weighted", {"weighted"}},
      {"lie", {"groupoid|weighted"}},
      {"derive", {"groupoid", "algebroid"}},
      {"tower", {"weighted", "int"}},
      {"tangent-lift", {"groupoid"}},
      {"morphism", {"groupoid", "groupoid", "map"}},
      {"bialgebroid", {"bialgebroid"}},
      {"sharp", {"bialgebroid"}},
      {"schouten", {"bialgebroid", "expr"}},
      {"courant", {"courant", "?int"}},
      {"generator", {"courant", "field"}},
      {"poisson", {"weighted", "expr"}},
      {"equal", {"chart|expr|field|action|algebroid", "chart|expr|field|action|algebroid"}},
  };
  return sigs;
}

class DocParser {
 public:
  explicit DocParser(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
      ++no;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw = raw.substr(0, hash);
      Line l{no, raw, tokenize(raw, no)};
      if (!l.toks.empty()) lines_.push_back(std::move(l));
    }
  }

  Document run() {
    while (i_ < lines_.size()) {
      const Line& l = lines_[i_++];
      const std::string& kw = l.toks[0].s;
      if (kw == "chart")
        chartDecl(l);
      else if (kw == "expr" || kw == "ham")
        exprDecl(l);
      else if (kw == "field")
        fieldDecl(l);
      else if (kw == "action")
        actionDecl(l);
      else if (kw == "map")
        mapDecl(l);
      else if (kw == "algebroid")
        algebroidDecl(l);
      else if (kw == "groupoid")
        groupoidDecl(l);
      else if (kw == "weighted")
        weightedDecl(l);
      else if (kw == "bialgebroid")
        bialgebroidDecl(l);
      else if (kw == "courant")
        courantDecl(l);
      else if (kw == "check")
        checkDecl(l);
      else
        fail(l, l.toks[0].col, "unknown keyword '" + kw + "'");
    }
    return std::move(doc_);
  }

 private:
  [[noreturn]] static void fail(const Line& l, int col, const std::string& msg) { throw ParseError(l.no, col, msg); }

  template <class F>
  static auto guard(const Line& l, int col, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(l.no, col, e.what());
    }
  }

  const Tok& tok(const Line& l, std::size_t k, const std::string& what) const {
    if (k >= l.toks.size()) fail(l, static_cast<int>(l.text.size()) + 1, "expected " + what);
    return l.toks[k];
  }
  void keyword(const Line& l, std::size_t k, const std::string& kw) const {
    const Tok& t = tok(l, k, "'" + kw + "'");
    if (t.s != kw) fail(l, t.col, "expected '" + kw + "', found '" + t.s + "'");
  }
  void noMore(const Line& l, std::size_t k) const {
    if (k < l.toks.size()) fail(l, l.toks[k].col, "unexpected '" + l.toks[k].s + "'");
  }
  int integer(const Line& l, std::size_t k) const {
    const Tok& t = tok(l, k, "an integer");
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(t.s, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != t.s.size() || t.s.empty()) fail(l, t.col, "expected an integer, found '" + t.s + "'");
    return v;
  }
  std::vector<int> tuple(const Line& l, std::size_t k) const {
    const Tok& t = tok(l, k, "a weight tuple");
    if (t.s.size() < 2 || t.s.front() != '(' || t.s.back() != ')')
      fail(l, t.col, "expected a weight tuple like (0,1)");
    std::vector<int> out;
    std::string body = t.s.substr(1, t.s.size() - 2);
    std::stringstream ss(body);
    std::string part;
    while (std::getline(ss, part, ',')) {
      std::size_t pos = 0;
      int v = 0;
      try {
        v = std::stoi(part, &pos);
      } catch (...) {
        pos = 0;
      }
      if (part.empty() || pos != part.size()) fail(l, t.col, "bad weight component '" + part + "'");
      out.push_back(v);
    }
    if (out.empty()) fail(l, t.col, "empty weight tuple");
    return out;
  }
  std::string newName(const Line& l, std::size_t k) {
    const Tok& t = tok(l, k, "a name");
    if (!isIdentifier(t.s)) fail(l, t.col, "invalid name '" + t.s + "'");
    if (doc_.has(t.s)) fail(l, t.col, "'" + t.s + "' is already declared");
    return t.s;
  }
  // Optional trailing "prefix P" starting at token k.
  std::string prefixOpt(const Line& l, std::size_t k, const std::string& dflt) const {
    if (k >= l.toks.size()) return dflt;
    keyword(l, k, "prefix");
    const Tok& t = tok(l, k + 1, "a prefix");
    noMore(l, k + 2);
    return t.s;
  }

  template <class M>
  const typename M::mapped_type& ref(const Line& l, std::size_t k, const M& m, const std::string& kind) const {
    const Tok& t = tok(l, k, "a " + kind + " name");
    auto it = m.find(t.s);
    if (it != m.end()) return it->second;
    std::string actual = doc_.kindOf(t.s);
    if (actual.empty()) fail(l, t.col, "unknown identifier '" + t.s + "'");
    fail(l, t.col, "'" + t.s + "' is a " + actual + ", expected a " + kind);
  }
  const ChartPtr& chartRef(const Line& l, std::size_t k) const { return ref(l, k, doc_.charts, "chart"); }

  void add(const std::string& kind, const std::string& name, const std::string& text) {
    doc_.declarations.push_back({kind, name, text});
  }

  Expr exprOn(const Line& l, int col, const std::string& text, const ChartPtr& chart) const {
    RawPtr r;
    try {
      r = parseExpression(text);
    } catch (const ParseError& e) {
      throw ParseError(l.no, col + e.column() - 1, e.message());
    }
    try {
      return normalize(*r, chart);
    } catch (const Error& e) {
      throw ParseError(l.no, col + blame(text, e.what()), e.what());
    }
  }
  // Offset of the first quoted identifier of a message inside an expression.
  static int blame(const std::string& text, const std::string& msg) {
    auto a = msg.find('\'');
    auto b = a == std::string::npos ? a : msg.find('\'', a + 1);
    if (b == std::string::npos) return 0;
    std::string name = msg.substr(a + 1, b - a - 1);
    for (std::size_t pos = text.find(name); pos != std::string::npos; pos = text.find(name, pos + 1)) {
      bool left = pos == 0 || !identChar(text[pos - 1]);
      bool right = pos + name.size() >= text.size() || !identChar(text[pos + name.size()]);
      if (left && right) return static_cast<int>(pos);
    }
    return 0;
  }
  // Expression text after the given token, e.g. after "=".
  std::pair<std::string, int> restAfter(const Line& l, std::size_t k) const {
    const Tok& t = tok(l, k, "an expression");
    std::size_t start = static_cast<std::size_t>(t.col - 1);
    return {l.text.substr(start), t.col};
  }

  std::vector<Component> components() {
    std::vector<Component> out;
    for (;;) {
      if (i_ >= lines_.size()) {
        const Line& last = lines_.back();
        fail(last, 1, "missing 'end'");
      }
      const Line& l = lines_[i_];
      if (l.toks[0].s == "end") {
        noMore(l, 1);
        ++i_;
        return out;
      }
      auto colon = l.text.find(':');
      if (colon == std::string::npos) fail(l, l.toks[0].col, "expected 'coordinate: expression' or 'end'");
      ++i_;
      std::string name = l.text.substr(0, colon);
      std::size_t a = name.find_first_not_of(" \t");
      std::size_t b = name.find_last_not_of(" \t");
      if (a == std::string::npos) fail(l, 1, "missing coordinate name before ':'");
      name = name.substr(a, b - a + 1);
      out.push_back({&l, name, static_cast<int>(a) + 1, l.text.substr(colon + 1), static_cast<int>(colon) + 2});
    }
  }
  void fillSubstitution(Substitution& s, const std::vector<Component>& comps) const {
    std::set<std::string> seen;
    for (const auto& c : comps) {
      const Line& l = *c.line;
      auto idx = s.from()->find(c.name);
      if (!idx || s.from()->coord(*idx).parameter) fail(l, c.nameCol, "unknown coordinate '" + c.name + "'");
      if (!seen.insert(c.name).second) fail(l, c.nameCol, "coordinate '" + c.name + "' given twice");
      Expr e = exprOn(l, c.exprCol, c.expr, s.to());
      guard(l, c.exprCol, [&] {
        s.set(*idx, e);
        return 0;
      });
    }
  }

  // -------------------------------------------------------------------------

  void chartDecl(const Line& l) {
    std::string name = newName(l, 1);
    const Tok& t2 = tok(l, 2, "'arity' or '='");
    if (t2.s == "=") return derivedChart(l, name);
    keyword(l, 2, "arity");
    int arity = integer(l, 3);
    if (arity < 1) fail(l, l.toks[3].col, "arity must be positive");
    noMore(l, 4);
    std::vector<Coordinate> coords;
    std::vector<std::pair<int, int>> parityOmitted;  // (coord index, line index)
    std::vector<const Line*> coordLines;
    Chart::Options opts;
    for (;;) {
      if (i_ >= lines_.size()) fail(l, 1, "chart '" + name + "' is missing 'end'");
      const Line& b = lines_[i_++];
      const std::string& kw = b.toks[0].s;
      if (kw == "end") {
        noMore(b, 1);
        break;
      }
      if (kw == "coord") {
        const Tok& nt = tok(b, 1, "a coordinate name");
        if (!isIdentifier(nt.s)) fail(b, nt.col, "invalid coordinate name '" + nt.s + "'");
        keyword(b, 2, "weight");
        auto w = tuple(b, 3);
        if (static_cast<int>(w.size()) != arity)
          fail(b, b.toks[3].col,
               "weight " + b.toks[3].s + " has arity " + std::to_string(w.size()) + ", chart arity is " +
                   std::to_string(arity));
        Coordinate c;
        c.name = nt.s;
        c.weight = guard(b, b.toks[3].col, [&] { return Weight(w); });
        std::size_t k = 4;
        bool parityGiven = false;
        if (k < b.toks.size() && b.toks[k].s == "parity") {
          const Tok& pt = tok(b, k + 1, "even or odd");
          if (pt.s == "even")
            c.parity = Parity::Even;
          else if (pt.s == "odd")
            c.parity = Parity::Odd;
          else
            fail(b, pt.col, "parity must be even or odd");
          parityGiven = true;
          k += 2;
        }
        if (k < b.toks.size() && b.toks[k].s == "parameter") {
          c.parameter = true;
          ++k;
        }
        noMore(b, k);
        if (!parityGiven) parityOmitted.push_back({static_cast<int>(coords.size()), 0});
        coords.push_back(c);
        coordLines.push_back(&b);
      } else if (kw == "bound") {
        auto w = tuple(b, 1);
        if (static_cast<int>(w.size()) != arity) fail(b, b.toks[1].col, "bound arity mismatch");
        opts.degreeBound = guard(b, b.toks[1].col, [&] { return Weight(w); });
        noMore(b, 2);
      } else if (kw == "paritycomponent") {
        int p = integer(b, 1);
        if (p < 0 || p >= arity) fail(b, b.toks[1].col, "parity component out of range");
        opts.parityComponent = static_cast<std::size_t>(p);
        noMore(b, 2);
      } else if (kw == "bracket") {
        const Tok& pt = tok(b, 1, "even or odd");
        if (pt.s != "even" && pt.s != "odd") fail(b, pt.col, "bracket parity must be even or odd");
        opts.bracketParity = pt.s == "odd" ? Parity::Odd : Parity::Even;
        noMore(b, 2);
      } else if (kw == "conjugate") {
        opts.conjugates.push_back({tok(b, 1, "a coordinate").s, tok(b, 2, "a momentum").s});
        noMore(b, 3);
      } else {
        fail(b, b.toks[0].col, "unknown chart entry '" + kw + "'");
      }
    }
    // With a parity component, an omitted parity is read off the weights.
    if (opts.parityComponent)
      for (auto [ci, unused] : parityOmitted) {
        (void)unused;
        auto& c = coords[ci];
        c.parity = (c.weight[*opts.parityComponent] & 1) ? Parity::Odd : Parity::Even;
      }
    ChartPtr chart = guard(l, l.toks[1].col, [&] { return Chart::make(arity, coords, opts); });
    doc_.charts[name] = chart;
    add("chart", name, chartBlock(name, *chart));
  }

  void derivedChart(const Line& l, const std::string& name) {
    const Tok& op = tok(l, 3, "a chart construction");
    ChartPtr out;
    int col = op.col;
    if (op.s == "tangent") {
      ChartPtr m = chartRef(l, 4);
      std::string p = prefixOpt(l, 5, "d");
      out = guard(l, col, [&] { return tangentChart(m, p); });
    } else if (op.s == "higher") {
      ChartPtr m = chartRef(l, 4);
      int k = integer(l, 5);
      std::string p = prefixOpt(l, 6, "d");
      out = guard(l, col, [&] { return higherTangentChart(m, k, p); });
    } else if (op.s == "cotangent" || op.s == "shifted-cotangent") {
      ChartPtr m = chartRef(l, 4);
      std::string p = prefixOpt(l, 5, "p_");
      bool shifted = op.s == "shifted-cotangent";
      out = guard(l, col, [&] { return cotangentChart(m, shifted, p); });
    } else if (op.s == "reverse") {
      ChartPtr m = chartRef(l, 4);
      int i = integer(l, 5);
      noMore(l, 6);
      if (i < 0) fail(l, l.toks[5].col, "component out of range");
      out = guard(l, col, [&] { return parityReverse(m, static_cast<std::size_t>(i)); });
    } else if (op.s == "collapse" || op.s == "reorder") {
      ChartPtr m = chartRef(l, 4);
      std::vector<std::size_t> comps;
      for (std::size_t k = 5; k < l.toks.size(); ++k) {
        int v = integer(l, k);
        if (v < 0) fail(l, l.toks[k].col, "component out of range");
        comps.push_back(static_cast<std::size_t>(v));
      }
      if (comps.empty()) fail(l, static_cast<int>(l.text.size()) + 1, "expected weight components");
      out = guard(l, col, [&] { return op.s == "collapse" ? collapseWeights(m, comps) : reorderWeights(m, comps); });
    } else if (op.s == "truncate") {
      ChartPtr m = chartRef(l, 4);
      int j = integer(l, 5);
      noMore(l, 6);
      out = guard(l, col, [&] { return truncateChart(m, j).chart; });
    } else if (op.s == "gamma" || op.s == "base" || op.s == "composable") {
      const GroupoidSpec& g = ref(l, 4, doc_.groupoids, "groupoid");
      noMore(l, 5);
      out = op.s == "gamma" ? g.gamma : op.s == "base" ? g.base : g.composable;
    } else if (op.s == "of") {
      const Tok& t = tok(l, 4, "a declaration name");
      noMore(l, 5);
      std::string kind = doc_.kindOf(t.s);
      if (kind == "algebroid")
        out = doc_.algebroids.at(t.s).chart;
      else if (kind == "bialgebroid")
        out = doc_.bialgebroids.at(t.s).cot;
      else if (kind == "courant")
        out = doc_.courants.at(t.s).chart;
      else if (kind == "field")
        out = doc_.fields.at(t.s).chart();
      else if (kind == "expr")
        out = doc_.exprs.at(t.s).chart();
      else if (kind == "action")
        out = doc_.actions.at(t.s).chart;
      else if (kind == "weighted")
        out = doc_.weighted.at(t.s).spec.gamma;
      else if (kind.empty())
        fail(l, t.col, "unknown identifier '" + t.s + "'");
      else
        fail(l, t.col, "'" + t.s + "' is a " + kind + " and has no single chart");
    } else {
      fail(l, col, "unknown chart construction '" + op.s + "'");
    }
    doc_.charts[name] = out;
    add("chart", name, joinToks(l.toks) + "\n");
  }

  void exprDecl(const Line& l) {
    const std::string& kw = l.toks[0].s;
    std::string name = newName(l, 1);
    const Tok& t2 = tok(l, 2, "'on' or '='");
    Expr e;
    if (t2.s == "on") {
      const std::string& cname = tok(l, 3, "a chart name").s;
      ChartPtr chart = chartRef(l, 3);
      keyword(l, 4, "=");
      auto [text, col] = restAfter(l, 5);
      e = exprOn(l, col, text, chart);
      doc_.exprs[name] = e;
      add(kw, name, kw + " " + name + " on " + cname + " = " + e.str() + "\n");
      return;
    }
    keyword(l, 2, "=");
    const Tok& op = tok(l, 3, "an expression construction");
    if (op.s == "poisson-lift") {
      const Expr& p = ref(l, 4, doc_.exprs, "expr");
      int k = integer(l, 5);
      noMore(l, 6);
      e = guard(l, op.col, [&] { return tangentLiftPoisson(p, k); });
    } else if (op.s == "symbol") {
      const VecField& x = ref(l, 4, doc_.fields, "field");
      keyword(l, 5, "on");
      ChartPtr c = chartRef(l, 6);
      noMore(l, 7);
      e = guard(l, op.col, [&] { return symbol(x, c); });
    } else if (op.s == "q" || op.s == "s") {
      const BiAlgebroidData& b = ref(l, 4, doc_.bialgebroids, "bialgebroid");
      noMore(l, 5);
      e = op.s == "q" ? b.q : b.s;
    } else if (op.s == "theta") {
      const CourantData& c = ref(l, 4, doc_.courants, "courant");
      noMore(l, 5);
      e = c.theta;
    } else if (op.s == "sum") {
      const Expr& f = ref(l, 4, doc_.exprs, "expr");
      const Expr& g = ref(l, 5, doc_.exprs, "expr");
      noMore(l, 6);
      e = guard(l, l.toks[5].col, [&] { return f + rechart(g, f.chart()); });
    } else if (op.s == "rechart") {
      const Expr& f = ref(l, 4, doc_.exprs, "expr");
      keyword(l, 5, "on");
      ChartPtr c = chartRef(l, 6);
      noMore(l, 7);
      e = guard(l, op.col, [&] { return rechart(f, c); });
    } else {
      fail(l, op.col, "unknown expression construction '" + op.s + "'");
    }
    doc_.exprs[name] = e;
    add(kw, name, joinToks(l.toks) + "\n");
  }

  void fieldDecl(const Line& l) {
    std::string name = newName(l, 1);
    const Tok& t2 = tok(l, 2, "'on' or '='");
    if (t2.s == "on") {
      const std::string& cname = tok(l, 3, "a chart name").s;
      ChartPtr chart = chartRef(l, 3);
      noMore(l, 4);
      VecField x(chart);
      std::set<std::string> seen;
      for (const auto& c : components()) {
        auto idx = chart->find(c.name);
        if (!idx) fail(*c.line, c.nameCol, "unknown coordinate '" + c.name + "'");
        if (!seen.insert(c.name).second) fail(*c.line, c.nameCol, "coordinate '" + c.name + "' given twice");
        x.set(*idx, exprOn(*c.line, c.exprCol, c.expr, chart));
      }
      doc_.fields[name] = x;
      add("field", name, fieldBlock(name, cname, x));
      return;
    }
    keyword(l, 2, "=");
    const Tok& op = tok(l, 3, "a field construction");
    VecField x;
    if (op.s == "lift") {
      const VecField& y = ref(l, 4, doc_.fields, "field");
      keyword(l, 5, "on");
      ChartPtr c = chartRef(l, 6);
      keyword(l, 7, "order");
      int k = integer(l, 8);
      std::string p = prefixOpt(l, 9, "d");
      x = guard(l, op.col, [&] { return higherLiftField(y, c, k, p); });
    } else if (op.s == "hamiltonian") {
      const Expr& h = ref(l, 4, doc_.exprs, "expr");
      noMore(l, 5);
      x = guard(l, op.col, [&] { return hamiltonianField(h); });
    } else if (op.s == "q") {
      const AlgebroidData& a = ref(l, 4, doc_.algebroids, "algebroid");
      noMore(l, 5);
      x = a.q;
    } else {
      fail(l, op.col, "unknown field construction '" + op.s + "'");
    }
    doc_.fields[name] = x;
    add("field", name, joinToks(l.toks) + "\n");
  }

  void actionDecl(const Line& l) {
    std::string name = newName(l, 1);
    const Tok& t2 = tok(l, 2, "'on' or '='");
    if (t2.s == "on") {
      const std::string& cname = tok(l, 3, "a chart name").s;
      ChartPtr chart = chartRef(l, 3);
      std::string param = "t";
      if (l.toks.size() > 4) {
        keyword(l, 4, "param");
        const Tok& pt = tok(l, 5, "a parameter name");
        if (!isIdentifier(pt.s)) fail(l, pt.col, "invalid parameter name '" + pt.s + "'");
        if (chart->find(pt.s)) fail(l, pt.col, "parameter '" + pt.s + "' clashes with a coordinate");
        param = pt.s;
        noMore(l, 6);
      }
      HomAction h = guard(l, l.toks[3].col, [&] { return HomAction::identity(chart, param); });
      fillSubstitution(h.map, components());
      doc_.actions[name] = h;
      add("action", name, actionBlock(name, cname, h));
      return;
    }
    keyword(l, 2, "=");
    const Tok& op = tok(l, 3, "an action construction");
    HomAction h;
    if (op.s == "canonical") {
      ChartPtr m = chartRef(l, 4);
      std::vector<std::size_t> comps;
      if (l.toks.size() > 5) {
        keyword(l, 5, "components");
        for (std::size_t k = 6; k < l.toks.size(); ++k) {
          int v = integer(l, k);
          if (v < 0 || v >= static_cast<int>(m->arity())) fail(l, l.toks[k].col, "component out of range");
          comps.push_back(static_cast<std::size_t>(v));
        }
      }
      h = guard(l, op.col, [&] { return canonicalAction(m, comps); });
    } else if (op.s == "lift") {
      const HomAction& h0 = ref(l, 4, doc_.actions, "action");
      keyword(l, 5, "on");
      ChartPtr c = chartRef(l, 6);
      keyword(l, 7, "order");
      int k = integer(l, 8);
      std::string p = prefixOpt(l, 9, "d");
      h = guard(l, op.col, [&] { return liftAction(h0, c, k, p); });
    } else if (op.s == "lie") {
      const WeightedGroupoid& w = ref(l, 4, doc_.weighted, "weighted");
      std::string p = prefixOpt(l, 5, "d");
      h = guard(l, op.col, [&] { return lieFunctorAction(w, p); });
    } else if (op.s == "base") {
      const WeightedGroupoid& w = ref(l, 4, doc_.weighted, "weighted");
      noMore(l, 5);
      h = guard(l, op.col, [&] { return baseAction(w); });
    } else {
      fail(l, op.col, "unknown action construction '" + op.s + "'");
    }
    doc_.actions[name] = h;
    add("action", name, joinToks(l.toks) + "\n");
  }

  void mapDecl(const Line& l) {
    std::string name = newName(l, 1);
    keyword(l, 2, "from");
    ChartPtr from = chartRef(l, 3);
    keyword(l, 4, "to");
    ChartPtr to = chartRef(l, 5);
    noMore(l, 6);
    Substitution s(to, from);
    fillSubstitution(s, components());
    doc_.maps[name] = s;
    add("map", name, "map " + name + " from " + l.toks[3].s + " to " + l.toks[5].s + "\n" + imageLines(s, "  ") + "end\n");
  }

  void algebroidDecl(const Line& l) {
    std::string name = newName(l, 1);
    const Tok& t2 = tok(l, 2, "'chart' or '='");
    AlgebroidData a;
    if (t2.s == "chart") {
      ChartPtr chart = chartRef(l, 3);
      keyword(l, 4, "degree");
      int k = integer(l, 5);
      keyword(l, 6, "field");
      const VecField& q = ref(l, 7, doc_.fields, "field");
      noMore(l, 8);
      if (!sameChart(q.chart(), chart)) fail(l, l.toks[7].col, "field '" + l.toks[7].s + "' is not on chart '" + l.toks[3].s + "'");
      if (k < 1) fail(l, l.toks[5].col, "degree must be positive");
      a = AlgebroidData{chart, q, k};
    } else {
      keyword(l, 2, "=");
      const Tok& op = tok(l, 3, "an algebroid construction");
      if (op.s == "lie") {
        const GroupoidSpec& g = ref(l, 4, doc_.groupoids, "groupoid");
        std::string p = prefixOpt(l, 5, "d");
        a = guard(l, op.col, [&] { return lieFunctor(g, p); });
      } else if (op.s == "project") {
        const AlgebroidData& a0 = ref(l, 4, doc_.algebroids, "algebroid");
        int j = integer(l, 5);
        noMore(l, 6);
        a = guard(l, op.col, [&] { return towerProject(a0, j); });
      } else {
        fail(l, op.col, "unknown algebroid construction '" + op.s + "'");
      }
    }
    doc_.algebroids[name] = a;
    add("algebroid", name, joinToks(l.toks) + "\n");
  }

  void groupoidDecl(const Line& l) {
    std::string name = newName(l, 1);
    const Tok& t2 = tok(l, 2, "'gamma' or '='");
    if (t2.s == "=") return derivedGroupoid(l, name);
    keyword(l, 2, "gamma");
    ChartPtr gamma = chartRef(l, 3);
    keyword(l, 4, "base");
    ChartPtr base = chartRef(l, 5);
    noMore(l, 6);
    GroupoidSpec g;
    g.name = name;
    g.gamma = gamma;
    g.base = base;
    g.source = Substitution(base, gamma);
    g.target = Substitution(base, gamma);
    g.unit = Substitution(gamma, base);
    std::string text = "groupoid " + name + " gamma " + l.toks[3].s + " base " + l.toks[5].s + "\n";
    std::set<std::string> seen;
    bool haveMult = false;
    std::string multHeader;
    for (;;) {
      if (i_ >= lines_.size()) fail(l, 1, "groupoid '" + name + "' is missing 'end'");
      const Line& b = lines_[i_++];
      const std::string& kw = b.toks[0].s;
      if (kw == "end") {
        noMore(b, 1);
        break;
      }
      if (!seen.insert(kw).second && (kw == "source" || kw == "target" || kw == "unit" || kw == "inverse" || kw == "mult"))
        fail(b, b.toks[0].col, "'" + kw + "' given twice");
      if (kw == "source" || kw == "target" || kw == "unit" || kw == "inverse") {
        noMore(b, 1);
        Substitution* s = nullptr;
        if (kw == "source") s = &g.source;
        if (kw == "target") s = &g.target;
        if (kw == "unit") s = &g.unit;
        if (kw == "inverse") {
          g.inverse = Substitution(gamma, gamma);
          s = &*g.inverse;
        }
        fillSubstitution(*s, components());
      } else if (kw == "mult") {
        keyword(b, 1, "on");
        ChartPtr comp = chartRef(b, 2);
        keyword(b, 3, "via");
        const Substitution& p1 = ref(b, 4, doc_.maps, "map");
        const Substitution& p2 = ref(b, 5, doc_.maps, "map");
        noMore(b, 6);
        for (int k : {4, 5}) {
          const Substitution& p = k == 4 ? p1 : p2;
          if (!sameChart(p.from(), gamma) || !sameChart(p.to(), comp))
            fail(b, b.toks[k].col, "map '" + b.toks[k].s + "' must go from '" + b.toks[2].s + "' to '" + l.toks[3].s + "'");
        }
        g.composable = comp;
        g.p1 = p1;
        g.p2 = p2;
        g.mult = Substitution(gamma, comp);
        fillSubstitution(g.mult, components());
        haveMult = true;
        multHeader = "  mult on " + b.toks[2].s + " via " + b.toks[4].s + " " + b.toks[5].s + "\n";
      } else {
        fail(b, b.toks[0].col, "unknown groupoid entry '" + kw + "'");
      }
    }
    if (!haveMult) fail(l, l.toks[1].col, "groupoid '" + name + "' has no 'mult' block");
    text += "  source\n" + imageLines(g.source, "    ") + "  end\n";
    text += "  target\n" + imageLines(g.target, "    ") + "  end\n";
    text += "  unit\n" + imageLines(g.unit, "    ") + "  end\n";
    if (g.inverse) text += "  inverse\n" + imageLines(*g.inverse, "    ") + "  end\n";
    text += multHeader + imageLines(g.mult, "    ") + "  end\nend\n";
    doc_.groupoids[name] = g;
    add("groupoid", name, text);
  }

  void derivedGroupoid(const Line& l, const std::string& name) {
    const Tok& op = tok(l, 3, "a groupoid construction");
    GroupoidSpec g;
    if (op.s == "pair") {
      ChartPtr m = chartRef(l, 4);
      noMore(l, 5);
      g = guard(l, op.col, [&] { return pairGroupoid(m, name); });
    } else if (op.s == "tangent") {
      const GroupoidSpec& g0 = ref(l, 4, doc_.groupoids, "groupoid");
      std::string p = prefixOpt(l, 5, "d");
      g = guard(l, op.col, [&] { return tangentGroupoid(g0, p); });
    } else if (op.s == "truncate") {
      const GroupoidSpec& g0 = ref(l, 4, doc_.groupoids, "groupoid");
      int j = integer(l, 5);
      noMore(l, 6);
      g = guard(l, op.col, [&] { return truncateGroupoid(g0, j); });
    } else {
      fail(l, op.col, "unknown groupoid construction '" + op.s + "'");
    }
    g.name = name;
    doc_.groupoids[name] = g;
    add("groupoid", name, joinToks(l.toks) + "\n");
  }

  void weightedDecl(const Line& l) {
    std::string name = newName(l, 1);
    const Tok& t2 = tok(l, 2, "'groupoid' or '='");
    WeightedGroupoid w;
    if (t2.s == "groupoid") {
      const GroupoidSpec& g = ref(l, 3, doc_.groupoids, "groupoid");
      const Tok& how = tok(l, 4, "'action' or 'canonical'");
      if (how.s == "action") {
        const HomAction& h = ref(l, 5, doc_.actions, "action");
        noMore(l, 6);
        if (!sameChart(h.chart, g.gamma)) fail(l, l.toks[5].col, "action '" + l.toks[5].s + "' is not on the gamma chart");
        w = WeightedGroupoid{g, h};
      } else if (how.s == "canonical") {
        noMore(l, 5);
        w = WeightedGroupoid{g, guard(l, how.col, [&] { return canonicalAction(g.gamma); })};
      } else {
        fail(l, how.col, "expected 'action' or 'canonical'");
      }
    } else {
      keyword(l, 2, "=");
      const Tok& op = tok(l, 3, "a construction");
      if (op.s != "truncate") fail(l, op.col, "unknown weighted groupoid construction '" + op.s + "'");
      const WeightedGroupoid& w0 = ref(l, 4, doc_.weighted, "weighted");
      int j = integer(l, 5);
      noMore(l, 6);
      w = guard(l, op.col, [&] { return truncateGroupoid(w0, j); });
    }
    doc_.weighted[name] = w;
    add("weighted", name, joinToks(l.toks) + "\n");
  }

  void bialgebroidDecl(const Line& l) {
    std::string name = newName(l, 1);
    const Tok& t2 = tok(l, 2, "'algebroid', 'chart' or '='");
    BiAlgebroidData b;
    if (t2.s == "algebroid") {
      const AlgebroidData& a = ref(l, 3, doc_.algebroids, "algebroid");
      keyword(l, 4, "poisson");
      const Expr& p = ref(l, 5, doc_.exprs, "expr");
      noMore(l, 6);
      b = guard(l, l.toks[5].col, [&] { return triangularBiAlgebroid(a, p); });
    } else if (t2.s == "chart") {
      ChartPtr cot = chartRef(l, 3);
      keyword(l, 4, "degree");
      int k = integer(l, 5);
      keyword(l, 6, "q");
      const Expr& q = ref(l, 7, doc_.exprs, "expr");
      keyword(l, 8, "s");
      const Expr& s = ref(l, 9, doc_.exprs, "expr");
      noMore(l, 10);
      for (int idx : {7, 9}) {
        const Expr& e = idx == 7 ? q : s;
        if (!sameChart(e.chart(), cot)) fail(l, l.toks[idx].col, "'" + l.toks[idx].s + "' is not on chart '" + l.toks[3].s + "'");
      }
      b = BiAlgebroidData{cot, q, s, k};
    } else {
      keyword(l, 2, "=");
      const Tok& op = tok(l, 3, "a construction");
      if (op.s != "dual") fail(l, op.col, "unknown bi-algebroid construction '" + op.s + "'");
      const BiAlgebroidData& b0 = ref(l, 4, doc_.bialgebroids, "bialgebroid");
      noMore(l, 5);
      b = guard(l, op.col, [&] { return dualBiAlgebroid(b0); });
    }
    doc_.bialgebroids[name] = b;
    add("bialgebroid", name, joinToks(l.toks) + "\n");
  }

  void courantDecl(const Line& l) {
    std::string name = newName(l, 1);
    keyword(l, 2, "bialgebroid");
    const BiAlgebroidData& b = ref(l, 3, doc_.bialgebroids, "bialgebroid");
    keyword(l, 4, "lambda");
    const Tok& lt = tok(l, 5, "a rational");
    noMore(l, 6);
    Rational lambda;
    try {
      lambda = Rational(lt.s);
      lambda.canonicalize();
    } catch (...) {
      fail(l, lt.col, "invalid rational '" + lt.s + "'");
    }
    CourantData c = guard(l, lt.col, [&] { return courantFromBiAlgebroid(b, lambda); });
    doc_.courants[name] = c;
    add("courant", name, "courant " + name + " bialgebroid " + l.toks[3].s + " lambda " + toString(lambda) + "\n");
  }

  void checkDecl(const Line& l) {
    const Tok& kt = tok(l, 1, "a check kind");
    auto it = checkSignatures().find(kt.s);
    if (it == checkSignatures().end()) fail(l, kt.col, "unknown check kind '" + kt.s + "'");
    const auto& sig = it->second;
    CheckDirective d;
    d.kind = kt.s;
    d.line = l.no;
    std::size_t k = 2;
    for (const auto& want : sig) {
      bool optional = want[0] == '?';
      std::string kinds = optional ? want.substr(1) : want;
      if (k >= l.toks.size()) {
        if (optional) break;
        fail(l, static_cast<int>(l.text.size()) + 1, "check '" + d.kind + "' expects a " + kinds);
      }
      const Tok& a = l.toks[k++];
      if (kinds == "int") {
        integer(l, k - 1);
      } else {
        std::string actual = doc_.kindOf(a.s);
        if (actual.empty()) fail(l, a.col, "unknown identifier '" + a.s + "'");
        bool ok = false;
        std::stringstream ss(kinds);
        std::string one;
        while (std::getline(ss, one, '|'))
          if (one == actual) ok = true;
        if (!ok) fail(l, a.col, "'" + a.s + "' is a " + actual + ", expected a " + kinds);
      }
      d.args.push_back(a.s);
    }
    noMore(l, k);
    doc_.checks.push_back(d);
  }

  std::vector<Line> lines_;
  std::size_t i_ = 0;
  Document doc_;
};

}  // namespace

Document parseDocument(const std::string& text) { return DocParser(text).run(); }

std::string printDocument(const Document& d) {
  std::string out;
  for (const auto& decl : d.declarations) out += decl.text;
  for (const auto& c : d.checks) out += "check " + c.id() + "\n";
  return out;
}

}  // namespace gk
