#include "gradedkit/expr.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace gk {

std::string toString(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

bool Factor::sameBase(const Factor& o) const {
  return var == o.var && fn == o.fn && args == o.args && derivs == o.derivs;
}

bool Factor::baseLess(const Factor& o) const {
  return std::tie(var, fn, args, derivs) < std::tie(o.var, o.fn, o.args, o.derivs);
}

namespace {

bool isOddFactor(const Chart& chart, const Factor& f) {
  return f.isVar() && chart.coord(f.var).parity == Parity::Odd;
}

}  // namespace

Parity monomialParity(const Chart& chart, const Monomial& m) {
  int odd = 0;
  for (const auto& f : m.factors)
    if (isOddFactor(chart, f)) odd += f.exp;
  return (odd & 1) ? Parity::Odd : Parity::Even;
}

Weight monomialWeight(const Chart& chart, const Monomial& m) {
  Weight w = Weight::zero(chart.arity());
  for (const auto& f : m.factors)
    if (f.isVar()) w = w + chart.coord(f.var).weight.scaled(f.exp);
  return w;
}

bool monomialHasParameter(const Chart& chart, const Monomial& m) {
  return std::any_of(m.factors.begin(), m.factors.end(),
                     [&](const Factor& f) { return f.isVar() && chart.coord(f.var).parameter; });
}

std::string monomialStr(const Chart& chart, const Monomial& m) {
  std::string out;
  for (const auto& f : m.factors) {
    if (!out.empty()) out += "*";
    if (f.isVar()) {
      out += chart.coord(f.var).name;
    } else {
      out += f.fn;
      std::vector<std::string> ds;
      for (std::size_t i = 0; i < f.args.size(); ++i)
        for (int k = 0; k < f.derivs[i]; ++k) ds.push_back(chart.coord(f.args[i]).name);
      if (!ds.empty()) {
        out += "[";
        for (std::size_t i = 0; i < ds.size(); ++i) out += (i ? "," : "") + ds[i];
        out += "]";
      }
      out += "(";
      for (std::size_t i = 0; i < f.args.size(); ++i) out += (i ? "," : "") + chart.coord(f.args[i]).name;
      out += ")";
    }
    if (f.exp != 1) out += "^" + std::to_string(f.exp);
  }
  return out;
}

std::pair<int, Monomial> multiply(const Chart& chart, const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors.reserve(a.factors.size() + b.factors.size());
  int sign = 1;
  // Number of odd factors of `a` not yet emitted.
  int oddLeftInA = 0;
  for (const auto& f : a.factors)
    if (isOddFactor(chart, f)) ++oddLeftInA;

  std::size_t i = 0, j = 0;
  while (i < a.factors.size() || j < b.factors.size()) {
    if (j == b.factors.size() || (i < a.factors.size() && a.factors[i].baseLess(b.factors[j]))) {
      if (isOddFactor(chart, a.factors[i])) --oddLeftInA;
      out.factors.push_back(a.factors[i++]);
    } else if (i == a.factors.size() || b.factors[j].baseLess(a.factors[i])) {
      if (isOddFactor(chart, b.factors[j]) && (oddLeftInA & 1)) sign = -sign;
      out.factors.push_back(b.factors[j++]);
    } else {
      if (isOddFactor(chart, a.factors[i])) return {0, Monomial{}};
      Factor f = a.factors[i++];
      f.exp += b.factors[j++].exp;
      out.factors.push_back(std::move(f));
    }
  }
  return {sign, std::move(out)};
}

// ---------------------------------------------------------------------------

Expr Expr::constant(ChartPtr chart, const Rational& c) {
  Expr e(std::move(chart));
  e.addTerm(Monomial{}, c);
  return e;
}

Expr Expr::var(ChartPtr chart, int index) {
  if (index < 0 || static_cast<std::size_t>(index) >= chart->size()) throw Error("coordinate index out of range");
  Expr e(std::move(chart));
  Factor f;
  f.var = index;
  e.addTerm(Monomial{{f}}, Rational(1));
  return e;
}

Expr Expr::var(ChartPtr chart, const std::string& name) {
  int idx = chart->index(name);
  return var(std::move(chart), idx);
}

Expr Expr::fn(ChartPtr chart, const std::string& name, const std::vector<std::string>& args) {
  Factor f;
  f.fn = name;
  for (const auto& a : args) {
    int idx = chart->index(a);
    const auto& c = chart->coord(idx);
    if (c.parameter || c.parity != Parity::Even || !c.weight.isZero())
      throw Error("function symbol '" + name + "' may only depend on weight-zero even coordinates, not '" + a +
                  "'");
    if (std::find(f.args.begin(), f.args.end(), idx) != f.args.end())
      throw Error("repeated argument '" + a + "' in function symbol '" + name + "'");
    f.args.push_back(idx);
  }
  f.derivs.assign(f.args.size(), 0);
  Expr e(std::move(chart));
  e.addTerm(Monomial{{f}}, Rational(1));
  return e;
}

Expr Expr::fromTerm(ChartPtr chart, Monomial m, const Rational& c) {
  Expr e(std::move(chart));
  e.addTerm(m, c);
  return e;
}

void Expr::addTerm(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Expr::isConstant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.isOne());
}

Rational Expr::constantTerm() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

void Expr::requireSameChart(const Expr& o) const {
  if (!sameChart(chart_, o.chart_)) throw Error("expressions live on different charts");
}

Expr Expr::operator+(const Expr& o) const {
  Expr r = *this;
  r += o;
  return r;
}

Expr Expr::operator-(const Expr& o) const {
  Expr r = *this;
  r -= o;
  return r;
}

Expr Expr::operator-() const { return scaled(Rational(-1)); }

Expr& Expr::operator+=(const Expr& o) {
  if (!chart_) chart_ = o.chart_;
  if (o.isZero()) return *this;
  requireSameChart(o);
  for (const auto& [m, c] : o.terms_) addTerm(m, c);
  return *this;
}

Expr& Expr::operator-=(const Expr& o) {
  if (!chart_) chart_ = o.chart_;
  if (o.isZero()) return *this;
  requireSameChart(o);
  for (const auto& [m, c] : o.terms_) addTerm(m, -c);
  return *this;
}

Expr Expr::scaled(const Rational& c) const {
  Expr r(chart_);
  if (c == 0) return r;
  for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
  return r;
}

Expr Expr::operator*(const Expr& o) const {
  if (isZero() || o.isZero()) return Expr(chart_ ? chart_ : o.chart_);
  requireSameChart(o);
  Expr r(chart_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      auto [sign, m] = multiply(*chart_, ma, mb);
      if (sign == 0) continue;
      r.addTerm(m, sign > 0 ? Rational(ca * cb) : Rational(-ca * cb));
    }
  }
  return r;
}

Expr Expr::pow(int n) const {
  if (n < 0) throw Error("negative exponent");
  Expr r = constant(chart_, Rational(1));
  for (int i = 0; i < n; ++i) r = r * *this;
  return r;
}

bool Expr::operator==(const Expr& o) const {
  if (isZero() && o.isZero()) return true;
  if (!sameChart(chart_, o.chart_)) return false;
  return terms_ == o.terms_;
}

std::optional<Parity> Expr::parity() const {
  std::optional<Parity> p;
  for (const auto& [m, c] : terms_) {
    Parity q = monomialParity(*chart_, m);
    if (p && *p != q) return std::nullopt;
    p = q;
  }
  return p;
}

Expr Expr::parityPart(Parity p) const {
  Expr r(chart_);
  for (const auto& [m, c] : terms_)
    if (monomialParity(*chart_, m) == p) r.terms_.emplace(m, c);
  return r;
}

bool Expr::dependsOn(int var) const {
  for (const auto& [m, c] : terms_)
    for (const auto& f : m.factors)
      if (f.var == var || (!f.isVar() && std::find(f.args.begin(), f.args.end(), var) != f.args.end()))
        return true;
  return false;
}

int Expr::degreeIn(int var) const {
  int d = 0;
  for (const auto& [m, c] : terms_)
    for (const auto& f : m.factors)
      if (f.var == var) d = std::max(d, f.exp);
  return d;
}

Expr Expr::coefficientOf(int var, int n) const {
  if (chart_->coord(var).parity == Parity::Odd) throw Error("coefficientOf expects an even coordinate");
  Expr r(chart_);
  for (const auto& [m, c] : terms_) {
    Monomial rest;
    int e = 0;
    for (const auto& f : m.factors) {
      if (f.var == var)
        e = f.exp;
      else
        rest.factors.push_back(f);
    }
    if (e == n) r.addTerm(rest, c);
  }
  return r;
}

std::string Expr::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rational mag = abs(c);
    bool neg = c < 0;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    if (m.isOne()) {
      out += toString(mag);
    } else {
      if (mag != 1) out += toString(mag) + "*";
      out += monomialStr(*chart_, m);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace raw {
namespace {
RawPtr node(RawExpr::Kind k, std::vector<RawPtr> ch) {
  auto r = std::make_shared<RawExpr>();
  r->kind = k;
  r->children = std::move(ch);
  return r;
}
}  // namespace

RawPtr num(const Rational& q) {
  auto r = std::make_shared<RawExpr>();
  r->kind = RawExpr::Kind::Number;
  r->number = q;
  return r;
}
RawPtr sym(const std::string& name) {
  auto r = std::make_shared<RawExpr>();
  r->kind = RawExpr::Kind::Symbol;
  r->name = name;
  return r;
}
RawPtr call(const std::string& name, std::vector<RawPtr> args, std::vector<std::string> derivs) {
  auto r = std::make_shared<RawExpr>();
  r->kind = RawExpr::Kind::Call;
  r->name = name;
  r->children = std::move(args);
  r->derivs = std::move(derivs);
  return r;
}
RawPtr add(RawPtr a, RawPtr b) { return node(RawExpr::Kind::Add, {std::move(a), std::move(b)}); }
RawPtr sub(RawPtr a, RawPtr b) { return node(RawExpr::Kind::Sub, {std::move(a), std::move(b)}); }
RawPtr mul(RawPtr a, RawPtr b) { return node(RawExpr::Kind::Mul, {std::move(a), std::move(b)}); }
RawPtr div(RawPtr a, RawPtr b) { return node(RawExpr::Kind::Div, {std::move(a), std::move(b)}); }
RawPtr neg(RawPtr a) { return node(RawExpr::Kind::Neg, {std::move(a)}); }
RawPtr pow(RawPtr a, int n) {
  auto r = node(RawExpr::Kind::Pow, {std::move(a)});
  std::const_pointer_cast<RawExpr>(r)->exponent = n;
  return r;
}
}  // namespace raw

Expr normalize(const RawExpr& e, const ChartPtr& chart) {
  using K = RawExpr::Kind;
  switch (e.kind) {
    case K::Number:
      return Expr::constant(chart, e.number);
    case K::Symbol: {
      auto idx = chart->find(e.name);
      if (!idx) throw Error("unbound name '" + e.name + "'");
      return Expr::var(chart, *idx);
    }
    case K::Call: {
      std::vector<std::string> args;
      for (const auto& a : e.children) {
        if (a->kind != K::Symbol) throw Error("arguments of '" + e.name + "' must be coordinates");
        if (!chart->find(a->name)) throw Error("unbound name '" + a->name + "'");
        args.push_back(a->name);
      }
      Expr f = Expr::fn(chart, e.name, args);
      for (const auto& d : e.derivs) {
        if (std::find(args.begin(), args.end(), d) == args.end())
          throw Error("derivative variable '" + d + "' is not an argument of '" + e.name + "'");
        f = derivative(f, d);
      }
      return f;
    }
    case K::Add:
      return normalize(*e.children[0], chart) + normalize(*e.children[1], chart);
    case K::Sub:
      return normalize(*e.children[0], chart) - normalize(*e.children[1], chart);
    case K::Mul:
      return normalize(*e.children[0], chart) * normalize(*e.children[1], chart);
    case K::Div: {
      Expr d = normalize(*e.children[1], chart);
      if (!d.isConstant() || d.isZero()) throw Error("division is only allowed by non-zero constants");
      Rational inv = 1 / d.constantTerm();
      return normalize(*e.children[0], chart).scaled(inv);
    }
    case K::Neg:
      return -normalize(*e.children[0], chart);
    case K::Pow:
      return normalize(*e.children[0], chart).pow(e.exponent);
  }
  throw Error("malformed expression tree");
}

// ---------------------------------------------------------------------------

Expr derivative(const Expr& e, int var) {
  const ChartPtr& chart = e.chart();
  Expr r(chart);
  if (e.isZero()) return r;
  const bool odd = chart->coord(var).parity == Parity::Odd;
  for (const auto& [m, c] : e.terms()) {
    int oddBefore = 0;
    for (std::size_t k = 0; k < m.factors.size(); ++k) {
      const Factor& f = m.factors[k];
      if (f.isVar() && f.var == var) {
        Monomial rest = m;
        if (odd) {
          rest.factors.erase(rest.factors.begin() + static_cast<long>(k));
          r.addTerm(rest, (oddBefore & 1) ? Rational(-c) : c);
        } else {
          Rational coef = c * f.exp;
          if (--rest.factors[k].exp == 0) rest.factors.erase(rest.factors.begin() + static_cast<long>(k));
          r.addTerm(rest, coef);
        }
      } else if (!f.isVar() && !odd) {
        for (std::size_t a = 0; a < f.args.size(); ++a) {
          if (f.args[a] != var) continue;
          Monomial rest = m;
          Rational coef = c * f.exp;
          if (--rest.factors[k].exp == 0) rest.factors.erase(rest.factors.begin() + static_cast<long>(k));
          Factor d = f;
          d.exp = 1;
          d.derivs[a] += 1;
          auto [sign, prod] = multiply(*chart, Monomial{{d}}, rest);
          if (sign != 0) r.addTerm(prod, sign > 0 ? coef : Rational(-coef));
        }
      }
      if (isOddFactor(*chart, f)) ++oddBefore;
    }
  }
  return r;
}

Expr derivative(const Expr& e, const std::string& name) { return derivative(e, e.chart()->index(name)); }

// ---------------------------------------------------------------------------

Substitution::Substitution(ChartPtr from, ChartPtr to)
    : from_(std::move(from)), to_(std::move(to)), images_(from_->size()) {}

void Substitution::set(int var, const Expr& image) {
  Expr img = image.isZero() ? Expr(to_) : image;
  if (!img.isZero() && !sameChart(img.chart(), to_)) throw Error("substitution image lives on the wrong chart");
  auto p = img.parity();
  if (!img.isZero() && (!p || *p != from_->coord(var).parity))
    throw Error("parity mismatch substituting for '" + from_->coord(var).name + "'");
  images_.at(var) = img;
}

void Substitution::set(const std::string& name, const Expr& image) { set(from_->index(name), image); }

Expr Substitution::image(int var) const {
  if (images_.at(var)) return *images_[var];
  const auto& name = from_->coord(var).name;
  auto idx = to_->find(name);
  if (!idx) throw Error("no image for coordinate '" + name + "'");
  if (to_->coord(*idx).parity != from_->coord(var).parity)
    throw Error("parity mismatch renaming coordinate '" + name + "'");
  return Expr::var(to_, *idx);
}

namespace {

int pureVariable(const Expr& e) {
  if (e.size() != 1) return -1;
  const auto& [m, c] = *e.terms().begin();
  if (c != 1 || m.factors.size() != 1 || !m.factors[0].isVar() || m.factors[0].exp != 1) return -1;
  return m.factors[0].var;
}

}  // namespace

Expr substitute(const Expr& e, const Substitution& s) {
  const ChartPtr& to = s.to();
  Expr r(to);
  if (e.isZero()) return r;
  if (!sameChart(e.chart(), s.from())) throw Error("substitution applied to an expression on another chart");
  std::vector<std::optional<Expr>> cache(s.from()->size());
  auto img = [&](int v) -> const Expr& {
    if (!cache[v]) cache[v] = s.image(v);
    return *cache[v];
  };
  for (const auto& [m, c] : e.terms()) {
    Expr term = Expr::constant(to, c);
    for (const auto& f : m.factors) {
      if (f.isVar()) {
        term = term * img(f.var).pow(f.exp);
      } else {
        Factor g = f;
        for (auto& a : g.args) {
          int v = pureVariable(img(a));
          if (v < 0)
            throw Error("cannot substitute a non-coordinate into the argument '" + s.from()->coord(a).name +
                        "' of function symbol '" + f.fn + "'");
          const auto& tc = to->coord(v);
          if (tc.parameter || tc.parity != Parity::Even || !tc.weight.isZero())
            throw Error("function symbol '" + f.fn + "' would depend on a non weight-zero coordinate");
          a = v;
        }
        term = term * Expr::fromTerm(to, Monomial{{g}}, Rational(1));
      }
      if (term.isZero()) break;
    }
    r += term;
  }
  return r;
}

Substitution compose(const Substitution& first, const Substitution& second) {
  if (!sameChart(first.to(), second.from())) throw Error("substitutions do not compose");
  Substitution r(first.from(), second.to());
  for (std::size_t v = 0; v < first.from()->size(); ++v)
    r.set(static_cast<int>(v), substitute(first.image(static_cast<int>(v)), second));
  return r;
}

Substitution identitySubstitution(const ChartPtr& chart) { return Substitution(chart, chart); }

Expr rechart(const Expr& e, const ChartPtr& to) {
  if (sameChart(e.chart(), to)) return e;
  if (e.isZero()) return Expr(to);
  return substitute(e, Substitution(e.chart(), to));
}

std::map<Weight, Expr> weightDecompose(const Expr& e) {
  std::map<Weight, Expr> out;
  for (const auto& [m, c] : e.terms()) {
    if (monomialHasParameter(*e.chart(), m))
      throw Error("weightDecompose: term '" + monomialStr(*e.chart(), m) + "' contains a formal parameter");
    Weight w = monomialWeight(*e.chart(), m);
    auto it = out.find(w);
    if (it == out.end()) it = out.emplace(w, Expr(e.chart())).first;
    it->second.addTerm(m, c);
  }
  return out;
}

std::optional<Weight> isHomogeneous(const Expr& e) {
  auto parts = weightDecompose(e);
  if (parts.size() != 1) return std::nullopt;
  return parts.begin()->first;
}

Expr componentPart(const Expr& e, std::size_t component, int value) {
  Expr r(e.chart());
  for (const auto& [m, c] : e.terms())
    if (monomialWeight(*e.chart(), m)[component] == value) r.addTerm(m, c);
  return r;
}

}  // namespace gk
