#include "gradedkit/fields.hpp"

namespace gk {

VecField::VecField(ChartPtr chart) : chart_(std::move(chart)) {
  comps_.assign(chart_->size(), Expr(chart_));
}

VecField VecField::coordinate(const ChartPtr& chart, const std::string& name) {
  VecField x(chart);
  x.set(name, Expr::constant(chart, Rational(1)));
  return x;
}

void VecField::set(int var, const Expr& e) {
  if (!e.isZero() && !sameChart(e.chart(), chart_)) throw Error("field component lives on another chart");
  comps_.at(var) = e.isZero() ? Expr(chart_) : e;
}

bool VecField::isZero() const {
  for (const auto& c : comps_)
    if (!c.isZero()) return false;
  return true;
}

std::optional<Parity> VecField::parity() const {
  std::optional<Parity> p;
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (comps_[i].isZero()) continue;
    auto q = comps_[i].parity();
    if (!q) return std::nullopt;
    Parity f = *q + chart_->coord(i).parity;
    if (p && *p != f) return std::nullopt;
    p = f;
  }
  return p;
}

VecField VecField::parityPart(Parity p) const {
  VecField r(chart_);
  for (std::size_t i = 0; i < comps_.size(); ++i)
    r.comps_[i] = comps_[i].parityPart(p + chart_->coord(i).parity);
  return r;
}

std::map<Shift, VecField> VecField::shiftDecompose() const {
  std::map<Shift, VecField> out;
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    for (const auto& [m, c] : comps_[i].terms()) {
      Shift s = monomialWeight(*chart_, m).shift() - chart_->coord(i).weight.shift();
      auto it = out.find(s);
      if (it == out.end()) it = out.emplace(s, VecField(chart_)).first;
      it->second.comps_[i].addTerm(m, c);
    }
  }
  return out;
}

std::optional<Shift> VecField::shift() const {
  auto parts = shiftDecompose();
  if (parts.size() != 1) return std::nullopt;
  return parts.begin()->first;
}

Expr VecField::operator()(const Expr& f) const {
  Expr r(chart_);
  if (f.isZero()) return r;
  if (!sameChart(f.chart(), chart_)) throw Error("field applied to a function on another chart");
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (comps_[i].isZero()) continue;
    Expr d = derivative(f, static_cast<int>(i));
    if (!d.isZero()) r += comps_[i] * d;
  }
  return r;
}

VecField VecField::operator+(const VecField& o) const {
  if (!sameChart(chart_, o.chart_)) throw Error("fields live on different charts");
  VecField r(chart_);
  for (std::size_t i = 0; i < comps_.size(); ++i) r.comps_[i] = comps_[i] + o.comps_[i];
  return r;
}

VecField VecField::operator-(const VecField& o) const { return *this + (-o); }

VecField VecField::scaled(const Rational& c) const {
  VecField r(chart_);
  for (std::size_t i = 0; i < comps_.size(); ++i) r.comps_[i] = comps_[i].scaled(c);
  return r;
}

VecField VecField::leftMultiplied(const Expr& f) const {
  VecField r(chart_);
  for (std::size_t i = 0; i < comps_.size(); ++i) r.comps_[i] = f * comps_[i];
  return r;
}

bool VecField::operator==(const VecField& o) const {
  if (isZero() && o.isZero()) return true;
  if (!sameChart(chart_, o.chart_)) return false;
  for (std::size_t i = 0; i < comps_.size(); ++i)
    if (comps_[i] != o.comps_[i]) return false;
  return true;
}

std::string VecField::str() const {
  std::string out;
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    const Expr& c = comps_[i];
    if (c.isZero()) continue;
    if (!out.empty()) out += " + ";
    std::string d = "d/d" + chart_->coord(i).name;
    if (c == Expr::constant(chart_, Rational(1)))
      out += d;
    else if (c.size() == 1)
      out += c.str() + "*" + d;
    else
      out += "(" + c.str() + ")*" + d;
  }
  return out.empty() ? "0" : out;
}

Expr apply(const VecField& x, const Expr& f) { return x(f); }

namespace {

VecField bracketHomogeneous(const VecField& x, Parity px, const VecField& y, Parity py) {
  const ChartPtr& chart = x.chart();
  VecField r(chart);
  int sign = koszul(px, py);
  for (std::size_t i = 0; i < chart->size(); ++i) {
    Expr c = x(y.component(static_cast<int>(i))) - y(x.component(static_cast<int>(i))).scaled(sign);
    r.set(static_cast<int>(i), c);
  }
  return r;
}

}  // namespace

VecField lieBracket(const VecField& x, const VecField& y) {
  if (!sameChart(x.chart(), y.chart())) throw Error("lieBracket: fields live on different charts");
  VecField r(x.chart());
  for (Parity px : {Parity::Even, Parity::Odd}) {
    VecField xp = x.parityPart(px);
    if (xp.isZero()) continue;
    for (Parity py : {Parity::Even, Parity::Odd}) {
      VecField yp = y.parityPart(py);
      if (yp.isZero()) continue;
      r = r + bracketHomogeneous(xp, px, yp, py);
    }
  }
  return r;
}

CheckReport isHomological(const VecField& q) {
  if (!q.isZero() && q.parity() != Parity::Odd) throw Error("isHomological: the field is not odd");
  CheckReport rep;
  rep.kind = "homological";
  rep.residual("[Q,Q]", q.isZero() ? q : lieBracket(q, q));
  return rep;
}

VecField derivedBracket(const VecField& q, const VecField& a, const VecField& b) {
  return lieBracket(lieBracket(q, a), b);
}

VecField rechart(const VecField& x, const ChartPtr& to) {
  VecField r(to);
  for (std::size_t i = 0; i < x.chart()->size(); ++i) {
    const Expr& c = x.component(static_cast<int>(i));
    if (c.isZero()) continue;
    r.set(x.chart()->coord(i).name, rechart(c, to));
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

Expr poissonHomogeneous(const Expr& f, Parity pf, const Expr& g) {
  const ChartPtr& chart = f.chart();
  const int eps = bit(chart->bracketParity());
  const int fb = bit(pf);
  Expr r(chart);
  for (const auto& pair : chart->conjugates()) {
    const int cb = bit(chart->coord(pair.coord).parity);
    Expr dpf = derivative(f, pair.momentum);
    if (!dpf.isZero()) {
      Expr dcg = derivative(g, pair.coord);
      if (!dcg.isZero()) {
        int s = (((cb + eps) * (fb + 1)) & 1) ? -1 : 1;
        r += (dpf * dcg).scaled(s);
      }
    }
    Expr dcf = derivative(f, pair.coord);
    if (!dcf.isZero()) {
      Expr dpg = derivative(g, pair.momentum);
      if (!dpg.isZero()) {
        int s = (((cb * (1 + eps)) + cb * (fb + 1)) & 1) ? -1 : 1;
        r -= (dcf * dpg).scaled(s);
      }
    }
  }
  return r;
}

}  // namespace

Expr poisson(const Expr& f, const Expr& g) {
  if (f.isZero()) return f;
  if (g.isZero()) return g;
  if (!sameChart(f.chart(), g.chart())) throw Error("poisson: functions live on different charts");
  if (!f.chart()->hasConjugates()) throw Error("poisson: chart has no conjugate pairs");
  Expr r(f.chart());
  for (Parity p : {Parity::Even, Parity::Odd}) {
    Expr fp = f.parityPart(p);
    if (!fp.isZero()) r += poissonHomogeneous(fp, p, g);
  }
  return r;
}

VecField hamiltonianField(const Expr& h) {
  VecField x(h.chart());
  if (h.isZero()) return x;
  for (std::size_t i = 0; i < h.chart()->size(); ++i)
    x.set(static_cast<int>(i), poisson(h, Expr::var(h.chart(), static_cast<int>(i))));
  return x;
}

Expr symbol(const VecField& x, const ChartPtr& cot) {
  Expr r(cot);
  for (std::size_t i = 0; i < x.chart()->size(); ++i) {
    const Expr& c = x.component(static_cast<int>(i));
    if (c.isZero()) continue;
    int ci = cot->index(x.chart()->coord(i).name);
    auto p = cot->momentumOf(ci);
    if (!p) throw Error("symbol: coordinate '" + x.chart()->coord(i).name + "' has no conjugate momentum");
    r += rechart(c, cot) * Expr::var(cot, *p);
  }
  return r;
}

Expr derivedBracketHam(const Expr& theta, const Expr& a, const Expr& b) { return poisson(poisson(a, theta), b); }

Weight pairingWeight(const Chart& cot) {
  std::optional<Weight> w;
  for (const auto& pair : cot.conjugates()) {
    Weight s = cot.coord(pair.coord).weight + cot.coord(pair.momentum).weight;
    if (w && *w != s) throw Error("symplectic pairing is not homogeneous");
    w = s;
  }
  if (!w) throw Error("chart has no conjugate pairs");
  return *w;
}

}  // namespace gk
