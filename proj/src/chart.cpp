#include "gradedkit/chart.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace gk {

std::string toString(Parity p) { return p == Parity::Even ? "even" : "odd"; }

namespace {

std::string joinInts(const std::vector<int>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out + ")";
}

}  // namespace

int Shift::total() const { return std::accumulate(c_.begin(), c_.end(), 0); }

Shift Shift::operator+(const Shift& o) const {
  if (o.arity() != arity()) throw Error("weight arity mismatch: " + str() + " + " + o.str());
  std::vector<int> r(c_);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += o.c_[i];
  return Shift(std::move(r));
}

Shift Shift::operator-(const Shift& o) const { return *this + (-o); }

Shift Shift::operator-() const {
  std::vector<int> r(c_);
  for (auto& x : r) x = -x;
  return Shift(std::move(r));
}

Shift Shift::scaled(int factor) const {
  std::vector<int> r(c_);
  for (auto& x : r) x *= factor;
  return Shift(std::move(r));
}

std::string Shift::str() const { return joinInts(c_); }

Weight::Weight(std::vector<int> components) : c_(std::move(components)) {
  for (int x : c_)
    if (x < 0) throw Error("weights must be non-negative, got " + joinInts(c_));
}

int Weight::total() const { return std::accumulate(c_.begin(), c_.end(), 0); }

bool Weight::isZero() const {
  return std::all_of(c_.begin(), c_.end(), [](int x) { return x == 0; });
}

Weight Weight::operator+(const Weight& o) const {
  if (o.arity() != arity()) throw Error("weight arity mismatch: " + str() + " + " + o.str());
  std::vector<int> r(c_);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += o.c_[i];
  return Weight(std::move(r));
}

Weight Weight::scaled(int factor) const {
  std::vector<int> r(c_);
  for (auto& x : r) x *= factor;
  return Weight(std::move(r));
}

Weight Weight::join(const Weight& o) const {
  if (o.arity() != arity()) throw Error("weight arity mismatch");
  std::vector<int> r(c_);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::max(r[i], o.c_[i]);
  return Weight(std::move(r));
}

bool Weight::dominatedBy(const Weight& o) const {
  if (o.arity() != arity()) return false;
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (c_[i] > o.c_[i]) return false;
  return true;
}

std::string Weight::str() const { return joinInts(c_); }

int totalWeight(const Weight& w) { return w.total(); }

ChartPtr Chart::make(std::size_t arity, std::vector<Coordinate> coords) {
  return make(arity, std::move(coords), Options{});
}

ChartPtr Chart::make(std::size_t arity, std::vector<Coordinate> coords, const Options& opts) {
  std::set<std::string> names;
  for (const auto& c : coords) {
    if (c.name.empty()) throw Error("empty coordinate name");
    if (!names.insert(c.name).second) throw Error("duplicate coordinate name '" + c.name + "'");
    if (c.weight.arity() != arity)
      throw Error("coordinate '" + c.name + "' has weight " + c.weight.str() + " but chart arity is " +
                  std::to_string(arity));
    if (c.parameter && (!c.weight.isZero() || c.parity != Parity::Even))
      throw Error("parameter '" + c.name + "' must be even of weight zero");
  }

  auto chart = std::shared_ptr<Chart>(new Chart());
  chart->arity_ = arity;

  std::vector<int> perm(coords.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    const auto& ca = coords[a];
    const auto& cb = coords[b];
    if (ca.weight.total() != cb.weight.total()) return ca.weight.total() < cb.weight.total();
    if (ca.parity != cb.parity) return ca.parity < cb.parity;
    return ca.name < cb.name;
  });
  std::vector<int> rankOf(coords.size());
  for (std::size_t r = 0; r < perm.size(); ++r) {
    chart->coords_.push_back(coords[perm[r]]);
    rankOf[perm[r]] = static_cast<int>(r);
  }
  chart->declOrder_ = rankOf;

  Weight bound = Weight::zero(arity);
  for (const auto& c : coords)
    if (!c.parameter) bound = bound.join(c.weight);
  if (opts.degreeBound) {
    if (opts.degreeBound->arity() != arity) throw Error("degree bound arity mismatch");
    if (!bound.dominatedBy(*opts.degreeBound))
      throw Error("coordinate weights exceed declared degree bound " + opts.degreeBound->str());
    bound = *opts.degreeBound;
  }
  chart->bound_ = bound;

  if (opts.parityComponent) {
    if (*opts.parityComponent >= arity) throw Error("parity component out of range");
    for (const auto& c : coords) {
      if (c.parameter) continue;
      if ((c.weight[*opts.parityComponent] & 1) != bit(c.parity))
        throw Error("parity of '" + c.name + "' does not match weight component " +
                    std::to_string(*opts.parityComponent));
    }
    chart->parityComponent_ = opts.parityComponent;
  }

  chart->conjOfMomentum_.assign(coords.size(), -1);
  chart->momentumOfCoord_.assign(coords.size(), -1);
  chart->bracketParity_ = opts.bracketParity;
  for (const auto& [cname, pname] : opts.conjugates) {
    auto ci = chart->find(cname);
    auto pi = chart->find(pname);
    if (!ci || !pi) throw Error("conjugate pair refers to unknown coordinate: " + cname + "/" + pname);
    if (chart->momentumOfCoord_[*ci] >= 0 || chart->conjOfMomentum_[*pi] >= 0 ||
        chart->conjOfMomentum_[*ci] >= 0 || chart->momentumOfCoord_[*pi] >= 0)
      throw Error("coordinate used in two conjugate pairs: " + cname + "/" + pname);
    if (chart->coords_[*pi].parity != chart->coords_[*ci].parity + opts.bracketParity)
      throw Error("momentum '" + pname + "' has the wrong parity for its conjugate '" + cname + "'");
    chart->conjugates_.push_back({*ci, *pi});
    chart->momentumOfCoord_[*ci] = *pi;
    chart->conjOfMomentum_[*pi] = *ci;
  }
  std::sort(chart->conjugates_.begin(), chart->conjugates_.end(),
            [](const ConjugatePair& a, const ConjugatePair& b) { return a.coord < b.coord; });
  return chart;
}

std::optional<int> Chart::find(const std::string& name) const {
  for (std::size_t i = 0; i < coords_.size(); ++i)
    if (coords_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

int Chart::index(const std::string& name) const {
  auto i = find(name);
  if (!i) throw Error("unknown coordinate '" + name + "'");
  return *i;
}

std::optional<int> Chart::momentumOf(int coord) const {
  int m = momentumOfCoord_.at(coord);
  return m < 0 ? std::nullopt : std::optional<int>(m);
}

std::optional<int> Chart::conjugateOf(int momentum) const {
  int c = conjOfMomentum_.at(momentum);
  return c < 0 ? std::nullopt : std::optional<int>(c);
}

std::vector<Coordinate> Chart::declaredCoords() const {
  std::vector<Coordinate> out;
  out.reserve(coords_.size());
  for (int idx : declOrder_) out.push_back(coords_[idx]);
  return out;
}

Chart::Options Chart::options() const {
  Options o;
  o.degreeBound = bound_;
  o.parityComponent = parityComponent_;
  o.bracketParity = bracketParity_;
  for (const auto& p : conjugates_) o.conjugates.emplace_back(coords_[p.coord].name, coords_[p.momentum].name);
  return o;
}

ChartPtr Chart::withParameters(const std::vector<std::string>& names) const {
  auto coords = declaredCoords();
  for (const auto& n : names) coords.push_back({n, Weight::zero(arity_), Parity::Even, true});
  return make(arity_, std::move(coords), options());
}

bool Chart::hasParameters() const {
  return std::any_of(coords_.begin(), coords_.end(), [](const Coordinate& c) { return c.parameter; });
}

ChartPtr Chart::withoutParameters() const {
  std::vector<Coordinate> coords;
  for (const auto& c : declaredCoords())
    if (!c.parameter) coords.push_back(c);
  return make(arity_, std::move(coords), options());
}

bool Chart::sameAs(const Chart& o) const {
  if (this == &o) return true;
  if (arity_ != o.arity_ || coords_.size() != o.coords_.size() || bound_ != o.bound_) return false;
  if (bracketParity_ != o.bracketParity_ || declOrder_ != o.declOrder_) return false;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    const auto& a = coords_[i];
    const auto& b = o.coords_[i];
    if (a.name != b.name || a.weight != b.weight || a.parity != b.parity || a.parameter != b.parameter)
      return false;
  }
  if (conjugates_.size() != o.conjugates_.size()) return false;
  for (std::size_t i = 0; i < conjugates_.size(); ++i)
    if (conjugates_[i].coord != o.conjugates_[i].coord || conjugates_[i].momentum != o.conjugates_[i].momentum)
      return false;
  return true;
}

std::string Chart::describe() const {
  std::ostringstream os;
  os << "arity " << arity_ << ", bound " << bound_.str() << "\n";
  for (int idx : declOrder_) {
    const auto& c = coords_[idx];
    os << "  " << c.name << " " << c.weight.str() << " " << toString(c.parity);
    if (c.parameter) os << " (parameter)";
    os << "\n";
  }
  return os.str();
}

ChartPtr mkChart(std::size_t arity, std::vector<Coordinate> coords) {
  return Chart::make(arity, std::move(coords));
}

bool sameChart(const ChartPtr& a, const ChartPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->sameAs(*b);
}

}  // namespace gk
