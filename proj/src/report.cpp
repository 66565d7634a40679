#include "gradedkit/report.hpp"

#include <sstream>

#include "gradedkit/fields.hpp"

namespace gk {

std::string toString(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::NotChecked:
      return "not-checked";
  }
  return "?";
}

void CheckReport::residual(const std::string& name, const Expr& e) {
  Residual r{name, e.isZero() ? Residual::Status::Zero : Residual::Status::Nonzero, {}};
  if (!e.isZero()) r.terms.push_back(e.str());
  residuals.push_back(std::move(r));
}

void CheckReport::residual(const std::string& name, const VecField& x) {
  std::vector<std::pair<std::string, Expr>> parts;
  if (x.chart())
    for (std::size_t i = 0; i < x.chart()->size(); ++i)
      parts.emplace_back("d/d" + x.chart()->coord(i).name, x.component(static_cast<int>(i)));
  residual(name, parts);
}

void CheckReport::residual(const std::string& name, const std::vector<std::pair<std::string, Expr>>& parts) {
  Residual r{name, Residual::Status::Zero, {}};
  for (const auto& [key, e] : parts) {
    if (e.isZero()) continue;
    r.status = Residual::Status::Nonzero;
    r.terms.push_back(key + ": " + e.str());
  }
  residuals.push_back(std::move(r));
}

void CheckReport::notChecked(const std::string& name, const std::string& why) {
  residuals.push_back({name, Residual::Status::NotChecked, {why}});
}

void CheckReport::audit(const std::string& name, const std::string& expected, const std::string& actual) {
  audits.push_back({name, expected, actual, expected == actual});
}

void CheckReport::audit(const std::string& name, const std::string& expected, const std::string& actual, bool ok) {
  audits.push_back({name, expected, actual, ok});
}

void CheckReport::absorb(const CheckReport& other, const std::string& prefix) {
  for (auto r : other.residuals) {
    r.name = prefix + r.name;
    residuals.push_back(std::move(r));
  }
  for (auto a : other.audits) {
    a.name = prefix + a.name;
    audits.push_back(std::move(a));
  }
  for (const auto& n : other.notes) notes.push_back(prefix + n);
}

Verdict CheckReport::verdict() const {
  bool any = false;
  for (const auto& r : residuals) {
    if (r.status == Residual::Status::Nonzero) return Verdict::Fail;
    if (r.status == Residual::Status::Zero) any = true;
  }
  for (const auto& a : audits) {
    if (!a.ok) return Verdict::Fail;
    any = true;
  }
  return any ? Verdict::Pass : Verdict::NotChecked;
}

std::string CheckReport::text() const {
  std::ostringstream os;
  os << id << " [" << kind << "]: " << toString(verdict()) << "\n";
  for (const auto& r : residuals) {
    os << "  residual " << r.name << ": ";
    switch (r.status) {
      case Residual::Status::Zero:
        os << "0\n";
        break;
      case Residual::Status::NotChecked:
        os << "not checked (" << (r.terms.empty() ? "" : r.terms.front()) << ")\n";
        break;
      case Residual::Status::Nonzero:
        os << "nonzero\n";
        for (const auto& t : r.terms) os << "    " << t << "\n";
        break;
    }
  }
  for (const auto& a : audits)
    os << "  audit " << a.name << ": expected " << a.expected << ", got " << a.actual << (a.ok ? "" : "  MISMATCH")
       << "\n";
  for (const auto& n : notes) os << "  note: " << n << "\n";
  return os.str();
}

}  // namespace gk
