#pragma once

#include <string>
#include <vector>

#include "gradedkit/expr.hpp"

namespace gk {

enum class Verdict { Pass, Fail, NotChecked };
std::string toString(Verdict v);

struct Residual {
  enum class Status { Zero, Nonzero, NotChecked };
  std::string name;
  Status status = Status::Zero;
  std::vector<std::string> terms;  // "key: expr" lines; empty when zero
};

struct Audit {
  std::string name;
  std::string expected;
  std::string actual;
  bool ok = true;
};

class VecField;

/// Outcome of one verification: named residuals and weight audits.
struct CheckReport {
  std::string id;
  std::string kind;
  std::vector<Residual> residuals;
  std::vector<Audit> audits;
  std::vector<std::string> notes;

  void residual(const std::string& name, const Expr& e);
  void residual(const std::string& name, const VecField& x);
  /// A residual made of several labelled expressions.
  void residual(const std::string& name, const std::vector<std::pair<std::string, Expr>>& parts);
  void notChecked(const std::string& name, const std::string& why);
  void audit(const std::string& name, const std::string& expected, const std::string& actual);
  void audit(const std::string& name, const std::string& expected, const std::string& actual, bool ok);
  /// Appends every residual and audit of another report, prefixing names.
  void absorb(const CheckReport& other, const std::string& prefix);

  Verdict verdict() const;
  bool passed() const { return verdict() == Verdict::Pass; }
  /// Human-readable rendering, deterministic.
  std::string text() const;
};

}  // namespace gk
