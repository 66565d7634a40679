#pragma once

#include <string>
#include <vector>

#include "gradedkit/dsl.hpp"

namespace gk {

/// Outcome of one CLI command: emitted declarations plus check reports.
struct CommandResult {
  std::string output;  // DSL text, canonical
  std::vector<CheckReport> checks;
  std::vector<double> seconds;  // per check, same order

  bool failed() const;
  /// {version, checks, output?, timing?}; keys sorted, timing only on request.
  std::string json(bool timing) const;
  std::string text() const;
};

/// Evaluates one check directive; library errors become failing audits.
CheckReport runCheck(const Document& d, const CheckDirective& c);

/// Every check directive, concurrently, reported in declaration order. A
/// non-empty filter keeps the directives naming it.
CommandResult runChecks(const Document& d, const std::string& filter = "");

/// Lie functor of a groupoid (or weighted groupoid), emitted as chart, field
/// and algebroid blocks named name_chart, name_Q and name (default A_<G>).
CommandResult deriveCommand(const Document& d, const std::string& groupoid, const std::string& name = "");

/// how: tangent, cotangent, shifted-cotangent or higher (with k).
CommandResult liftCommand(const Document& d, const std::string& target, const std::string& how, int k,
                          const std::string& name = "");

/// Derived bracket [[Q,s1],s2]: with an algebroid, s1 and s2 are fields along
/// its fiber coordinates read as sections; with a field, plain derived bracket.
CommandResult bracketCommand(const Document& d, const std::string& q, const std::string& s1, const std::string& s2,
                             const std::string& name = "");

CommandResult homogenizeCommand(const Document& d, const std::string& action, const std::string& name = "");

}  // namespace gk
