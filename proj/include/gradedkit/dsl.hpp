#pragma once

#include <map>
#include <string>
#include <vector>

#include "gradedkit/groupoids.hpp"

namespace gk {

/// Located diagnostic; line and column are 1-based (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

/// Expression syntax: + - * / ^n, parentheses, rational literals and
/// function symbols f(x) or f[x,x](x) for derivatives.
RawPtr parseExpression(const std::string& text);

struct CheckDirective {
  std::string kind;
  std::vector<std::string> args;
  int line = 0;
  std::string id() const;
};

/// A parsed declaration file. Every name lives in one namespace.
struct Document {
  struct Declaration {
    std::string kind;
    std::string name;
    std::string text;  // canonical rendering
  };
  std::vector<Declaration> declarations;
  std::map<std::string, ChartPtr> charts;
  std::map<std::string, Expr> exprs;  // expr and ham
  std::map<std::string, VecField> fields;
  std::map<std::string, HomAction> actions;
  std::map<std::string, Substitution> maps;
  std::map<std::string, AlgebroidData> algebroids;
  std::map<std::string, GroupoidSpec> groupoids;
  std::map<std::string, WeightedGroupoid> weighted;
  std::map<std::string, BiAlgebroidData> bialgebroids;
  std::map<std::string, CourantData> courants;
  std::vector<CheckDirective> checks;

  bool has(const std::string& name) const;
  /// Kind of a declared name, or "" when unknown.
  std::string kindOf(const std::string& name) const;
};

Document parseDocument(const std::string& text);
/// Canonical text: one block per declaration, then the check directives.
std::string printDocument(const Document& d);

// Canonical blocks, shared with commands that emit declarations.
std::string chartBlock(const std::string& name, const Chart& c);
std::string fieldBlock(const std::string& name, const std::string& chart, const VecField& x);
std::string actionBlock(const std::string& name, const std::string& chart, const HomAction& h);
std::string algebroidLine(const std::string& name, const std::string& chart, int degree, const std::string& field);

}  // namespace gk
