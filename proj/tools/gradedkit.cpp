#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gradedkit/commands.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gk::Error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradedkit: symbolic checks for graded bundles, weighted algebroids and groupoids"};
  app.require_subcommand(1);

  std::string file, name, jsonPath, target, how, q, s1, s2;
  int order = 1;
  bool timing = false, quiet = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("file", file, "declaration file")->required();
    sub->add_option("--name", name, "check filter (check) or name of the emitted declaration");
    sub->add_option("--json", jsonPath, "write the JSON report to this path");
    sub->add_flag("--timing", timing, "include per-check timing in the JSON report");
    sub->add_flag("-q,--quiet", quiet, "suppress the text report");
  };
  auto* check = app.add_subcommand("check", "run every check directive");
  common(check);
  auto* derive = app.add_subcommand("derive", "Lie functor of a groupoid, emitted as declarations");
  common(derive);
  derive->add_option("groupoid", target, "groupoid or weighted groupoid")->required();
  auto* lift = app.add_subcommand("lift", "lift a chart or an action");
  common(lift);
  lift->add_option("target", target, "chart or action")->required();
  lift->add_option("how", how, "tangent, higher, cotangent or shifted-cotangent")->required();
  lift->add_option("k", order, "order for higher lifts");
  auto* bracket = app.add_subcommand("bracket", "derived bracket [[Q,s1],s2]");
  common(bracket);
  bracket->add_option("Q", q, "algebroid or homological field")->required();
  bracket->add_option("s1", s1, "first field")->required();
  bracket->add_option("s2", s2, "second field")->required();
  auto* homog = app.add_subcommand("homogenize", "homogeneous coordinates for an action");
  common(homog);
  homog->add_option("action", target, "action")->required();
  auto* print = app.add_subcommand("print", "canonical form of a declaration file");
  print->add_option("file", file, "declaration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  gk::Document doc;
  try {
    doc = gk::parseDocument(slurp(file));
  } catch (const gk::ParseError& e) {
    std::cerr << file << ":" << e.what() << "\n";
    return 2;
  } catch (const gk::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  if (print->parsed()) {
    std::cout << gk::printDocument(doc);
    return 0;
  }

  gk::CommandResult result;
  try {
    if (check->parsed())
      result = gk::runChecks(doc, name);
    else if (derive->parsed())
      result = gk::deriveCommand(doc, target, name);
    else if (lift->parsed())
      result = gk::liftCommand(doc, target, how, order, name);
    else if (bracket->parsed())
      result = gk::bracketCommand(doc, q, s1, s2, name);
    else
      result = gk::homogenizeCommand(doc, target, name);
  } catch (const gk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  // emitted declarations go to stdout; for emitting commands the report goes to stderr
  if (check->parsed()) {
    if (!quiet) std::cout << result.text();
  } else {
    std::cout << result.output;
    if (!quiet) {
      gk::CommandResult reportOnly = result;
      reportOnly.output.clear();
      std::cerr << reportOnly.text();
    }
  }
  if (!jsonPath.empty()) {
    std::ofstream out(jsonPath, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write '" << jsonPath << "'\n";
      return 2;
    }
    out << result.json(timing);
  }
  return result.failed() ? 1 : 0;
}
