#ifndef FLOWCFL_TEST_HELPERS_HPP
#define FLOWCFL_TEST_HELPERS_HPP

#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "flowcfl/parser.hpp"

namespace flowcfl::test {

inline std::string fixtureText(const std::string& name) {
  std::ifstream in(std::string(FLOWCFL_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Program fixture(const std::string& name) {
  std::vector<Diagnostic> diags;
  Program p = loadProgram(fixtureText(name), diags);
  for (const auto& d : diags)
    if (d.severity == Severity::Error) FAIL(name << ": " << d.message);
  return p;
}

inline VarId var(const Program& p, const std::string& qualified) {
  VarId v = p.findVar(qualified);
  REQUIRE_MESSAGE(v != kNoId, qualified);
  return v;
}

inline FieldId field(const Program& p, const std::string& qualified) {
  FieldId f = p.findField(qualified);
  REQUIRE_MESSAGE(f != kNoId, qualified);
  return f;
}

}  // namespace flowcfl::test

#endif
