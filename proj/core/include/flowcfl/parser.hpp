#ifndef FLOWCFL_PARSER_HPP
#define FLOWCFL_PARSER_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "flowcfl/ast.hpp"

namespace flowcfl {

struct ParseError : std::runtime_error {
  SrcLoc loc;
  ParseError(SrcLoc l, const std::string& msg)
      : std::runtime_error(msg), loc(l) {}
};

// Parses a .fcfl source text into a Program. Call sites are numbered in
// source order unless pinned with /*#n*/ labels. Throws ParseError on
// syntax errors; name resolution problems surface via checkWellFormed.
Program parseProgram(const std::string& text);

// Well-formedness diagnostics. Errors block analysis, warnings do not.
std::vector<Diagnostic> checkWellFormed(const Program& p);

// Resolves every call site to its callee by the receiver's static type,
// walking the superclass chain. Appends diagnostics for unresolved or
// ambiguous calls and records the result in p.callSites.
std::vector<Diagnostic> resolveCalls(Program& p);

// Convenience: parse + check + resolve. Diagnostics out-param collects
// everything; the Program is usable iff !hasErrors(diags).
Program loadProgram(const std::string& text, std::vector<Diagnostic>& diags);

// Prints a Program back to surface syntax. parse(print(p)) is structurally
// identical to p (round-trip property).
std::string printProgram(const Program& p);

// Structural AST equality, ignoring source locations.
bool structurallyEqual(const Program& a, const Program& b);

}  // namespace flowcfl

#endif
