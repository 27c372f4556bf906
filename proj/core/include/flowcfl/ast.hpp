#ifndef FLOWCFL_AST_HPP
#define FLOWCFL_AST_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flowcfl {

struct SrcLoc {
  int line = 0;
  int col = 0;
  bool operator==(const SrcLoc&) const = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  SrcLoc loc;
  std::string message;
};

inline bool hasErrors(const std::vector<Diagnostic>& ds) {
  for (auto& d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

// Flow qualifiers, neg <: poly <: pos.
enum class Qual : uint8_t { Neg = 0, Poly = 1, Pos = 2 };
enum class Role : uint8_t { None, Source, Sink };

const char* qualName(Qual q);

// Dense ids into the Program tables. -1 means absent.
using ClassId = int32_t;
using MethodId = int32_t;
using VarId = int32_t;
using FieldId = int32_t;
using SiteId = int32_t;
inline constexpr int32_t kNoId = -1;

struct VarDecl {
  std::string name;
  std::string typeName;
  ClassId type = kNoId;
  MethodId method = kNoId;
  std::optional<Qual> pinned;
  Role role = Role::None;
  SrcLoc loc;
  enum class Kind : uint8_t { This, Param, Local, Ret } kind = Kind::Local;
};

struct FieldDecl {
  std::string name;
  std::string typeName;
  ClassId owner = kNoId;
  ClassId type = kNoId;
  std::optional<Qual> pinned;
  Role role = Role::None;
  SrcLoc loc;
};

struct Stmt {
  enum class Kind : uint8_t { Assign, Alloc, Read, Write, Call, Branch };
  Kind kind;
  SrcLoc loc;
  VarId lhs = kNoId;    // Assign/Alloc/Read, Call (optional)
  VarId rhs = kNoId;    // Assign y, Write value
  VarId recv = kNoId;   // Read/Write/Call receiver
  FieldId field = kNoId;
  std::string fieldName;
  ClassId klass = kNoId;  // Alloc
  std::string klassName;
  SiteId site = kNoId;  // Call
  std::string calleeName;
  std::vector<VarId> args;
  std::vector<Stmt> thenBody, elseBody;  // Branch
};

struct MethodDecl {
  std::string name;
  ClassId owner = kNoId;
  bool isStatic = false;  // only the entry main
  VarId thisVar = kNoId;
  std::vector<VarId> params;
  std::vector<VarId> locals;
  VarId retVar = kNoId;  // kNoId for void methods
  std::string retTypeName;
  std::vector<Stmt> body;
  SrcLoc loc;
};

struct ClassDecl {
  std::string name;
  std::string superName;
  ClassId super = kNoId;
  std::vector<FieldId> fields;
  std::vector<MethodId> methods;
  SrcLoc loc;
};

struct CallSite {
  SiteId id = kNoId;
  MethodId caller = kNoId;
  MethodId callee = kNoId;  // filled by resolveCalls
  VarId lhs = kNoId;        // kNoId for bare call statements
  VarId recv = kNoId;
  std::vector<VarId> args;
  std::string calleeName;
  SrcLoc loc;
};

struct Program {
  std::vector<ClassDecl> classes;
  std::vector<MethodDecl> methods;
  std::vector<VarDecl> vars;
  std::vector<FieldDecl> fields;
  MethodId entry = kNoId;
  std::map<SiteId, CallSite> callSites;  // ordered by site id

  ClassId classByName(const std::string& n) const;
  // Field lookup through the superclass chain; kNoId when unresolved.
  FieldId fieldOf(ClassId cls, const std::string& name) const;
  MethodId methodOf(ClassId cls, const std::string& name) const;

  std::string methodName(MethodId m) const;                // "A.set", entry is "main"
  std::string varName(VarId v) const;                      // "A.set.p"
  std::string fieldName(FieldId f) const;                  // "A.f"
  VarId findVar(const std::string& qualified) const;       // by varName()
  FieldId findField(const std::string& qualified) const;
};

// Walks every statement of the program, descending into branch arms.
template <typename Fn>
void forEachStmt(const std::vector<Stmt>& body, Fn&& fn) {
  for (const Stmt& s : body) {
    fn(s);
    if (s.kind == Stmt::Kind::Branch) {
      forEachStmt(s.thenBody, fn);
      forEachStmt(s.elseBody, fn);
    }
  }
}

template <typename Fn>
void forEachStmt(const Program& p, Fn&& fn) {
  for (const MethodDecl& m : p.methods) forEachStmt(m.body, fn);
}

}  // namespace flowcfl

#endif
