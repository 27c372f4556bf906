#include "flowcfl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace flowcfl {

const char* qualName(Qual q) {
  switch (q) {
    case Qual::Pos: return "pos";
    case Qual::Poly: return "poly";
    case Qual::Neg: return "neg";
  }
  return "?";
}

ClassId Program::classByName(const std::string& n) const {
  for (size_t i = 0; i < classes.size(); ++i)
    if (classes[i].name == n) return (ClassId)i;
  return kNoId;
}

FieldId Program::fieldOf(ClassId cls, const std::string& name) const {
  while (cls != kNoId) {
    for (FieldId f : classes[cls].fields)
      if (fields[f].name == name) return f;
    cls = classes[cls].super;
  }
  return kNoId;
}

MethodId Program::methodOf(ClassId cls, const std::string& name) const {
  while (cls != kNoId) {
    for (MethodId m : classes[cls].methods)
      if (methods[m].name == name && !methods[m].isStatic) return m;
    cls = classes[cls].super;
  }
  return kNoId;
}

std::string Program::methodName(MethodId m) const {
  if (m == kNoId) return "?";
  if (m == entry) return "main";
  const MethodDecl& md = methods[m];
  return classes[md.owner].name + "." + md.name;
}

std::string Program::varName(VarId v) const {
  if (v == kNoId) return "?";
  return methodName(vars[v].method) + "." + vars[v].name;
}

std::string Program::fieldName(FieldId f) const {
  if (f == kNoId) return "?";
  return classes[fields[f].owner].name + "." + fields[f].name;
}

VarId Program::findVar(const std::string& qualified) const {
  for (size_t i = 0; i < vars.size(); ++i)
    if (varName((VarId)i) == qualified) return (VarId)i;
  return kNoId;
}

FieldId Program::findField(const std::string& qualified) const {
  for (size_t i = 0; i < fields.size(); ++i)
    if (fieldName((FieldId)i) == qualified) return (FieldId)i;
  return kNoId;
}

namespace {

enum class Tok {
  Ident, KwClass, KwExtends, KwStatic, KwVoid, KwNew, KwIf, KwElse, KwReturn,
  At, LBrace, RBrace, LParen, RParen, Semi, Comma, Dot, Eq, Star, SiteLabel,
  End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int site = -1;
  SrcLoc loc;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(&src) { next(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    next();
    return t;
  }

 private:
  void next() {
    if (skipSpace()) return;  // produced a site-label token
    SrcLoc at = loc();
    if (pos_ >= src_->size()) {
      tok_ = {Tok::End, "", -1, at};
      return;
    }
    char c = (*src_)[pos_];
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_->size() &&
             (std::isalnum((unsigned char)(*src_)[pos_]) || (*src_)[pos_] == '_'))
        advance();
      std::string word = src_->substr(start, pos_ - start);
      Tok k = Tok::Ident;
      if (word == "class") k = Tok::KwClass;
      else if (word == "extends") k = Tok::KwExtends;
      else if (word == "static") k = Tok::KwStatic;
      else if (word == "void") k = Tok::KwVoid;
      else if (word == "new") k = Tok::KwNew;
      else if (word == "if") k = Tok::KwIf;
      else if (word == "else") k = Tok::KwElse;
      else if (word == "return") k = Tok::KwReturn;
      tok_ = {k, word, -1, at};
      return;
    }
    advance();
    switch (c) {
      case '@': tok_ = {Tok::At, "@", -1, at}; return;
      case '{': tok_ = {Tok::LBrace, "{", -1, at}; return;
      case '}': tok_ = {Tok::RBrace, "}", -1, at}; return;
      case '(': tok_ = {Tok::LParen, "(", -1, at}; return;
      case ')': tok_ = {Tok::RParen, ")", -1, at}; return;
      case ';': tok_ = {Tok::Semi, ";", -1, at}; return;
      case ',': tok_ = {Tok::Comma, ",", -1, at}; return;
      case '.': tok_ = {Tok::Dot, ".", -1, at}; return;
      case '=': tok_ = {Tok::Eq, "=", -1, at}; return;
      case '*': tok_ = {Tok::Star, "*", -1, at}; return;
      default:
        throw ParseError(at, std::string("unexpected character '") + c + "'");
    }
  }

  // Skips whitespace and comments. Returns true when a /*#n*/ call-site
  // label was turned into the current token.
  bool skipSpace() {
    for (;;) {
      while (pos_ < src_->size() && std::isspace((unsigned char)(*src_)[pos_]))
        advance();
      if (pos_ + 1 < src_->size() && (*src_)[pos_] == '/' &&
          (*src_)[pos_ + 1] == '/') {
        while (pos_ < src_->size() && (*src_)[pos_] != '\n') advance();
        continue;
      }
      if (pos_ + 1 < src_->size() && (*src_)[pos_] == '/' &&
          (*src_)[pos_ + 1] == '*') {
        SrcLoc l = loc();
        if (pos_ + 2 < src_->size() && (*src_)[pos_ + 2] == '#') {
          size_t p = pos_ + 3;
          int v = 0;
          bool any = false;
          while (p < src_->size() && std::isdigit((unsigned char)(*src_)[p])) {
            v = v * 10 + ((*src_)[p] - '0');
            any = true;
            ++p;
          }
          if (!any || p + 1 >= src_->size() || (*src_)[p] != '*' ||
              (*src_)[p + 1] != '/')
            throw ParseError(l, "malformed call-site label, expected /*#n*/");
          while (pos_ < p + 2) advance();
          tok_ = {Tok::SiteLabel, "", v, l};
          return true;
        }
        advance();
        advance();
        while (pos_ + 1 < src_->size() &&
               !((*src_)[pos_] == '*' && (*src_)[pos_ + 1] == '/'))
          advance();
        if (pos_ + 1 >= src_->size()) throw ParseError(l, "unterminated comment");
        advance();
        advance();
        continue;
      }
      return false;
    }
  }

  SrcLoc loc() const { return {line_, col_}; }
  void advance() {
    if ((*src_)[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string* src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

struct Annots {
  std::optional<Qual> pinned;
  Role role = Role::None;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  Program parse() {
    while (lex_.peek().kind != Tok::End) parseClass();
    if (p_.classByName("Prim") == kNoId) {
      ClassDecl prim;
      prim.name = "Prim";
      p_.classes.push_back(prim);
    }
    numberSites();
    return std::move(p_);
  }

 private:
  Token expect(Tok k, const char* what) {
    if (lex_.peek().kind != k)
      throw ParseError(lex_.peek().loc, std::string("expected ") + what +
                                            ", got '" + lex_.peek().text + "'");
    return lex_.take();
  }

  Annots parseAnnots() {
    Annots a;
    while (lex_.peek().kind == Tok::At) {
      SrcLoc l = lex_.take().loc;
      Token w = expect(Tok::Ident, "qualifier name");
      if (w.text == "pos") a.pinned = Qual::Pos;
      else if (w.text == "neg") a.pinned = Qual::Neg;
      else if (w.text == "poly") a.pinned = Qual::Poly;
      else if (w.text == "source") {
        a.role = Role::Source;
        if (!a.pinned) a.pinned = Qual::Pos;
      } else if (w.text == "sink") {
        a.role = Role::Sink;
        if (!a.pinned) a.pinned = Qual::Neg;
      } else {
        throw ParseError(l, "unknown qualifier @" + w.text);
      }
    }
    return a;
  }

  void parseClass() {
    Token kw = expect(Tok::KwClass, "'class'");
    Token name = expect(Tok::Ident, "class name");
    ClassDecl cd;
    cd.name = name.text;
    cd.loc = kw.loc;
    if (lex_.peek().kind == Tok::KwExtends) {
      lex_.take();
      cd.superName = expect(Tok::Ident, "superclass name").text;
    }
    ClassId cid = (ClassId)p_.classes.size();
    p_.classes.push_back(cd);
    expect(Tok::LBrace, "'{'");
    while (lex_.peek().kind != Tok::RBrace) parseMember(cid);
    expect(Tok::RBrace, "'}'");
  }

  void parseMember(ClassId cid) {
    Annots a = parseAnnots();
    bool isStatic = false;
    if (lex_.peek().kind == Tok::KwStatic) {
      lex_.take();
      isStatic = true;
    }
    bool isVoid = lex_.peek().kind == Tok::KwVoid;
    Token ty = isVoid ? lex_.take() : expect(Tok::Ident, "type name");
    Token name = expect(Tok::Ident, "member name");
    if (!isVoid && !isStatic && lex_.peek().kind == Tok::Semi) {
      lex_.take();
      FieldDecl fd;
      fd.name = name.text;
      fd.typeName = ty.text;
      fd.owner = cid;
      fd.pinned = a.pinned;
      fd.role = a.role;
      fd.loc = name.loc;
      p_.classes[cid].fields.push_back((FieldId)p_.fields.size());
      p_.fields.push_back(fd);
      return;
    }
    parseMethod(cid, isStatic, isVoid ? "" : ty.text, name);
  }

  VarId addVar(MethodId m, const std::string& name, const std::string& ty,
               VarDecl::Kind kind, SrcLoc loc, Annots a = {}) {
    VarDecl v;
    v.name = name;
    v.typeName = ty;
    v.method = m;
    v.kind = kind;
    v.loc = loc;
    v.pinned = a.pinned;
    v.role = a.role;
    VarId id = (VarId)p_.vars.size();
    p_.vars.push_back(v);
    scope_[name] = id;
    return id;
  }

  void parseMethod(ClassId cid, bool isStatic, const std::string& retTy,
                   const Token& name) {
    MethodDecl md;
    md.name = name.text;
    md.owner = cid;
    md.isStatic = isStatic;
    md.retTypeName = retTy;
    md.loc = name.loc;
    MethodId mid = (MethodId)p_.methods.size();
    p_.methods.push_back(md);
    p_.classes[cid].methods.push_back(mid);
    scope_.clear();

    expect(Tok::LParen, "'('");
    bool first = true;
    while (lex_.peek().kind != Tok::RParen) {
      if (!first) expect(Tok::Comma, "','");
      Token pty = expect(Tok::Ident, "parameter type");
      Token pname = expect(Tok::Ident, "parameter name");
      if (first && pname.text == "this") {
        p_.methods[mid].thisVar =
            addVar(mid, "this", pty.text, VarDecl::Kind::This, pname.loc);
      } else {
        p_.methods[mid].params.push_back(
            addVar(mid, pname.text, pty.text, VarDecl::Kind::Param, pname.loc));
      }
      first = false;
    }
    expect(Tok::RParen, "')'");
    expect(Tok::LBrace, "'{'");

    while (isDeclAhead()) {
      Annots a = parseAnnots();
      Token dty = expect(Tok::Ident, "type name");
      Token dname = expect(Tok::Ident, "variable name");
      expect(Tok::Semi, "';'");
      VarId v =
          addVar(mid, dname.text, dty.text, VarDecl::Kind::Local, dname.loc, a);
      p_.methods[mid].locals.push_back(v);
    }
    std::vector<Stmt> body;
    while (lex_.peek().kind != Tok::RBrace && lex_.peek().kind != Tok::KwReturn)
      body.push_back(parseStmt());
    if (lex_.peek().kind == Tok::KwReturn) {
      Token r = lex_.take();
      Token rv = expect(Tok::Ident, "returned variable");
      expect(Tok::Semi, "';'");
      VarId rvar = lookup(rv);
      if (p_.vars[rvar].name == "ret") {
        p_.methods[mid].retVar = rvar;
        p_.vars[rvar].kind = VarDecl::Kind::Ret;
      } else {
        // return x with x != ret gets the implicit copy ret = x.
        VarId ret = addVar(mid, "ret", retTy, VarDecl::Kind::Ret, r.loc);
        p_.methods[mid].locals.push_back(ret);
        p_.methods[mid].retVar = ret;
        Stmt s;
        s.kind = Stmt::Kind::Assign;
        s.loc = r.loc;
        s.lhs = ret;
        s.rhs = rvar;
        body.push_back(s);
      }
    }
    expect(Tok::RBrace, "'}'");
    p_.methods[mid].body = std::move(body);
  }

  bool isDeclAhead() {
    if (lex_.peek().kind == Tok::At) return true;
    if (lex_.peek().kind != Tok::Ident) return false;
    Lexer save = lex_;
    lex_.take();
    bool yes = lex_.peek().kind == Tok::Ident;
    if (yes) {
      lex_.take();
      yes = lex_.peek().kind == Tok::Semi;
    }
    lex_ = save;
    return yes;
  }

  VarId lookup(const Token& t) {
    auto it = scope_.find(t.text);
    if (it == scope_.end())
      throw ParseError(t.loc, "undeclared variable '" + t.text + "'");
    return it->second;
  }

  Stmt parseStmt() {
    if (lex_.peek().kind == Tok::KwIf) return parseBranch();
    Token first = expect(Tok::Ident, "statement");
    Stmt s;
    s.loc = first.loc;
    if (lex_.peek().kind == Tok::Dot) {
      lex_.take();
      Token member = expect(Tok::Ident, "member name");
      if (lex_.peek().kind == Tok::Eq) {
        lex_.take();
        Token y = expect(Tok::Ident, "variable");
        expect(Tok::Semi, "';'");
        s.kind = Stmt::Kind::Write;
        s.recv = lookup(first);
        s.fieldName = member.text;
        s.rhs = lookup(y);
        return s;
      }
      s.kind = Stmt::Kind::Call;
      s.recv = lookup(first);
      s.calleeName = member.text;
      parseCallTail(s);
      return s;
    }
    expect(Tok::Eq, "'='");
    VarId lhs = lookup(first);
    if (lex_.peek().kind == Tok::KwNew) {
      lex_.take();
      Token cls = expect(Tok::Ident, "class name");
      expect(Tok::Semi, "';'");
      s.kind = Stmt::Kind::Alloc;
      s.lhs = lhs;
      s.klassName = cls.text;
      return s;
    }
    Token y = expect(Tok::Ident, "variable");
    if (lex_.peek().kind == Tok::Dot) {
      lex_.take();
      Token member = expect(Tok::Ident, "member name");
      if (lex_.peek().kind == Tok::LParen) {
        s.kind = Stmt::Kind::Call;
        s.lhs = lhs;
        s.recv = lookup(y);
        s.calleeName = member.text;
        parseCallTail(s);
        return s;
      }
      expect(Tok::Semi, "';'");
      s.kind = Stmt::Kind::Read;
      s.lhs = lhs;
      s.recv = lookup(y);
      s.fieldName = member.text;
      return s;
    }
    expect(Tok::Semi, "';'");
    s.kind = Stmt::Kind::Assign;
    s.lhs = lhs;
    s.rhs = lookup(y);
    return s;
  }

  void parseCallTail(Stmt& s) {
    expect(Tok::LParen, "'('");
    bool first = true;
    while (lex_.peek().kind != Tok::RParen) {
      if (!first) expect(Tok::Comma, "','");
      Token a = expect(Tok::Ident, "argument");
      s.args.push_back(lookup(a));
      first = false;
    }
    expect(Tok::RParen, "')'");
    if (lex_.peek().kind == Tok::SiteLabel) s.site = lex_.take().site;
    expect(Tok::Semi, "';'");
  }

  Stmt parseBranch() {
    Token kw = lex_.take();
    Stmt s;
    s.kind = Stmt::Kind::Branch;
    s.loc = kw.loc;
    expect(Tok::LParen, "'('");
    expect(Tok::Star, "'*'");
    expect(Tok::RParen, "')'");
    expect(Tok::LBrace, "'{'");
    while (lex_.peek().kind != Tok::RBrace) s.thenBody.push_back(parseStmt());
    expect(Tok::RBrace, "'}'");
    expect(Tok::KwElse, "'else'");
    expect(Tok::LBrace, "'{'");
    while (lex_.peek().kind != Tok::RBrace) s.elseBody.push_back(parseStmt());
    expect(Tok::RBrace, "'}'");
    return s;
  }

  template <typename Fn>
  static void forEachStmtMut(std::vector<Stmt>& body, Fn&& fn) {
    for (Stmt& s : body) {
      fn(s);
      if (s.kind == Stmt::Kind::Branch) {
        forEachStmtMut(s.thenBody, fn);
        forEachStmtMut(s.elseBody, fn);
      }
    }
  }

  void numberSites() {
    std::set<SiteId> used;
    for (MethodDecl& m : p_.methods)
      forEachStmtMut(m.body, [&](Stmt& s) {
        if (s.kind == Stmt::Kind::Call && s.site != kNoId) used.insert(s.site);
      });
    SiteId fresh = 1;
    for (MethodDecl& m : p_.methods)
      forEachStmtMut(m.body, [&](Stmt& s) {
        if (s.kind != Stmt::Kind::Call || s.site != kNoId) return;
        while (used.count(fresh)) ++fresh;
        s.site = fresh;
        used.insert(fresh);
      });
  }

  Lexer lex_;
  Program p_;
  std::map<std::string, VarId> scope_;
};

void resolveTypes(Program& p, std::vector<Diagnostic>& ds) {
  for (auto& c : p.classes) {
    if (!c.superName.empty()) {
      c.super = p.classByName(c.superName);
      if (c.super == kNoId)
        ds.push_back({Severity::Error, c.loc,
                      "unresolved superclass '" + c.superName + "'"});
    }
  }
  for (auto& f : p.fields) {
    f.type = p.classByName(f.typeName);
    if (f.type == kNoId)
      ds.push_back({Severity::Error, f.loc,
                    "unresolved field type '" + f.typeName + "'"});
  }
  for (auto& v : p.vars) {
    v.type = p.classByName(v.typeName);
    if (v.type == kNoId && !(v.kind == VarDecl::Kind::Ret && v.typeName.empty()))
      ds.push_back({Severity::Error, v.loc,
                    "unresolved type '" + v.typeName + "' for variable " +
                        v.name});
  }
}

void resolveFieldRefs(Program& p, std::vector<Diagnostic>& ds) {
  for (MethodDecl& m : p.methods) {
    std::vector<Stmt*> work;
    for (Stmt& s : m.body) work.push_back(&s);
    while (!work.empty()) {
      Stmt* s = work.back();
      work.pop_back();
      if (s->kind == Stmt::Kind::Branch) {
        for (Stmt& t : s->thenBody) work.push_back(&t);
        for (Stmt& t : s->elseBody) work.push_back(&t);
        continue;
      }
      if (s->kind == Stmt::Kind::Alloc) {
        s->klass = p.classByName(s->klassName);
        if (s->klass == kNoId)
          ds.push_back({Severity::Error, s->loc,
                        "unresolved class '" + s->klassName + "' in new"});
      }
      if (s->kind == Stmt::Kind::Read || s->kind == Stmt::Kind::Write) {
        ClassId rc = p.vars[s->recv].type;
        s->field = rc == kNoId ? kNoId : p.fieldOf(rc, s->fieldName);
        if (s->field == kNoId)
          ds.push_back({Severity::Error, s->loc,
                        "unresolved field '" + s->fieldName + "' on " +
                            p.vars[s->recv].typeName});
      }
    }
  }
}

}  // namespace

Program parseProgram(const std::string& text) {
  Parser parser(text);
  Program p = parser.parse();
  std::vector<Diagnostic> ds;
  resolveTypes(p, ds);
  resolveFieldRefs(p, ds);
  for (size_t i = 0; i < p.methods.size(); ++i)
    if (p.methods[i].isStatic && p.methods[i].name == "main" && p.entry == kNoId)
      p.entry = (MethodId)i;
  for (size_t mi = 0; mi < p.methods.size(); ++mi) {
    forEachStmt(p.methods[mi].body, [&](const Stmt& s) {
      if (s.kind != Stmt::Kind::Call) return;
      CallSite cs;
      cs.id = s.site;
      cs.caller = (MethodId)mi;
      cs.lhs = s.lhs;
      cs.recv = s.recv;
      cs.args = s.args;
      cs.calleeName = s.calleeName;
      cs.loc = s.loc;
      if (!p.callSites.count(s.site)) p.callSites[s.site] = cs;
    });
  }
  return p;
}

std::vector<Diagnostic> checkWellFormed(const Program& p) {
  std::vector<Diagnostic> ds;
  std::set<std::string> classNames;
  for (auto& c : p.classes) {
    if (!classNames.insert(c.name).second)
      ds.push_back({Severity::Error, c.loc, "duplicate class '" + c.name + "'"});
    std::set<std::string> fieldNames;
    for (FieldId f : c.fields)
      if (!fieldNames.insert(p.fields[f].name).second)
        ds.push_back({Severity::Error, p.fields[f].loc,
                      "duplicate field '" + p.fields[f].name + "'"});
    std::set<std::string> methodNames;
    for (MethodId m : c.methods)
      if (!methodNames.insert(p.methods[m].name).second)
        ds.push_back({Severity::Error, p.methods[m].loc,
                      "duplicate method '" + p.methods[m].name + "'"});
  }
  for (size_t i = 0; i < p.classes.size(); ++i) {
    ClassId a = p.classes[i].super;
    size_t steps = 0;
    while (a != kNoId && steps <= p.classes.size()) {
      if (a == (ClassId)i) {
        ds.push_back({Severity::Error, p.classes[i].loc,
                      "inheritance cycle through '" + p.classes[i].name + "'"});
        break;
      }
      a = p.classes[a].super;
      ++steps;
    }
  }
  // Overriding rejected: every call site must have one static callee.
  for (size_t i = 0; i < p.classes.size(); ++i) {
    ClassId sup = p.classes[i].super;
    for (MethodId m : p.classes[i].methods) {
      if (p.methods[m].isStatic) continue;
      if (sup != kNoId && p.methodOf(sup, p.methods[m].name) != kNoId)
        ds.push_back({Severity::Error, p.methods[m].loc,
                      "overriding method '" + p.methods[m].name +
                          "' not supported"});
    }
  }
  int mains = 0;
  for (auto& m : p.methods)
    if (m.isStatic && m.name == "main") ++mains;
  if (mains == 0)
    ds.push_back({Severity::Error, {}, "no entry method 'static void main()'"});
  else if (mains > 1)
    ds.push_back({Severity::Error, {}, "multiple entry methods"});
  for (size_t i = 0; i < p.methods.size(); ++i) {
    const MethodDecl& m = p.methods[i];
    if ((MethodId)i == p.entry) {
      if (!m.params.empty() || m.thisVar != kNoId)
        ds.push_back({Severity::Error, m.loc, "main takes no parameters"});
      continue;
    }
    if (m.isStatic)
      ds.push_back({Severity::Error, m.loc,
                    "static methods other than main are not supported"});
    if (m.thisVar == kNoId)
      ds.push_back({Severity::Error, m.loc,
                    "instance method '" + m.name + "' lacks the this parameter"});
    if (m.params.size() != 1)
      ds.push_back({Severity::Warning, m.loc,
                    "arity restriction violated: '" + m.name + "' has " +
                        std::to_string(m.params.size()) +
                        " explicit parameters (core form has exactly one)"});
    if (!m.retTypeName.empty() && m.retVar == kNoId)
      ds.push_back({Severity::Error, m.loc,
                    "method '" + m.name +
                        "' declares a return type but has no return"});
    std::set<std::string> names;
    if (m.thisVar != kNoId) names.insert("this");
    for (VarId v : m.params)
      if (!names.insert(p.vars[v].name).second)
        ds.push_back({Severity::Error, p.vars[v].loc,
                      "duplicate parameter '" + p.vars[v].name + "'"});
    for (VarId v : m.locals)
      if (!names.insert(p.vars[v].name).second)
        ds.push_back({Severity::Error, p.vars[v].loc,
                      "duplicate local '" + p.vars[v].name + "'"});
  }
  ClassId prim = p.classByName("Prim");
  if (prim != kNoId && !p.classes[prim].fields.empty())
    ds.push_back({Severity::Error, p.classes[prim].loc,
                  "class Prim is reserved and carries no fields"});
  for (auto& v : p.vars)
    if (v.role == Role::Sink && v.type != kNoId &&
        p.classes[v.type].name != "Prim")
      ds.push_back({Severity::Warning, v.loc,
                    "sink '" + v.name + "' is not Prim-typed"});
  return ds;
}

std::vector<Diagnostic> resolveCalls(Program& p) {
  std::vector<Diagnostic> ds;
  for (auto& [site, cs] : p.callSites) {
    ClassId rc = p.vars[cs.recv].type;
    MethodId callee = rc == kNoId ? kNoId : p.methodOf(rc, cs.calleeName);
    if (callee == kNoId) {
      ds.push_back({Severity::Error, cs.loc,
                    "unresolved callee '" + cs.calleeName + "' on " +
                        p.vars[cs.recv].typeName});
      continue;
    }
    cs.callee = callee;
    const MethodDecl& m = p.methods[callee];
    if (cs.args.size() != m.params.size())
      ds.push_back({Severity::Error, cs.loc,
                    "call to '" + cs.calleeName + "' passes " +
                        std::to_string(cs.args.size()) +
                        " arguments, expected " +
                        std::to_string(m.params.size())});
    if (cs.lhs != kNoId && m.retVar == kNoId)
      ds.push_back({Severity::Error, cs.loc,
                    "void method '" + cs.calleeName + "' used as a value"});
  }
  return ds;
}

Program loadProgram(const std::string& text, std::vector<Diagnostic>& diags) {
  Program p;
  try {
    p = parseProgram(text);
  } catch (const ParseError& e) {
    diags.push_back({Severity::Error, e.loc, e.what()});
    return p;
  }
  auto wf = checkWellFormed(p);
  diags.insert(diags.end(), wf.begin(), wf.end());
  if (!hasErrors(diags)) {
    auto rs = resolveCalls(p);
    diags.insert(diags.end(), rs.begin(), rs.end());
  }
  return p;
}

namespace {

void printAnnots(std::ostream& os, const std::optional<Qual>& q, Role r) {
  if (r == Role::Source) os << "@source ";
  else if (r == Role::Sink) os << "@sink ";
  if (q) {
    if (r == Role::Source && *q == Qual::Pos) return;
    if (r == Role::Sink && *q == Qual::Neg) return;
    os << "@" << qualName(*q) << " ";
  }
}

void printStmts(std::ostream& os, const Program& p, const std::vector<Stmt>& body,
                int indent) {
  std::string pad(indent, ' ');
  for (const Stmt& s : body) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        os << pad << p.vars[s.lhs].name << " = " << p.vars[s.rhs].name << ";\n";
        break;
      case Stmt::Kind::Alloc:
        os << pad << p.vars[s.lhs].name << " = new " << s.klassName << ";\n";
        break;
      case Stmt::Kind::Read:
        os << pad << p.vars[s.lhs].name << " = " << p.vars[s.recv].name << "."
           << s.fieldName << ";\n";
        break;
      case Stmt::Kind::Write:
        os << pad << p.vars[s.recv].name << "." << s.fieldName << " = "
           << p.vars[s.rhs].name << ";\n";
        break;
      case Stmt::Kind::Call: {
        os << pad;
        if (s.lhs != kNoId) os << p.vars[s.lhs].name << " = ";
        os << p.vars[s.recv].name << "." << s.calleeName << "(";
        for (size_t i = 0; i < s.args.size(); ++i)
          os << (i ? ", " : "") << p.vars[s.args[i]].name;
        os << ") /*#" << s.site << "*/;\n";
        break;
      }
      case Stmt::Kind::Branch:
        os << pad << "if (*) {\n";
        printStmts(os, p, s.thenBody, indent + 2);
        os << pad << "} else {\n";
        printStmts(os, p, s.elseBody, indent + 2);
        os << pad << "}\n";
        break;
    }
  }
}

}  // namespace

std::string printProgram(const Program& p) {
  std::ostringstream os;
  for (size_t ci = 0; ci < p.classes.size(); ++ci) {
    const ClassDecl& c = p.classes[ci];
    if (c.name == "Prim" && c.fields.empty() && c.methods.empty()) continue;
    os << "class " << c.name;
    if (!c.superName.empty()) os << " extends " << c.superName;
    os << " {\n";
    for (FieldId f : c.fields) {
      os << "  ";
      printAnnots(os, p.fields[f].pinned, p.fields[f].role);
      os << p.fields[f].typeName << " " << p.fields[f].name << ";\n";
    }
    for (MethodId mi : c.methods) {
      const MethodDecl& m = p.methods[mi];
      os << "  ";
      if (m.isStatic) os << "static ";
      os << (m.retTypeName.empty() ? "void" : m.retTypeName) << " " << m.name
         << "(";
      bool first = true;
      if (m.thisVar != kNoId) {
        os << p.vars[m.thisVar].typeName << " this";
        first = false;
      }
      for (VarId v : m.params) {
        if (!first) os << ", ";
        os << p.vars[v].typeName << " " << p.vars[v].name;
        first = false;
      }
      os << ") {\n";
      for (VarId v : m.locals) {
        os << "    ";
        printAnnots(os, p.vars[v].pinned, p.vars[v].role);
        os << p.vars[v].typeName << " " << p.vars[v].name << ";\n";
      }
      printStmts(os, p, m.body, 4);
      if (m.retVar != kNoId)
        os << "    return " << p.vars[m.retVar].name << ";\n";
      os << "  }\n";
    }
    os << "}\n";
  }
  return os.str();
}

namespace {

bool stmtsEqual(const Program& a, const Program& b, const std::vector<Stmt>& xs,
                const std::vector<Stmt>& ys) {
  if (xs.size() != ys.size()) return false;
  auto vn = [](const Program& p, VarId v) {
    return v == kNoId ? std::string("-") : p.vars[v].name;
  };
  for (size_t i = 0; i < xs.size(); ++i) {
    const Stmt& x = xs[i];
    const Stmt& y = ys[i];
    if (x.kind != y.kind || x.site != y.site) return false;
    if (vn(a, x.lhs) != vn(b, y.lhs) || vn(a, x.rhs) != vn(b, y.rhs) ||
        vn(a, x.recv) != vn(b, y.recv) || x.fieldName != y.fieldName ||
        x.klassName != y.klassName || x.calleeName != y.calleeName)
      return false;
    if (x.args.size() != y.args.size()) return false;
    for (size_t j = 0; j < x.args.size(); ++j)
      if (vn(a, x.args[j]) != vn(b, y.args[j])) return false;
    if (!stmtsEqual(a, b, x.thenBody, y.thenBody)) return false;
    if (!stmtsEqual(a, b, x.elseBody, y.elseBody)) return false;
  }
  return true;
}

}  // namespace

bool structurallyEqual(const Program& a, const Program& b) {
  auto realClasses = [](const Program& p) {
    std::vector<const ClassDecl*> cs;
    for (auto& c : p.classes)
      if (!(c.name == "Prim" && c.fields.empty() && c.methods.empty()))
        cs.push_back(&c);
    return cs;
  };
  auto ca = realClasses(a), cb = realClasses(b);
  if (ca.size() != cb.size()) return false;
  for (size_t i = 0; i < ca.size(); ++i) {
    if (ca[i]->name != cb[i]->name || ca[i]->superName != cb[i]->superName)
      return false;
    if (ca[i]->fields.size() != cb[i]->fields.size() ||
        ca[i]->methods.size() != cb[i]->methods.size())
      return false;
    for (size_t j = 0; j < ca[i]->fields.size(); ++j) {
      const FieldDecl& fa = a.fields[ca[i]->fields[j]];
      const FieldDecl& fb = b.fields[cb[i]->fields[j]];
      if (fa.name != fb.name || fa.typeName != fb.typeName ||
          fa.pinned != fb.pinned || fa.role != fb.role)
        return false;
    }
    for (size_t j = 0; j < ca[i]->methods.size(); ++j) {
      const MethodDecl& ma = a.methods[ca[i]->methods[j]];
      const MethodDecl& mb = b.methods[cb[i]->methods[j]];
      if (ma.name != mb.name || ma.isStatic != mb.isStatic ||
          ma.retTypeName != mb.retTypeName ||
          ma.params.size() != mb.params.size() ||
          (ma.thisVar == kNoId) != (mb.thisVar == kNoId) ||
          (ma.retVar == kNoId) != (mb.retVar == kNoId))
        return false;
      for (size_t k = 0; k < ma.params.size(); ++k)
        if (a.vars[ma.params[k]].name != b.vars[mb.params[k]].name ||
            a.vars[ma.params[k]].typeName != b.vars[mb.params[k]].typeName)
          return false;
      if (!stmtsEqual(a, b, ma.body, mb.body)) return false;
    }
  }
  return true;
}

}  // namespace flowcfl
