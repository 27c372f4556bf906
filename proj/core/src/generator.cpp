#include "flowcfl/generator.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

namespace flowcfl {

namespace {

struct GField {
  int owner;
  int type;  // -1 = Prim
  std::string name;
};

struct GMethod {
  int owner;
  std::string name;
  int paramType;
  int retType;
};

struct GVar {
  std::string name;
  int type;  // -1 = Prim
  bool inited = false;
};

class Gen {
 public:
  explicit Gen(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  std::string run() {
    nClasses_ = 1 + (int)(rng_() % (uint64_t)cfg_.maxClasses);
    supers_.assign(nClasses_, -1);
    for (int c = 1; c < nClasses_; ++c)
      if (chance(20)) supers_[c] = (int)(rng_() % (uint64_t)c);

    int nFields = (int)(rng_() % (uint64_t)(cfg_.maxFields + 1));
    if (cfg_.aliasPairBias && nFields == 0) nFields = 1;
    for (int i = 0; i < nFields; ++i) {
      GField f;
      f.owner = (int)(rng_() % (uint64_t)nClasses_);
      f.type = pickType();
      f.name = "f" + std::to_string(i);
      fields_.push_back(f);
    }

    int nMethods = (int)(rng_() % 3);
    if (cfg_.aliasPairBias) nMethods = std::max(nMethods, 2);
    for (int i = 0; i < nMethods; ++i) {
      GMethod m;
      m.owner = (int)(rng_() % (uint64_t)nClasses_);
      m.name = "m" + std::to_string(i);
      m.paramType = pickType();
      m.retType = pickType();
      methods_.push_back(m);
    }
    if (cfg_.aliasPairBias) setUpAliasPair();

    // Statement budget is split between main and the methods.
    int budget = cfg_.maxStmts;
    std::vector<int> methodBudget(methods_.size(), 0);
    for (size_t i = 0; i < methods_.size() && budget > 2; ++i) {
      methodBudget[i] = 1 + (int)(rng_() % 2);
      budget -= methodBudget[i];
    }

    std::ostringstream src;
    for (int c = 0; c < nClasses_; ++c) {
      src << "class " << className(c);
      if (supers_[c] >= 0) src << " extends " << className(supers_[c]);
      src << " {\n";
      for (size_t i = 0; i < fields_.size(); ++i)
        if (fields_[i].owner == c)
          src << "  " << typeName(fields_[i].type) << " " << fields_[i].name
              << ";\n";
      for (size_t i = 0; i < methods_.size(); ++i)
        if (methods_[i].owner == c) emitMethod(src, (int)i, methodBudget[i]);
      src << "}\n";
    }
    src << "class Main {\n  static void main() {\n";
    emitBody(src, -1, budget, /*indent=*/4);
    src << "  }\n}\n";
    return src.str();
  }

 private:
  bool chance(int pct) { return (int)(rng_() % 100) < pct; }
  int pickType() {
    // -1 is Prim
    int n = nClasses_ + 1;
    return (int)(rng_() % (uint64_t)n) - 1;
  }
  std::string className(int c) const {
    return c < 0 ? "Prim" : "C" + std::to_string(c);
  }
  std::string typeName(int t) const { return className(t); }

  // Guarantee one container class with a put/get pair over the same field,
  // the shape that exercises inverse edges.
  void setUpAliasPair() {
    int owner = fields_[0].owner;
    int vt = fields_[0].type;
    methods_[0] = {owner, "m0", vt, vt};
    methods_[1] = {owner, "m1", vt, vt};
    aliasOwner_ = owner;
    aliasValueType_ = vt;
  }

  bool subclassOf(int sub, int sup) const {
    while (sub >= 0) {
      if (sub == sup) return true;
      sub = supers_[sub];
    }
    return sub == sup;
  }

  // Fields visible on class c (own and inherited).
  std::vector<int> fieldsOf(int c) const {
    std::vector<int> out;
    for (int k = c; k >= 0; k = supers_[k])
      for (size_t i = 0; i < fields_.size(); ++i)
        if (fields_[i].owner == k) out.push_back((int)i);
    return out;
  }

  std::vector<int> methodsOf(int c) const {
    std::vector<int> out;
    for (int k = c; k >= 0; k = supers_[k])
      for (size_t i = 0; i < methods_.size(); ++i)
        if (methods_[i].owner == k) out.push_back((int)i);
    return out;
  }

  int pickVarOf(const std::vector<GVar>& vars, int type, bool initedOnly) {
    std::vector<int> cands;
    for (size_t i = 0; i < vars.size(); ++i)
      if (vars[i].type == type && (!initedOnly || vars[i].inited))
        cands.push_back((int)i);
    if (cands.empty()) return -1;
    return cands[rng_() % cands.size()];
  }

  void emitMethod(std::ostringstream& src, int mi, int budget) {
    const GMethod& m = methods_[mi];
    src << "  " << typeName(m.retType) << " " << m.name << "("
        << className(m.owner) << " this, " << typeName(m.paramType)
        << " p) {\n";
    if (cfg_.aliasPairBias && mi == 0 && m.owner == aliasOwner_) {
      // put: this.f0 = p
      src << "    Prim junk;\n";
      src << "    " << typeName(m.retType) << " ret;\n";
      src << "    this." << fields_[0].name << " = p;\n";
      src << "    ret = p;\n";
      src << "    return ret;\n  }\n";
      return;
    }
    if (cfg_.aliasPairBias && mi == 1 && m.owner == aliasOwner_) {
      // get: ret = this.f0
      src << "    " << typeName(m.retType) << " ret;\n";
      src << "    ret = this." << fields_[0].name << ";\n";
      src << "    return ret;\n  }\n";
      return;
    }
    std::vector<GVar> vars;
    vars.push_back({"this", m.owner, true});
    vars.push_back({"p", m.paramType, true});
    std::ostringstream body;
    emitStmtsInto(body, vars, mi, budget, 4);
    // Declarations came first; the return value must exist and be inited.
    src << "    " << typeName(m.retType) << " ret;\n";
    for (size_t i = 2; i < vars.size(); ++i)
      if (vars[i].name != "ret")
        src << "    " << typeName(vars[i].type) << " " << vars[i].name << ";\n";
    src << body.str();
    int rv = pickVarOf(vars, m.retType, true);
    if (rv >= 0 && vars[rv].name != "ret")
      src << "    ret = " << vars[rv].name << ";\n";
    else
      src << "    ret = new " << typeName(m.retType) << ";\n";
    src << "    return ret;\n  }\n";
  }

  void emitBody(std::ostringstream& src, int callerIdx, int budget,
                int indent) {
    std::vector<GVar> vars;
    std::ostringstream body;
    emitStmtsInto(body, vars, callerIdx, budget, indent);
    std::string pad(indent, ' ');
    for (const auto& v : vars)
      src << pad << typeName(v.type) << " " << v.name << ";\n";
    src << body.str();
  }

  // Appends statements, declaring fresh locals in `vars` as needed.
  // callerIdx = -1 for main; methods may only call methods with a larger
  // index, which keeps the call graph acyclic.
  void emitStmtsInto(std::ostringstream& body, std::vector<GVar>& vars,
                     int callerIdx, int budget, int indent) {
    std::string pad(indent, ' ');
    auto freshVar = [&](int type) {
      GVar v;
      v.name = "v" + std::to_string(vars.size()) + (callerIdx < 0 ? "" : "x");
      v.type = type;
      vars.push_back(v);
      return (int)vars.size() - 1;
    };
    auto ensureInited = [&](int type) {
      int i = pickVarOf(vars, type, true);
      if (i >= 0) return i;
      i = pickVarOf(vars, type, false);
      if (i < 0) i = freshVar(type);
      body << pad << vars[i].name << " = new " << typeName(type) << ";\n";
      vars[i].inited = true;
      --budgetLeft_;
      return i;
    };
    budgetLeft_ = budget;
    bool aliasEmitted = false;
    while (budgetLeft_ > 0) {
      --budgetLeft_;
      if (cfg_.aliasPairBias && callerIdx < 0 && !aliasEmitted &&
          budgetLeft_ >= 4 && sitesUsed_ + 2 <= cfg_.maxSites) {
        // k = new C; v = new T; k.m0(v); w = k.m1(v2)
        int k = ensureInited(aliasOwner_);
        int v = ensureInited(aliasValueType_);
        int w = freshVar(methods_[1].retType);
        body << pad << vars[k].name << ".m0(" << vars[v].name << ");\n";
        body << pad << vars[w].name << " = " << vars[k].name << ".m1("
             << vars[v].name << ");\n";
        vars[w].inited = true;
        sitesUsed_ += 2;
        aliasEmitted = true;
        continue;
      }
      switch (rng_() % 6) {
        case 0: {  // alloc
          int t = pickType();
          int i = pickVarOf(vars, t, false);
          if (i < 0 || chance(50)) i = freshVar(t);
          body << pad << vars[i].name << " = new " << typeName(t) << ";\n";
          vars[i].inited = true;
          break;
        }
        case 1: {  // assign
          int t = pickType();
          int y = pickVarOf(vars, t, true);
          if (y < 0) break;
          int x = pickVarOf(vars, t, false);
          if (x < 0 || x == y) x = freshVar(t);
          body << pad << vars[x].name << " = " << vars[y].name << ";\n";
          vars[x].inited = true;
          break;
        }
        case 2: {  // write
          if (fields_.empty()) break;
          int f = (int)(rng_() % fields_.size());
          int recv = pickVarOf(vars, fields_[f].owner, true);
          int val = pickVarOf(vars, fields_[f].type, true);
          if (recv < 0 || val < 0) break;
          body << pad << vars[recv].name << "." << fields_[f].name << " = "
               << vars[val].name << ";\n";
          break;
        }
        case 3: {  // write-then-read pair; keeps read results non-null
          if (fields_.empty() || budgetLeft_ < 1) break;
          int f = (int)(rng_() % fields_.size());
          int recv = pickVarOf(vars, fields_[f].owner, true);
          int val = pickVarOf(vars, fields_[f].type, true);
          if (recv < 0 || val < 0) break;
          int x = pickVarOf(vars, fields_[f].type, false);
          if (x < 0 || x == val) x = freshVar(fields_[f].type);
          body << pad << vars[recv].name << "." << fields_[f].name << " = "
               << vars[val].name << ";\n";
          body << pad << vars[x].name << " = " << vars[recv].name << "."
               << fields_[f].name << ";\n";
          vars[x].inited = true;
          --budgetLeft_;
          break;
        }
        case 4: {  // call
          if (methods_.empty() || sitesUsed_ >= cfg_.maxSites) break;
          std::vector<int> callable;
          for (size_t i = 0; i < methods_.size(); ++i) {
            // The alias pair is driven only by the scripted main block; a
            // stray get call could return a never-written (null) field.
            if (cfg_.aliasPairBias && i < 2) continue;
            if (callerIdx < 0 || (int)i > callerIdx) callable.push_back((int)i);
          }
          if (callable.empty()) break;
          int mi = callable[rng_() % callable.size()];
          const GMethod& m = methods_[mi];
          int recv = pickVarOf(vars, m.owner, true);
          int arg = pickVarOf(vars, m.paramType, true);
          if (recv < 0 || arg < 0) break;
          int x = pickVarOf(vars, m.retType, false);
          if (x < 0) x = freshVar(m.retType);
          body << pad << vars[x].name << " = " << vars[recv].name << "."
               << m.name << "(" << vars[arg].name << ");\n";
          vars[x].inited = true;
          ++sitesUsed_;
          break;
        }
        case 5: {  // branch around two assigns
          if (budgetLeft_ < 2) break;
          int t = pickType();
          int y = pickVarOf(vars, t, true);
          int z = pickVarOf(vars, t, true);
          if (y < 0 || z < 0) break;
          int x = pickVarOf(vars, t, false);
          if (x < 0) x = freshVar(t);
          body << pad << "if (*) {\n"
               << pad << "  " << vars[x].name << " = " << vars[y].name << ";\n"
               << pad << "} else {\n"
               << pad << "  " << vars[x].name << " = " << vars[z].name << ";\n"
               << pad << "}\n";
          vars[x].inited = true;
          --budgetLeft_;
          break;
        }
      }
    }
  }

  GenConfig cfg_;
  std::mt19937_64 rng_;
  int nClasses_ = 1;
  std::vector<int> supers_;
  std::vector<GField> fields_;
  std::vector<GMethod> methods_;
  int sitesUsed_ = 0;
  int budgetLeft_ = 0;
  int aliasOwner_ = 0;
  int aliasValueType_ = -1;
};

}  // namespace

std::string generateSource(const GenConfig& cfg) { return Gen(cfg).run(); }

}  // namespace flowcfl
