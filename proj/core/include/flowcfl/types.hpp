#ifndef FLOWCFL_TYPES_HPP
#define FLOWCFL_TYPES_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowcfl/ast.hpp"
#include "flowcfl/reim.hpp"

namespace flowcfl {

enum class Setting : uint8_t { Negative, Positive };
enum class AdapterMode : uint8_t { PerSlot, PerSite };  // FlowCFL vs FlowCFL-

// q1 <: q2 in the chain neg <: poly <: pos.
bool qualSub(Qual a, Qual b);
// pos and neg absorb, poly defers to the context.
Qual adaptQual(Qual ctx, Qual q);

// Terms: program variables, then fields, then viewpoint adapters.
struct TermTable {
  int32_t nv = 0;
  int32_t nf = 0;
  struct Adapter {
    SiteId site;
    VarId slot;  // callee this/param/ret var; kNoId for per-site adapters
  };
  std::vector<Adapter> adapters;
  std::map<std::pair<SiteId, VarId>, int32_t> adapterIndex;

  int32_t varTerm(VarId v) const { return v; }
  int32_t fieldTerm(FieldId f) const { return nv + f; }
  int32_t count() const { return nv + nf + (int32_t)adapters.size(); }
  bool isVar(int32_t t) const { return t < nv; }
  bool isField(int32_t t) const { return t >= nv && t < nv + nf; }
  bool isAdapter(int32_t t) const { return t >= nv + nf; }
  int32_t adapterTerm(SiteId site, VarId slot);
  std::string name(const Program& p, int32_t t) const;
};

struct Side {
  bool adapted = false;
  int32_t ctx = -1;  // adapter term or receiver var term
  int32_t term = -1;
  bool operator==(const Side&) const = default;
  auto operator<=>(const Side&) const = default;
};

struct Constraint {
  Side lhs, rhs;
  SrcLoc loc;
  bool derived = false;
  auto key() const { return std::pair(lhs, rhs); }
};

using QualSet = uint8_t;  // bit i set iff Qual(i) is in the set
inline QualSet qbit(Qual q) { return (QualSet)(1u << (int)q); }
inline constexpr QualSet kFullSet = 0b111;

struct TypeContradiction {
  int32_t term;
  size_t constraintIdx;  // SIZE_MAX for annotation-vs-inference conflicts
};

struct TypeResult {
  Setting setting = Setting::Negative;
  AdapterMode mode = AdapterMode::PerSlot;
  TermTable terms;
  std::vector<QualSet> sets;
  std::vector<Constraint> constraints;
  std::vector<TypeContradiction> errors;
  // Variables whose counter-propagation annotation (pos in the negative
  // setting, neg in the positive one) is compared against the inferred
  // qualifier after solving, per the overview's conflict rule.
  std::vector<int32_t> annotationChecks;

  QualSet setOf(int32_t term) const { return sets[term]; }
  Qual maxQual(int32_t term) const;  // pos > poly > neg
  Qual minQual(int32_t term) const;
  // Reported typing direction: maximal in the negative setting, minimal in
  // the positive one.
  Qual chosenQual(int32_t term) const {
    return setting == Setting::Negative ? maxQual(term) : minQual(term);
  }
  bool hasLinear(int32_t a, int32_t b) const;  // a <: b in C
  std::string describe(const Program& p, const Constraint& c) const;
};

// Statement constraints per Fig. 5 with immutability-gated inverses; no
// solving.
std::vector<Constraint> genConstraints(const Program& p, const ImmResult& imm,
                                       AdapterMode mode, TermTable& terms);

// Full engine: generate, close (per mode) and shrink sets to fixpoint.
TypeResult runTypes(const Program& p, const ImmResult& imm, Setting setting,
                    AdapterMode mode);

// Maximal typing over variables and fields (adapters excluded).
std::map<int32_t, Qual> maximalTyping(const TypeResult& r);
// Typing in the reporting direction of the setting.
std::map<int32_t, Qual> chosenTyping(const TypeResult& r);

struct AdapterAssignment {
  std::map<int32_t, Qual> values;          // adapter term -> qualifier
  std::vector<size_t> unsatisfiable;       // constraint indices (engine bug)
};
AdapterAssignment assignAdapters(const TypeResult& r,
                                 const std::map<int32_t, Qual>& typing);

// Dumb checker: indices of constraints violated by the full assignment.
std::vector<size_t> checkTyping(const TypeResult& r,
                                const std::map<int32_t, Qual>& typing,
                                const std::map<int32_t, Qual>& adapterVals);

}  // namespace flowcfl

#endif
