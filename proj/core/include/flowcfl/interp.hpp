#ifndef FLOWCFL_INTERP_HPP
#define FLOWCFL_INTERP_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "flowcfl/ast.hpp"

namespace flowcfl {

using FrameUid = int32_t;  // 0 is the entry frame
using CtxId = int32_t;
using ObjId = int32_t;
inline constexpr ObjId kNullObj = -1;

// Interned stack contexts. Context 0 is <main>.
struct ContextTable {
  std::vector<std::vector<FrameUid>> frames;
  std::map<std::vector<FrameUid>, CtxId> ids;
  std::vector<SiteId> frameSite;  // per FrameUid; kNoId for the entry frame
  std::vector<VarId> frameLhs;    // LHS of the creating call; kNoId when absent

  ContextTable();
  CtxId intern(const std::vector<FrameUid>& fs);
  FrameUid freshFrame(SiteId site, VarId lhs);
  CtxId push(CtxId ctx, FrameUid f);
  CtxId pop(CtxId ctx);
};

struct CtxVar {
  VarId var;
  CtxId ctx;
  auto operator<=>(const CtxVar&) const = default;
};

struct ObjSlot {
  ObjId obj;
  FieldId field;
  auto operator<=>(const ObjSlot&) const = default;
};

using ChainTarget = std::variant<CtxVar, ObjSlot>;

struct ObjInfo {
  VarId creatorVar;  // w in w = new C
  CtxId creatorCtx;  // B, the creation context
  ClassId klass;
};

// The runtime triple (C, S, H). Values of the chain map contain only
// context-tagged variables, never slots.
struct ChainState {
  std::map<ChainTarget, std::set<CtxVar>> chains;
  std::map<CtxVar, ObjId> stack;
  std::map<ObjSlot, ObjId> heap;

  const std::set<CtxVar>& chainsOf(const ChainTarget& t) const;
  ObjId valueOf(const CtxVar& v) const;  // kNullObj when unbound
};

// Difference of two stack contexts: (A - D, B - D) with D the longest
// common prefix. Components are in stack order (bottom to top).
struct ContextDelta {
  std::vector<FrameUid> ret;
  std::vector<FrameUid> call;
  bool operator==(const ContextDelta&) const = default;
};

// alpha(Delta A B): unmatched returns in pop order (innermost first),
// unmatched calls in push order. ")6 (7" is {rets={6}, calls={7}}.
struct AbstractDelta {
  std::vector<SiteId> rets;
  std::vector<SiteId> calls;
  bool operator==(const AbstractDelta&) const = default;
};

ContextDelta ctxDiff(const ContextTable& t, CtxId a, CtxId b);
AbstractDelta abstractDelta(const ContextTable& t, const ContextDelta& d);
std::string deltaString(const AbstractDelta& d);
// Concatenation; nullopt when the deltas describe incompatible contexts.
std::optional<AbstractDelta> deltaConcat(const AbstractDelta& d1,
                                         const AbstractDelta& d2);
// alpha(Delta B A) from alpha(Delta A B).
AbstractDelta inverseDelta(const AbstractDelta& d);

struct TraceStep {
  Stmt::Kind kind;
  SrcLoc loc;
  CtxId ctx;
  bool isReturn = false;  // RET transition of the call at loc
};

struct RunResult {
  ChainState state;
  ContextTable ctxs;
  std::vector<ObjInfo> objects;
  std::vector<TraceStep> steps;
  // Union of chains over every intermediate state (targets get overwritten,
  // soundness checks quantify over all of them).
  std::set<std::pair<CtxVar, ChainTarget>> allChains;
  std::vector<std::string> warnings;
  bool budgetExhausted = false;
  bool traceError = false;
  std::string errorMessage;
};

// Called after every small step with the current state.
using StepObserver =
    std::function<void(const ChainState&, const std::vector<ObjInfo>&)>;

// Executes from the entry method, consuming one script bit per if(*)
// (false once the script is exhausted, with a warning).
RunResult runProgram(const Program& p, const std::vector<bool>& script,
                     int64_t stepBudget = 100000,
                     const StepObserver& observer = nullptr);

// Lemma: every object pointed to by a variable or heap slot has a chain
// from its creation site to that variable or slot.
bool checkChainLemma(const ChainState& st, const std::vector<ObjInfo>& objs);

}  // namespace flowcfl

#endif
