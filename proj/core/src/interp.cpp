#include "flowcfl/interp.hpp"

#include <algorithm>
#include <sstream>

namespace flowcfl {

ContextTable::ContextTable() {
  frames.push_back({0});
  ids[{0}] = 0;
  frameSite.push_back(kNoId);
  frameLhs.push_back(kNoId);
}

CtxId ContextTable::intern(const std::vector<FrameUid>& fs) {
  auto it = ids.find(fs);
  if (it != ids.end()) return it->second;
  CtxId id = (CtxId)frames.size();
  frames.push_back(fs);
  ids[fs] = id;
  return id;
}

FrameUid ContextTable::freshFrame(SiteId site, VarId lhs) {
  FrameUid f = (FrameUid)frameSite.size();
  frameSite.push_back(site);
  frameLhs.push_back(lhs);
  return f;
}

CtxId ContextTable::push(CtxId ctx, FrameUid f) {
  std::vector<FrameUid> fs = frames[ctx];
  fs.push_back(f);
  return intern(fs);
}

CtxId ContextTable::pop(CtxId ctx) {
  std::vector<FrameUid> fs = frames[ctx];
  fs.pop_back();
  return intern(fs);
}

const std::set<CtxVar>& ChainState::chainsOf(const ChainTarget& t) const {
  static const std::set<CtxVar> kEmpty;
  auto it = chains.find(t);
  return it == chains.end() ? kEmpty : it->second;
}

ObjId ChainState::valueOf(const CtxVar& v) const {
  auto it = stack.find(v);
  return it == stack.end() ? kNullObj : it->second;
}

ContextDelta ctxDiff(const ContextTable& t, CtxId a, CtxId b) {
  const auto& fa = t.frames[a];
  const auto& fb = t.frames[b];
  size_t d = 0;
  while (d < fa.size() && d < fb.size() && fa[d] == fb[d]) ++d;
  ContextDelta out;
  out.ret.assign(fa.begin() + d, fa.end());
  out.call.assign(fb.begin() + d, fb.end());
  return out;
}

AbstractDelta abstractDelta(const ContextTable& t, const ContextDelta& d) {
  AbstractDelta out;
  for (auto it = d.ret.rbegin(); it != d.ret.rend(); ++it)
    out.rets.push_back(t.frameSite[*it]);
  for (FrameUid f : d.call) out.calls.push_back(t.frameSite[f]);
  return out;
}

std::string deltaString(const AbstractDelta& d) {
  std::ostringstream os;
  bool first = true;
  for (SiteId s : d.rets) {
    os << (first ? "" : " ") << ")" << s;
    first = false;
  }
  for (SiteId s : d.calls) {
    os << (first ? "" : " ") << "(" << s;
    first = false;
  }
  return os.str();
}

std::optional<AbstractDelta> deltaConcat(const AbstractDelta& d1,
                                         const AbstractDelta& d2) {
  const auto& c1 = d1.calls;  // push order
  const auto& r2 = d2.rets;   // pop order
  // ret2 cancels against the top of call1: pops in r2 must mirror the tail
  // of c1.
  auto mirrors = [&](size_t n) {
    for (size_t i = 0; i < n; ++i)
      if (r2[i] != c1[c1.size() - 1 - i]) return false;
    return true;
  };
  if (r2.size() <= c1.size() && mirrors(r2.size())) {
    AbstractDelta out;
    out.rets = d1.rets;
    out.calls.assign(c1.begin(), c1.end() - (ptrdiff_t)r2.size());
    out.calls.insert(out.calls.end(), d2.calls.begin(), d2.calls.end());
    return out;
  }
  if (c1.size() <= r2.size() && mirrors(c1.size())) {
    AbstractDelta out;
    out.rets = d1.rets;
    out.rets.insert(out.rets.end(), r2.begin() + (ptrdiff_t)c1.size(),
                    r2.end());
    out.calls = d2.calls;
    return out;
  }
  return std::nullopt;
}

AbstractDelta inverseDelta(const AbstractDelta& d) {
  AbstractDelta out;
  out.rets.assign(d.calls.rbegin(), d.calls.rend());
  out.calls.assign(d.rets.rbegin(), d.rets.rend());
  return out;
}

bool checkChainLemma(const ChainState& st, const std::vector<ObjInfo>& objs) {
  auto witnessed = [&](const ChainTarget& t, ObjId o) {
    if (o == kNullObj) return true;
    CtxVar creator{objs[o].creatorVar, objs[o].creatorCtx};
    return st.chainsOf(t).count(creator) > 0;
  };
  for (auto& [v, o] : st.stack)
    if (!witnessed(ChainTarget{v}, o)) return false;
  for (auto& [slot, o] : st.heap)
    if (!witnessed(ChainTarget{slot}, o)) return false;
  return true;
}

namespace {

struct Cursor {
  const std::vector<Stmt>* seq;
  size_t idx = 0;
};

struct Frame {
  MethodId method;
  CtxId ctx;
  std::vector<Cursor> cursors;
  const Stmt* callStmt = nullptr;  // the call that created this frame
  CtxId callerCtx = kNoId;
};

class Machine {
 public:
  Machine(const Program& p, const std::vector<bool>& script, int64_t budget,
          const StepObserver& observer)
      : p_(p), script_(script), budget_(budget), observer_(observer) {}

  RunResult run() {
    Frame entry;
    entry.method = p_.entry;
    entry.ctx = 0;
    entry.cursors.push_back({&p_.methods[p_.entry].body});
    stack_.push_back(entry);
    while (!stack_.empty() && !r_.traceError) {
      if (steps_ >= budget_) {
        r_.budgetExhausted = true;
        break;
      }
      tick();
    }
    return std::move(r_);
  }

 private:
  void tick() {
    Frame& fr = stack_.back();
    while (!fr.cursors.empty() &&
           fr.cursors.back().idx >= fr.cursors.back().seq->size())
      fr.cursors.pop_back();
    if (fr.cursors.empty()) {
      doReturn();
      return;
    }
    const Stmt& s = (*fr.cursors.back().seq)[fr.cursors.back().idx++];
    exec(s, fr.ctx);
  }

  void record(const Stmt& s, CtxId ctx, bool isRet = false) {
    ++steps_;
    r_.steps.push_back({s.kind, s.loc, ctx, isRet});
    if (observer_) observer_(r_.state, r_.objects);
  }

  void setChains(const ChainTarget& t, std::set<CtxVar> srcs) {
    for (const CtxVar& src : srcs) r_.allChains.insert({src, t});
    r_.state.chains[t] = std::move(srcs);
  }

  std::set<CtxVar> sourcesThrough(const CtxVar& y) {
    std::set<CtxVar> srcs = r_.state.chainsOf(ChainTarget{y});
    srcs.insert(y);
    return srcs;
  }

  ObjId readVar(const CtxVar& v, SrcLoc loc) {
    auto it = r_.state.stack.find(v);
    if (it == r_.state.stack.end()) {
      warn(loc, "use of uninitialized variable " + p_.varName(v.var));
      return kNullObj;
    }
    return it->second;
  }

  void warn(SrcLoc loc, const std::string& msg) {
    std::ostringstream os;
    os << loc.line << ":" << loc.col << ": " << msg;
    r_.warnings.push_back(os.str());
  }

  void fail(SrcLoc loc, const std::string& msg) {
    std::ostringstream os;
    os << loc.line << ":" << loc.col << ": " << msg;
    r_.traceError = true;
    r_.errorMessage = os.str();
  }

  void exec(const Stmt& s, CtxId A) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        CtxVar x{s.lhs, A}, y{s.rhs, A};
        setChains(ChainTarget{x}, sourcesThrough(y));
        r_.state.stack[x] = readVar(y, s.loc);
        record(s, A);
        break;
      }
      case Stmt::Kind::Alloc: {
        CtxVar x{s.lhs, A};
        ObjId o = (ObjId)r_.objects.size();
        r_.objects.push_back({s.lhs, A, s.klass});
        setChains(ChainTarget{x}, {x});
        r_.state.stack[x] = o;
        for (ClassId c = s.klass; c != kNoId; c = p_.classes[c].super)
          for (FieldId f : p_.classes[c].fields)
            r_.state.heap[ObjSlot{o, f}] = kNullObj;
        record(s, A);
        break;
      }
      case Stmt::Kind::Write: {
        CtxVar x{s.recv, A}, y{s.rhs, A};
        ObjId o = readVar(x, s.loc);
        if (o == kNullObj) {
          fail(s.loc, "field write through null receiver");
          return;
        }
        ObjSlot slot{o, s.field};
        setChains(ChainTarget{slot}, sourcesThrough(y));
        r_.state.heap[slot] = readVar(y, s.loc);
        record(s, A);
        break;
      }
      case Stmt::Kind::Read: {
        CtxVar x{s.recv, A}, y{s.lhs, A};
        ObjId o = readVar(x, s.loc);
        if (o == kNullObj) {
          fail(s.loc, "field read through null receiver");
          return;
        }
        ObjSlot slot{o, s.field};
        if (!r_.state.chains.count(ChainTarget{slot}))
          warn(s.loc, "read of never-written field " + p_.fieldName(s.field));
        setChains(ChainTarget{y}, r_.state.chainsOf(ChainTarget{slot}));
        auto hv = r_.state.heap.find(slot);
        r_.state.stack[y] = hv == r_.state.heap.end() ? kNullObj : hv->second;
        record(s, A);
        break;
      }
      case Stmt::Kind::Branch: {
        bool taken = false;
        if (scriptPos_ < script_.size()) {
          taken = script_[scriptPos_++];
        } else {
          if (!scriptWarned_) {
            warn(s.loc, "branch script exhausted, taking else");
            scriptWarned_ = true;
          }
        }
        record(s, A);
        const std::vector<Stmt>& arm = taken ? s.thenBody : s.elseBody;
        stack_.back().cursors.push_back({&arm});
        break;
      }
      case Stmt::Kind::Call: {
        const CallSite& cs = p_.callSites.at(s.site);
        if (cs.callee == kNoId) {
          fail(s.loc, "call site not resolved");
          return;
        }
        CtxVar y{s.recv, A};
        ObjId recvObj = readVar(y, s.loc);
        if (recvObj == kNullObj) {
          fail(s.loc, "call through null receiver");
          return;
        }
        const MethodDecl& callee = p_.methods[cs.callee];
        FrameUid f = r_.ctxs.freshFrame(s.site, s.lhs);
        CtxId B = r_.ctxs.push(A, f);
        CtxVar thisv{callee.thisVar, B};
        setChains(ChainTarget{thisv}, sourcesThrough(y));
        r_.state.stack[thisv] = recvObj;
        for (size_t i = 0; i < callee.params.size() && i < s.args.size(); ++i) {
          CtxVar param{callee.params[i], B}, arg{s.args[i], A};
          setChains(ChainTarget{param}, sourcesThrough(arg));
          r_.state.stack[param] = readVar(arg, s.loc);
        }
        record(s, A);
        Frame nf;
        nf.method = cs.callee;
        nf.ctx = B;
        nf.cursors.push_back({&callee.body});
        nf.callStmt = &s;
        nf.callerCtx = A;
        stack_.push_back(nf);
        break;
      }
    }
  }

  void doReturn() {
    Frame fr = stack_.back();
    stack_.pop_back();
    if (fr.callStmt == nullptr) return;  // entry method finished
    const Stmt& call = *fr.callStmt;
    const MethodDecl& callee = p_.methods[fr.method];
    if (call.lhs != kNoId && callee.retVar != kNoId) {
      CtxVar ret{callee.retVar, fr.ctx};
      CtxVar x{call.lhs, fr.callerCtx};
      setChains(ChainTarget{x}, sourcesThrough(ret));
      r_.state.stack[x] = readVar(ret, call.loc);
    }
    record(call, fr.ctx, /*isRet=*/true);
  }

  const Program& p_;
  const std::vector<bool>& script_;
  int64_t budget_;
  const StepObserver& observer_;
  RunResult r_;
  std::vector<Frame> stack_;
  int64_t steps_ = 0;
  size_t scriptPos_ = 0;
  bool scriptWarned_ = false;
};

}  // namespace

RunResult runProgram(const Program& p, const std::vector<bool>& script,
                     int64_t stepBudget, const StepObserver& observer) {
  Machine m(p, script, stepBudget, observer);
  return m.run();
}

}  // namespace flowcfl
