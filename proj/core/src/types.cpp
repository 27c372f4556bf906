#include "flowcfl/types.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace flowcfl {

bool qualSub(Qual a, Qual b) { return (int)a <= (int)b; }

Qual adaptQual(Qual ctx, Qual q) {
  if (q == Qual::Pos || q == Qual::Neg) return q;
  return ctx;
}

int32_t TermTable::adapterTerm(SiteId site, VarId slot) {
  auto key = std::make_pair(site, slot);
  auto it = adapterIndex.find(key);
  if (it != adapterIndex.end()) return it->second;
  int32_t t = count();
  adapters.push_back({site, slot});
  adapterIndex[key] = t;
  return t;
}

std::string TermTable::name(const Program& p, int32_t t) const {
  if (isVar(t)) return p.varName(t);
  if (isField(t)) return p.fieldName(t - nv);
  const Adapter& a = adapters[t - nv - nf];
  std::string slot =
      a.slot == kNoId ? std::string() : "_" + p.vars[a.slot].name;
  return "q" + std::to_string(a.site) + slot;
}

Qual TypeResult::maxQual(int32_t term) const {
  QualSet s = sets[term];
  for (Qual q : {Qual::Pos, Qual::Poly, Qual::Neg})
    if (s & qbit(q)) return q;
  return Qual::Pos;  // unreachable for nonempty sets
}

Qual TypeResult::minQual(int32_t term) const {
  QualSet s = sets[term];
  for (Qual q : {Qual::Neg, Qual::Poly, Qual::Pos})
    if (s & qbit(q)) return q;
  return Qual::Neg;
}

bool TypeResult::hasLinear(int32_t a, int32_t b) const {
  for (const auto& c : constraints)
    if (!c.lhs.adapted && !c.rhs.adapted && c.lhs.term == a && c.rhs.term == b)
      return true;
  return false;
}

std::string TypeResult::describe(const Program& p, const Constraint& c) const {
  auto side = [&](const Side& s) {
    if (!s.adapted) return terms.name(p, s.term);
    return terms.name(p, s.ctx) + " |> " + terms.name(p, s.term);
  };
  return side(c.lhs) + " <: " + side(c.rhs);
}

namespace {

Side plain(int32_t term) { return {false, -1, term}; }
Side adapted(int32_t ctx, int32_t term) { return {true, ctx, term}; }

class Gen {
 public:
  Gen(const Program& p, const ImmResult& imm, AdapterMode mode, TermTable& t)
      : p_(p), imm_(imm), mode_(mode), t_(t) {}

  std::vector<Constraint> run() {
    t_.nv = (int32_t)p_.vars.size();
    t_.nf = (int32_t)p_.fields.size();
    forEachStmt(p_, [&](const Stmt& s) { visit(s); });
    return std::move(out_);
  }

 private:
  void add(Side lhs, Side rhs, SrcLoc loc) {
    out_.push_back({lhs, rhs, loc, false});
  }

  int32_t adapter(SiteId site, VarId slot) {
    return t_.adapterTerm(site, mode_ == AdapterMode::PerSlot ? slot : kNoId);
  }

  bool slotInverseWanted(VarId lhs, VarId slot) const {
    ImmQual ctx = lhs == kNoId ? ImmQual::Readonly : imm_.varQual[lhs];
    return adaptRi(ctx, imm_.varQual[slot]) != ImmQual::Readonly;
  }

  void visit(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        add(plain(s.rhs), plain(s.lhs), s.loc);
        if (imm_.varQual[s.lhs] != ImmQual::Readonly)
          add(plain(s.lhs), plain(s.rhs), s.loc);
        break;
      case Stmt::Kind::Write: {
        Side xf = adapted(t_.varTerm(s.recv), t_.fieldTerm(s.field));
        add(plain(s.rhs), xf, s.loc);
        if (imm_.fieldQual[s.field] != ImmQual::Readonly)
          add(xf, plain(s.rhs), s.loc);
        break;
      }
      case Stmt::Kind::Read: {
        Side yf = adapted(t_.varTerm(s.recv), t_.fieldTerm(s.field));
        add(yf, plain(s.lhs), s.loc);
        if (imm_.varQual[s.lhs] != ImmQual::Readonly)
          add(plain(s.lhs), yf, s.loc);
        break;
      }
      case Stmt::Kind::Call: {
        const CallSite& cs = p_.callSites.at(s.site);
        if (cs.callee == kNoId) break;
        const MethodDecl& m = p_.methods[cs.callee];
        Side thisSide = adapted(adapter(s.site, m.thisVar), m.thisVar);
        add(plain(s.recv), thisSide, s.loc);
        if (slotInverseWanted(s.lhs, m.thisVar))
          add(thisSide, plain(s.recv), s.loc);
        for (size_t i = 0; i < s.args.size() && i < m.params.size(); ++i) {
          Side pSide = adapted(adapter(s.site, m.params[i]), m.params[i]);
          add(plain(s.args[i]), pSide, s.loc);
          if (slotInverseWanted(s.lhs, m.params[i]))
            add(pSide, plain(s.args[i]), s.loc);
        }
        if (s.lhs != kNoId && m.retVar != kNoId) {
          Side retSide = adapted(adapter(s.site, m.retVar), m.retVar);
          add(retSide, plain(s.lhs), s.loc);
          if (slotInverseWanted(s.lhs, m.retVar))
            add(plain(s.lhs), retSide, s.loc);
        }
        break;
      }
      default:
        break;
    }
  }

  const Program& p_;
  const ImmResult& imm_;
  AdapterMode mode_;
  TermTable& t_;
  std::vector<Constraint> out_;
};

class Solver {
 public:
  Solver(const Program& p, TypeResult& r) : p_(p), r_(r) {}

  void run() {
    initSets();
    for (auto& c : r_.constraints) seen_.insert(c.key());
    size_t nTerms = r_.terms.count();
    linearOut_.assign(nTerms, {});
    linearIn_.assign(nTerms, {});
    // Register pre-existing linear statement constraints for closure.
    size_t n0 = r_.constraints.size();
    for (size_t i = 0; i < n0; ++i) {
      const Constraint& c = r_.constraints[i];
      if (!c.lhs.adapted && !c.rhs.adapted) noteLinear(c.lhs.term, c.rhs.term);
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < r_.constraints.size(); ++i)
        changed |= solveArc(i);
      changed |= closureSweep();
    }
  }

 private:
  void initSets() {
    size_t n = r_.terms.count();
    r_.sets.assign(n, kFullSet);
    QualSet fieldInit = r_.setting == Setting::Negative
                            ? (QualSet)(qbit(Qual::Pos) | qbit(Qual::Poly))
                            : (QualSet)(qbit(Qual::Poly) | qbit(Qual::Neg));
    for (int32_t f = 0; f < r_.terms.nf; ++f)
      r_.sets[r_.terms.fieldTerm(f)] = fieldInit;
    // Pins against the propagation direction are checked after solving
    // ("annotated pos but inferred neg" is the reported conflict); pinning
    // them up front would clamp-poison every set downstream of the seed.
    Qual counterPin =
        r_.setting == Setting::Negative ? Qual::Pos : Qual::Neg;
    for (size_t v = 0; v < p_.vars.size(); ++v) {
      if (!p_.vars[v].pinned) continue;
      if (*p_.vars[v].pinned == counterPin)
        r_.annotationChecks.push_back((int32_t)v);
      else
        r_.sets[v] = qbit(*p_.vars[v].pinned);
    }
    for (size_t f = 0; f < p_.fields.size(); ++f)
      if (p_.fields[f].pinned) {
        QualSet pin = qbit(*p_.fields[f].pinned);
        QualSet joint = pin & fieldInit;
        if (joint == 0) {
          r_.errors.push_back({r_.terms.fieldTerm((FieldId)f), SIZE_MAX});
          joint = fieldInit;
        }
        r_.sets[r_.terms.fieldTerm((FieldId)f)] = joint;
      }
  }

  std::vector<int32_t> participants(const Constraint& c) const {
    std::vector<int32_t> ts;
    auto push = [&](int32_t t) {
      if (t >= 0 && !std::count(ts.begin(), ts.end(), t)) ts.push_back(t);
    };
    if (c.lhs.adapted) push(c.lhs.ctx);
    push(c.lhs.term);
    if (c.rhs.adapted) push(c.rhs.ctx);
    push(c.rhs.term);
    return ts;
  }

  static Qual evalSide(const Side& s,
                       const std::vector<std::pair<int32_t, Qual>>& env) {
    auto val = [&](int32_t t) {
      for (auto& [k, v] : env)
        if (k == t) return v;
      return Qual::Pos;  // unreachable; participants cover all terms
    };
    if (!s.adapted) return val(s.term);
    return adaptQual(val(s.ctx), val(s.term));
  }

  // Arc consistency: drop qualifiers with no supporting assignment of the
  // other participants. A term that would empty keeps its set and the
  // conflict is recorded.
  bool solveArc(size_t ci) {
    const Constraint& c = r_.constraints[ci];
    std::vector<int32_t> ts = participants(c);
    bool changed = false;
    for (size_t pi = 0; pi < ts.size(); ++pi) {
      int32_t t = ts[pi];
      QualSet keep = 0;
      for (Qual q : {Qual::Neg, Qual::Poly, Qual::Pos}) {
        if (!(r_.sets[t] & qbit(q))) continue;
        if (supported(c, ts, pi, q)) keep |= qbit(q);
      }
      if (keep == r_.sets[t]) continue;
      if (keep == 0) {
        if (!recorded_.count({t, ci})) {
          recorded_.insert({t, ci});
          r_.errors.push_back({t, ci});
        }
        continue;  // clamp: keep the pinned/current set
      }
      r_.sets[t] = keep;
      changed = true;
    }
    return changed;
  }

  bool supported(const Constraint& c, const std::vector<int32_t>& ts,
                 size_t fixedIdx, Qual fixedVal) const {
    std::vector<std::pair<int32_t, Qual>> env(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) env[i].first = ts[i];
    std::function<bool(size_t)> go = [&](size_t i) -> bool {
      if (i == ts.size())
        return qualSub(evalSide(c.lhs, env), evalSide(c.rhs, env));
      if (i == fixedIdx) {
        env[i].second = fixedVal;
        return go(i + 1);
      }
      for (Qual q : {Qual::Neg, Qual::Poly, Qual::Pos}) {
        if (!(r_.sets[ts[i]] & qbit(q))) continue;
        env[i].second = q;
        if (go(i + 1)) return true;
      }
      return false;
    };
    return go(0);
  }

  void noteLinear(int32_t a, int32_t b) {
    linearOut_[a].insert(b);
    linearIn_[b].insert(a);
  }

  bool addDerived(Side lhs, Side rhs, SrcLoc loc) {
    Constraint c{lhs, rhs, loc, true};
    if (!seen_.insert(c.key()).second) return false;
    r_.constraints.push_back(c);
    if (!lhs.adapted && !rhs.adapted) noteLinear(lhs.term, rhs.term);
    return true;
  }

  // Whether an adapted side is ripe for linearization.
  bool projectable(const Side& s) const {
    if (!s.adapted) return false;
    QualSet set = r_.sets[s.term];
    if (r_.mode == AdapterMode::PerSlot) {
      // erase-left/right: only fields, only once sigma(f) = {poly}.
      return r_.terms.isField(s.term) && set == qbit(Qual::Poly);
    }
    // FlowCFL-: once the adaptee can no longer take the setting's top
    // qualifier, couple through the shared context.
    Qual top = r_.setting == Setting::Negative ? Qual::Pos : Qual::Neg;
    return (set & qbit(top)) == 0;
  }

  bool closureSweep() {
    bool changed = false;
    size_t n = r_.constraints.size();
    for (size_t i = 0; i < n; ++i) {
      Constraint c = r_.constraints[i];
      if (projectable(c.lhs))
        changed |= addDerived(plain(c.lhs.ctx), c.rhs, c.loc);
      if (projectable(c.rhs))
        changed |= addDerived(c.lhs, plain(c.rhs.ctx), c.loc);
    }
    if (r_.mode == AdapterMode::PerSite) return changed;
    changed |= transLocal();
    changed |= transCall();
    return changed;
  }

  bool transLocal() {
    bool changed = false;
    bool more = true;
    while (more) {
      more = false;
      size_t n = r_.constraints.size();
      for (size_t i = 0; i < n; ++i) {
        Constraint c = r_.constraints[i];
        if (c.lhs.adapted || c.rhs.adapted) continue;
        // compose with successors of rhs
        auto outs = linearOut_[c.rhs.term];
        for (int32_t z : outs)
          if (addDerived(plain(c.lhs.term), plain(z), c.loc)) more = true;
      }
      changed |= more;
    }
    return changed;
  }

  // trans-call: z <: q^i_s1 |> s1,  s1 <: s2 (or s1 == s2),  q^i_s2 |> s2 <: w
  // gives z <: w. Slots may be any of this/params/ret of the site.
  bool transCall() {
    bool changed = false;
    struct In {
      int32_t z, slot;
      SiteId site;
      SrcLoc loc;
    };
    struct Out {
      int32_t slot, w;
      SiteId site;
    };
    std::vector<In> ins;
    std::vector<Out> outs;
    for (const auto& c : r_.constraints) {
      if (!c.lhs.adapted && c.rhs.adapted && r_.terms.isAdapter(c.rhs.ctx)) {
        SiteId site = r_.terms.adapters[c.rhs.ctx - r_.terms.nv - r_.terms.nf].site;
        ins.push_back({c.lhs.term, c.rhs.term, site, c.loc});
      }
      if (c.lhs.adapted && !c.rhs.adapted && r_.terms.isAdapter(c.lhs.ctx)) {
        SiteId site = r_.terms.adapters[c.lhs.ctx - r_.terms.nv - r_.terms.nf].site;
        outs.push_back({c.lhs.term, c.rhs.term, site});
      }
    }
    for (const In& in : ins)
      for (const Out& out : outs) {
        if (in.site != out.site) continue;
        bool linked = in.slot == out.slot ||
                      linearOut_[in.slot].count(out.slot) > 0;
        if (!linked) continue;
        changed |= addDerived(plain(in.z), plain(out.w), in.loc);
      }
    return changed;
  }

  const Program& p_;
  TypeResult& r_;
  std::set<std::pair<Side, Side>> seen_;
  std::set<std::pair<int32_t, size_t>> recorded_;
  std::vector<std::set<int32_t>> linearOut_, linearIn_;
};

}  // namespace

std::vector<Constraint> genConstraints(const Program& p, const ImmResult& imm,
                                       AdapterMode mode, TermTable& terms) {
  Gen g(p, imm, mode, terms);
  return g.run();
}

TypeResult runTypes(const Program& p, const ImmResult& imm, Setting setting,
                    AdapterMode mode) {
  TypeResult r;
  r.setting = setting;
  r.mode = mode;
  r.constraints = genConstraints(p, imm, mode, r.terms);
  Solver s(p, r);
  s.run();
  Qual opposite = setting == Setting::Negative ? Qual::Neg : Qual::Pos;
  for (int32_t v : r.annotationChecks)
    if (r.chosenQual(v) == opposite) r.errors.push_back({v, SIZE_MAX});
  return r;
}

std::map<int32_t, Qual> maximalTyping(const TypeResult& r) {
  std::map<int32_t, Qual> out;
  for (int32_t t = 0; t < r.terms.nv + r.terms.nf; ++t)
    out[t] = r.maxQual(t);
  return out;
}

std::map<int32_t, Qual> chosenTyping(const TypeResult& r) {
  std::map<int32_t, Qual> out;
  for (int32_t t = 0; t < r.terms.nv + r.terms.nf; ++t)
    out[t] = r.chosenQual(t);
  return out;
}

namespace {

bool holdsWith(const Constraint& c,
               const std::function<Qual(int32_t)>& val) {
  auto eval = [&](const Side& s) {
    if (!s.adapted) return val(s.term);
    return adaptQual(val(s.ctx), val(s.term));
  };
  return qualSub(eval(c.lhs), eval(c.rhs));
}

}  // namespace

AdapterAssignment assignAdapters(const TypeResult& r,
                                 const std::map<int32_t, Qual>& typing) {
  AdapterAssignment out;
  int32_t base = r.terms.nv + r.terms.nf;
  for (size_t ai = 0; ai < r.terms.adapters.size(); ++ai) {
    int32_t a = base + (int32_t)ai;
    auto typed = [&](int32_t t) -> Qual {
      auto it = typing.find(t);
      if (it != typing.end()) return it->second;
      return r.chosenQual(t);
    };
    // Preferred value: the adapter interprets its poly slot as the flow at
    // this site does - bounded above by targets of q |> s <: w, otherwise
    // from below by sources of y <: q |> s, otherwise unconstrained (pos).
    std::optional<Qual> upper, lower;
    for (const auto& c : r.constraints) {
      if (c.lhs.adapted && c.lhs.ctx == a && !c.rhs.adapted) {
        Qual w = typed(c.rhs.term);
        upper = upper && qualSub(*upper, w) ? *upper : w;
      }
      if (c.rhs.adapted && c.rhs.ctx == a && !c.lhs.adapted) {
        Qual y = typed(c.lhs.term);
        lower = lower && qualSub(y, *lower) ? *lower : y;
      }
    }
    Qual preferred = upper ? *upper : (lower ? *lower : Qual::Pos);

    auto satisfies = [&](Qual q) {
      for (const auto& c : r.constraints) {
        bool involves = (c.lhs.adapted && c.lhs.ctx == a) ||
                        (c.rhs.adapted && c.rhs.ctx == a) ||
                        (!c.lhs.adapted && c.lhs.term == a) ||
                        (!c.rhs.adapted && c.rhs.term == a);
        if (!involves) continue;
        auto val = [&](int32_t t) { return t == a ? q : typed(t); };
        if (!holdsWith(c, val)) return false;
      }
      return true;
    };

    Qual chosenVal = preferred;
    bool ok = satisfies(preferred);
    if (!ok)
      for (Qual q : {Qual::Pos, Qual::Poly, Qual::Neg})
        if (satisfies(q)) {
          chosenVal = q;
          ok = true;
          break;
        }
    out.values[a] = chosenVal;
    if (!ok) {
      for (size_t ci = 0; ci < r.constraints.size(); ++ci) {
        const auto& c = r.constraints[ci];
        bool involves = (c.lhs.adapted && c.lhs.ctx == a) ||
                        (c.rhs.adapted && c.rhs.ctx == a);
        if (involves) out.unsatisfiable.push_back(ci);
      }
    }
  }
  return out;
}

std::vector<size_t> checkTyping(const TypeResult& r,
                                const std::map<int32_t, Qual>& typing,
                                const std::map<int32_t, Qual>& adapterVals) {
  std::vector<size_t> bad;
  auto val = [&](int32_t t) -> Qual {
    auto it = typing.find(t);
    if (it != typing.end()) return it->second;
    auto ia = adapterVals.find(t);
    if (ia != adapterVals.end()) return ia->second;
    return r.chosenQual(t);
  };
  for (size_t i = 0; i < r.constraints.size(); ++i)
    if (!holdsWith(r.constraints[i], val)) bad.push_back(i);
  return bad;
}

}  // namespace flowcfl
