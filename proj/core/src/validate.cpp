#include "flowcfl/validate.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <sstream>
#include <thread>

#include "flowcfl/generator.hpp"
#include "flowcfl/parser.hpp"

namespace flowcfl {

Program withSinks(const Program& p, const std::vector<VarId>& sinks) {
  Program out = p;
  for (VarId v : sinks) {
    out.vars[v].pinned = Qual::Neg;
    out.vars[v].role = Role::Sink;
  }
  return out;
}

namespace {

std::string chainName(const Program& p, const ContextTable& t,
                      const CtxVar& v) {
  std::ostringstream os;
  os << p.varName(v.var) << "^[";
  const auto& fs = t.frames[v.ctx];
  for (size_t i = 0; i < fs.size(); ++i) {
    if (i) os << ",";
    SiteId s = t.frameSite[fs[i]];
    os << (s == kNoId ? std::string("main") : std::to_string(s));
  }
  os << "]";
  return os.str();
}

}  // namespace

Theorem1Report checkTheorem1(const Program& p, const RunResult& run,
                             const FlowGraph& gri, const ImmResult& imm,
                             int bound) {
  Theorem1Report rep;
  if (run.budgetExhausted || run.traceError) {
    rep.traceExcluded = true;
    return rep;
  }
  std::set<std::pair<CtxVar, CtxVar>> seen;
  for (const auto& [src, target] : run.allChains) {
    if (std::holds_alternative<ObjSlot>(target)) {
      ++rep.slotChainsSkipped;
      continue;
    }
    CtxVar dst = std::get<CtxVar>(target);
    if (!seen.insert({src, dst}).second) continue;
    ++rep.checkedChains;
    AbstractDelta delta =
        abstractDelta(run.ctxs, ctxDiff(run.ctxs, src.ctx, dst.ctx));
    OracleQuery q;
    q.graph = &gri;
    q.src = src.var;
    q.dst = dst.var;
    q.residual = delta;
    q.pg = PgDiscipline::Balanced;
    q.bound = bound;
    OracleAnswer a = oraclePaths(q);
    std::string label = chainName(p, run.ctxs, src) + " -> " +
                        chainName(p, run.ctxs, dst) + " [" +
                        deltaString(delta) + "]";
    if (a.found) {
      ++rep.witnessed;
    } else if (a.inconclusive) {
      rep.inconclusive.push_back(label);
    } else {
      rep.failures.push_back("no path for chain " + label);
    }
    // Second clause: alpha(B) |> y mutable forces the inverse path.
    std::vector<ImmQual> ctxQuals;
    for (FrameUid f : run.ctxs.frames[dst.ctx]) {
      if (run.ctxs.frameSite[f] == kNoId) continue;  // entry frame
      VarId lhs = run.ctxs.frameLhs[f];
      ctxQuals.push_back(lhs == kNoId ? ImmQual::Readonly : imm.varQual[lhs]);
    }
    if (adaptRiSeq(ctxQuals, imm.varQual[dst.var]) == ImmQual::Mutable) {
      OracleQuery iq = q;
      iq.src = dst.var;
      iq.dst = src.var;
      iq.residual = inverseDelta(delta);
      OracleAnswer ia = oraclePaths(iq);
      if (ia.found) {
        // counted once via the forward direction
      } else if (ia.inconclusive) {
        rep.inconclusive.push_back("inverse of " + label);
      } else {
        rep.failures.push_back("no inverse path for mutable chain " + label);
      }
    }
  }
  return rep;
}

Lemma2Report checkLemma2(const RunResult& run, long maxTriples) {
  Lemma2Report rep;
  const auto& t = run.ctxs;
  size_t n = t.frames.size();
  std::mt19937_64 rng(7);
  auto checkTriple = [&](CtxId a, CtxId b, CtxId c) {
    AbstractDelta ab = abstractDelta(t, ctxDiff(t, a, b));
    AbstractDelta bc = abstractDelta(t, ctxDiff(t, b, c));
    AbstractDelta ac = abstractDelta(t, ctxDiff(t, a, c));
    ++rep.triples;
    auto got = deltaConcat(ab, bc);
    if (!got) {
      ++rep.undefined;
      ++rep.failures;  // same-trace triples always concatenate
      return;
    }
    if (!(*got == ac)) ++rep.failures;
  };
  // Contexts are interned in first-current order; flow only ever moves a
  // chain through contexts in that order (a popped frame is never current
  // again), so valid evolutions A -> B -> C are the ordered triples.
  if ((long)(n * n * n) <= maxTriples * 6) {
    for (size_t a = 0; a < n; ++a)
      for (size_t b = a; b < n; ++b)
        for (size_t c = b; c < n; ++c)
          checkTriple((CtxId)a, (CtxId)b, (CtxId)c);
  } else {
    for (long i = 0; i < maxTriples; ++i) {
      CtxId abc[3] = {(CtxId)(rng() % n), (CtxId)(rng() % n),
                      (CtxId)(rng() % n)};
      std::sort(abc, abc + 3);
      checkTriple(abc[0], abc[1], abc[2]);
    }
  }
  return rep;
}

EquivalenceReport checkEquivalence(const Program& p, const CflResult& cfl,
                                   const TypeResult& types) {
  EquivalenceReport rep;
  bool negative = types.setting == Setting::Negative;
  for (size_t v = 0; v < p.vars.size(); ++v) {
    EquivalenceEntry e;
    e.var = (VarId)v;
    e.cfl = cfl.classify((VarId)v);
    e.typeQual = negative ? types.maxQual((int32_t)v) : types.minQual((int32_t)v);
    Qual expectMC = negative ? Qual::Neg : Qual::Pos;
    Qual expectNone = negative ? Qual::Pos : Qual::Neg;
    Qual expected = e.cfl == ReachClass::MC      ? expectMC
                    : e.cfl == ReachClass::ROnly ? Qual::Poly
                                                 : expectNone;
    if (e.typeQual == expected) {
      e.verdict = Verdict::Agree;
    } else {
      // CFL finding more than types admits is a soundness gap; types
      // claiming more than CFL finds is a precision gap.
      bool typesWeaker = negative ? qualSub(expected, e.typeQual)
                                  : qualSub(e.typeQual, expected);
      e.verdict = typesWeaker ? Verdict::SoundnessViolation
                              : Verdict::PrecisionViolation;
      ++rep.violations;
    }
    rep.entries.push_back(e);
  }
  return rep;
}

PrecisionReport comparePrecision(const Program& p,
                                 const std::vector<VarId>& sinks) {
  PrecisionReport rep;
  ImmResult imm = inferImmutability(p);
  FlowGraph gbi = buildGbi(p);
  FlowGraph gri = buildGri(p, imm);
  CflResult rbi = runCfl(p, gbi, sinks);
  CflResult rri = runCfl(p, gri, sinks);
  for (size_t v = 0; v < p.vars.size(); ++v) {
    ReachClass cb = rbi.classify((VarId)v);
    ReachClass cr = rri.classify((VarId)v);
    rep.bi.push_back({(VarId)v, cb});
    rep.ri.push_back({(VarId)v, cr});
    bool reachBi = cb != ReachClass::Unreachable;
    bool reachRi = cr != ReachClass::Unreachable;
    if (reachBi && !reachRi) ++rep.extraInBi;
    if (reachRi && !reachBi) rep.riSubsetOfBi = false;
  }
  return rep;
}

AgreementReport checkCflAgreement(const Program& p, const FlowGraph& g,
                                  const CflResult& cfl, int bound) {
  AgreementReport rep;
  std::set<FieldId> F = cfl.fieldsToSinks();
  for (size_t v = 0; v < p.vars.size(); ++v) {
    for (size_t si = 0; si < cfl.sinks.size(); ++si) {
      VarId sink = cfl.sinks[si];
      auto engine = cfl.sol.classesOf((int32_t)v, (int32_t)si);
      bool engMC = engine.count(CrClass::M) || engine.count(CrClass::C);
      bool engR = engine.count(CrClass::R) > 0;
      ClassAnswer oracle =
          oracleClasses(g, (VarId)v, sink, PgDiscipline::CsfiPlus, &F, bound);
      bool orMC = oracle.classes.count(CrClass::M) ||
                  oracle.classes.count(CrClass::C);
      bool orR = oracle.classes.count(CrClass::R) > 0;
      auto name = [&](bool mc) {
        return std::string(mc ? "M/C" : "R") + " " + p.varName((VarId)v) +
               " ~> " + p.varName(sink);
      };
      for (bool mc : {true, false}) {
        bool e = mc ? engMC : engR;
        bool o = mc ? orMC : orR;
        if (e == o) continue;
        if (!e && o) {
          rep.disagreements.push_back("oracle finds missing " + name(mc));
        } else if (oracle.inconclusive) {
          ++rep.inconclusive;
        } else {
          rep.disagreements.push_back("engine claims unwitnessed " + name(mc));
        }
      }
    }
  }
  return rep;
}

AgreementReport checkRiAgreement(const Program& p, const RIGraph& g,
                                 const ImmResult& imm, int bound) {
  AgreementReport rep;
  int32_t numNodes = g.numVarNodes + (int32_t)g.slots.size();
  for (int32_t n = 0; n < numNodes; ++n) {
    const auto& engine = imm.nodeClasses[n];
    bool engMC = engine.count(CrClass::M) || engine.count(CrClass::C);
    bool engR = engine.count(CrClass::R) > 0;
    ClassAnswer oracle = oracleRiClasses(g, n, imm.updates, bound);
    bool orMC =
        oracle.classes.count(CrClass::M) || oracle.classes.count(CrClass::C);
    bool orR = oracle.classes.count(CrClass::R) > 0;
    for (bool mc : {true, false}) {
      bool e = mc ? engMC : engR;
      bool o = mc ? orMC : orR;
      if (e == o) continue;
      std::string label = std::string(mc ? "M/C" : "R") + " path from " +
                          g.nodeName(p, n);
      if (!e && o) {
        rep.disagreements.push_back("oracle finds missing " + label);
      } else if (oracle.inconclusive) {
        ++rep.inconclusive;
      } else {
        rep.disagreements.push_back("worklist claims unwitnessed " + label);
      }
    }
  }
  return rep;
}

namespace {

void runOne(int idx, const CorpusConfig& cfg, CorpusReport& rep) {
  GenConfig gc;
  gc.seed = cfg.seed + (uint64_t)idx;
  gc.aliasPairBias = idx % 10 < 3;
  std::string src = generateSource(gc);
  std::vector<Diagnostic> diags;
  Program p = loadProgram(src, diags);
  if (hasErrors(diags)) {
    rep.messages.push_back("seed " + std::to_string(gc.seed) +
                           ": generated program has errors: " +
                           diags.front().message);
    return;
  }
  ++rep.programs;

  std::mt19937_64 rng(gc.seed ^ 0x9e3779b97f4a7c15ull);
  // Pick 1-2 sink variables.
  std::vector<VarId> sinks;
  int want = 1 + (int)(rng() % 2);
  for (int i = 0; i < want && !p.vars.empty(); ++i)
    sinks.push_back((VarId)(rng() % p.vars.size()));
  std::sort(sinks.begin(), sinks.end());
  sinks.erase(std::unique(sinks.begin(), sinks.end()), sinks.end());

  Program pinned = withSinks(p, sinks);
  ImmResult imm = inferImmutability(pinned);
  for (VarId u : imm.updates)
    if (imm.varQual[u] != ImmQual::Mutable)
      rep.messages.push_back("seed " + std::to_string(gc.seed) +
                             ": update not classified mutable");
  RIGraph rig = buildRiGraph(pinned);
  FlowGraph gri = buildGri(pinned, imm);
  CflResult cfl = runCfl(pinned, gri, sinks);
  TypeResult types =
      runTypes(pinned, imm, Setting::Negative, AdapterMode::PerSlot);

  EquivalenceReport eq = checkEquivalence(pinned, cfl, types);
  if (!eq.ok()) {
    rep.equivalenceViolations += eq.violations;
    for (const auto& e : eq.entries)
      if (e.verdict != Verdict::Agree)
        rep.messages.push_back(
            "seed " + std::to_string(gc.seed) + ": equivalence " +
            pinned.varName(e.var) + " cfl=" + reachName(e.cfl) +
            " type=" + qualName(e.typeQual));
  }

  AgreementReport ca = checkCflAgreement(pinned, gri, cfl, cfg.oracleBound);
  rep.oracleInconclusive += ca.inconclusive;
  if (!ca.ok()) {
    rep.cflOracleDisagreements += (int)ca.disagreements.size();
    for (auto& d : ca.disagreements)
      rep.messages.push_back("seed " + std::to_string(gc.seed) + ": cfl " + d);
  }
  AgreementReport ra = checkRiAgreement(pinned, rig, imm, cfg.oracleBound);
  rep.oracleInconclusive += ra.inconclusive;
  if (!ra.ok()) {
    rep.riOracleDisagreements += (int)ra.disagreements.size();
    for (auto& d : ra.disagreements)
      rep.messages.push_back("seed " + std::to_string(gc.seed) + ": ri " + d);
  }

  PrecisionReport pr = comparePrecision(pinned, sinks);
  if (!pr.riSubsetOfBi) {
    ++rep.precisionViolations;
    rep.messages.push_back("seed " + std::to_string(gc.seed) +
                           ": G_RI reaches a variable G_BI does not");
  }

  // Interpreter gates: two scripted runs per program.
  for (int t = 0; t < 2; ++t) {
    std::vector<bool> script;
    for (int b = 0; b < 32; ++b) script.push_back(rng() % 2 == 0);
    long lemma1Bad = 0;
    long steps = 0;
    RunResult run = runProgram(
        p, script, 100000,
        [&](const ChainState& st, const std::vector<ObjInfo>& objs) {
          ++steps;
          if (!checkChainLemma(st, objs)) ++lemma1Bad;
        });
    ++rep.tracesRun;
    rep.lemma1Steps += steps;
    rep.lemma1Failures += lemma1Bad;
    if (lemma1Bad)
      rep.messages.push_back("seed " + std::to_string(gc.seed) +
                             ": lemma 1 violated in trace");
    if (run.traceError)
      rep.messages.push_back("seed " + std::to_string(gc.seed) +
                             ": trace error: " + run.errorMessage);
    Theorem1Report t1 =
        checkTheorem1(pinned, run, gri, imm, cfg.theorem1Bound);
    if (t1.traceExcluded) {
      ++rep.tracesExcluded;
    } else {
      rep.chainsChecked += t1.checkedChains;
      rep.chainsInconclusive += (long)t1.inconclusive.size();
      for (auto& f : t1.failures)
        rep.messages.push_back("seed " + std::to_string(gc.seed) +
                               ": theorem1 " + f);
      for (auto& f : t1.inconclusive)
        rep.inconclusiveChains.push_back("seed " + std::to_string(gc.seed) +
                                         ": " + f);
    }
    Lemma2Report l2 = checkLemma2(run, cfg.lemma2Triples);
    rep.lemma2Triples += l2.triples;
    rep.lemma2Failures += l2.failures;
    if (l2.failures)
      rep.messages.push_back("seed " + std::to_string(gc.seed) +
                             ": lemma 2 failures in trace");
  }
}

}  // namespace

CorpusReport runCorpus(const CorpusConfig& cfg) {
  int threads = cfg.threads > 0
                    ? cfg.threads
                    : (int)std::max(1u, std::thread::hardware_concurrency());
  std::vector<CorpusReport> parts((size_t)cfg.count);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= cfg.count) return;
      runOne(i, cfg, parts[(size_t)i]);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  CorpusReport rep;
  for (const auto& part : parts) {
    rep.programs += part.programs;
    rep.tracesRun += part.tracesRun;
    rep.tracesExcluded += part.tracesExcluded;
    rep.chainsChecked += part.chainsChecked;
    rep.chainsInconclusive += part.chainsInconclusive;
    rep.lemma1Steps += part.lemma1Steps;
    rep.lemma1Failures += part.lemma1Failures;
    rep.lemma2Triples += part.lemma2Triples;
    rep.lemma2Failures += part.lemma2Failures;
    rep.equivalenceViolations += part.equivalenceViolations;
    rep.cflOracleDisagreements += part.cflOracleDisagreements;
    rep.riOracleDisagreements += part.riOracleDisagreements;
    rep.oracleInconclusive += part.oracleInconclusive;
    rep.precisionViolations += part.precisionViolations;
    rep.messages.insert(rep.messages.end(), part.messages.begin(),
                        part.messages.end());
    rep.inconclusiveChains.insert(rep.inconclusiveChains.end(),
                                  part.inconclusiveChains.begin(),
                                  part.inconclusiveChains.end());
  }
  return rep;
}

}  // namespace flowcfl
