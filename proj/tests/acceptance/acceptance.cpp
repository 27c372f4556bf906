// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 4-8 run over the handwritten fixtures plus 500
// seed-reproducible generated programs.
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "flowcfl/analysis.hpp"
#include "flowcfl/parser.hpp"
#include "flowcfl/validate.hpp"

using namespace flowcfl;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;
std::vector<std::string> details;

void report(int criterion, const std::string& what, bool ok) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": "
            << what << "\n";
  if (!ok) ++failures;
}

void detail(const std::string& msg) { details.push_back(msg); }

Program fixture(const std::string& name) {
  std::ifstream in(std::string(FLOWCFL_FIXTURE_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::vector<Diagnostic> diags;
  Program p = loadProgram(ss.str(), diags);
  if (hasErrors(diags)) {
    std::cerr << "fixture " << name << " failed to load\n";
    exit(2);
  }
  return p;
}

VarId v(const Program& p, const std::string& name) {
  VarId id = p.findVar(name);
  if (id == kNoId) {
    std::cerr << "missing variable " << name << "\n";
    exit(2);
  }
  return id;
}

bool flowsTo(const CflResult& r, VarId src, VarId sink) {
  for (auto [n, cls] : r.reached(src))
    if (n == sink && cls != CrClass::R) return true;
  return false;
}

double secondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- criterion 1: Fig. 3 fidelity ----------------------------------------
void criterion1() {
  auto t0 = Clock::now();
  bool ok = true;

  Program p1 = fixture("fig3_sink_b.fcfl");
  ImmResult imm1 = inferImmutability(p1);
  FlowGraph g1 = buildGri(p1, imm1);
  CflResult cfl1 = runCfl(p1, g1, {v(p1, "main.b")});
  TypeResult ty1 = runTypes(p1, imm1, Setting::Negative, AdapterMode::PerSlot);
  ok &= flowsTo(cfl1, v(p1, "main.a"), v(p1, "main.b"));
  ok &= cfl1.classify(v(p1, "A.get.this")) == ReachClass::ROnly;
  ok &= cfl1.classify(v(p1, "A.get.ret")) == ReachClass::ROnly;
  ok &= ty1.maxQual(v(p1, "A.get.this")) == Qual::Poly;
  ok &= ty1.maxQual(v(p1, "A.get.ret")) == Qual::Poly;
  ok &= ty1.maxQual(v(p1, "main.a")) == Qual::Neg;

  Program p2 = fixture("fig3_sinks_bd.fcfl");
  FlowGraph g2 = buildGri(p2, inferImmutability(p2));
  CflResult cfl2 =
      runCfl(p2, g2, {v(p2, "main.b"), v(p2, "main.d")});
  ok &= flowsTo(cfl2, v(p2, "main.a"), v(p2, "main.b"));
  ok &= flowsTo(cfl2, v(p2, "main.c"), v(p2, "main.d"));
  ok &= !flowsTo(cfl2, v(p2, "main.a"), v(p2, "main.d"));
  ok &= !flowsTo(cfl2, v(p2, "main.c"), v(p2, "main.b"));

  double dt = secondsSince(t0);
  if (dt >= 1.0) {
    ok = false;
    detail("criterion 1 runtime " + std::to_string(dt) + "s");
  }
  report(1, "Fig. 3 flows {a->b, c->d}, not {a->d, c->b}; this_get/ret poly",
         ok);
}

// ---- criterion 2: Fig. 9 fidelity ----------------------------------------
void criterion2() {
  auto t0 = Clock::now();
  Program p = fixture("fig9_sink_b.fcfl");
  ImmResult imm = inferImmutability(p);
  bool ok = true;
  auto expect = [&](const char* name, ImmQual q) {
    if (imm.varQual[v(p, name)] != q) {
      ok = false;
      detail(std::string(name) + " is " + immName(imm.varQual[v(p, name)]) +
             ", expected " + immName(q));
    }
  };
  expect("Helper.m.p", ImmQual::Mutable);
  expect("main.y", ImmQual::Mutable);
  expect("main.z", ImmQual::Mutable);
  expect("Helper.m.x", ImmQual::Poly);
  expect("Helper.m.ret", ImmQual::Poly);
  expect("main.w", ImmQual::Readonly);
  expect("main.a", ImmQual::Readonly);
  expect("main.b", ImmQual::Readonly);
  ok &= imm.fieldQual[p.findField("Y.f")] == ImmQual::Readonly;
  ok &= imm.fieldQual[p.findField("X.g")] == ImmQual::Readonly;

  FlowGraph gri = buildGri(p, imm);
  ok &= gri.inverseCount() == 3;

  CflResult fwd = runCfl(p, gri, {v(p, "main.b")});
  ok &= flowsTo(fwd, v(p, "main.a"), v(p, "main.b"));
  CflResult bwd = runCfl(p, gri, {v(p, "main.a")});
  ok &= bwd.classify(v(p, "main.b")) == ReachClass::Unreachable;

  double dt = secondsSince(t0);
  if (dt >= 1.0) ok = false;
  report(2, "Fig. 9 qualifiers exact, 3 inverse edges, a->b only", ok);
}

// ---- criterion 3: section 6.3 adapter example -----------------------------
void criterion3() {
  Program p = fixture("sec63_adapters.fcfl");
  ImmResult imm = inferImmutability(p);
  TypeResult multi = runTypes(p, imm, Setting::Negative, AdapterMode::PerSlot);
  TypeResult minus = runTypes(p, imm, Setting::Negative, AdapterMode::PerSite);
  auto negSet = [&](const TypeResult& r) {
    std::set<std::string> s;
    for (size_t i = 0; i < p.vars.size(); ++i)
      if (r.maxQual((int32_t)i) == Qual::Neg) s.insert(p.varName((VarId)i));
    return s;
  };
  std::set<std::string> multiNeg = negSet(multi);
  std::set<std::string> minusNeg = negSet(minus);
  // FlowCFL: exactly the sinks, the really flowing x/y1, and the read
  // receiver a. FlowCFL- additionally conflates y and a1 (and x1, which
  // shares the site-11 adapter).
  std::set<std::string> expectMulti = {"main.x2", "main.y3", "main.a",
                                       "main.x", "main.y1"};
  bool ok = multiNeg == expectMulti;
  if (!ok)
    for (auto& n : multiNeg) detail("flowcfl neg: " + n);
  bool minusExtra = minusNeg.count("main.y") && minusNeg.count("main.a1");
  for (auto& n : expectMulti) minusExtra &= minusNeg.count(n) > 0;
  ok &= minusExtra;
  ok &= !minusNeg.count("main.y2");
  report(3, "6.3 adapters: flowcfl negs {x, y1} only; minus adds {y, a1}",
         ok);
}

// ---- criteria 4-8 over fixtures + 500 generated programs ------------------
void corpusCriteria() {
  auto t0 = Clock::now();

  // Handwritten fixtures first.
  long fixtureChains = 0, fixtureInconclusive = 0;
  bool t1ok = true, eqok = true, oracleok = true, precok = true,
       lemmasok = true;
  long lemma2Triples = 0;
  const char* fixtures[] = {
      "fig3.fcfl",          "fig3_sink_b.fcfl",  "fig3_sinks_bd.fcfl",
      "fig9.fcfl",          "fig9_sink_b.fcfl",  "sec42_branch.fcfl",
      "sec42_sink_b.fcfl",  "sec62_setget.fcfl", "sec63_adapters.fcfl",
      "sec21_id.fcfl",      "two_snippets.fcfl", "derived_field_poly.fcfl",
      "sec43_id_update.fcfl", "fig1_fieldsensitivity.fcfl"};
  for (const char* name : fixtures) {
    Program p = fixture(name);
    ImmResult imm = inferImmutability(p);
    RIGraph rig = buildRiGraph(p);
    FlowGraph gri = buildGri(p, imm);
    std::vector<VarId> sinks;
    for (size_t i = 0; i < p.vars.size(); ++i)
      if (p.vars[i].pinned == Qual::Neg) sinks.push_back((VarId)i);
    CflResult cfl = runCfl(p, gri, sinks);
    TypeResult types = runTypes(p, imm, Setting::Negative, AdapterMode::PerSlot);

    EquivalenceReport eq = checkEquivalence(p, cfl, types);
    if (!eq.ok()) {
      eqok = false;
      detail(std::string(name) + ": equivalence violations");
    }
    AgreementReport ca = checkCflAgreement(p, gri, cfl, 14);
    AgreementReport ra = checkRiAgreement(p, rig, imm, 12);
    if (!ca.ok() || !ra.ok()) {
      oracleok = false;
      for (auto& d : ca.disagreements) detail(std::string(name) + ": " + d);
      for (auto& d : ra.disagreements) detail(std::string(name) + ": " + d);
    }
    PrecisionReport pr = comparePrecision(p, sinks);
    if (!pr.riSubsetOfBi) {
      precok = false;
      detail(std::string(name) + ": G_RI not contained in G_BI");
    }

    for (auto script : {std::vector<bool>{}, std::vector<bool>{true, true}}) {
      long lemma1Bad = 0;
      RunResult run = runProgram(
          p, script, 100000,
          [&](const ChainState& st, const std::vector<ObjInfo>& objs) {
            if (!checkChainLemma(st, objs)) ++lemma1Bad;
          });
      if (lemma1Bad) {
        lemmasok = false;
        detail(std::string(name) + ": lemma 1 violated");
      }
      Theorem1Report t1 = checkTheorem1(p, run, gri, imm, 14);
      fixtureChains += t1.checkedChains;
      fixtureInconclusive += (long)t1.inconclusive.size();
      for (auto& f : t1.failures) {
        t1ok = false;
        detail(std::string(name) + ": " + f);
      }
      Lemma2Report l2 = checkLemma2(run, 4000);
      lemma2Triples += l2.triples;
      if (l2.failures) {
        lemmasok = false;
        detail(std::string(name) + ": lemma 2 failures");
      }
    }
  }

  // Strictness of the precision inclusion on the two named fixtures. On
  // Fig. 9 the spurious G_BI paths run toward a (the paper's b -> a), so
  // that is where the gain is visible.
  {
    Program p = fixture("sec42_sink_b.fcfl");
    PrecisionReport pr = comparePrecision(p, {v(p, "main.b")});
    if (pr.extraInBi == 0) {
      precok = false;
      detail("4.2 fixture: no strict precision gain");
    }
    Program q = fixture("fig9.fcfl");
    PrecisionReport pr9 = comparePrecision(q, {v(q, "main.a")});
    if (pr9.extraInBi == 0) {
      precok = false;
      detail("Fig. 9 fixture: no strict precision gain");
    }
  }

  // A deep recursive trace contributes nested contexts in bulk for the
  // concatenation lemma (the budget cut only excludes it from Theorem 1).
  {
    Program p = fixture("recursion.fcfl");
    RunResult run = runProgram(p, {}, 2000);
    Lemma2Report deep = checkLemma2(run, 12000);
    lemma2Triples += deep.triples;
    if (deep.failures) {
      lemmasok = false;
      detail("recursion trace: lemma 2 failures");
    }
  }

  // 500 generated programs, all gates.
  CorpusConfig cc;
  cc.count = 500;
  cc.seed = 1;
  cc.oracleBound = 12;
  cc.theorem1Bound = 14;
  cc.lemma2Triples = 10000;
  CorpusReport rep = runCorpus(cc);
  for (auto& m : rep.messages) detail(m);

  long chains = fixtureChains + rep.chainsChecked;
  long inconclusive = fixtureInconclusive + rep.chainsInconclusive;
  bool theorem1Messages = false;
  for (auto& m : rep.messages)
    if (m.find("theorem1") != std::string::npos) theorem1Messages = true;
  t1ok &= !theorem1Messages;
  t1ok &= chains > 0 && inconclusive * 50 <= chains;  // <= 2%
  for (auto& c : rep.inconclusiveChains)
    std::cout << "  inconclusive: " << c << "\n";
  double dt = secondsSince(t0);
  if (dt >= 300.0) {
    t1ok = false;
    detail("suite runtime " + std::to_string(dt) + "s");
  }
  report(4,
         "Theorem 1 witnessed for " + std::to_string(chains) + " chains (" +
             std::to_string(inconclusive) + " inconclusive) in " +
             std::to_string(dt) + "s",
         t1ok);

  eqok &= rep.equivalenceViolations == 0;
  report(5, "CFL and TYPES classifications agree across the corpus", eqok);

  oracleok &=
      rep.cflOracleDisagreements == 0 && rep.riOracleDisagreements == 0;
  report(6, "engines match bounded enumeration, no definite disagreements",
         oracleok);

  precok &= rep.precisionViolations == 0;
  report(7, "G_RI reachability contained in G_BI, strict on 4.2 and Fig. 9",
         precok);

  lemmasok &= rep.lemma1Failures == 0 && rep.lemma2Failures == 0 &&
              lemma2Triples + rep.lemma2Triples >= 10000;
  report(8,
         "Lemma 1 at every step; Lemma 2 over " +
             std::to_string(lemma2Triples + rep.lemma2Triples) + " triples",
         lemmasok);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  corpusCriteria();
  for (auto& d : details) std::cout << "  detail: " << d << "\n";
  if (failures) {
    std::cout << failures << " criteria FAILED\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
