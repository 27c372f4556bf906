#include <doctest.h>

#include "flowcfl/analysis.hpp"
#include "flowcfl/generator.hpp"
#include "flowcfl/json_io.hpp"
#include "flowcfl/validate.hpp"
#include "helpers.hpp"

using namespace flowcfl;
using namespace flowcfl::test;

TEST_CASE("oracle finds the )6 (7 residual path of section 3.1") {
  Program p = fixture("fig3.fcfl");
  FlowGraph g = buildGri(p, inferImmutability(p));
  OracleQuery q;
  q.graph = &g;
  q.src = var(p, "A.set.p");
  q.dst = var(p, "A.get.ret");
  q.residual = {{6}, {7}};
  q.pg = PgDiscipline::Balanced;
  OracleAnswer a = oraclePaths(q);
  CHECK(a.found);
  REQUIRE(a.witnessEdges.size() == 4);
  CHECK_FALSE(a.inconclusive);
}

TEST_CASE("empty residual over the empty path") {
  Program p = fixture("fig3.fcfl");
  FlowGraph g = buildGri(p, inferImmutability(p));
  OracleQuery q;
  q.graph = &g;
  q.src = q.dst = var(p, "main.a");
  q.bound = 0;
  CHECK(oraclePaths(q).found);
}

TEST_CASE("no balanced path from a to d") {
  Program p = fixture("fig3.fcfl");
  FlowGraph g = buildGri(p, inferImmutability(p));
  OracleQuery q;
  q.graph = &g;
  q.src = var(p, "main.a");
  q.dst = var(p, "main.d");
  OracleAnswer a = oraclePaths(q);
  CHECK_FALSE(a.found);
  CHECK_FALSE(a.inconclusive);  // definite absence
}

TEST_CASE("theorem 1 holds on the fixture traces") {
  for (const char* name :
       {"fig3.fcfl", "fig9.fcfl", "sec62_setget.fcfl", "sec63_adapters.fcfl",
        "two_snippets.fcfl", "derived_field_poly.fcfl", "sec21_id.fcfl"}) {
    Program p = fixture(name);
    ImmResult imm = inferImmutability(p);
    FlowGraph gri = buildGri(p, imm);
    RunResult run = runProgram(p, {true, false});
    Theorem1Report rep = checkTheorem1(p, run, gri, imm, 14);
    CHECK_MESSAGE(rep.failures.empty(), name);
    CHECK_MESSAGE(rep.inconclusive.empty(), name);
    CHECK(rep.checkedChains > 0);
  }
}

TEST_CASE("fig9 chain into the caller is witnessed through the return") {
  Program p = fixture("fig9.fcfl");
  ImmResult imm = inferImmutability(p);
  FlowGraph gri = buildGri(p, imm);
  OracleQuery q;
  q.graph = &gri;
  q.src = var(p, "Helper.m.x");
  q.dst = var(p, "main.y");
  q.residual = {{7}, {}};  // x^<main,f> flowed out to y^<main>
  CHECK(oraclePaths(q).found);
}

TEST_CASE("empty trace is vacuously sound") {
  std::vector<Diagnostic> diags;
  Program p = loadProgram("class M { static void main() { } }", diags);
  ImmResult imm = inferImmutability(p);
  FlowGraph gri = buildGri(p, imm);
  RunResult run = runProgram(p, {});
  Theorem1Report rep = checkTheorem1(p, run, gri, imm, 8);
  CHECK(rep.checkedChains == 0);
  CHECK(rep.ok());
}

TEST_CASE("equivalence agrees on the fixtures") {
  for (const char* name :
       {"fig3_sink_b.fcfl", "fig3_sinks_bd.fcfl", "sec63_adapters.fcfl",
        "sec62_setget.fcfl", "two_snippets.fcfl", "fig9_sink_b.fcfl",
        "fig1_fieldsensitivity.fcfl"}) {
    Program p = fixture(name);
    ImmResult imm = inferImmutability(p);
    FlowGraph gri = buildGri(p, imm);
    std::vector<VarId> sinks;
    for (size_t v = 0; v < p.vars.size(); ++v)
      if (p.vars[v].pinned == Qual::Neg) sinks.push_back((VarId)v);
    CflResult cfl = runCfl(p, gri, sinks);
    TypeResult types =
        runTypes(p, imm, Setting::Negative, AdapterMode::PerSlot);
    EquivalenceReport rep = checkEquivalence(p, cfl, types);
    CHECK_MESSAGE(rep.ok(), name);
  }
}

TEST_CASE("no sinks leaves everything pos and unreachable, agreeing") {
  Program p = fixture("fig3.fcfl");
  ImmResult imm = inferImmutability(p);
  CflResult cfl = runCfl(p, buildGri(p, imm), {});
  TypeResult types = runTypes(p, imm, Setting::Negative, AdapterMode::PerSlot);
  EquivalenceReport rep = checkEquivalence(p, cfl, types);
  CHECK(rep.ok());
  for (auto& e : rep.entries) {
    CHECK(e.cfl == ReachClass::Unreachable);
    CHECK(e.typeQual == Qual::Pos);
  }
}

TEST_CASE("the BI pair also agrees (gate-agnostic parallel)") {
  Program p = fixture("sec42_sink_b.fcfl");
  // CFL over G_BI against types with every inverse enabled.
  AnalysisConfig cfg;
  cfg.graph = AnalysisConfig::GraphKind::BI;
  AnalysisOutput out = analyzeProgram(p, cfg);
  REQUIRE(out.equivalence.has_value());
  CHECK(out.equivalence->ok());
  // and the spurious negative is present, unlike under G_RI
  CHECK(out.cfl->classify(var(p, "main.a")) == ReachClass::MC);
}

TEST_CASE("precision: G_RI reachability is contained in G_BI's") {
  Program p = fixture("sec42_sink_b.fcfl");
  PrecisionReport rep = comparePrecision(p, {var(p, "main.b")});
  CHECK(rep.riSubsetOfBi);
  CHECK(rep.extraInBi >= 2);  // a and x are BI-only

  // With sink b every fig9 variable participates in the real a -> b flow,
  // so both graphs reach the same set. The infeasible paths G_BI keeps all
  // point back toward a ("the path from b to a"): probing a shows them.
  Program fig9 = fixture("fig9.fcfl");
  PrecisionReport sinkB = comparePrecision(fig9, {var(fig9, "main.b")});
  CHECK(sinkB.riSubsetOfBi);
  PrecisionReport sinkA = comparePrecision(fig9, {var(fig9, "main.a")});
  CHECK(sinkA.riSubsetOfBi);
  CHECK(sinkA.extraInBi >= 7);
  // under G_RI nothing flows into a at all
  for (auto& [v, cls] : sinkA.ri)
    if (v != var(fig9, "main.a")) CHECK(cls == ReachClass::Unreachable);
}

TEST_CASE("no inverse edges anywhere gives zero precision delta") {
  Program p = fixture("sec21_id.fcfl");  // no writes, no inverses in either
  // G_BI still has inverses by construction; build a writes-free program
  std::vector<Diagnostic> diags;
  Program q = loadProgram(
      "class M { static void main() { @sink Prim b; Prim a; a = new Prim;"
      " b = new Prim; } }",
      diags);
  PrecisionReport rep = comparePrecision(q, {var(q, "main.b")});
  CHECK(rep.extraInBi == 0);
  (void)p;
}

TEST_CASE("lemma 2 across a deep trace") {
  Program p = fixture("sec21_id.fcfl");
  RunResult run = runProgram(p, {});
  Lemma2Report rep = checkLemma2(run, 5000);
  CHECK(rep.triples > 0);
  CHECK(rep.failures == 0);
}

TEST_CASE("oracle agreement on the fixtures") {
  for (const char* name :
       {"fig3_sink_b.fcfl", "fig9_sink_b.fcfl", "two_snippets.fcfl",
        "sec63_adapters.fcfl"}) {
    Program p = fixture(name);
    ImmResult imm = inferImmutability(p);
    RIGraph rig = buildRiGraph(p);
    FlowGraph gri = buildGri(p, imm);
    std::vector<VarId> sinks;
    for (size_t v = 0; v < p.vars.size(); ++v)
      if (p.vars[v].pinned == Qual::Neg) sinks.push_back((VarId)v);
    CflResult cfl = runCfl(p, gri, sinks);
    AgreementReport ca = checkCflAgreement(p, gri, cfl, 14);
    CHECK_MESSAGE(ca.disagreements.empty(), name);
    AgreementReport ra = checkRiAgreement(p, rig, imm, 12);
    CHECK_MESSAGE(ra.disagreements.empty(), name);
  }
}

TEST_CASE("generator is seed-deterministic and well-formed") {
  for (uint64_t seed : {0ull, 1ull, 42ull, 1234567ull}) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.aliasPairBias = seed % 2 == 0;
    std::string a = generateSource(cfg);
    CHECK(a == generateSource(cfg));
    std::vector<Diagnostic> diags;
    loadProgram(a, diags);
    CHECK_MESSAGE(!hasErrors(diags), "seed " << seed);
  }
}

TEST_CASE("small corpus passes every gate") {
  CorpusConfig cfg;
  cfg.count = 40;
  cfg.seed = 77;
  cfg.oracleBound = 12;
  CorpusReport rep = runCorpus(cfg);
  CHECK(rep.programs == 40);
  for (auto& m : rep.messages) FAIL_CHECK(m);
  CHECK(rep.ok());
  CHECK(rep.tracesRun == 80);
  CHECK(rep.lemma1Steps > 0);
  CHECK(rep.lemma2Triples > 0);
}

TEST_CASE("json dumps carry the schema tag and are stable") {
  Program p = fixture("fig3_sink_b.fcfl");
  AnalysisConfig cfg;
  AnalysisOutput out = analyzeProgram(p, cfg);
  std::string a = analysisJson(p, cfg, out);
  AnalysisOutput out2 = analyzeProgram(p, cfg);
  CHECK(a == analysisJson(p, cfg, out2));
  CHECK(a.find("\"schema\": 1") != std::string::npos);
  RunResult run = runProgram(p, {});
  std::string t = traceJson(p, run);
  CHECK(t.find("\"schema\": 1") != std::string::npos);
  std::string g = graphJson(p, out.gri);
  CHECK(g.find("\"schema\": 1") != std::string::npos);
}

TEST_CASE("analyze exit codes") {
  AnalysisConfig cfg;
  CHECK(analyzeProgram(fixture("fig1_fieldsensitivity.fcfl"), cfg).exitCode ==
        1);
  CHECK(analyzeProgram(fixture("fig3.fcfl"), cfg).exitCode == 0);
  // context-insensitive baseline rejects the id example, flowcfl accepts
  Program id = fixture("sec21_id.fcfl");
  CHECK(analyzeProgram(id, cfg).exitCode == 0);
  AnalysisConfig ci = cfg;
  ci.ciBaseline = true;
  ci.engine = AnalysisConfig::EngineKind::Cfl;
  CHECK(analyzeProgram(id, ci).exitCode == 1);
}

TEST_CASE("every reported conflict carries an oracle-checkable witness") {
  Program p = fixture("fig1_fieldsensitivity.fcfl");
  AnalysisConfig cfg;
  AnalysisOutput out = analyzeProgram(p, cfg);
  REQUIRE(out.conflicts.size() == 1);
  CHECK(out.conflicts[0].source == var(p, "main.sim"));
  CHECK(out.conflicts[0].sink == var(p, "main.sg"));
  CHECK(!out.conflicts[0].witness.empty());
  // the oracle confirms an M/C-class path source -> sink
  std::set<FieldId> F = out.cfl->fieldsToSinks();
  ClassAnswer oracle =
      oracleClasses(out.gri, out.conflicts[0].source, out.conflicts[0].sink,
                    PgDiscipline::CsfiPlus, &F, 14);
  CHECK((oracle.classes.count(CrClass::M) || oracle.classes.count(CrClass::C)));
}
