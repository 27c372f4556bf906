#ifndef FLOWCFL_VALIDATE_HPP
#define FLOWCFL_VALIDATE_HPP

#include <string>
#include <vector>

#include "flowcfl/cfl.hpp"
#include "flowcfl/interp.hpp"
#include "flowcfl/oracle.hpp"
#include "flowcfl/types.hpp"

namespace flowcfl {

// A copy of p with the given variables pinned as sinks (negative setting
// seeds for both engines).
Program withSinks(const Program& p, const std::vector<VarId>& sinks);

struct Theorem1Report {
  int checkedChains = 0;
  int witnessed = 0;
  int slotChainsSkipped = 0;
  bool traceExcluded = false;  // budget-exhausted or faulted trace
  std::vector<std::string> failures;      // definite missing paths
  std::vector<std::string> inconclusive;  // bound-exhausted queries
  bool ok() const { return failures.empty(); }
};

// Every chain (x^A, y^B) must have a path x -> y in G_RI with residual
// alpha(Delta A B) and balanced fields; when alpha(B) |> y adapts to
// mutable, the inverse path with residual alpha(Delta B A) must exist too.
Theorem1Report checkTheorem1(const Program& p, const RunResult& run,
                             const FlowGraph& gri, const ImmResult& imm,
                             int bound);

struct Lemma2Report {
  long triples = 0;
  long failures = 0;
  long undefined = 0;  // concatenation undefined on a same-trace triple
};

// alpha(dAB) + alpha(dBC) == alpha(dAC) over context triples from a trace.
Lemma2Report checkLemma2(const RunResult& run, long maxTriples = 20000);

enum class Verdict : uint8_t { Agree, SoundnessViolation, PrecisionViolation };

struct EquivalenceEntry {
  VarId var;
  ReachClass cfl;
  Qual typeQual;  // max(S) in the negative setting, min(S) in the positive
  Verdict verdict;
};

struct EquivalenceReport {
  std::vector<EquivalenceEntry> entries;
  int violations = 0;
  bool ok() const { return violations == 0; }
};

EquivalenceReport checkEquivalence(const Program& p, const CflResult& cfl,
                                   const TypeResult& types);

struct PrecisionReport {
  std::vector<std::pair<VarId, ReachClass>> bi, ri;
  int extraInBi = 0;        // reachable under G_BI but not G_RI
  bool riSubsetOfBi = true;
};

PrecisionReport comparePrecision(const Program& p,
                                 const std::vector<VarId>& sinks);

struct AgreementReport {
  std::vector<std::string> disagreements;  // definite
  int inconclusive = 0;
  bool ok() const { return disagreements.empty(); }
};

// CSFI+ engine vs bounded enumeration, per (variable, sink).
AgreementReport checkCflAgreement(const Program& p, const FlowGraph& g,
                                  const CflResult& cfl, int bound);
// Immutability worklist vs bounded leading-segment enumeration.
AgreementReport checkRiAgreement(const Program& p, const RIGraph& g,
                                 const ImmResult& imm, int bound);

struct CorpusConfig {
  int count = 500;
  uint64_t seed = 1;
  int oracleBound = 12;
  int theorem1Bound = 14;
  long lemma2Triples = 10000;
  int threads = 0;  // 0: hardware concurrency
};

struct CorpusReport {
  int programs = 0;
  int tracesRun = 0;
  int tracesExcluded = 0;
  long chainsChecked = 0;
  long chainsInconclusive = 0;
  long lemma1Steps = 0;
  long lemma1Failures = 0;
  long lemma2Triples = 0;
  long lemma2Failures = 0;
  int equivalenceViolations = 0;
  int cflOracleDisagreements = 0;
  int riOracleDisagreements = 0;
  int oracleInconclusive = 0;
  int precisionViolations = 0;
  std::vector<std::string> messages;  // individual failures, with seeds
  std::vector<std::string> inconclusiveChains;  // bound-exhausted, listed
  bool ok() const {
    return messages.empty() && lemma1Failures == 0 && lemma2Failures == 0 &&
           equivalenceViolations == 0 && cflOracleDisagreements == 0 &&
           riOracleDisagreements == 0 && precisionViolations == 0;
  }
};

// Runs every gate over `count` generated programs (seed-reproducible;
// programs are independent and checked in parallel, results merged in
// index order).
CorpusReport runCorpus(const CorpusConfig& cfg);

}  // namespace flowcfl

#endif
