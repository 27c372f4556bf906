#ifndef FLOWCFL_ANALYSIS_HPP
#define FLOWCFL_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "flowcfl/validate.hpp"

namespace flowcfl {

struct AnalysisConfig {
  Setting setting = Setting::Negative;
  enum class GraphKind : uint8_t { BI, RI } graph = GraphKind::RI;
  enum class EngineKind : uint8_t { Cfl, Types, Both } engine = EngineKind::Both;
  AdapterMode mode = AdapterMode::PerSlot;
  bool ciBaseline = false;  // squash call/return annotations (CFL engine)
  int oracleBound = 14;
  uint64_t seed = 0;
};

struct Conflict {
  VarId source;
  VarId sink;
  std::vector<std::string> witness;  // rendered path edges or constraints
};

struct AnalysisOutput {
  std::vector<Diagnostic> diagnostics;
  ImmResult imm;
  FlowGraph gbi, gri;
  std::optional<CflResult> cfl;
  std::optional<TypeResult> types;
  std::optional<EquivalenceReport> equivalence;
  std::vector<Conflict> conflicts;
  std::vector<VarId> seeds;  // sinks (negative) or sources (positive)
  int exitCode = 0;          // 0 clean, 1 conflicts, 2 unusable input
};

// Full pipeline over an already loaded program: immutability, graphs,
// engines per config, conflict detection with witnesses.
AnalysisOutput analyzeProgram(const Program& p, const AnalysisConfig& cfg);

// Human-readable report (one conflict per line, then per-engine summary).
std::string formatReport(const Program& p, const AnalysisConfig& cfg,
                         const AnalysisOutput& out);

}  // namespace flowcfl

#endif
