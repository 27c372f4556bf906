#ifndef FLOWCFL_ORACLE_HPP
#define FLOWCFL_ORACLE_HPP

#include <set>
#include <vector>

#include "flowcfl/cfl.hpp"
#include "flowcfl/flow_graph.hpp"
#include "flowcfl/interp.hpp"
#include "flowcfl/reim.hpp"

namespace flowcfl {

// Field-annotation disciplines a path must satisfy:
//  Balanced — writes and reads pair up exactly (per-field Dyck);
//  CsfiPlus — writes need their field in F, reads are free;
//  Ignore   — unconstrained.
enum class PgDiscipline : uint8_t { Balanced, CsfiPlus, Ignore };

struct OracleQuery {
  const FlowGraph* graph = nullptr;
  VarId src = kNoId;
  VarId dst = kNoId;
  AbstractDelta residual;  // required unmatched returns-then-calls
  PgDiscipline pg = PgDiscipline::Balanced;
  const std::set<FieldId>* fields = nullptr;  // F, for CsfiPlus
  int bound = 14;
};

struct OracleAnswer {
  bool found = false;
  // The bound cut live states off before the space was exhausted;
  // absence is definite only when this is false.
  bool inconclusive = false;
  std::vector<int32_t> witnessEdges;
};

// Breadth-first search over (node, CR state, PG state) for a path of at
// most `bound` edges whose call/return residual is exactly q.residual and
// whose field component satisfies q.pg.
OracleAnswer oraclePaths(const OracleQuery& q);

struct ClassAnswer {
  std::set<CrClass> classes;
  bool inconclusive = false;
};

// Achievable CR classes of paths src -> dst under the discipline. The call
// component must never mismatch (a close either matches the pending open or
// is outstanding); M = no outstanding symbols, C = outstanding opens only,
// R = at least one outstanding close.
ClassAnswer oracleClasses(const FlowGraph& g, VarId src, VarId dst,
                          PgDiscipline pg, const std::set<FieldId>* fields,
                          int bound);

// Leading-segment classes of paths from an RI-graph node to an update:
// the segment before the first approximate edge classifies the path, the
// remainder only needs to exist.
ClassAnswer oracleRiClasses(const RIGraph& g, int32_t node,
                            const std::set<VarId>& updates, int bound);

}  // namespace flowcfl

#endif
