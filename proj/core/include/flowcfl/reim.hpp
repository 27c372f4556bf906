#ifndef FLOWCFL_REIM_HPP
#define FLOWCFL_REIM_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "flowcfl/ast.hpp"
#include "flowcfl/cr_core.hpp"

namespace flowcfl {

enum class ImmQual : uint8_t { Readonly = 0, Poly = 1, Mutable = 2 };

const char* immName(ImmQual q);

// readonly and mutable absorb, poly defers to the context.
ImmQual adaptRi(ImmQual ctx, ImmQual q);
// Right fold of adaptRi over a context chain (outermost first).
ImmQual adaptRiSeq(const std::vector<ImmQual>& ctxs, ImmQual q);

// Reference immutability graph: variables plus x.f slot nodes, forward
// edges only; write/read pairs on the same field meet at an approximate
// edge between their slots.
struct RIGraph {
  struct Edge {
    int32_t src;
    int32_t dst;
    CrAnn ann;     // D / Open / Close; approx edges use D with approx=true
    int32_t tag;   // call site for Open/Close
    bool approx = false;
    SrcLoc loc;
  };

  int32_t numVarNodes = 0;  // node i < numVarNodes is VarId i
  std::vector<std::pair<VarId, FieldId>> slots;  // node numVarNodes + k
  std::map<std::pair<VarId, FieldId>, int32_t> slotIndex;
  std::vector<Edge> edges;

  int32_t slotNode(VarId recv, FieldId f);          // creates on demand
  int32_t findSlot(VarId recv, FieldId f) const;    // kNoId when absent
  bool isSlot(int32_t node) const { return node >= numVarNodes; }
  std::string nodeName(const Program& p, int32_t node) const;
};

RIGraph buildRiGraph(const Program& p);

// Variables appearing as the receiver of a field write.
std::set<VarId> findUpdates(const Program& p);

struct ImmResult {
  std::vector<ImmQual> varQual;    // by VarId
  std::vector<ImmQual> fieldQual;  // by FieldId; Readonly or Poly
  std::set<VarId> updates;
  // Classes of leading call-transmitted segments per RI node (reports).
  std::vector<std::set<CrClass>> nodeClasses;
};

ImmResult classifyImmutability(const Program& p, const RIGraph& g,
                               const std::set<VarId>& updates);

// Convenience: build graph, find updates, classify.
ImmResult inferImmutability(const Program& p);

// DOT export of the RI graph, approx edges dashed. Deterministic.
std::string emitRiDot(const Program& p, const RIGraph& g);

// "var: qualifier" lines sorted by method then name, then field lines.
std::string formatImmTable(const Program& p, const ImmResult& imm);

}  // namespace flowcfl

#endif
