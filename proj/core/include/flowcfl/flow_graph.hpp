#ifndef FLOWCFL_FLOW_GRAPH_HPP
#define FLOWCFL_FLOW_GRAPH_HPP

#include <string>
#include <vector>

#include "flowcfl/ast.hpp"
#include "flowcfl/cr_core.hpp"
#include "flowcfl/reim.hpp"

namespace flowcfl {

struct FlowEdge {
  VarId src;
  VarId dst;
  CrAnn ann;
  int32_t tag;  // site for Open/Close, field for Write/Read, -1 for D
  bool inverse;
  SrcLoc loc;
  auto key() const { return std::tuple(src, dst, ann, tag, inverse); }
};

struct FlowGraph {
  std::vector<FlowEdge> edges;

  size_t inverseCount() const;
  size_t forwardCount() const;
  bool hasEdge(VarId src, VarId dst, CrAnn ann, int32_t tag,
               bool inverse) const;
};

// Bidirectional graph: every forward edge and its annotation-flipped
// inverse.
FlowGraph buildGbi(const Program& p);

// Immutability-trimmed graph: forward edges as in G_BI, inverse edges only
// where the assignment target (adapted for call slots) is not readonly.
FlowGraph buildGri(const Program& p, const ImmResult& imm);

// Reversal for the positive setting: src/dst swapped, call<->ret,
// write<->read, forward<->inverse.
FlowGraph reverseGraph(const FlowGraph& g);

// CIFS-style baseline: call/return annotations squashed to d.
FlowGraph contextInsensitive(const FlowGraph& g);

std::string edgeLabel(const Program& p, const FlowEdge& e);
std::string emitDot(const Program& p, const FlowGraph& g);

}  // namespace flowcfl

#endif
