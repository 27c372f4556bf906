#include "flowcfl/cfl.hpp"

#include <algorithm>

namespace flowcfl {

const char* reachName(ReachClass c) {
  switch (c) {
    case ReachClass::Unreachable: return "unreachable";
    case ReachClass::ROnly: return "reaches_R_only";
    case ReachClass::MC: return "reaches_MC";
  }
  return "?";
}

ReachClass CflResult::classify(VarId x) const {
  auto cs = sol.classesOf(x);
  if (cs.count(CrClass::M) || cs.count(CrClass::C)) return ReachClass::MC;
  if (cs.count(CrClass::R)) return ReachClass::ROnly;
  return ReachClass::Unreachable;
}

std::vector<std::pair<VarId, CrClass>> CflResult::reached(VarId x) const {
  std::vector<std::pair<VarId, CrClass>> out;
  for (auto [sinkIdx, cls] : sol.sinksReached(x))
    out.push_back({sol.sinkNodes[sinkIdx], cls});
  return out;
}

std::vector<int32_t> CflResult::witness(VarId x, VarId sink) const {
  int32_t sinkIdx = -1;
  for (size_t i = 0; i < sol.sinkNodes.size(); ++i)
    if (sol.sinkNodes[i] == sink) sinkIdx = (int32_t)i;
  if (sinkIdx < 0) return {};
  for (CrClass c : {CrClass::M, CrClass::C, CrClass::R})
    if (sol.hasEntry(x, c, sinkIdx)) return sol.witness({x, c, sinkIdx});
  return {};
}

std::vector<bool> anchorVars(const Program& p) {
  std::vector<bool> anchor(p.vars.size(), false);
  for (size_t v = 0; v < p.vars.size(); ++v) {
    auto k = p.vars[v].kind;
    if (k == VarDecl::Kind::This || k == VarDecl::Kind::Param ||
        k == VarDecl::Kind::Ret)
      anchor[v] = true;
  }
  return anchor;
}

static CflResult solveOn(const Program& p, const FlowGraph& g,
                         const std::vector<VarId>& seeds) {
  CrGraph cg;
  cg.numNodes = (int32_t)p.vars.size();
  cg.gateWrites = true;
  auto anchors = anchorVars(p);
  cg.anchor.assign(anchors.begin(), anchors.end());
  for (const auto& e : g.edges) cg.edges.push_back({e.src, e.dst, e.ann, e.tag});
  CflResult out;
  for (VarId s : seeds)
    if (!std::count(out.sinks.begin(), out.sinks.end(), s))
      out.sinks.push_back(s);
  std::vector<int32_t> sinkNodes(out.sinks.begin(), out.sinks.end());
  out.sol = solveCr(cg, sinkNodes);
  return out;
}

CflResult runCfl(const Program& p, const FlowGraph& g,
                 const std::vector<VarId>& sinks) {
  return solveOn(p, g, sinks);
}

CflResult runCflPositive(const Program& p, const FlowGraph& g,
                         const std::vector<VarId>& sources) {
  return solveOn(p, reverseGraph(g), sources);
}

}  // namespace flowcfl
