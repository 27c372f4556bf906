#ifndef FLOWCFL_CFL_HPP
#define FLOWCFL_CFL_HPP

#include <set>
#include <vector>

#include "flowcfl/ast.hpp"
#include "flowcfl/cr_core.hpp"
#include "flowcfl/flow_graph.hpp"

namespace flowcfl {

enum class ReachClass : uint8_t { Unreachable = 0, ROnly = 1, MC = 2 };

const char* reachName(ReachClass c);

struct CflResult {
  CrSolution sol;
  std::vector<VarId> sinks;  // seeds, deduplicated, original order
  std::set<FieldId> fieldsToSinks() const {
    return {sol.fields.begin(), sol.fields.end()};
  }
  ReachClass classify(VarId x) const;
  // Sinks reached from x with the strongest class.
  std::vector<std::pair<VarId, CrClass>> reached(VarId x) const;
  // Witness edge indices into the solved graph's edge list for the
  // strongest entry toward the given sink.
  std::vector<int32_t> witness(VarId x, VarId sink) const;
};

// Anchor set for a program: this, parameters, and ret of every method.
std::vector<bool> anchorVars(const Program& p);

// Fig. 8 CFL, negative setting: back-propagates sinks.
CflResult runCfl(const Program& p, const FlowGraph& g,
                 const std::vector<VarId>& sinks);

// Positive setting by duality: reachability of sources over the reversed
// graph.
CflResult runCflPositive(const Program& p, const FlowGraph& g,
                         const std::vector<VarId>& sources);

}  // namespace flowcfl

#endif
