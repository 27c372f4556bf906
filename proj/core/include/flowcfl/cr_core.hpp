#ifndef FLOWCFL_CR_CORE_HPP
#define FLOWCFL_CR_CORE_HPP

#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace flowcfl {

// Edge annotations shared by the flow graphs and the immutability graph.
// Open/Close are call/return parentheses tagged with a call site, Write and
// Read are field parentheses tagged with a field.
enum class CrAnn : uint8_t { D, Open, Close, Write, Read };

// CR nonterminal classes: M balanced, C outstanding calls, R at least one
// outstanding return (including return-then-call shapes).
enum class CrClass : uint8_t { M = 0, C = 1, R = 2 };

const char* crClassName(CrClass c);

struct CrEdge {
  int32_t src;
  int32_t dst;
  CrAnn ann;
  int32_t tag;  // call site for Open/Close, field for Write/Read, -1 for D
};

struct CrGraph {
  int32_t numNodes = 0;
  std::vector<CrEdge> edges;
  std::vector<bool> anchor;  // this/p/ret nodes; summary composition targets
  bool gateWrites = true;    // Write edges require their field in F
};

// Backward CSFI+ reachability from a set of sink nodes. Produces
//   - entries (x, N, n): a path from x to sink n whose call/return component
//     classifies as N, with every Write edge's field in F;
//   - summaries (x, y): a balanced (M) path from x to y;
//   - F: fields whose Read edges were consumed on a sink path.
// How each fact was first derived is kept for witness reconstruction.
struct CrSolution {
  struct EntryKey {
    int32_t node;
    CrClass cls;
    int32_t sink;  // index into sinks()
    auto operator<=>(const EntryKey&) const = default;
  };
  struct SumKey {
    int32_t src;
    int32_t dst;
    auto operator<=>(const SumKey&) const = default;
  };

  struct Deriv {
    enum class Kind : uint8_t {
      SinkSeed, AnchorSeed, Ext, Base, Compose, Close
    };
    Kind kind;
    int32_t edge = -1;     // Ext/Base: the prepended edge; Compose: the Open edge
    int32_t retEdge = -1;  // Compose: the matching Close edge
    int32_t prevEntry = -1;
    int32_t prevSum = -1;  // Ext over a summary, Compose's balanced middle
    int32_t otherSum = -1;  // Close: the second summary
  };

  std::vector<int32_t> sinkNodes;
  std::map<EntryKey, int32_t> entries;  // -> index into entryDerivs
  std::map<SumKey, int32_t> summaries;
  std::vector<std::pair<EntryKey, Deriv>> entryDerivs;
  std::vector<std::pair<SumKey, Deriv>> sumDerivs;
  std::set<int32_t> fields;  // F

  bool hasEntry(int32_t node, CrClass cls, int32_t sink) const {
    return entries.count({node, cls, sink}) > 0;
  }
  // Classes with which node reaches any sink.
  std::set<CrClass> classesOf(int32_t node) const;
  std::set<CrClass> classesOf(int32_t node, int32_t sink) const;
  // Sinks reachable from node, with the strongest class (M/C before R).
  std::vector<std::pair<int32_t, CrClass>> sinksReached(int32_t node) const;

  // Edge sequence of a witness path for an entry, from node to the sink.
  std::vector<int32_t> witness(const EntryKey& k) const;

 private:
  void expandEntry(int32_t idx, std::vector<int32_t>& out) const;
  void expandSum(int32_t idx, std::vector<int32_t>& out) const;
};

CrSolution solveCr(const CrGraph& g, const std::vector<int32_t>& sinks);

}  // namespace flowcfl

#endif
