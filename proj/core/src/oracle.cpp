#include "flowcfl/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace flowcfl {

namespace {

constexpr size_t kStateCap = 400000;

struct St {
  int32_t node;
  int32_t closes;  // residual mode: matched prefix length; class mode: 0/1
  std::vector<int32_t> opens;
  std::vector<int32_t> pgOpens;
  auto operator<=>(const St&) const = default;
};

struct Search {
  const std::vector<FlowEdge>* edges;
  std::vector<std::vector<int32_t>> out;  // edge indices by source

  explicit Search(const FlowGraph& g, int32_t numNodes)
      : edges(&g.edges), out(numNodes) {
    for (size_t i = 0; i < g.edges.size(); ++i)
      out[g.edges[i].src].push_back((int32_t)i);
  }
};

// One CR/PG transition; returns false when the edge cannot be taken.
bool applyEdge(const FlowEdge& e, St& s, bool residualMode,
               const AbstractDelta* residual, PgDiscipline pg,
               const std::set<FieldId>* F) {
  switch (e.ann) {
    case CrAnn::D:
      break;
    case CrAnn::Open:
      s.opens.push_back(e.tag);
      break;
    case CrAnn::Close:
      if (!s.opens.empty()) {
        if (s.opens.back() != e.tag) return false;
        s.opens.pop_back();
      } else if (residualMode) {
        if (s.closes >= (int32_t)residual->rets.size() ||
            residual->rets[s.closes] != e.tag)
          return false;
        ++s.closes;
      } else {
        s.closes = 1;
      }
      break;
    case CrAnn::Write:
      if (pg == PgDiscipline::Balanced) {
        s.pgOpens.push_back(e.tag);
      } else if (pg == PgDiscipline::CsfiPlus) {
        if (!F || !F->count(e.tag)) return false;
      }
      break;
    case CrAnn::Read:
      if (pg == PgDiscipline::Balanced) {
        if (s.pgOpens.empty() || s.pgOpens.back() != e.tag) return false;
        s.pgOpens.pop_back();
      }
      break;
  }
  return true;
}

}  // namespace

OracleAnswer oraclePaths(const OracleQuery& q) {
  OracleAnswer ans;
  int32_t numNodes = 0;
  for (const auto& e : q.graph->edges)
    numNodes = std::max({numNodes, e.src + 1, e.dst + 1});
  numNodes = std::max({numNodes, q.src + 1, q.dst + 1});
  Search search(*q.graph, numNodes);

  auto accepts = [&](const St& s) {
    if (s.node != q.dst) return false;
    if (s.closes != (int32_t)q.residual.rets.size()) return false;
    if (s.opens.size() != q.residual.calls.size()) return false;
    for (size_t i = 0; i < s.opens.size(); ++i)
      if (s.opens[i] != q.residual.calls[i]) return false;
    if (q.pg == PgDiscipline::Balanced && !s.pgOpens.empty()) return false;
    return true;
  };

  St start{q.src, 0, {}, {}};
  std::map<St, std::pair<St, int32_t>> parent;  // for witness reconstruction
  std::map<St, int> depth;
  depth[start] = 0;
  std::deque<St> queue{start};
  if (accepts(start)) {
    ans.found = true;
    return ans;
  }
  while (!queue.empty()) {
    St cur = queue.front();
    queue.pop_front();
    int d = depth[cur];
    if (d >= q.bound) {
      if (!search.out[cur.node].empty()) ans.inconclusive = true;
      continue;
    }
    for (int32_t ei : search.out[cur.node]) {
      const FlowEdge& e = (*search.edges)[ei];
      St next = cur;
      next.node = e.dst;
      if (!applyEdge(e, next, true, &q.residual, q.pg, q.fields)) continue;
      if (depth.count(next)) continue;
      if (depth.size() >= kStateCap) {
        ans.inconclusive = true;
        return ans;
      }
      depth[next] = d + 1;
      parent[next] = {cur, ei};
      if (accepts(next)) {
        ans.found = true;
        St walk = next;
        while (parent.count(walk)) {
          auto [prev, edge] = parent[walk];
          ans.witnessEdges.push_back(edge);
          walk = prev;
        }
        std::reverse(ans.witnessEdges.begin(), ans.witnessEdges.end());
        return ans;
      }
      queue.push_back(next);
    }
  }
  return ans;
}

ClassAnswer oracleClasses(const FlowGraph& g, VarId src, VarId dst,
                          PgDiscipline pg, const std::set<FieldId>* fields,
                          int bound) {
  ClassAnswer ans;
  int32_t numNodes = 0;
  for (const auto& e : g.edges)
    numNodes = std::max({numNodes, e.src + 1, e.dst + 1});
  numNodes = std::max({numNodes, src + 1, dst + 1});
  Search search(g, numNodes);

  auto classOf = [](const St& s) {
    if (s.closes) return CrClass::R;
    return s.opens.empty() ? CrClass::M : CrClass::C;
  };

  St start{src, 0, {}, {}};
  std::map<St, int> depth;
  depth[start] = 0;
  std::deque<St> queue{start};
  if (src == dst) ans.classes.insert(CrClass::M);  // the trivial empty path
  while (!queue.empty()) {
    St cur = queue.front();
    queue.pop_front();
    int d = depth[cur];
    if (d >= bound) {
      if (!search.out[cur.node].empty()) ans.inconclusive = true;
      continue;
    }
    for (int32_t ei : search.out[cur.node]) {
      const FlowEdge& e = g.edges[ei];
      St next = cur;
      next.node = e.dst;
      if (!applyEdge(e, next, false, nullptr, pg, fields)) continue;
      if (depth.count(next)) continue;
      if (depth.size() >= kStateCap) {
        ans.inconclusive = true;
        return ans;
      }
      depth[next] = d + 1;
      if (next.node == dst &&
          (pg != PgDiscipline::Balanced || next.pgOpens.empty()))
        ans.classes.insert(classOf(next));
      queue.push_back(next);
    }
  }
  return ans;
}

ClassAnswer oracleRiClasses(const RIGraph& g, int32_t node,
                            const std::set<VarId>& updates, int bound) {
  ClassAnswer ans;
  int32_t numNodes = g.numVarNodes + (int32_t)g.slots.size();
  if (node >= numNodes) return ans;

  // Any-path reachability to an update (for segments after the first
  // approximate edge).
  std::vector<std::vector<int32_t>> preds(numNodes);
  for (const auto& e : g.edges) preds[e.dst].push_back(e.src);
  std::vector<bool> reach(numNodes, false);
  {
    std::vector<int32_t> work(updates.begin(), updates.end());
    for (int32_t u : work) reach[u] = true;
    while (!work.empty()) {
      int32_t n = work.back();
      work.pop_back();
      for (int32_t m : preds[n])
        if (!reach[m]) {
          reach[m] = true;
          work.push_back(m);
        }
    }
  }

  std::vector<std::vector<int32_t>> out(numNodes);
  for (size_t i = 0; i < g.edges.size(); ++i)
    out[g.edges[i].src].push_back((int32_t)i);

  struct RiSt {
    int32_t node;
    int32_t hasClose;
    std::vector<int32_t> opens;
    auto operator<=>(const RiSt&) const = default;
  };
  auto classOf = [](const RiSt& s) {
    if (s.hasClose) return CrClass::R;
    return s.opens.empty() ? CrClass::M : CrClass::C;
  };
  auto acceptAt = [&](const RiSt& s) {
    if (updates.count(s.node)) ans.classes.insert(classOf(s));
    for (int32_t ei : out[s.node]) {
      const auto& e = g.edges[ei];
      if (e.approx && reach[e.dst]) ans.classes.insert(classOf(s));
    }
  };

  RiSt start{node, 0, {}};
  std::map<RiSt, int> depth;
  depth[start] = 0;
  std::deque<RiSt> queue{start};
  acceptAt(start);
  while (!queue.empty()) {
    RiSt cur = queue.front();
    queue.pop_front();
    int d = depth[cur];
    if (d >= bound) {
      if (!out[cur.node].empty()) ans.inconclusive = true;
      continue;
    }
    for (int32_t ei : out[cur.node]) {
      const auto& e = g.edges[ei];
      if (e.approx) continue;  // ends the leading segment
      RiSt next = cur;
      next.node = e.dst;
      switch (e.ann) {
        case CrAnn::D:
          break;
        case CrAnn::Open:
          next.opens.push_back(e.tag);
          break;
        case CrAnn::Close:
          if (!next.opens.empty()) {
            if (next.opens.back() != e.tag) continue;
            next.opens.pop_back();
          } else {
            next.hasClose = 1;
          }
          break;
        default:
          break;
      }
      if (depth.count(next)) continue;
      if (depth.size() >= kStateCap) {
        ans.inconclusive = true;
        return ans;
      }
      depth[next] = d + 1;
      acceptAt(next);
      queue.push_back(next);
    }
  }
  return ans;
}

}  // namespace flowcfl
