#include "flowcfl/reim.hpp"

#include <algorithm>
#include <sstream>

namespace flowcfl {

const char* immName(ImmQual q) {
  switch (q) {
    case ImmQual::Readonly: return "readonly";
    case ImmQual::Poly: return "poly";
    case ImmQual::Mutable: return "mutable";
  }
  return "?";
}

ImmQual adaptRi(ImmQual ctx, ImmQual q) {
  if (q == ImmQual::Readonly || q == ImmQual::Mutable) return q;
  return ctx;
}

ImmQual adaptRiSeq(const std::vector<ImmQual>& ctxs, ImmQual q) {
  ImmQual acc = q;
  for (auto it = ctxs.rbegin(); it != ctxs.rend(); ++it)
    acc = adaptRi(*it, acc);
  return acc;
}

int32_t RIGraph::slotNode(VarId recv, FieldId f) {
  auto key = std::make_pair(recv, f);
  auto it = slotIndex.find(key);
  if (it != slotIndex.end()) return it->second;
  int32_t node = numVarNodes + (int32_t)slots.size();
  slots.push_back(key);
  slotIndex[key] = node;
  return node;
}

int32_t RIGraph::findSlot(VarId recv, FieldId f) const {
  auto it = slotIndex.find(std::make_pair(recv, f));
  return it == slotIndex.end() ? kNoId : it->second;
}

std::string RIGraph::nodeName(const Program& p, int32_t node) const {
  if (node < numVarNodes) return p.varName(node);
  auto [v, f] = slots[node - numVarNodes];
  return p.varName(v) + "." + p.fields[f].name;
}

std::set<VarId> findUpdates(const Program& p) {
  std::set<VarId> out;
  forEachStmt(p, [&](const Stmt& s) {
    if (s.kind == Stmt::Kind::Write) out.insert(s.recv);
  });
  return out;
}

RIGraph buildRiGraph(const Program& p) {
  RIGraph g;
  g.numVarNodes = (int32_t)p.vars.size();
  auto add = [&](int32_t src, int32_t dst, CrAnn ann, int32_t tag, bool approx,
                 SrcLoc loc) {
    for (const auto& e : g.edges)
      if (e.src == src && e.dst == dst && e.ann == ann && e.tag == tag &&
          e.approx == approx)
        return;
    g.edges.push_back({src, dst, ann, tag, approx, loc});
  };
  // Write and read sides; the approximate edges pairing them come after.
  std::vector<std::pair<FieldId, int32_t>> writeSlots, readSlots;
  forEachStmt(p, [&](const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        add(s.rhs, s.lhs, CrAnn::D, -1, false, s.loc);
        break;
      case Stmt::Kind::Write: {
        int32_t slot = g.slotNode(s.recv, s.field);
        add(s.rhs, slot, CrAnn::D, -1, false, s.loc);
        writeSlots.push_back({s.field, slot});
        break;
      }
      case Stmt::Kind::Read: {
        int32_t slot = g.slotNode(s.recv, s.field);
        add(slot, s.lhs, CrAnn::D, -1, false, s.loc);
        add(s.recv, slot, CrAnn::D, -1, false, s.loc);
        readSlots.push_back({s.field, slot});
        break;
      }
      case Stmt::Kind::Call: {
        const CallSite& cs = p.callSites.at(s.site);
        if (cs.callee == kNoId) break;
        const MethodDecl& m = p.methods[cs.callee];
        add(s.recv, m.thisVar, CrAnn::Open, s.site, false, s.loc);
        for (size_t i = 0; i < s.args.size() && i < m.params.size(); ++i)
          add(s.args[i], m.params[i], CrAnn::Open, s.site, false, s.loc);
        if (s.lhs != kNoId && m.retVar != kNoId)
          add(m.retVar, s.lhs, CrAnn::Close, s.site, false, s.loc);
        break;
      }
      default:
        break;
    }
  });
  for (auto& [wf, wslot] : writeSlots)
    for (auto& [rf, rslot] : readSlots)
      if (wf == rf) add(wslot, rslot, CrAnn::D, -1, true, SrcLoc{});
  return g;
}

namespace {

// Nodes that reach an update by any directed path, approx edges included.
std::vector<bool> reachAny(const RIGraph& g, const std::set<VarId>& updates,
                           int32_t numNodes) {
  std::vector<std::vector<int32_t>> preds(numNodes);
  for (const auto& e : g.edges) preds[e.dst].push_back(e.src);
  std::vector<bool> in(numNodes, false);
  std::vector<int32_t> work;
  for (VarId u : updates) {
    in[u] = true;
    work.push_back(u);
  }
  while (!work.empty()) {
    int32_t n = work.back();
    work.pop_back();
    for (int32_t m : preds[n])
      if (!in[m]) {
        in[m] = true;
        work.push_back(m);
      }
  }
  return in;
}

}  // namespace

ImmResult classifyImmutability(const Program& p, const RIGraph& g,
                               const std::set<VarId>& updates) {
  int32_t numNodes = g.numVarNodes + (int32_t)g.slots.size();
  std::vector<bool> reach = reachAny(g, updates, numNodes);

  // Leading segments end at an update or at an approximate edge whose
  // target goes on to reach an update; both become d-edges into one
  // pseudo-sink.
  std::set<int32_t> terminals(updates.begin(), updates.end());
  for (const auto& e : g.edges)
    if (e.approx && reach[e.dst]) terminals.insert(e.src);

  CrGraph cg;
  int32_t pseudoSink = numNodes;
  cg.numNodes = numNodes + 1;
  cg.gateWrites = false;
  cg.anchor.assign(cg.numNodes, false);
  for (size_t v = 0; v < p.vars.size(); ++v) {
    auto k = p.vars[v].kind;
    if (k == VarDecl::Kind::This || k == VarDecl::Kind::Param ||
        k == VarDecl::Kind::Ret)
      cg.anchor[v] = true;
  }
  for (const auto& e : g.edges)
    if (!e.approx) cg.edges.push_back({e.src, e.dst, e.ann, e.tag});
  for (int32_t t : terminals)
    cg.edges.push_back({t, pseudoSink, CrAnn::D, -1});

  CrSolution sol = solveCr(cg, {pseudoSink});

  ImmResult out;
  out.updates = updates;
  out.nodeClasses.resize(numNodes);
  for (int32_t n = 0; n < numNodes; ++n) out.nodeClasses[n] = sol.classesOf(n);
  auto classify = [&](int32_t node) {
    const auto& cs = out.nodeClasses[node];
    if (cs.count(CrClass::M) || cs.count(CrClass::C)) return ImmQual::Mutable;
    if (cs.count(CrClass::R)) return ImmQual::Poly;
    return ImmQual::Readonly;
  };
  out.varQual.resize(p.vars.size(), ImmQual::Readonly);
  for (size_t v = 0; v < p.vars.size(); ++v)
    out.varQual[v] = classify((int32_t)v);
  // Field slots are viewpoints: any slot on a path to an update makes the
  // field poly, never mutable.
  out.fieldQual.resize(p.fields.size(), ImmQual::Readonly);
  for (size_t k = 0; k < g.slots.size(); ++k) {
    int32_t node = g.numVarNodes + (int32_t)k;
    if (!out.nodeClasses[node].empty())
      out.fieldQual[g.slots[k].second] = ImmQual::Poly;
  }
  return out;
}

ImmResult inferImmutability(const Program& p) {
  RIGraph g = buildRiGraph(p);
  return classifyImmutability(p, g, findUpdates(p));
}

std::string emitRiDot(const Program& p, const RIGraph& g) {
  int32_t numNodes = g.numVarNodes + (int32_t)g.slots.size();
  std::vector<std::pair<std::string, int32_t>> named;
  std::vector<bool> used(numNodes, false);
  for (const auto& e : g.edges) used[e.src] = used[e.dst] = true;
  for (int32_t n = 0; n < numNodes; ++n)
    if (used[n]) named.push_back({g.nodeName(p, n), n});
  std::sort(named.begin(), named.end());
  std::ostringstream os;
  os << "digraph ri {\n";
  for (auto& [name, n] : named) os << "  \"" << name << "\";\n";
  std::vector<std::string> lines;
  for (const auto& e : g.edges) {
    std::ostringstream l;
    std::string label;
    if (e.ann == CrAnn::Open) label = "(" + std::to_string(e.tag);
    else if (e.ann == CrAnn::Close) label = ")" + std::to_string(e.tag);
    else label = e.approx ? "a" : "d";
    l << "  \"" << g.nodeName(p, e.src) << "\" -> \"" << g.nodeName(p, e.dst)
      << "\" [label=\"" << label << "\"" << (e.approx ? ", style=dashed" : "")
      << "];\n";
    lines.push_back(l.str());
  }
  std::sort(lines.begin(), lines.end());
  for (auto& l : lines) os << l;
  os << "}\n";
  return os.str();
}

std::string formatImmTable(const Program& p, const ImmResult& imm) {
  std::vector<std::string> lines;
  for (size_t v = 0; v < p.vars.size(); ++v)
    lines.push_back(p.varName((VarId)v) + ": " + immName(imm.varQual[v]));
  std::sort(lines.begin(), lines.end());
  std::vector<std::string> fieldLines;
  for (size_t f = 0; f < p.fields.size(); ++f)
    fieldLines.push_back(p.fieldName((FieldId)f) + ": " +
                         immName(imm.fieldQual[f]));
  std::sort(fieldLines.begin(), fieldLines.end());
  std::ostringstream os;
  for (auto& l : lines) os << l << "\n";
  for (auto& l : fieldLines) os << l << "\n";
  return os.str();
}

}  // namespace flowcfl
