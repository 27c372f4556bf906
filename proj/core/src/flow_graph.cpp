#include "flowcfl/flow_graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace flowcfl {

size_t FlowGraph::inverseCount() const {
  size_t n = 0;
  for (const auto& e : edges) n += e.inverse;
  return n;
}

size_t FlowGraph::forwardCount() const { return edges.size() - inverseCount(); }

bool FlowGraph::hasEdge(VarId src, VarId dst, CrAnn ann, int32_t tag,
                        bool inverse) const {
  for (const auto& e : edges)
    if (e.key() == std::tuple(src, dst, ann, tag, inverse)) return true;
  return false;
}

namespace {

class Builder {
 public:
  Builder(const Program& p, const ImmResult* imm) : p_(p), imm_(imm) {}

  FlowGraph build() {
    forEachStmt(p_, [&](const Stmt& s) { visit(s); });
    return std::move(g_);
  }

 private:
  bool notReadonlyVar(VarId v) const {
    return !imm_ || imm_->varQual[v] != ImmQual::Readonly;
  }
  bool notReadonlyField(FieldId f) const {
    return !imm_ || imm_->fieldQual[f] != ImmQual::Readonly;
  }
  // Adaptation context for call slots: the call's left-hand side, readonly
  // when the call has none.
  bool slotInverseWanted(VarId lhs, VarId slot) const {
    if (!imm_) return true;
    ImmQual ctx = lhs == kNoId ? ImmQual::Readonly : imm_->varQual[lhs];
    return adaptRi(ctx, imm_->varQual[slot]) != ImmQual::Readonly;
  }

  void add(VarId src, VarId dst, CrAnn ann, int32_t tag, bool inverse,
           SrcLoc loc) {
    auto key = std::tuple(src, dst, ann, tag, inverse);
    if (!seen_.insert(key).second) return;
    g_.edges.push_back({src, dst, ann, tag, inverse, loc});
  }

  void visit(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        add(s.rhs, s.lhs, CrAnn::D, -1, false, s.loc);
        if (notReadonlyVar(s.lhs)) add(s.lhs, s.rhs, CrAnn::D, -1, true, s.loc);
        break;
      case Stmt::Kind::Write:
        add(s.rhs, s.recv, CrAnn::Write, s.field, false, s.loc);
        if (notReadonlyField(s.field))
          add(s.recv, s.rhs, CrAnn::Read, s.field, true, s.loc);
        break;
      case Stmt::Kind::Read:
        add(s.recv, s.lhs, CrAnn::Read, s.field, false, s.loc);
        if (notReadonlyVar(s.lhs))
          add(s.lhs, s.recv, CrAnn::Write, s.field, true, s.loc);
        break;
      case Stmt::Kind::Call: {
        const CallSite& cs = p_.callSites.at(s.site);
        if (cs.callee == kNoId) break;
        const MethodDecl& m = p_.methods[cs.callee];
        add(s.recv, m.thisVar, CrAnn::Open, s.site, false, s.loc);
        if (slotInverseWanted(s.lhs, m.thisVar))
          add(m.thisVar, s.recv, CrAnn::Close, s.site, true, s.loc);
        for (size_t i = 0; i < s.args.size() && i < m.params.size(); ++i) {
          add(s.args[i], m.params[i], CrAnn::Open, s.site, false, s.loc);
          if (slotInverseWanted(s.lhs, m.params[i]))
            add(m.params[i], s.args[i], CrAnn::Close, s.site, true, s.loc);
        }
        if (s.lhs != kNoId && m.retVar != kNoId) {
          add(m.retVar, s.lhs, CrAnn::Close, s.site, false, s.loc);
          if (slotInverseWanted(s.lhs, m.retVar))
            add(s.lhs, m.retVar, CrAnn::Open, s.site, true, s.loc);
        }
        break;
      }
      default:
        break;
    }
  }

  const Program& p_;
  const ImmResult* imm_;
  FlowGraph g_;
  std::set<std::tuple<VarId, VarId, CrAnn, int32_t, bool>> seen_;
};

}  // namespace

FlowGraph buildGbi(const Program& p) { return Builder(p, nullptr).build(); }

FlowGraph buildGri(const Program& p, const ImmResult& imm) {
  return Builder(p, &imm).build();
}

FlowGraph reverseGraph(const FlowGraph& g) {
  FlowGraph out;
  for (const auto& e : g.edges) {
    CrAnn ann = e.ann;
    if (ann == CrAnn::Open) ann = CrAnn::Close;
    else if (ann == CrAnn::Close) ann = CrAnn::Open;
    else if (ann == CrAnn::Write) ann = CrAnn::Read;
    else if (ann == CrAnn::Read) ann = CrAnn::Write;
    out.edges.push_back({e.dst, e.src, ann, e.tag, !e.inverse, e.loc});
  }
  return out;
}

FlowGraph contextInsensitive(const FlowGraph& g) {
  FlowGraph out = g;
  for (auto& e : out.edges)
    if (e.ann == CrAnn::Open || e.ann == CrAnn::Close) {
      e.ann = CrAnn::D;
      e.tag = -1;
    }
  return out;
}

std::string edgeLabel(const Program& p, const FlowEdge& e) {
  switch (e.ann) {
    case CrAnn::D: return "d";
    case CrAnn::Open: return "(" + std::to_string(e.tag);
    case CrAnn::Close: return ")" + std::to_string(e.tag);
    case CrAnn::Write: return "w_" + p.fields[e.tag].name;
    case CrAnn::Read: return "r_" + p.fields[e.tag].name;
  }
  return "?";
}

std::string emitDot(const Program& p, const FlowGraph& g) {
  std::set<std::string> nodes;
  for (const auto& e : g.edges) {
    nodes.insert(p.varName(e.src));
    nodes.insert(p.varName(e.dst));
  }
  std::ostringstream os;
  os << "digraph flow {\n";
  for (const auto& n : nodes) os << "  \"" << n << "\";\n";
  std::vector<std::string> lines;
  for (const auto& e : g.edges) {
    std::ostringstream l;
    l << "  \"" << p.varName(e.src) << "\" -> \"" << p.varName(e.dst)
      << "\" [label=\"" << edgeLabel(p, e) << "\""
      << (e.inverse ? ", style=dashed" : "") << "];\n";
    lines.push_back(l.str());
  }
  std::sort(lines.begin(), lines.end());
  for (auto& l : lines) os << l;
  os << "}\n";
  return os.str();
}

}  // namespace flowcfl
