#include "flowcfl/analysis.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace flowcfl {

namespace {

ImmResult allMutableImm(const Program& p) {
  ImmResult imm;
  imm.varQual.assign(p.vars.size(), ImmQual::Mutable);
  imm.fieldQual.assign(p.fields.size(), ImmQual::Poly);
  return imm;
}

std::vector<VarId> pinnedVars(const Program& p, Qual q) {
  std::vector<VarId> out;
  for (size_t v = 0; v < p.vars.size(); ++v)
    if (p.vars[v].pinned && *p.vars[v].pinned == q) out.push_back((VarId)v);
  return out;
}

std::vector<std::string> renderPath(const Program& p, const FlowGraph& g,
                                    const std::vector<int32_t>& edges) {
  std::vector<std::string> out;
  for (int32_t ei : edges) {
    const FlowEdge& e = g.edges[ei];
    out.push_back(p.varName(e.src) + " -" + edgeLabel(p, e) +
                  (e.inverse ? "-inv-> " : "-> ") + p.varName(e.dst));
  }
  return out;
}

// Witness for a types-only conflict: a chain of constraints from the
// source to some pinned opposite-extreme variable.
std::vector<std::string> constraintWitness(const Program& p,
                                           const TypeResult& t, VarId source,
                                           VarId sink) {
  // Directed search over constraint sides in flow direction lhs -> rhs.
  std::map<int32_t, std::pair<int32_t, size_t>> parent;  // term -> (prev, ci)
  std::deque<int32_t> q{source};
  parent[source] = {source, SIZE_MAX};
  while (!q.empty()) {
    int32_t cur = q.front();
    q.pop_front();
    if (cur == sink) break;
    for (size_t ci = 0; ci < t.constraints.size(); ++ci) {
      const Constraint& c = t.constraints[ci];
      std::vector<int32_t> froms, tos;
      froms.push_back(c.lhs.term);
      if (c.lhs.adapted) froms.push_back(c.lhs.ctx);
      tos.push_back(c.rhs.term);
      if (c.rhs.adapted) tos.push_back(c.rhs.ctx);
      if (!std::count(froms.begin(), froms.end(), cur)) continue;
      for (int32_t next : tos)
        if (!parent.count(next)) {
          parent[next] = {cur, ci};
          q.push_back(next);
        }
    }
  }
  std::vector<std::string> out;
  if (!parent.count(sink)) return out;
  int32_t walk = sink;
  while (walk != source) {
    auto [prev, ci] = parent[walk];
    if (ci != SIZE_MAX) out.push_back(t.describe(p, t.constraints[ci]));
    walk = prev;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

AnalysisOutput analyzeProgram(const Program& p, const AnalysisConfig& cfg) {
  AnalysisOutput out;
  out.imm = inferImmutability(p);
  out.gbi = buildGbi(p);
  out.gri = buildGri(p, out.imm);
  bool negative = cfg.setting == Setting::Negative;
  out.seeds = pinnedVars(p, negative ? Qual::Neg : Qual::Pos);
  std::vector<VarId> probes = pinnedVars(p, negative ? Qual::Pos : Qual::Neg);

  const FlowGraph& base =
      cfg.graph == AnalysisConfig::GraphKind::RI ? out.gri : out.gbi;
  bool wantCfl = cfg.engine != AnalysisConfig::EngineKind::Types;
  bool wantTypes = cfg.engine != AnalysisConfig::EngineKind::Cfl;

  if (wantCfl) {
    FlowGraph g = cfg.ciBaseline ? contextInsensitive(base) : base;
    out.cfl = negative ? runCfl(p, g, out.seeds)
                       : runCflPositive(p, g, out.seeds);
    // Conflicts: an opposite-pinned variable that reaches (or is reached
    // by) a seed along an M/C path.
    for (VarId probe : probes)
      for (auto [seed, cls] : out.cfl->reached(probe)) {
        if (cls == CrClass::R) continue;
        Conflict c;
        c.source = negative ? probe : seed;
        c.sink = negative ? seed : probe;
        c.witness = renderPath(p, g, out.cfl->witness(probe, seed));
        out.conflicts.push_back(c);
      }
  }
  if (wantTypes) {
    if (cfg.graph == AnalysisConfig::GraphKind::BI) {
      out.diagnostics.push_back(
          {Severity::Warning, {},
           "graph=bi ignores immutability: types engine runs with all "
           "inverse constraints"});
      ImmResult bi = allMutableImm(p);
      out.types = runTypes(p, bi, cfg.setting, cfg.mode);
    } else {
      out.types = runTypes(p, out.imm, cfg.setting, cfg.mode);
    }
    if (!wantCfl) {
      // Pair contradicted sources with sinks through the constraint graph.
      std::set<int32_t> conflicted;
      for (const auto& e : out.types->errors) conflicted.insert(e.term);
      for (VarId probe : probes) {
        if (!conflicted.count(probe)) continue;
        for (VarId seed : out.seeds) {
          auto w = constraintWitness(p, *out.types, negative ? probe : seed,
                                     negative ? seed : probe);
          if (w.empty()) continue;
          Conflict c;
          c.source = negative ? probe : seed;
          c.sink = negative ? seed : probe;
          c.witness = w;
          out.conflicts.push_back(c);
        }
      }
    }
  }
  if (out.cfl && out.types)
    out.equivalence = checkEquivalence(p, *out.cfl, *out.types);

  std::sort(out.conflicts.begin(), out.conflicts.end(),
            [](const Conflict& a, const Conflict& b) {
              return std::tie(a.source, a.sink) < std::tie(b.source, b.sink);
            });
  out.conflicts.erase(
      std::unique(out.conflicts.begin(), out.conflicts.end(),
                  [](const Conflict& a, const Conflict& b) {
                    return a.source == b.source && a.sink == b.sink;
                  }),
      out.conflicts.end());
  out.exitCode = out.conflicts.empty() ? 0 : 1;
  return out;
}

std::string formatReport(const Program& p, const AnalysisConfig& cfg,
                         const AnalysisOutput& out) {
  std::ostringstream os;
  bool negative = cfg.setting == Setting::Negative;
  for (const auto& c : out.conflicts) {
    os << "error: flow from source " << p.varName(c.source) << " to sink "
       << p.varName(c.sink) << "\n";
    for (const auto& w : c.witness) os << "    " << w << "\n";
  }
  if (out.cfl) {
    os << "cfl classification:\n";
    std::vector<std::string> lines;
    for (size_t v = 0; v < p.vars.size(); ++v)
      lines.push_back("  " + p.varName((VarId)v) + ": " +
                      reachName(out.cfl->classify((VarId)v)));
    std::sort(lines.begin(), lines.end());
    for (auto& l : lines) os << l << "\n";
    os << "  fields reaching " << (negative ? "sinks" : "sources") << ":";
    for (FieldId f : out.cfl->fieldsToSinks()) os << " " << p.fieldName(f);
    os << "\n";
  }
  if (out.types) {
    os << "typing (" << (negative ? "maximal" : "minimal") << "):\n";
    std::vector<std::string> lines;
    for (int32_t t = 0; t < out.types->terms.nv + out.types->terms.nf; ++t)
      lines.push_back("  " + out.types->terms.name(p, t) + ": " +
                      qualName(out.types->chosenQual(t)));
    std::sort(lines.begin(), lines.end());
    for (auto& l : lines) os << l << "\n";
  }
  if (out.equivalence) {
    os << "equivalence: "
       << (out.equivalence->ok()
               ? "agree"
               : std::to_string(out.equivalence->violations) + " violations")
       << "\n";
  }
  return os.str();
}

}  // namespace flowcfl
