#include "flowcfl/cr_core.hpp"

#include <algorithm>

namespace flowcfl {

const char* crClassName(CrClass c) {
  switch (c) {
    case CrClass::M: return "M";
    case CrClass::C: return "C";
    case CrClass::R: return "R";
  }
  return "?";
}

std::set<CrClass> CrSolution::classesOf(int32_t node) const {
  std::set<CrClass> out;
  for (auto it = entries.lower_bound({node, CrClass::M, INT32_MIN});
       it != entries.end() && it->first.node == node; ++it)
    out.insert(it->first.cls);
  return out;
}

std::set<CrClass> CrSolution::classesOf(int32_t node, int32_t sink) const {
  std::set<CrClass> out;
  for (CrClass c : {CrClass::M, CrClass::C, CrClass::R})
    if (hasEntry(node, c, sink)) out.insert(c);
  return out;
}

std::vector<std::pair<int32_t, CrClass>> CrSolution::sinksReached(
    int32_t node) const {
  std::map<int32_t, CrClass> best;
  for (auto it = entries.lower_bound({node, CrClass::M, INT32_MIN});
       it != entries.end() && it->first.node == node; ++it) {
    auto [pos, fresh] = best.emplace(it->first.sink, it->first.cls);
    if (!fresh && pos->second == CrClass::R && it->first.cls != CrClass::R)
      pos->second = it->first.cls;
  }
  return {best.begin(), best.end()};
}

void CrSolution::expandSum(int32_t idx, std::vector<int32_t>& out) const {
  const Deriv& d = sumDerivs[idx].second;
  switch (d.kind) {
    case Deriv::Kind::AnchorSeed:
      break;  // empty path
    case Deriv::Kind::Base:
      out.push_back(d.edge);
      break;
    case Deriv::Kind::Ext:
      out.push_back(d.edge);
      expandSum(d.prevSum, out);
      break;
    case Deriv::Kind::Compose:
      out.push_back(d.edge);
      expandSum(d.prevSum, out);
      out.push_back(d.retEdge);
      break;
    case Deriv::Kind::Close:
      expandSum(d.prevSum, out);
      expandSum(d.otherSum, out);
      break;
    default:
      break;
  }
}

void CrSolution::expandEntry(int32_t idx, std::vector<int32_t>& out) const {
  const Deriv& d = entryDerivs[idx].second;
  switch (d.kind) {
    case Deriv::Kind::SinkSeed:
      break;
    case Deriv::Kind::Ext:
      out.push_back(d.edge);
      if (d.prevSum >= 0) {
        expandSum(d.prevSum, out);
      } else if (d.prevEntry >= 0) {
        expandEntry(d.prevEntry, out);
      }
      break;
    case Deriv::Kind::Compose:
      out.push_back(d.edge);
      expandSum(d.prevSum, out);
      out.push_back(d.retEdge);
      expandEntry(d.prevEntry, out);
      break;
    default:
      break;
  }
}

std::vector<int32_t> CrSolution::witness(const EntryKey& k) const {
  std::vector<int32_t> out;
  auto it = entries.find(k);
  if (it == entries.end()) return out;
  expandEntry(it->second, out);
  return out;
}

namespace {

class Solver {
 public:
  Solver(const CrGraph& g, const std::vector<int32_t>& sinks) : g_(g) {
    for (int32_t s : sinks)
      if (!std::count(r_.sinkNodes.begin(), r_.sinkNodes.end(), s))
        r_.sinkNodes.push_back(s);
    closeFrom_.resize(g.numNodes);
    for (size_t i = 0; i < g.edges.size(); ++i)
      if (g.edges[i].ann == CrAnn::Close)
        closeFrom_[g.edges[i].src].push_back((int32_t)i);
  }

  CrSolution run() {
    for (size_t i = 0; i < r_.sinkNodes.size(); ++i)
      addEntry({r_.sinkNodes[i], CrClass::M, (int32_t)i},
               {CrSolution::Deriv::Kind::SinkSeed});
    for (int32_t n = 0; n < g_.numNodes; ++n)
      if (g_.anchor[n]) addSummary({n, n}, {CrSolution::Deriv::Kind::AnchorSeed});
    do {
      changed_ = false;
      sweep();
    } while (changed_);
    return std::move(r_);
  }

 private:
  bool writeOpen(int32_t field) const {
    return !g_.gateWrites || r_.fields.count(field) > 0;
  }

  void addEntry(CrSolution::EntryKey k, CrSolution::Deriv d) {
    if (r_.entries.count(k)) return;
    r_.entries[k] = (int32_t)r_.entryDerivs.size();
    r_.entryDerivs.push_back({k, d});
    changed_ = true;
  }

  void addSummary(CrSolution::SumKey k, CrSolution::Deriv d) {
    if (r_.summaries.count(k)) return;
    r_.summaries[k] = (int32_t)r_.sumDerivs.size();
    r_.sumDerivs.push_back({k, d});
    changed_ = true;
  }

  void addField(int32_t f) {
    if (r_.fields.insert(f).second) changed_ = true;
  }

  void sweep() {
    using K = CrSolution::Deriv::Kind;
    for (size_t ei = 0; ei < g_.edges.size(); ++ei) {
      const CrEdge& e = g_.edges[ei];
      // Entry extension: prepend the edge to sink paths at e.dst.
      // Keys are copied: addEntry below may reallocate the deriv vectors.
      size_t nEntries = r_.entryDerivs.size();  // snapshot; additions reseen next sweep
      for (size_t i = 0; i < nEntries; ++i) {
        CrSolution::EntryKey k = r_.entryDerivs[i].first;
        if (k.node != e.dst) continue;
        int32_t prev = (int32_t)i;
        switch (e.ann) {
          case CrAnn::D:
            addEntry({e.src, k.cls, k.sink},
                     {K::Ext, (int32_t)ei, -1, prev, -1, -1});
            break;
          case CrAnn::Read:
            addEntry({e.src, k.cls, k.sink},
                     {K::Ext, (int32_t)ei, -1, prev, -1, -1});
            addField(e.tag);
            break;
          case CrAnn::Write:
            if (writeOpen(e.tag))
              addEntry({e.src, k.cls, k.sink},
                       {K::Ext, (int32_t)ei, -1, prev, -1, -1});
            break;
          case CrAnn::Close:
            addEntry({e.src, CrClass::R, k.sink},
                     {K::Ext, (int32_t)ei, -1, prev, -1, -1});
            break;
          case CrAnn::Open:
            if (k.cls != CrClass::R)
              addEntry({e.src, CrClass::C, k.sink},
                       {K::Ext, (int32_t)ei, -1, prev, -1, -1});
            break;
        }
      }
      // Base and extension summaries through M-kind edges.
      if (e.ann == CrAnn::D || e.ann == CrAnn::Read ||
          (e.ann == CrAnn::Write && writeOpen(e.tag))) {
        addSummary({e.src, e.dst}, {K::Base, (int32_t)ei, -1, -1, -1, -1});
        size_t nSums = r_.sumDerivs.size();
        for (size_t i = 0; i < nSums; ++i) {
          CrSolution::SumKey sk = r_.sumDerivs[i].first;
          if (sk.src != e.dst) continue;
          addSummary({e.src, sk.dst},
                     {K::Ext, (int32_t)ei, -1, -1, (int32_t)i, -1});
        }
      }
      // Matched composition: x -(i-> y ~M~> a -)i-> z gives x ~M~> z and
      // carries z's sink paths over to x.
      if (e.ann == CrAnn::Open) {
        size_t nSums = r_.sumDerivs.size();
        for (size_t i = 0; i < nSums; ++i) {
          CrSolution::SumKey sk = r_.sumDerivs[i].first;
          if (sk.src != e.dst || !g_.anchor[sk.dst]) continue;
          for (int32_t rei : closeFrom_[sk.dst]) {
            const CrEdge& re = g_.edges[rei];
            if (re.tag != e.tag) continue;
            addSummary({e.src, re.dst},
                       {K::Compose, (int32_t)ei, rei, -1, (int32_t)i, -1});
            size_t nE = r_.entryDerivs.size();
            for (size_t j = 0; j < nE; ++j) {
              CrSolution::EntryKey zk = r_.entryDerivs[j].first;
              if (zk.node != re.dst) continue;
              addEntry({e.src, zk.cls, zk.sink},
                       {K::Compose, (int32_t)ei, rei, (int32_t)j, (int32_t)i, -1});
            }
          }
        }
      }
    }
    // Close summaries into anchors: (x ~M~> y) . (y ~M~> a).
    size_t n = r_.sumDerivs.size();
    for (size_t i = 0; i < n; ++i) {
      CrSolution::SumKey a = r_.sumDerivs[i].first;
      for (size_t j = 0; j < n; ++j) {
        CrSolution::SumKey b = r_.sumDerivs[j].first;
        if (b.src != a.dst || !g_.anchor[b.dst]) continue;
        addSummary({a.src, b.dst},
                   {CrSolution::Deriv::Kind::Close, -1, -1, -1, (int32_t)i,
                    (int32_t)j});
      }
    }
  }

  const CrGraph& g_;
  CrSolution r_;
  std::vector<std::vector<int32_t>> closeFrom_;
  bool changed_ = false;
};

}  // namespace

CrSolution solveCr(const CrGraph& g, const std::vector<int32_t>& sinks) {
  Solver s(g, sinks);
  return s.run();
}

}  // namespace flowcfl
