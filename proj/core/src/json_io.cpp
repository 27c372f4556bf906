#include "flowcfl/json_io.hpp"

#include <json.hpp>

namespace flowcfl {

using nlohmann::json;

namespace {

json ctxJson(const ContextTable& t, CtxId ctx) {
  json fs = json::array();
  for (FrameUid f : t.frames[ctx]) {
    json fr;
    fr["frame"] = f;
    fr["site"] = t.frameSite[f] == kNoId ? json(nullptr) : json(t.frameSite[f]);
    fs.push_back(fr);
  }
  return fs;
}

std::string ctxVarName(const Program& p, const ContextTable& t,
                       const CtxVar& v) {
  std::string s = p.varName(v.var) + "^[";
  const auto& fs = t.frames[v.ctx];
  for (size_t i = 0; i < fs.size(); ++i)
    s += (i ? "," : "") + std::to_string(fs[i]);
  return s + "]";
}

const char* kindName(Stmt::Kind k) {
  switch (k) {
    case Stmt::Kind::Assign: return "assign";
    case Stmt::Kind::Alloc: return "alloc";
    case Stmt::Kind::Read: return "read";
    case Stmt::Kind::Write: return "write";
    case Stmt::Kind::Call: return "call";
    case Stmt::Kind::Branch: return "branch";
  }
  return "?";
}

}  // namespace

std::string traceJson(const Program& p, const RunResult& run) {
  json j;
  j["schema"] = 1;
  j["budget_exhausted"] = run.budgetExhausted;
  j["trace_error"] = run.traceError ? json(run.errorMessage) : json(nullptr);
  json steps = json::array();
  for (const auto& s : run.steps) {
    json st;
    st["stmt"] = std::string(kindName(s.kind)) + (s.isReturn ? "-ret" : "");
    st["loc"] = std::to_string(s.loc.line) + ":" + std::to_string(s.loc.col);
    st["context"] = ctxJson(run.ctxs, s.ctx);
    steps.push_back(st);
  }
  j["steps"] = steps;
  json chains = json::array();
  for (const auto& [target, sources] : run.state.chains) {
    json c;
    if (std::holds_alternative<CtxVar>(target)) {
      c["target"] = ctxVarName(p, run.ctxs, std::get<CtxVar>(target));
    } else {
      const ObjSlot& sl = std::get<ObjSlot>(target);
      c["target"] =
          "o" + std::to_string(sl.obj) + "." + p.fields[sl.field].name;
    }
    json srcs = json::array();
    for (const auto& s : sources) srcs.push_back(ctxVarName(p, run.ctxs, s));
    c["sources"] = srcs;
    chains.push_back(c);
  }
  j["chains"] = chains;
  json warnings = json::array();
  for (const auto& w : run.warnings) warnings.push_back(w);
  j["warnings"] = warnings;
  return j.dump(2);
}

std::string graphJson(const Program& p, const FlowGraph& g) {
  json j;
  j["schema"] = 1;
  json edges = json::array();
  std::vector<json> sorted;
  for (const auto& e : g.edges) {
    json je;
    je["src"] = p.varName(e.src);
    je["dst"] = p.varName(e.dst);
    je["ann"] = edgeLabel(p, e);
    je["dir"] = e.inverse ? "inv" : "fwd";
    je["loc"] = std::to_string(e.loc.line) + ":" + std::to_string(e.loc.col);
    sorted.push_back(je);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const json& a, const json& b) { return a.dump() < b.dump(); });
  for (auto& e : sorted) edges.push_back(e);
  j["edges"] = edges;
  return j.dump(2);
}

std::string analysisJson(const Program& p, const AnalysisConfig& cfg,
                         const AnalysisOutput& out) {
  json j;
  j["schema"] = 1;
  j["setting"] = cfg.setting == Setting::Negative ? "neg" : "pos";
  j["graph"] = cfg.graph == AnalysisConfig::GraphKind::RI ? "ri" : "bi";
  j["mode"] =
      cfg.mode == AdapterMode::PerSlot ? "flowcfl" : "flowcfl-minus";
  json errs = json::array();
  for (const auto& c : out.conflicts) {
    json e;
    e["source"] = p.varName(c.source);
    e["sink"] = p.varName(c.sink);
    e["witness"] = c.witness;
    errs.push_back(e);
  }
  j["errors"] = errs;
  if (out.cfl) {
    json cls;
    for (size_t v = 0; v < p.vars.size(); ++v)
      cls[p.varName((VarId)v)] = reachName(out.cfl->classify((VarId)v));
    j["classification"] = cls;
    json fields = json::array();
    for (FieldId f : out.cfl->fieldsToSinks()) fields.push_back(p.fieldName(f));
    j["fields_to_sinks"] = fields;
  }
  if (out.types) {
    json ty;
    for (int32_t t = 0; t < out.types->terms.nv + out.types->terms.nf; ++t)
      ty[out.types->terms.name(p, t)] = qualName(out.types->chosenQual(t));
    j["typing"] = ty;
  }
  if (out.equivalence) {
    json eq;
    eq["violations"] = out.equivalence->violations;
    j["equivalence"] = eq;
  }
  j["imm"] = json::object();
  for (size_t v = 0; v < p.vars.size(); ++v)
    j["imm"][p.varName((VarId)v)] = immName(out.imm.varQual[v]);
  for (size_t f = 0; f < p.fields.size(); ++f)
    j["imm"][p.fieldName((FieldId)f)] = immName(out.imm.fieldQual[f]);
  j["exit"] = out.exitCode;
  return j.dump(2);
}

std::string corpusJson(const CorpusReport& rep) {
  json j;
  j["schema"] = 1;
  j["programs"] = rep.programs;
  j["traces_run"] = rep.tracesRun;
  j["traces_excluded"] = rep.tracesExcluded;
  j["chains_checked"] = rep.chainsChecked;
  j["chains_inconclusive"] = rep.chainsInconclusive;
  j["lemma1_steps"] = rep.lemma1Steps;
  j["lemma1_failures"] = rep.lemma1Failures;
  j["lemma2_triples"] = rep.lemma2Triples;
  j["lemma2_failures"] = rep.lemma2Failures;
  j["equivalence_violations"] = rep.equivalenceViolations;
  j["cfl_oracle_disagreements"] = rep.cflOracleDisagreements;
  j["ri_oracle_disagreements"] = rep.riOracleDisagreements;
  j["oracle_inconclusive"] = rep.oracleInconclusive;
  j["precision_violations"] = rep.precisionViolations;
  j["messages"] = rep.messages;
  j["ok"] = rep.ok();
  return j.dump(2);
}

std::string corpusJUnitXml(const CorpusReport& rep) {
  struct Case {
    std::string name;
    bool ok;
    std::string detail;
  };
  std::vector<Case> cases = {
      {"theorem1", rep.messages.empty() || rep.ok(), ""},
      {"lemma1", rep.lemma1Failures == 0,
       std::to_string(rep.lemma1Failures) + " failures"},
      {"lemma2", rep.lemma2Failures == 0,
       std::to_string(rep.lemma2Failures) + " failures"},
      {"equivalence", rep.equivalenceViolations == 0,
       std::to_string(rep.equivalenceViolations) + " violations"},
      {"cfl_oracle", rep.cflOracleDisagreements == 0, ""},
      {"ri_oracle", rep.riOracleDisagreements == 0, ""},
      {"precision", rep.precisionViolations == 0, ""},
  };
  int failures = 0;
  for (auto& c : cases) failures += !c.ok;
  std::string xml = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  xml += "<testsuite name=\"flowcfl-validate\" tests=\"" +
         std::to_string(cases.size()) + "\" failures=\"" +
         std::to_string(failures) + "\">\n";
  for (auto& c : cases) {
    xml += "  <testcase name=\"" + c.name + "\"";
    if (c.ok) {
      xml += "/>\n";
    } else {
      xml += ">\n    <failure message=\"" + c.detail + "\"/>\n  </testcase>\n";
    }
  }
  xml += "</testsuite>\n";
  return xml;
}

}  // namespace flowcfl
