// Command line driver: parse, imm, graph, analyze, trace, validate.
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "flowcfl/analysis.hpp"
#include "flowcfl/generator.hpp"
#include "flowcfl/json_io.hpp"
#include "flowcfl/parser.hpp"

using namespace flowcfl;

namespace {

int readFile(const std::string& path, std::string& out) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << path << ": cannot open\n";
    return 2;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return 0;
}

void writeFileOrStdout(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
}

void printDiags(const std::string& path, const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    std::cerr << path << ":" << d.loc.line << ":" << d.loc.col << ": "
              << (d.severity == Severity::Error ? "error: " : "warning: ")
              << d.message << "\n";
}

// Loads and reports diagnostics; returns false when the program is
// unusable.
bool load(const std::string& path, Program& p) {
  std::string text;
  if (readFile(path, text)) return false;
  std::vector<Diagnostic> diags;
  p = loadProgram(text, diags);
  printDiags(path, diags);
  return !hasErrors(diags);
}

struct AnalyzeOpts {
  AnalysisConfig cfg;
  std::string settingStr = "neg";
  std::string graphStr = "ri";
  std::string engineStr = "both";
  std::string modeStr = "flowcfl";
  std::string dotPath, jsonPath, configPath;

  void resolve() {
    cfg.setting = settingStr == "pos" ? Setting::Positive : Setting::Negative;
    cfg.graph = graphStr == "bi" ? AnalysisConfig::GraphKind::BI
                                 : AnalysisConfig::GraphKind::RI;
    cfg.engine = engineStr == "cfl"     ? AnalysisConfig::EngineKind::Cfl
                 : engineStr == "types" ? AnalysisConfig::EngineKind::Types
                                        : AnalysisConfig::EngineKind::Both;
    cfg.mode = modeStr == "flowcfl-minus" ? AdapterMode::PerSite
                                          : AdapterMode::PerSlot;
  }
};

void addAnalyzeFlags(CLI::App* cmd, AnalyzeOpts& o) {
  cmd->add_option("--setting", o.settingStr, "neg or pos")
      ->check(CLI::IsMember({"neg", "pos"}));
  cmd->add_option("--graph", o.graphStr, "bi or ri")
      ->check(CLI::IsMember({"bi", "ri"}));
  cmd->add_option("--engine", o.engineStr, "cfl, types or both")
      ->check(CLI::IsMember({"cfl", "types", "both"}));
  cmd->add_option("--mode", o.modeStr, "flowcfl or flowcfl-minus")
      ->check(CLI::IsMember({"flowcfl", "flowcfl-minus"}));
  cmd->add_flag("--ci", o.cfg.ciBaseline,
                "context-insensitive baseline (cfl engine)");
  cmd->add_option("--oracle-bound", o.cfg.oracleBound, "oracle edge bound");
  cmd->add_option("--seed", o.cfg.seed, "seed for randomized steps");
  cmd->add_option("--emit-dot", o.dotPath, "write the analyzed graph as DOT");
  cmd->add_option("--json", o.jsonPath, "write the JSON report");
  cmd->add_option("--config", o.configPath,
                  "key=value file mirroring these flags (flags win)");
}

// key=value lines become option defaults; command line flags override.
void applyConfigDefaults(const std::string& path, AnalyzeOpts& o) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << path << ": cannot open config\n";
    exit(2);
  }
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "setting") o.settingStr = val;
    else if (key == "graph") o.graphStr = val;
    else if (key == "engine") o.engineStr = val;
    else if (key == "mode") o.modeStr = val;
    else if (key == "ci") o.cfg.ciBaseline = val == "true" || val == "1";
    else if (key == "oracle-bound") o.cfg.oracleBound = std::stoi(val);
    else if (key == "seed") o.cfg.seed = std::stoull(val);
    else if (key == "emit-dot") o.dotPath = val;
    else if (key == "json") o.jsonPath = val;
    else std::cerr << path << ": unknown config key '" << key << "'\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FlowCFL reachability analysis toolkit"};
  app.require_subcommand(1);

  // parse
  auto* parseCmd = app.add_subcommand("parse", "parse and check programs");
  std::vector<std::string> parseFiles;
  bool parsePrint = false;
  parseCmd->add_option("files", parseFiles, "input .fcfl files")->required();
  parseCmd->add_flag("--print", parsePrint, "print the parsed program back");

  // imm
  auto* immCmd =
      app.add_subcommand("imm", "reference immutability inference");
  std::string immFile, immDot;
  bool emitImm = false;
  immCmd->add_option("file", immFile)->required();
  immCmd->add_flag("--emit-imm", emitImm, "print var: qualifier lines");
  immCmd->add_option("--emit-dot", immDot, "write the RI graph as DOT");

  // graph
  auto* graphCmd = app.add_subcommand("graph", "flow graph construction");
  std::string graphFile, graphKind = "ri", graphDot, graphJsonPath;
  graphCmd->add_option("file", graphFile)->required();
  graphCmd->add_option("--graph", graphKind, "bi or ri")
      ->check(CLI::IsMember({"bi", "ri"}));
  graphCmd->add_option("--emit-dot", graphDot);
  graphCmd->add_option("--json", graphJsonPath);

  // analyze
  auto* analyzeCmd = app.add_subcommand("analyze", "run the analyses");
  std::vector<std::string> analyzeFiles;
  AnalyzeOpts opts;
  analyzeCmd->add_option("files", analyzeFiles)->required();
  addAnalyzeFlags(analyzeCmd, opts);
  // config defaults load before parsing so explicit flags override them
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config")
      applyConfigDefaults(argv[i + 1], opts);

  // trace
  auto* traceCmd = app.add_subcommand("trace", "interpret and dump chains");
  std::string traceFile, traceScript, traceJsonPath;
  int64_t traceBudget = 100000;
  traceCmd->add_option("file", traceFile)->required();
  traceCmd->add_option("--script", traceScript, "branch bits, e.g. 1011");
  traceCmd->add_option("--budget", traceBudget);
  traceCmd->add_option("--json", traceJsonPath);

  // validate
  auto* valCmd = app.add_subcommand("validate", "soundness gates");
  int valRandom = 0;
  uint64_t valSeed = 1;
  int valBound = 12;
  std::string valJson, valJUnit;
  std::vector<std::string> valFiles;
  valCmd->add_option("files", valFiles, "fixture programs to gate");
  valCmd->add_option("--random", valRandom, "generated program count");
  valCmd->add_option("--seed", valSeed);
  valCmd->add_option("--oracle-bound", valBound);
  valCmd->add_option("--json", valJson);
  valCmd->add_option("--junit", valJUnit);

  CLI11_PARSE(app, argc, argv);

  if (parseCmd->parsed()) {
    int rc = 0;
    for (const auto& f : parseFiles) {
      Program p;
      if (!load(f, p)) {
        rc = 2;
        continue;
      }
      std::cout << f << ": " << p.classes.size() << " classes, "
                << p.methods.size() << " methods, " << p.callSites.size()
                << " call sites\n";
      if (parsePrint) std::cout << printProgram(p);
    }
    return rc;
  }

  if (immCmd->parsed()) {
    Program p;
    if (!load(immFile, p)) return 2;
    RIGraph g = buildRiGraph(p);
    ImmResult imm = classifyImmutability(p, g, findUpdates(p));
    if (emitImm || immDot.empty()) std::cout << formatImmTable(p, imm);
    if (!immDot.empty()) writeFileOrStdout(immDot, emitRiDot(p, g));
    return 0;
  }

  if (graphCmd->parsed()) {
    Program p;
    if (!load(graphFile, p)) return 2;
    FlowGraph g = graphKind == "bi" ? buildGbi(p)
                                    : buildGri(p, inferImmutability(p));
    if (!graphDot.empty()) writeFileOrStdout(graphDot, emitDot(p, g));
    if (!graphJsonPath.empty()) writeFileOrStdout(graphJsonPath, graphJson(p, g));
    if (graphDot.empty() && graphJsonPath.empty()) std::cout << emitDot(p, g);
    return 0;
  }

  if (analyzeCmd->parsed()) {
    opts.resolve();
    struct FileResult {
      std::string report, jsonText, dotText;
      int exit = 2;
      bool loaded = false;
    };
    std::vector<std::future<FileResult>> futures;
    for (const auto& f : analyzeFiles)
      futures.push_back(std::async(std::launch::async, [f, &opts]() {
        FileResult r;
        Program p;
        if (!load(f, p)) return r;
        r.loaded = true;
        AnalysisOutput out = analyzeProgram(p, opts.cfg);
        printDiags(f, out.diagnostics);
        r.report = formatReport(p, opts.cfg, out);
        r.jsonText = analysisJson(p, opts.cfg, out);
        const FlowGraph& g =
            opts.cfg.graph == AnalysisConfig::GraphKind::RI ? out.gri
                                                            : out.gbi;
        r.dotText = emitDot(p, g);
        r.exit = out.exitCode;
        return r;
      }));
    int rc = 0;
    for (size_t i = 0; i < futures.size(); ++i) {
      FileResult r = futures[i].get();
      std::cout << "== " << analyzeFiles[i] << "\n" << r.report;
      if (!opts.jsonPath.empty())
        writeFileOrStdout(futures.size() == 1
                              ? opts.jsonPath
                              : opts.jsonPath + "." + std::to_string(i),
                          r.jsonText);
      if (!opts.dotPath.empty())
        writeFileOrStdout(futures.size() == 1
                              ? opts.dotPath
                              : opts.dotPath + "." + std::to_string(i),
                          r.dotText);
      if (r.exit == 2) rc = 2;
      else if (r.exit == 1 && rc == 0) rc = 1;
    }
    return rc;
  }

  if (traceCmd->parsed()) {
    Program p;
    if (!load(traceFile, p)) return 2;
    std::vector<bool> script;
    for (char c : traceScript) script.push_back(c == '1');
    RunResult run = runProgram(p, script, traceBudget);
    writeFileOrStdout(traceJsonPath, traceJson(p, run));
    if (run.traceError) {
      std::cerr << "trace error: " << run.errorMessage << "\n";
      return 1;
    }
    return 0;
  }

  if (valCmd->parsed()) {
    CorpusReport rep;
    for (const auto& f : valFiles) {
      Program p;
      if (!load(f, p)) return 2;
      ImmResult imm = inferImmutability(p);
      RIGraph rig = buildRiGraph(p);
      FlowGraph gri = buildGri(p, imm);
      std::vector<VarId> sinks;
      for (size_t v = 0; v < p.vars.size(); ++v)
        if (p.vars[v].pinned && *p.vars[v].pinned == Qual::Neg)
          sinks.push_back((VarId)v);
      CflResult cfl = runCfl(p, gri, sinks);
      TypeResult types =
          runTypes(p, imm, Setting::Negative, AdapterMode::PerSlot);
      auto eq = checkEquivalence(p, cfl, types);
      rep.equivalenceViolations += eq.violations;
      auto ca = checkCflAgreement(p, gri, cfl, valBound);
      rep.cflOracleDisagreements += (int)ca.disagreements.size();
      for (auto& d : ca.disagreements) rep.messages.push_back(f + ": " + d);
      auto ra = checkRiAgreement(p, rig, imm, valBound);
      rep.riOracleDisagreements += (int)ra.disagreements.size();
      for (auto& d : ra.disagreements) rep.messages.push_back(f + ": " + d);
      RunResult run = runProgram(p, {}, 100000);
      auto t1 = checkTheorem1(p, run, gri, imm, valBound + 2);
      rep.chainsChecked += t1.checkedChains;
      rep.chainsInconclusive += (long)t1.inconclusive.size();
      for (auto& d : t1.failures) rep.messages.push_back(f + ": " + d);
      ++rep.programs;
    }
    if (valRandom > 0) {
      CorpusConfig cc;
      cc.count = valRandom;
      cc.seed = valSeed;
      cc.oracleBound = valBound;
      CorpusReport random = runCorpus(cc);
      rep.programs += random.programs;
      rep.tracesRun += random.tracesRun;
      rep.tracesExcluded += random.tracesExcluded;
      rep.chainsChecked += random.chainsChecked;
      rep.chainsInconclusive += random.chainsInconclusive;
      rep.lemma1Steps += random.lemma1Steps;
      rep.lemma1Failures += random.lemma1Failures;
      rep.lemma2Triples += random.lemma2Triples;
      rep.lemma2Failures += random.lemma2Failures;
      rep.equivalenceViolations += random.equivalenceViolations;
      rep.cflOracleDisagreements += random.cflOracleDisagreements;
      rep.riOracleDisagreements += random.riOracleDisagreements;
      rep.oracleInconclusive += random.oracleInconclusive;
      rep.precisionViolations += random.precisionViolations;
      rep.messages.insert(rep.messages.end(), random.messages.begin(),
                          random.messages.end());
    }
    std::cout << "programs: " << rep.programs
              << "\nequivalence violations: " << rep.equivalenceViolations
              << "\ncfl oracle disagreements: " << rep.cflOracleDisagreements
              << "\nri oracle disagreements: " << rep.riOracleDisagreements
              << "\nprecision violations: " << rep.precisionViolations
              << "\nlemma1 failures: " << rep.lemma1Failures
              << "\nlemma2 failures: " << rep.lemma2Failures
              << "\nchains checked: " << rep.chainsChecked << " ("
              << rep.chainsInconclusive << " inconclusive)\n";
    for (const auto& m : rep.messages) std::cout << "FAIL " << m << "\n";
    if (!valJson.empty()) writeFileOrStdout(valJson, corpusJson(rep));
    if (!valJUnit.empty()) writeFileOrStdout(valJUnit, corpusJUnitXml(rep));
    return rep.ok() ? 0 : 1;
  }

  return 0;
}
