#include <benchmark/benchmark.h>

#include "flowcfl/analysis.hpp"
#include "flowcfl/generator.hpp"
#include "flowcfl/parser.hpp"

using namespace flowcfl;

namespace {

// One generated program per size bucket, loaded once.
Program& programOfSize(int stmts) {
  static std::map<int, Program> cache;
  auto it = cache.find(stmts);
  if (it != cache.end()) return it->second;
  GenConfig cfg;
  cfg.seed = 99 + (uint64_t)stmts;
  cfg.maxStmts = stmts;
  cfg.maxSites = std::max(5, stmts / 3);
  cfg.maxClasses = 4;
  cfg.aliasPairBias = true;
  std::vector<Diagnostic> diags;
  cache[stmts] = loadProgram(generateSource(cfg), diags);
  return cache[stmts];
}

std::vector<VarId> someSinks(const Program& p) {
  std::vector<VarId> sinks;
  for (size_t v = 0; v < p.vars.size() && sinks.size() < 2; v += 3)
    sinks.push_back((VarId)v);
  return sinks;
}

void bmParse(benchmark::State& state) {
  GenConfig cfg;
  cfg.seed = 99 + (uint64_t)state.range(0);
  cfg.maxStmts = (int)state.range(0);
  cfg.aliasPairBias = true;
  std::string src = generateSource(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parseProgram(src));
  }
}
BENCHMARK(bmParse)->Arg(12)->Arg(48)->Arg(96);

void bmImmutability(benchmark::State& state) {
  const Program& p = programOfSize((int)state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(inferImmutability(p));
}
BENCHMARK(bmImmutability)->Arg(12)->Arg(48)->Arg(96);

void bmBuildGri(benchmark::State& state) {
  const Program& p = programOfSize((int)state.range(0));
  ImmResult imm = inferImmutability(p);
  for (auto _ : state) benchmark::DoNotOptimize(buildGri(p, imm));
}
BENCHMARK(bmBuildGri)->Arg(12)->Arg(48)->Arg(96);

void bmCfl(benchmark::State& state) {
  const Program& p = programOfSize((int)state.range(0));
  FlowGraph g = buildGri(p, inferImmutability(p));
  std::vector<VarId> sinks = someSinks(p);
  for (auto _ : state) benchmark::DoNotOptimize(runCfl(p, g, sinks));
}
BENCHMARK(bmCfl)->Arg(12)->Arg(48)->Arg(96);

void bmTypes(benchmark::State& state) {
  const Program& base = programOfSize((int)state.range(0));
  Program p = withSinks(base, someSinks(base));
  ImmResult imm = inferImmutability(p);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        runTypes(p, imm, Setting::Negative, AdapterMode::PerSlot));
}
BENCHMARK(bmTypes)->Arg(12)->Arg(48)->Arg(96);

void bmInterp(benchmark::State& state) {
  const Program& p = programOfSize((int)state.range(0));
  std::vector<bool> script(16, true);
  for (auto _ : state) benchmark::DoNotOptimize(runProgram(p, script));
}
BENCHMARK(bmInterp)->Arg(12)->Arg(48)->Arg(96);

void bmOracle(benchmark::State& state) {
  const Program& p = programOfSize((int)state.range(0));
  FlowGraph g = buildGri(p, inferImmutability(p));
  std::vector<VarId> sinks = someSinks(p);
  std::set<FieldId> fields;
  for (auto _ : state)
    for (VarId s : sinks)
      benchmark::DoNotOptimize(
          oracleClasses(g, 0, s, PgDiscipline::CsfiPlus, &fields, 12));
}
BENCHMARK(bmOracle)->Arg(12)->Arg(48);

}  // namespace

BENCHMARK_MAIN();
