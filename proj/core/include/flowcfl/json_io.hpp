#ifndef FLOWCFL_JSON_IO_HPP
#define FLOWCFL_JSON_IO_HPP

#include <string>

#include "flowcfl/analysis.hpp"

namespace flowcfl {

// All dumps carry {"schema": 1}. Keys are emitted in sorted order so the
// output is byte-stable.

std::string traceJson(const Program& p, const RunResult& run);
std::string graphJson(const Program& p, const FlowGraph& g);
std::string analysisJson(const Program& p, const AnalysisConfig& cfg,
                         const AnalysisOutput& out);
std::string corpusJson(const CorpusReport& rep);
std::string corpusJUnitXml(const CorpusReport& rep);

}  // namespace flowcfl

#endif
