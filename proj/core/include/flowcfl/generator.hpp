#ifndef FLOWCFL_GENERATOR_HPP
#define FLOWCFL_GENERATOR_HPP

#include <cstdint>
#include <string>

namespace flowcfl {

struct GenConfig {
  int maxClasses = 4;
  int maxFields = 3;
  int maxStmts = 12;
  int maxSites = 5;
  uint64_t seed = 0;
  // Force a write-read aliasing pair through a call (set/get shape);
  // callers enable this for roughly 30% of a corpus.
  bool aliasPairBias = false;
};

// Produces well-formed .fcfl source. Deterministic in the seed. Call
// graphs are acyclic and every variable is allocated before use, so
// traces never fault and always terminate.
std::string generateSource(const GenConfig& cfg);

}  // namespace flowcfl

#endif
