#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "warnings/io.hpp"
#include "warnings/warning.hpp"

namespace warnrank::warnings {

struct SynthConfig {
  std::uint64_t seed = 7;
  int n_projects = 5;
  double tp_rate = 0.3;
  int n_warnings = 400;
  int scenarios_per_file = 4;
  double npd_share = 0.3;  // fraction of warnings that are NPD
  // Probability that a scenario draws its variable names from the half of the
  // project's name pool associated with its label. Identifier names then carry
  // a project-specific label cue that does not transfer across projects.
  double name_bias = 0.8;
};

// The statement that decides a planted warning's label (the unbounded source
// for a BO TP, the string literal for a BO FP, the success return of a
// non-checking helper for an NPD TP, the NULL test for an NPD FP).
struct PlantedSite {
  std::string warning_id;
  std::string file;
  int line = 0;
  std::string pattern;  // e.g. "bo.tp.external"
};

struct SyntheticCorpus {
  std::vector<std::pair<std::string, std::string>> files;  // (relative path, source)
  std::vector<ManifestEntry> manifest;
  Dataset dataset;
  std::vector<PlantedSite> planted;
};

// Deterministic given the config. Throws ConfigError on invalid parameters.
SyntheticCorpus synthesize_corpus(const SynthConfig& cfg);

// <dir>/manifest.json, the source files, <dir>/warnings.jsonl, <dir>/planted.json.
void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

std::vector<PlantedSite> load_planted(const std::filesystem::path& path);

}  // namespace warnrank::warnings
