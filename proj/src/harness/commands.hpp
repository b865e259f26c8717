#pragma once

#include <filesystem>
#include <string>

#include "dependence/sdg.hpp"
#include "harness/config.hpp"
#include "preprocess/prepared.hpp"
#include "warnings/io.hpp"

namespace warnrank::harness {

struct Inputs {
  warnings::Corpus corpus;
  dep::SystemDependenceGraph sdg;
  warnings::Dataset dataset;
  std::string warnings_hash;
};

// Corpus, dependence graph, and warnings (with projects from the manifest).
Inputs load_inputs(const HarnessConfig& cfg);

// Prepared dataset for (mode, preprocess), read from the cache directory when
// an entry for the same corpus, warnings and settings exists.
struct PreparedEntry {
  prep::PreparedDataset data;
  std::filesystem::path cache_file;
  bool cache_hit = false;
};
PreparedEntry prepare_cached(const HarnessConfig& cfg, const Inputs& in, slicing::ContextMode mode,
                             const prep::PreprocessConfig& pc);

// Every command returns a JSON object; its "text" member holds the
// human-readable summary the CLI prints. Artifacts go under cfg.output_dir,
// alongside a manifest.json recording config, seeds, hashes and timings.
std::string slice_json(const dep::SystemDependenceGraph& sdg, const std::string& file, int line,
                       slicing::ContextMode mode);
std::string cmd_slice(const std::filesystem::path& corpus_dir, const std::string& file, int line,
                      slicing::ContextMode mode);
std::string cmd_synth(const HarnessConfig& cfg);
std::string cmd_prepare(const HarnessConfig& cfg, bool compare_abstraction);
std::string cmd_train_embed(const HarnessConfig& cfg);
std::string cmd_train(const HarnessConfig& cfg, bool resume);
std::string cmd_rank(const HarnessConfig& cfg, const std::filesystem::path& model_dir);
std::string cmd_eval(const HarnessConfig& cfg, bool save_checkpoints = true);
std::string cmd_ablate(const HarnessConfig& cfg, bool save_checkpoints = false);

}  // namespace warnrank::harness
