#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eval/experiment.hpp"
#include "warnings/synth.hpp"

namespace warnrank::harness {

struct HarnessConfig {
  std::string corpus_dir = "corpus/synthetic";
  std::string warnings_path;  // empty: <corpus_dir>/warnings.jsonl
  std::string output_dir = "out";
  std::string cache_dir;      // empty: $WARNRANK_CACHE_DIR, else <output_dir>/cache
  warnings::SynthConfig synth;
  eval::ExperimentConfig experiment;

  std::filesystem::path warnings_file() const;
  std::filesystem::path cache_path() const;
};

// Keys are "section.key". Every field of HarnessConfig has one:
//   corpus.dir corpus.warnings
//   run.seed run.output_dir run.cache_dir
//   context.mode
//   preprocess.L_slice preprocess.L_stmt preprocess.abstraction
//   embedding.dim embedding.window embedding.negatives embedding.epochs embedding.lr embedding.unk_rate
//   model.hidden model.dense model.dropout model.stmt_branch
//   training.epochs training.batch training.lr training.beta1 training.beta2 training.epsilon training.clip_norm
//   split.folds split.setting
//   eval.ks
//   synth.seed synth.projects synth.tp_rate synth.warnings synth.scenarios_per_file synth.npd_share synth.name_bias
std::vector<std::string> config_keys();

void set_value(HarnessConfig& cfg, const std::string& key, const std::string& value);
std::string get_value(const HarnessConfig& cfg, const std::string& key);

// "section.key=value"
void apply_override(HarnessConfig& cfg, const std::string& assignment);

// INI with [section] headers; keys not listed above are rejected. Values
// not present keep their defaults.
HarnessConfig parse_config(const std::string& ini_text, const std::string& origin = "config");
HarnessConfig load_config(const std::filesystem::path& path);

// Canonical INI text: every key, sections in a fixed order.
std::string format_config(const HarnessConfig& cfg);

// Flat {"section.key": "value"} object, used in run manifests.
std::string config_json(const HarnessConfig& cfg);

// ConfigError on any inconsistent value.
void validate(const HarnessConfig& cfg);

}  // namespace warnrank::harness
