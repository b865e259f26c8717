// Command-line front end; talks to the library through the C API only.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "warnrank/warnrank.h"

namespace {

int exit_code(wr_status s) {
  if (s == WR_OK) return 0;
  return wr_status_is_user_error(s) ? 2 : 1;
}

int report_failure(wr_status s) {
  std::cerr << "warnrank: " << wr_status_name(s) << ": " << wr_last_error() << "\n";
  return exit_code(s);
}

// Prints a command result (its "text" member, or the raw JSON).
int emit(wr_status s, char* out, bool raw_json) {
  if (s != WR_OK) return report_failure(s);
  const std::string body(out);
  wr_string_free(out);
  if (raw_json) {
    std::cout << body << "\n";
  } else {
    const auto j = nlohmann::json::parse(body);
    std::cout << j.value("text", body);
  }
  return 0;
}

struct ConfigHandle {
  wr_config* cfg = nullptr;
  ~ConfigHandle() { wr_config_free(cfg); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank static-analysis warnings by their likelihood of being true positives."};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, output_dir, corpus_dir, warnings_path, log_level = "warn";
  std::vector<std::string> overrides;
  long long seed = -1;
  bool raw_json = false;
  app.add_option("-c,--config", config_path, "INI configuration file (defaults apply to absent keys)");
  app.add_option("-s,--set", overrides, "Override a configuration value: section.key=value (repeatable)");
  app.add_option("-o,--output-dir", output_dir, "Directory for every artifact (run.output_dir, default out)");
  app.add_option("--corpus", corpus_dir, "Corpus directory holding manifest.json (corpus.dir)");
  app.add_option("--warnings", warnings_path, "Warnings file (corpus.warnings, default <corpus>/warnings.jsonl)");
  app.add_option("--seed", seed, "Root seed (run.seed, default 1)");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")->capture_default_str();
  app.add_flag("--json", raw_json, "Print the machine-readable JSON result");

  auto* slice = app.add_subcommand("slice", "Print the context of the statement at FILE:LINE");
  std::string slice_file, slice_mode = "control_and_data";
  int slice_line = 0;
  slice->add_option("--file", slice_file, "Corpus-relative source path")->required();
  slice->add_option("--line", slice_line, "Line number")->required();
  slice->add_option("--mode", slice_mode, "raw_function|control_only|data_only|control_and_data")
      ->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Write the planted-pattern synthetic corpus to the output directory");
  auto* prepare = app.add_subcommand("prepare", "Extract, abstract and tokenize warning contexts");
  bool compare = false;
  prepare->add_flag("--compare-abstraction", compare, "Also report vocabulary sizes with and without abstraction");
  auto* train_embed = app.add_subcommand("train-embed", "Train CBOW token embeddings on the warning contexts");
  auto* train = app.add_subcommand("train", "Train the ranking model on the labeled warnings");
  bool resume = false;
  train->add_flag("--resume", resume, "Continue from <output-dir>/model.bin if it matches the configuration");
  auto* rank = app.add_subcommand("rank", "Rank warnings with a trained model");
  std::string model_dir;
  rank->add_option("--model-dir", model_dir, "Directory holding embedding.bin and model.bin (default: output dir)");
  auto* evaluate = app.add_subcommand("eval", "Cross-validated Top-k% precision and recall");
  bool no_checkpoints = false;
  evaluate->add_flag("--no-checkpoints", no_checkpoints, "Do not write per-fold embeddings and models");
  auto* ablate = app.add_subcommand("ablate", "Evaluate all 16 (context, statement branch, abstraction) cells");
  bool save_checkpoints = false;
  ablate->add_flag("--save-checkpoints", save_checkpoints, "Write every fold's embedding and model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (wr_status s = wr_set_log_level(log_level.c_str()); s != WR_OK) return report_failure(s);

  ConfigHandle h;
  if (wr_status s = wr_config_new(&h.cfg); s != WR_OK) return report_failure(s);
  if (!config_path.empty()) {
    if (wr_status s = wr_config_load(h.cfg, config_path.c_str()); s != WR_OK) return report_failure(s);
  }
  std::vector<std::string> sets;
  if (!output_dir.empty()) sets.push_back("run.output_dir=" + output_dir);
  if (!corpus_dir.empty()) sets.push_back("corpus.dir=" + corpus_dir);
  if (!warnings_path.empty()) sets.push_back("corpus.warnings=" + warnings_path);
  if (seed >= 0) sets.push_back("run.seed=" + std::to_string(seed));
  sets.insert(sets.end(), overrides.begin(), overrides.end());
  for (const auto& a : sets) {
    if (wr_status s = wr_config_set(h.cfg, a.c_str()); s != WR_OK) return report_failure(s);
  }

  char* out = nullptr;
  if (*slice) {
    char* dir = nullptr;
    if (wr_status s = wr_config_get(h.cfg, "corpus.dir", &dir); s != WR_OK) return report_failure(s);
    wr_corpus* corpus = nullptr;
    wr_status s = wr_corpus_open(dir, &corpus);
    wr_string_free(dir);
    if (s != WR_OK) return report_failure(s);
    s = wr_corpus_slice(corpus, slice_file.c_str(), slice_line, slice_mode.c_str(), &out);
    wr_corpus_free(corpus);
    return emit(s, out, raw_json);
  }
  auto run = [&](auto&& call) {
    const wr_status s = call(&out);
    return emit(s, out, raw_json);
  };
  if (*synth) return run([&](char** o) { return wr_synth(h.cfg, o); });
  if (*prepare) return run([&](char** o) { return wr_prepare(h.cfg, compare ? 1 : 0, o); });
  if (*train_embed) return run([&](char** o) { return wr_train_embed(h.cfg, o); });
  if (*train) return run([&](char** o) { return wr_train(h.cfg, resume ? 1 : 0, o); });
  if (*rank) return run([&](char** o) { return wr_rank(h.cfg, model_dir.empty() ? nullptr : model_dir.c_str(), o); });
  if (*evaluate) return run([&](char** o) { return wr_eval(h.cfg, no_checkpoints ? 0 : 1, o); });
  if (*ablate) return run([&](char** o) { return wr_ablate(h.cfg, save_checkpoints ? 1 : 0, o); });
  return 2;
}
