#include "harness/commands.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <chrono>

#include "embedding/cbow.hpp"
#include "eval/experiment.hpp"
#include "json.hpp"
#include "minic/lexer.hpp"
#include "util/error.hpp"
#include "util/hash.hpp"
#include "util/rng.hpp"

namespace warnrank::harness {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.3.0";

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

class Manifest {
 public:
  Manifest(std::string command, const HarnessConfig& cfg) : cfg_(cfg), t0_(std::chrono::steady_clock::now()) {
    j_["command"] = std::move(command);
    j_["version"] = kVersion;
    j_["config"] = ordered_json::parse(config_json(cfg));
    j_["seeds"]["root"] = cfg.experiment.seed;
    j_["seeds"]["split"] = derive_seed(cfg.experiment.seed, "split");
    j_["artifacts"] = ordered_json::array();
  }

  void inputs(const Inputs& in) {
    j_["corpus_hash"] = in.corpus.content_hash;
    j_["warnings_hash"] = in.warnings_hash;
  }
  void slot(std::uint64_t s) {
    const auto st = eval::stage_seeds(cfg_.experiment.seed, s);
    j_["seeds"]["slots"].push_back({{"slot", s}, {"embedding", st.embedding}, {"init", st.init}, {"training", st.training}});
  }
  void artifact(const fs::path& path) { paths_.push_back(path); }
  ordered_json& extra() { return j_; }

  void write() {
    const fs::path root(cfg_.output_dir);
    for (const auto& p : paths_) {
      j_["artifacts"].push_back({{"path", fs::relative(p, root).generic_string()}, {"sha256", sha256_file(p)}});
    }
    j_["timings"]["total_seconds"] = seconds_since(t0_);
    write_file(root / "manifest.json", j_.dump(2) + "\n");
  }

 private:
  const HarnessConfig& cfg_;
  std::chrono::steady_clock::time_point t0_;
  ordered_json j_;
  std::vector<fs::path> paths_;
};

fs::path write_artifact(Manifest& m, const fs::path& path, std::string_view bytes) {
  write_file(path, bytes);
  m.artifact(path);
  return path;
}

std::vector<std::size_t> labeled_items(const warnings::Dataset& d) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < d.warnings.size(); ++i) {
    if (d.warnings[i].label) out.push_back(i);
  }
  return out;
}

void require_labels(const warnings::Dataset& d, const std::string& command) {
  for (const auto& w : d.warnings) {
    if (!w.label) {
      throw UnlabeledError(command + " needs a label on every warning; " + w.id +
                           " has none (use `rank` for unlabeled warnings)");
    }
  }
}

ordered_json report_object(const eval::MetricReport& r) { return ordered_json::parse(eval::report_json(r, -1)); }

}  // namespace

Inputs load_inputs(const HarnessConfig& cfg) {
  Inputs in;
  in.corpus = warnings::load_corpus(cfg.corpus_dir);
  in.sdg = dep::build_sdg(in.corpus.units);
  const fs::path wf = cfg.warnings_file();
  in.dataset = warnings::load_warnings(wf);
  in.warnings_hash = sha256_file(wf);
  warnings::attach_projects(in.dataset, in.corpus);
  if (in.dataset.warnings.empty()) throw EmptyCorpus(wf.string() + " holds no warnings");
  return in;
}

PreparedEntry prepare_cached(const HarnessConfig& cfg, const Inputs& in, slicing::ContextMode mode,
                             const prep::PreprocessConfig& pc) {
  const std::string key = sha256_hex(fmt::format("warnrank-prepared v1|{}|{}|{}|{}|{}|{}", in.corpus.content_hash,
                                                 in.warnings_hash, slicing::mode_name(mode), pc.L_slice, pc.L_stmt,
                                                 pc.abstraction_on));
  PreparedEntry e;
  e.cache_file = cfg.cache_path() / ("prepared-" + key.substr(0, 24) + ".jsonl");
  if (fs::exists(e.cache_file)) {
    try {
      e.data = prep::parse_prepared(read_file(e.cache_file));
      if (e.data.mode == mode && e.data.config == pc && e.data.items.size() == in.dataset.warnings.size()) {
        e.cache_hit = true;
        spdlog::info("prepared dataset: cache hit {}", e.cache_file.string());
        return e;
      }
    } catch (const SchemaError& err) {
      spdlog::warn("ignoring unreadable cache entry {}: {}", e.cache_file.string(), err.what());
    }
  }
  e.data = prep::prepare_dataset(in.sdg, in.dataset, mode, pc);
  write_file(e.cache_file, prep::format_prepared(e.data));
  spdlog::info("prepared dataset: wrote {}", e.cache_file.string());
  return e;
}

std::string slice_json(const dep::SystemDependenceGraph& sdg, const std::string& file, int line,
                       slicing::ContextMode mode) {
  warnings::Warning w;
  w.id = file + ":" + std::to_string(line);
  w.file = file;
  w.line = line;
  const slicing::WarningContext ctx = slicing::extract_context(sdg, w, mode);
  ordered_json out;
  out["file"] = file;
  out["line"] = line;
  out["mode"] = slicing::mode_name(mode);
  out["statements"] = ordered_json::array();
  for (auto id : ctx.statements) {
    ordered_json st;
    st["file"] = sdg.file_of(id);
    st["line"] = sdg.line_of(id);
    st["text"] = minic::join_tokens(sdg.stmt_of(id)->tokens);
    st["reported"] = id == ctx.reported;
    out["statements"].push_back(st);
  }
  out["text"] = slicing::render_context(sdg, ctx);
  return out.dump();
}

std::string cmd_slice(const fs::path& corpus_dir, const std::string& file, int line, slicing::ContextMode mode) {
  const warnings::Corpus corpus = warnings::load_corpus(corpus_dir);
  return slice_json(dep::build_sdg(corpus.units), file, line, mode);
}

std::string cmd_synth(const HarnessConfig& cfg) {
  const auto corpus = warnings::synthesize_corpus(cfg.synth);
  const fs::path dir(cfg.output_dir);
  warnings::write_synthetic_corpus(corpus, dir);
  const std::size_t tps = corpus.dataset.count(warnings::Label::TP);
  ordered_json out;
  out["dir"] = dir.string();
  out["files"] = corpus.files.size();
  out["warnings"] = corpus.dataset.warnings.size();
  out["tps"] = tps;
  out["content_hash"] = warnings::load_corpus(dir).content_hash;
  out["text"] = fmt::format("wrote {} files and {} warnings ({} TP) to {}\n", corpus.files.size(),
                            corpus.dataset.warnings.size(), tps, dir.string());
  write_file(dir / "synth-run.json", out.dump(2) + "\n");
  return out.dump();
}

std::string cmd_prepare(const HarnessConfig& cfg, bool compare_abstraction) {
  validate(cfg);
  Manifest m("prepare", cfg);
  const Inputs in = load_inputs(cfg);
  m.inputs(in);
  const auto& pc = cfg.experiment.preprocess;
  const PreparedEntry e = prepare_cached(cfg, in, cfg.experiment.mode, pc);
  const std::string text = prep::format_prepared(e.data);
  const fs::path out_file = write_artifact(m, fs::path(cfg.output_dir) / "prepared.jsonl", text);

  std::vector<std::size_t> all(e.data.items.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  ordered_json out;
  out["prepared"] = out_file.string();
  out["sha256"] = sha256_hex(text);
  out["cache_file"] = e.cache_file.string();
  out["cache_hit"] = e.cache_hit;
  out["warnings"] = e.data.items.size();
  out["mode"] = slicing::mode_name(cfg.experiment.mode);
  out["vocab_size"] = prep::build_vocab(e.data, all).size();
  std::string summary = fmt::format("prepared {} warnings ({}), vocabulary {} tokens{}\n", e.data.items.size(),
                                    slicing::mode_name(cfg.experiment.mode), out["vocab_size"].get<std::size_t>(),
                                    e.cache_hit ? " [cache hit]" : "");
  if (compare_abstraction) {
    for (bool on : {true, false}) {
      prep::PreprocessConfig other = pc;
      other.abstraction_on = on;
      const PreparedEntry o = prepare_cached(cfg, in, cfg.experiment.mode, other);
      const std::size_t v = prep::build_vocab(o.data, all).size();
      out[on ? "vocab_size_abstraction_on" : "vocab_size_abstraction_off"] = v;
      summary += fmt::format("vocabulary with abstraction {}: {}\n", on ? "on " : "off", v);
    }
  }
  out["text"] = summary;
  m.extra()["result"] = out;
  m.write();
  return out.dump();
}

std::string cmd_train_embed(const HarnessConfig& cfg) {
  validate(cfg);
  Manifest m("train-embed", cfg);
  const Inputs in = load_inputs(cfg);
  m.inputs(in);
  m.slot(0);
  const PreparedEntry e = prepare_cached(cfg, in, cfg.experiment.mode, cfg.experiment.preprocess);
  std::vector<std::size_t> all(e.data.items.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  embed::CbowConfig ec = cfg.experiment.embedding;
  ec.seed = eval::stage_seeds(cfg.experiment.seed, 0).embedding;
  const embed::CbowResult r = eval::train_embedding(e.data, all, ec);
  const std::string bytes = embed::serialize_embedding(r.embedding);
  const fs::path path = write_artifact(m, fs::path(cfg.output_dir) / "embedding.bin", bytes);
  ordered_json out;
  out["embedding"] = path.string();
  out["sha256"] = sha256_hex(bytes);
  out["vocab_size"] = r.embedding.vocab.size();
  out["dim"] = r.embedding.dim();
  out["epoch_loss"] = r.epoch_loss;
  out["text"] = fmt::format("trained {}-dimensional embeddings for {} tokens; final loss {:.4f}\n", r.embedding.dim(),
                            r.embedding.vocab.size(), r.epoch_loss.empty() ? 0.0 : r.epoch_loss.back());
  m.extra()["result"] = out;
  m.write();
  return out.dump();
}

std::string cmd_train(const HarnessConfig& cfg, bool resume) {
  validate(cfg);
  Manifest m("train", cfg);
  const Inputs in = load_inputs(cfg);
  m.inputs(in);
  m.slot(0);
  const auto& ex = cfg.experiment;
  const PreparedEntry e = prepare_cached(cfg, in, ex.mode, ex.preprocess);
  const std::vector<std::size_t> items = labeled_items(in.dataset);
  if (items.empty()) throw UnlabeledError("train needs labeled warnings; none of the warnings has a label");
  const fs::path dir(cfg.output_dir);
  const eval::StageSeeds seeds = eval::stage_seeds(ex.seed, 0);

  embed::EmbeddingMatrix emb;
  const fs::path emb_path = dir / "embedding.bin";
  if (fs::exists(emb_path)) {
    emb = embed::load_embedding(emb_path);
    if (emb.dim() != ex.embedding.dim) {
      throw ConfigError(fmt::format("{} has dimension {}, the config asks for {}", emb_path.string(), emb.dim(),
                                    ex.embedding.dim));
    }
    spdlog::info("using embeddings from {}", emb_path.string());
  } else {
    embed::CbowConfig ec = ex.embedding;
    ec.seed = seeds.embedding;
    emb = eval::train_embedding(e.data, items, ec).embedding;
    write_file(emb_path, embed::serialize_embedding(emb));
  }
  m.artifact(emb_path);

  nn::ModelConfig mc = ex.model;
  mc.seed = seeds.init;
  nn::TrainConfig tc = ex.training;
  tc.seed = seeds.training;
  const fs::path model_path = dir / "model.bin";
  nn::TrainingRun<float> run;
  bool resumed = false;
  if (resume && fs::exists(model_path)) {
    run = nn::load_run<float>(model_path);
    if (!(run.model.config == mc) || !(run.train == tc) || run.model.input_dim != emb.dim()) {
      throw ConfigError(model_path.string() + " was trained with a different configuration; cannot resume");
    }
    resumed = true;
    spdlog::info("resuming {} after epoch {}", model_path.string(), run.epoch);
  } else {
    run = nn::new_training_run<float>(mc, emb.dim(), tc);
  }
  const nn::SequenceSet<float> data = eval::sequence_set(e.data, emb, items);
  nn::train_epochs<float>(run, data, tc.epochs,
                          [&](const nn::TrainingRun<float>& r) { nn::save_run(r, model_path); });
  if (run.epoch == 0 || !fs::exists(model_path)) nn::save_run(run, model_path);
  m.artifact(model_path);

  ordered_json out;
  out["model"] = model_path.string();
  out["sha256"] = sha256_file(model_path);
  out["embedding"] = emb_path.string();
  out["samples"] = items.size();
  out["epochs"] = run.epoch;
  out["resumed"] = resumed;
  out["epoch_loss"] = run.epoch_loss;
  out["clipped_steps"] = run.clipped_steps;
  out["text"] = fmt::format("trained on {} warnings for {} epochs; final loss {:.4f}; model at {}\n", items.size(),
                            run.epoch, run.epoch_loss.empty() ? 0.0 : run.epoch_loss.back(), model_path.string());
  m.extra()["result"] = out;
  m.write();
  return out.dump();
}

std::string cmd_rank(const HarnessConfig& cfg, const fs::path& model_dir) {
  validate(cfg);
  Manifest m("rank", cfg);
  const Inputs in = load_inputs(cfg);
  m.inputs(in);
  const fs::path src = model_dir.empty() ? fs::path(cfg.output_dir) : model_dir;
  for (const char* f : {"embedding.bin", "model.bin"}) {
    if (!fs::exists(src / f)) throw IoError((src / f).string() + " does not exist; run `train` first");
  }
  eval::TrainedRanker ranker{embed::load_embedding(src / "embedding.bin"), nn::load_run<float>(src / "model.bin")};
  if (ranker.run.model.input_dim != ranker.embedding.dim()) {
    throw ConfigError("model and embedding in " + src.string() + " have different dimensions");
  }
  const PreparedEntry e = prepare_cached(cfg, in, cfg.experiment.mode, cfg.experiment.preprocess);
  std::vector<std::size_t> all(e.data.items.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const eval::RankedList ranked = eval::score_items(ranker, e.data, all);

  ordered_json list = ordered_json::array();
  for (const auto& r : ranked) list.push_back({{"id", r.id}, {"score", r.score}});
  ordered_json doc;
  doc["ranking"] = list;
  const fs::path path = write_artifact(m, fs::path(cfg.output_dir) / "ranking.json", doc.dump(2) + "\n");
  std::string text;
  for (std::size_t i = 0; i < ranked.size(); ++i) text += fmt::format("{:>5}  {:.6f}  {}\n", i + 1, ranked[i].score, ranked[i].id);
  ordered_json out;
  out["ranking_file"] = path.string();
  out["ranking"] = list;
  out["text"] = text;
  m.write();
  return out.dump();
}

std::string cmd_eval(const HarnessConfig& cfg, bool save_checkpoints) {
  validate(cfg);
  Manifest m("eval", cfg);
  const Inputs in = load_inputs(cfg);
  require_labels(in.dataset, "eval");
  m.inputs(in);
  const auto& ex = cfg.experiment;
  const PreparedEntry e = prepare_cached(cfg, in, ex.mode, ex.preprocess);
  const fs::path dir(cfg.output_dir);
  ordered_json folds = ordered_json::array();
  auto on_fold = [&](const eval::FoldOutcome& o, const eval::TrainedRanker& r) {
    const fs::path fd = dir / "folds" / (o.project.empty() ? fmt::format("fold{}", o.fold)
                                                           : fmt::format("{}-fold{}", o.project, o.fold));
    if (save_checkpoints) {
      write_artifact(m, fd / "embedding.bin", embed::serialize_embedding(r.embedding));
      write_artifact(m, fd / "model.bin", nn::serialize_run(r.run));
    }
    ordered_json rk = ordered_json::array();
    for (const auto& x : o.ranking) rk.push_back({{"id", x.id}, {"score", x.score}});
    write_artifact(m, fd / "ranking.json", ordered_json{{"ranking", rk}}.dump(2) + "\n");
    folds.push_back({{"slot", o.slot},
                     {"fold", o.fold},
                     {"project", o.project},
                     {"train", o.train_items.size()},
                     {"test", o.test_items.size()},
                     {"vocab_size", o.vocab.size()},
                     {"embedding_sha256", o.embedding_hash},
                     {"model_sha256", o.model_hash},
                     {"seconds", o.seconds}});
  };
  const eval::ExperimentResult res = eval::run_experiment(e.data, in.dataset, ex, on_fold);
  for (const auto& o : res.folds) m.slot(o.slot);
  const std::string report = eval::report_json(res.report) + "\n";
  const std::string table = eval::report_table(res.report);
  write_artifact(m, dir / "report.json", report);
  write_artifact(m, dir / "report.txt", table);
  m.extra()["folds"] = folds;
  m.write();
  ordered_json out;
  out["report"] = report_object(res.report);
  out["report_file"] = (dir / "report.json").string();
  out["text"] = table;
  return out.dump();
}

std::string cmd_ablate(const HarnessConfig& cfg, bool save_checkpoints) {
  validate(cfg);
  Manifest m("ablate", cfg);
  const Inputs in = load_inputs(cfg);
  require_labels(in.dataset, "ablate");
  m.inputs(in);
  const fs::path dir(cfg.output_dir);
  ordered_json cells = ordered_json::array();
  ordered_json timings = ordered_json::array();
  std::string table = fmt::format("{:<18} {:>5} {:>5} {:>7}", "mode", "stmt", "abst", "V");
  for (int k : cfg.experiment.ks) table += fmt::format(" {:>7}", fmt::format("R@{}", k));
  table += "\n";

  for (auto mode : slicing::kAllModes) {
    for (bool abstraction : {true, false}) {
      eval::ExperimentConfig ex = cfg.experiment;
      ex.mode = mode;
      ex.preprocess.abstraction_on = abstraction;
      const PreparedEntry e = prepare_cached(cfg, in, mode, ex.preprocess);
      for (bool stmt : {true, false}) {
        ex.model.use_stmt_branch = stmt;
        const std::string key = fmt::format("{}/stmt={}/abstraction={}", slicing::mode_name(mode), stmt ? "on" : "off",
                                            abstraction ? "on" : "off");
        spdlog::info("ablation cell {}", key);
        const auto t0 = std::chrono::steady_clock::now();
        ordered_json hashes = ordered_json::array();
        auto on_fold = [&](const eval::FoldOutcome& o, const eval::TrainedRanker& r) {
          hashes.push_back({{"fold", o.fold}, {"embedding_sha256", o.embedding_hash}, {"model_sha256", o.model_hash}});
          if (save_checkpoints) {
            const fs::path fd = dir / "cells" /
                                fmt::format("{}-stmt_{}-abst_{}", slicing::mode_name(mode), stmt ? "on" : "off",
                                            abstraction ? "on" : "off") /
                                fmt::format("fold{}", o.fold);
            write_artifact(m, fd / "embedding.bin", embed::serialize_embedding(r.embedding));
            write_artifact(m, fd / "model.bin", nn::serialize_run(r.run));
          }
        };
        eval::ExperimentResult res;
        try {
          res = eval::run_experiment(e.data, in.dataset, ex, on_fold);
        } catch (const Error& err) {
          throw Error(err.code(), "cell " + key + ": " + err.what());
        }
        std::size_t vocab = 0;
        for (const auto& o : res.folds) vocab = std::max(vocab, o.vocab.size());
        cells.push_back({{"key", key},
                         {"mode", slicing::mode_name(mode)},
                         {"stmt_branch", stmt},
                         {"abstraction", abstraction},
                         {"vocab_size", res.vocab_size_all},
                         {"report", report_object(res.report)},
                         {"checkpoints", hashes}});
        timings.push_back({{"key", key}, {"seconds", seconds_since(t0)}});
        table += fmt::format("{:<18} {:>5} {:>5} {:>7}", slicing::mode_name(mode), stmt ? "on" : "off",
                             abstraction ? "on" : "off", res.vocab_size_all);
        for (double r : res.report.recall) table += fmt::format(" {:>7.4f}", r);
        table += "\n";
      }
    }
  }
  for (int f = 0; f < cfg.experiment.folds; ++f) m.slot(static_cast<std::uint64_t>(f));
  ordered_json doc;
  doc["cells"] = cells;
  write_artifact(m, dir / "ablation.json", doc.dump(2) + "\n");
  write_artifact(m, dir / "ablation.txt", table);
  m.extra()["timings"]["cells"] = timings;
  m.write();
  ordered_json out;
  out["ablation_file"] = (dir / "ablation.json").string();
  out["cells"] = cells;
  out["text"] = table;
  return out.dump();
}

}  // namespace warnrank::harness
