#include "eval/experiment.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <map>

#include "util/error.hpp"
#include "util/hash.hpp"
#include "util/rng.hpp"

namespace warnrank::eval {

void ExperimentConfig::validate() const {
  preprocess.validate();
  embedding.validate();
  model.validate();
  training.validate();
  if (folds < 2) throw ConfigError("at least 2 folds are needed");
  if (ks.empty()) throw ConfigError("the k grid is empty");
  for (int k : ks) head_size(1, k);
}

StageSeeds stage_seeds(std::uint64_t root, std::uint64_t slot) {
  return {derive_seed(root, "embedding", slot), derive_seed(root, "init", slot), derive_seed(root, "train", slot)};
}

nn::SequenceExample encode_item(const prep::PreparedDataset& data, const prep::Vocabulary& vocab, std::size_t item) {
  const auto& w = data.items.at(item);
  nn::SequenceExample ex;
  const std::size_t nc = w.ctx_length(), ns = w.stmt_length();
  for (std::size_t t = 0; t < nc; ++t) ex.ctx.push_back(vocab.id(data.token_table[static_cast<std::size_t>(w.ctx[t])]));
  for (std::size_t t = 0; t < ns; ++t) {
    ex.stmt.push_back(vocab.id(data.token_table[static_cast<std::size_t>(w.stmt[t])]));
  }
  if (w.label) ex.label = class_of(*w.label);
  return ex;
}

nn::SequenceSet<float> sequence_set(const prep::PreparedDataset& data, const embed::EmbeddingMatrix& emb,
                                    const std::vector<std::size_t>& items) {
  nn::SequenceSet<float> s;
  s.table = embedding_table<float>(emb);
  s.ctx_capacity = static_cast<int>(data.config.L_slice);
  s.stmt_capacity = static_cast<int>(data.config.L_stmt);
  for (auto i : items) s.items.push_back(encode_item(data, emb.vocab, i));
  return s;
}

embed::CbowResult train_embedding(const prep::PreparedDataset& data, const std::vector<std::size_t>& train_items,
                                  const embed::CbowConfig& cfg) {
  const prep::Vocabulary vocab = prep::build_vocab(data, train_items);
  std::vector<std::vector<std::int32_t>> seqs;
  for (auto i : train_items) seqs.push_back(encode_item(data, vocab, i).ctx);
  return embed::train_cbow(seqs, vocab, cfg);
}

TrainedRanker train_ranker(const prep::PreparedDataset& data, const std::vector<std::size_t>& train_items,
                           const ExperimentConfig& cfg, std::uint64_t slot) {
  const StageSeeds seeds = stage_seeds(cfg.seed, slot);
  embed::CbowConfig ec = cfg.embedding;
  ec.seed = seeds.embedding;
  TrainedRanker r;
  r.embedding = train_embedding(data, train_items, ec).embedding;
  nn::ModelConfig mc = cfg.model;
  mc.seed = seeds.init;
  nn::TrainConfig tc = cfg.training;
  tc.seed = seeds.training;
  const nn::SequenceSet<float> train = sequence_set(data, r.embedding, train_items);
  r.run = nn::new_training_run<float>(mc, r.embedding.dim(), tc);
  nn::train_epochs(r.run, train, tc.epochs);
  return r;
}

RankedList score_items(const TrainedRanker& ranker, const prep::PreparedDataset& data,
                       const std::vector<std::size_t>& items) {
  const nn::SequenceSet<float> set = sequence_set(data, ranker.embedding, items);
  const std::vector<double> p = nn::predict_tp(ranker.run.model, set);
  std::vector<RankedEntry> scores;
  for (std::size_t j = 0; j < items.size(); ++j) {
    // Float rounding may push a probability a hair outside [0, 1].
    scores.push_back({data.items[items[j]].id, std::clamp(p[j], 0.0, 1.0)});
  }
  return rank(std::move(scores));
}

namespace {

FoldOutcome run_fold(const prep::PreparedDataset& prepared, const LabelMap& labels, const ExperimentConfig& cfg,
                     int fold, const std::string& project, std::vector<std::size_t> train,
                     std::vector<std::size_t> test, std::uint64_t slot, const FoldCallback& on_fold) {
  const auto t0 = std::chrono::steady_clock::now();
  FoldOutcome out;
  out.fold = fold;
  out.project = project;
  out.slot = slot;
  const TrainedRanker ranker = train_ranker(prepared, train, cfg, slot);
  out.train_items = std::move(train);
  out.test_items = std::move(test);
  out.vocab = ranker.embedding.vocab.tokens();
  out.embedding_hash = sha256_hex(embed::serialize_embedding(ranker.embedding));
  out.model_hash = sha256_hex(nn::serialize_run(ranker.run));
  out.epoch_loss = ranker.run.epoch_loss;
  out.ranking = score_items(ranker, prepared, out.test_items);
  out.metrics = evaluate_ranking(out.ranking, labels, cfg.ks);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (on_fold) on_fold(out, ranker);
  return out;
}

}  // namespace

ExperimentResult run_experiment(const dep::SystemDependenceGraph& sdg, const warnings::Dataset& data,
                                const ExperimentConfig& cfg, const FoldCallback& on_fold) {
  cfg.validate();
  const prep::PreparedDataset prepared = prep::prepare_dataset(sdg, data, cfg.mode, cfg.preprocess);
  return run_experiment(prepared, data, cfg, on_fold);
}

ExperimentResult run_experiment(const prep::PreparedDataset& prepared, const warnings::Dataset& data,
                                const ExperimentConfig& cfg, const FoldCallback& on_fold) {
  cfg.validate();
  if (prepared.mode != cfg.mode || !(prepared.config == cfg.preprocess)) {
    throw ConfigError("prepared dataset was built with a different context mode or preprocessing config");
  }
  if (prepared.items.size() != data.warnings.size()) throw InternalError("prepared dataset does not match the warnings");
  if (data.warnings.empty()) throw EmptyCorpus("no warnings to evaluate");

  ExperimentResult res;
  res.plan = stratified_kfold(data, cfg.folds, cfg.seed, cfg.grouping);
  LabelMap labels;
  for (const auto& w : data.warnings) labels.emplace(w.id, *w.label);
  std::vector<std::size_t> all(prepared.items.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  res.vocab_size_all = prep::build_vocab(prepared, all).size();

  // Within-project: one run per (project, fold) on that project's items.
  std::vector<std::string> projects{std::string()};
  if (cfg.grouping == Grouping::PerProject) {
    std::map<std::string, int> seen;
    for (const auto& w : data.warnings) seen.emplace(data.project(w), 0);
    projects.clear();
    for (const auto& [p, _] : seen) projects.push_back(p);
  }

  std::vector<ListMetrics> lists;
  for (std::size_t pi = 0; pi < projects.size(); ++pi) {
    const std::string& project = projects[pi];
    auto in_scope = [&](std::size_t i) { return project.empty() || data.project(data.warnings[i]) == project; };
    for (int f = 0; f < cfg.folds; ++f) {
      std::vector<std::size_t> train, test;
      for (auto i : res.plan.train_indices(f)) {
        if (in_scope(i)) train.push_back(i);
      }
      for (auto i : res.plan.test_indices(f)) {
        if (in_scope(i)) test.push_back(i);
      }
      const std::uint64_t slot = pi * static_cast<std::uint64_t>(cfg.folds) + static_cast<std::uint64_t>(f);
      const std::string where = project.empty() ? fmt::format("fold {}", f) : fmt::format("{} fold {}", project, f);
      spdlog::info("{}: training on {} warnings, testing on {}", where, train.size(), test.size());
      try {
        FoldOutcome o = run_fold(prepared, labels, cfg, f, project, std::move(train), std::move(test), slot, on_fold);
        if (const KMetrics* km = find_k(o.metrics, 20)) {
          spdlog::info("{}: R@20 {:.4f} P@20 {:.4f} ({:.1f}s)", where, km->recall.value(), km->precision.value(),
                       o.seconds);
        }
        lists.push_back(o.metrics);
        res.folds.push_back(std::move(o));
      } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.what());
      }
    }
  }
  res.report = aggregate(lists);
  return res;
}

}  // namespace warnrank::eval
