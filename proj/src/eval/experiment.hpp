#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dependence/sdg.hpp"
#include "embedding/cbow.hpp"
#include "eval/folds.hpp"
#include "eval/metrics.hpp"
#include "neural/train.hpp"
#include "preprocess/prepared.hpp"
#include "slicer/slicer.hpp"
#include "warnings/warning.hpp"

namespace warnrank::eval {

// The seeds inside `embedding`, `model` and `training` are ignored: every
// stage derives its own seed from `seed` and the fold.
struct ExperimentConfig {
  slicing::ContextMode mode = slicing::ContextMode::ControlAndData;
  prep::PreprocessConfig preprocess;  // carries the abstraction switch
  embed::CbowConfig embedding;
  nn::ModelConfig model;              // carries the statement-branch switch
  nn::TrainConfig training;
  int folds = 5;
  Grouping grouping = Grouping::Combined;
  std::uint64_t seed = 1;
  std::vector<int> ks = kDefaultKGrid;

  void validate() const;
};

// Per-stage seeds for one training run (`slot` numbers the fold, or the
// project-fold pair in the within-project setting).
struct StageSeeds {
  std::uint64_t embedding = 0;
  std::uint64_t init = 0;
  std::uint64_t training = 0;
};
StageSeeds stage_seeds(std::uint64_t root, std::uint64_t slot);

inline int class_of(warnings::Label l) { return l == warnings::Label::TP ? 0 : 1; }

// Vocabulary ids of an item's real context and statement tokens.
nn::SequenceExample encode_item(const prep::PreparedDataset& data, const prep::Vocabulary& vocab, std::size_t item);

// d x V lookup table (column v = vector of id v).
template <typename T>
nn::Mat<T> embedding_table(const embed::EmbeddingMatrix& emb) {
  return emb.vectors.transpose().template cast<T>();
}

nn::SequenceSet<float> sequence_set(const prep::PreparedDataset& data, const embed::EmbeddingMatrix& emb,
                                    const std::vector<std::size_t>& items);

// CBOW over the real context tokens of the training items, with the
// vocabulary built from the same items.
embed::CbowResult train_embedding(const prep::PreparedDataset& data, const std::vector<std::size_t>& train_items,
                                  const embed::CbowConfig& cfg);

struct TrainedRanker {
  embed::EmbeddingMatrix embedding;
  nn::TrainingRun<float> run;
};

TrainedRanker train_ranker(const prep::PreparedDataset& data, const std::vector<std::size_t>& train_items,
                           const ExperimentConfig& cfg, std::uint64_t slot);

// Ranked P(TP) scores of the selected items.
RankedList score_items(const TrainedRanker& ranker, const prep::PreparedDataset& data,
                       const std::vector<std::size_t>& items);

struct FoldOutcome {
  int fold = 0;
  std::uint64_t slot = 0;  // seed slot, see stage_seeds
  std::string project;  // within-project setting only
  std::vector<std::size_t> train_items;
  std::vector<std::size_t> test_items;
  std::vector<std::string> vocab;  // id -> token
  std::string embedding_hash;      // SHA-256 of the serialized embedding
  std::string model_hash;          // SHA-256 of the serialized training run
  std::vector<double> epoch_loss;
  RankedList ranking;
  ListMetrics metrics;
  double seconds = 0;
};

struct ExperimentResult {
  FoldPlan plan;
  std::vector<FoldOutcome> folds;
  MetricReport report;
  std::size_t vocab_size_all = 0;  // vocabulary over every item (reporting only)
};

using FoldCallback = std::function<void(const FoldOutcome&, const TrainedRanker&)>;

// Full pipeline per fold; vocabulary, embedding and model see training items
// only. Errors are rethrown with the fold attached.
ExperimentResult run_experiment(const dep::SystemDependenceGraph& sdg, const warnings::Dataset& data,
                                const ExperimentConfig& cfg, const FoldCallback& on_fold = {});

// Same, on an already prepared dataset (which must match cfg.mode / cfg.preprocess).
ExperimentResult run_experiment(const prep::PreparedDataset& prepared, const warnings::Dataset& data,
                                const ExperimentConfig& cfg, const FoldCallback& on_fold = {});

}  // namespace warnrank::eval
