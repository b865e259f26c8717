#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "neural/model.hpp"
#include "neural/network.hpp"

namespace warnrank::nn {

struct TrainConfig {
  std::size_t epochs = 60;
  std::size_t batch_size = 64;
  double lr = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;  // global L2 norm; <= 0 disables clipping
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// Vocabulary ids of the real (unpadded) tokens of one sample.
struct SequenceExample {
  std::vector<std::int32_t> ctx;
  std::vector<std::int32_t> stmt;
  int label = -1;  // 0 = TP, 1 = FP, -1 = unknown
};

template <typename T>
struct SequenceSet {
  Mat<T> table;  // d x V, column v is the embedding of vocabulary id v
  int ctx_capacity = 0;
  int stmt_capacity = 0;
  std::vector<SequenceExample> items;
};

template <typename T>
Batch<T> make_batch(const SequenceSet<T>& data, const std::vector<std::size_t>& indices, bool with_stmt);

template <typename T>
struct AdamaxState {
  std::uint64_t step = 0;
  ParamVector<T> m;  // first moment
  ParamVector<T> u;  // exponentially weighted infinity norm
};

// m <- b1 m + (1-b1) g;  u <- max(b2 u, |g|);  p <- p - lr/(1-b1^t) * m / (u + eps)
template <typename T>
void adamax_update(ParamVector<T>& params, const ParamVector<T>& grads, AdamaxState<T>& st, const TrainConfig& cfg);

// Rescales grads so their global L2 norm is at most max_norm. Returns the
// norm before clipping.
template <typename T>
double clip_global_norm(ParamVector<T>& grads, double max_norm);

template <typename T>
struct TrainingRun {
  Model<T> model;
  TrainConfig train;
  AdamaxState<T> opt;
  std::size_t epoch = 0;            // completed epochs
  std::vector<double> epoch_loss;   // mean training cross-entropy per epoch
  std::uint64_t clipped_steps = 0;
};

template <typename T>
TrainingRun<T> new_training_run(const ModelConfig& model, std::size_t input_dim, const TrainConfig& train);

// Runs epochs until run.epoch == min(epoch_limit, run.train.epochs). Shuffle
// order and dropout masks depend only on (seed, epoch, batch), so a run
// resumed from a checkpoint continues exactly as an uninterrupted one.
template <typename T>
void train_epochs(TrainingRun<T>& run, const SequenceSet<T>& data, std::size_t epoch_limit,
                  const std::function<void(const TrainingRun<T>&)>& on_epoch = {});

// P(TP) per item, in item order.
template <typename T>
std::vector<double> predict_tp(const Model<T>& model, const SequenceSet<T>& data, std::size_t batch_size = 64);

template <typename T>
std::string serialize_run(const TrainingRun<T>& run);
template <typename T>
TrainingRun<T> deserialize_run(const std::string& bytes);
template <typename T>
void save_run(const TrainingRun<T>& run, const std::filesystem::path& path);
template <typename T>
TrainingRun<T> load_run(const std::filesystem::path& path);

#define WARNRANK_NN_EXTERN(T)                                                                                   \
  extern template Batch<T> make_batch<T>(const SequenceSet<T>&, const std::vector<std::size_t>&, bool);         \
  extern template void adamax_update<T>(ParamVector<T>&, const ParamVector<T>&, AdamaxState<T>&,                \
                                        const TrainConfig&);                                                   \
  extern template double clip_global_norm<T>(ParamVector<T>&, double);                                          \
  extern template TrainingRun<T> new_training_run<T>(const ModelConfig&, std::size_t, const TrainConfig&);      \
  extern template void train_epochs<T>(TrainingRun<T>&, const SequenceSet<T>&, std::size_t,                     \
                                       const std::function<void(const TrainingRun<T>&)>&);                      \
  extern template std::vector<double> predict_tp<T>(const Model<T>&, const SequenceSet<T>&, std::size_t);       \
  extern template std::string serialize_run<T>(const TrainingRun<T>&);                                          \
  extern template TrainingRun<T> deserialize_run<T>(const std::string&);                                        \
  extern template void save_run<T>(const TrainingRun<T>&, const std::filesystem::path&);                        \
  extern template TrainingRun<T> load_run<T>(const std::filesystem::path&);
WARNRANK_NN_EXTERN(float)
WARNRANK_NN_EXTERN(double)
#undef WARNRANK_NN_EXTERN

}  // namespace warnrank::nn
