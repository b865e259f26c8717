#include "neural/train.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "util/binio.hpp"
#include "util/error.hpp"
#include "util/hash.hpp"
#include "util/rng.hpp"

namespace warnrank::nn {

namespace {
constexpr std::string_view kRunMagic = "WRNNRUN1";
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (!(lr > 0)) throw ConfigError("learning rate must be positive");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) throw ConfigError("betas must lie in [0, 1)");
  if (!(epsilon > 0)) throw ConfigError("epsilon must be positive");
}

template <typename T>
Batch<T> make_batch(const SequenceSet<T>& data, const std::vector<std::size_t>& indices, bool with_stmt) {
  std::vector<const std::vector<std::int32_t>*> ctx, stmt;
  Batch<T> b;
  bool labeled = true;
  for (auto i : indices) {
    const auto& it = data.items.at(i);
    ctx.push_back(&it.ctx);
    stmt.push_back(&it.stmt);
    if (it.label < 0) labeled = false;
    b.labels.push_back(it.label);
  }
  if (!labeled) b.labels.clear();
  b.slice = make_branch<T>(data.table, ctx, data.ctx_capacity);
  if (with_stmt) b.stmt = make_branch<T>(data.table, stmt, data.stmt_capacity);
  return b;
}

template <typename T>
void adamax_update(ParamVector<T>& params, const ParamVector<T>& grads, AdamaxState<T>& st, const TrainConfig& cfg) {
  if (grads.size() != params.size()) throw InternalError("gradient size does not match the parameters");
  if (st.m.size() != params.size()) {
    st.m.assign(params.size(), T(0));
    st.u.assign(params.size(), T(0));
  }
  ++st.step;
  const auto b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2), eps = static_cast<T>(cfg.epsilon);
  const auto lr_t = static_cast<T>(cfg.lr / (1.0 - std::pow(cfg.beta1, static_cast<double>(st.step))));
  for (std::size_t i = 0; i < params.size(); ++i) {
    st.m[i] = b1 * st.m[i] + (T(1) - b1) * grads[i];
    st.u[i] = std::max(b2 * st.u[i], std::abs(grads[i]));
    params[i] -= lr_t * st.m[i] / (st.u[i] + eps);
  }
}

template <typename T>
double clip_global_norm(ParamVector<T>& grads, double max_norm) {
  double sq = 0;
  for (T g : grads) sq += static_cast<double>(g) * static_cast<double>(g);
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm) {
    const auto scale = static_cast<T>(max_norm / norm);
    for (T& g : grads) g *= scale;
  }
  return norm;
}

template <typename T>
TrainingRun<T> new_training_run(const ModelConfig& model, std::size_t input_dim, const TrainConfig& train) {
  train.validate();
  TrainingRun<T> run;
  run.model = init_model<T>(model, input_dim);
  run.train = train;
  return run;
}

template <typename T>
void train_epochs(TrainingRun<T>& run, const SequenceSet<T>& data, std::size_t epoch_limit,
                  const std::function<void(const TrainingRun<T>&)>& on_epoch) {
  const TrainConfig& cfg = run.train;
  if (data.items.empty()) throw EmptyCorpus("no training samples");
  for (const auto& it : data.items) {
    if (it.label < 0) throw UnlabeledError("training sample without a label");
  }
  if (static_cast<std::size_t>(data.table.rows()) != run.model.input_dim) {
    throw ConfigError("embedding dimension " + std::to_string(data.table.rows()) + " does not match the model input " +
                      std::to_string(run.model.input_dim));
  }
  const std::size_t n = data.items.size();
  const std::size_t last = std::min(epoch_limit, cfg.epochs);
  ParamVector<T> grad;
  while (run.epoch < last) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng(derive_seed(cfg.seed, "shuffle", run.epoch)).shuffle(order);
    double total = 0;
    std::uint64_t clipped = 0;
    for (std::size_t start = 0, bi = 0; start < n; start += cfg.batch_size, ++bi) {
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + cfg.batch_size)));
      const Batch<T> batch = make_batch(data, idx, run.model.config.use_stmt_branch);
      const ForwardOptions opt{true, derive_seed(cfg.seed, "dropout", (run.epoch << 24) | bi)};
      const double loss = forward_backward(run.model, batch, opt, &grad);
      if (!std::isfinite(loss)) throw InternalError("training loss is not finite");
      total += loss * static_cast<double>(idx.size());
      const double norm = clip_global_norm(grad, cfg.clip_norm);
      if (cfg.clip_norm > 0 && norm > cfg.clip_norm) {
        ++clipped;
        spdlog::debug("epoch {} batch {}: gradient norm {:.4f} clipped to {}", run.epoch + 1, bi, norm, cfg.clip_norm);
      }
      adamax_update(run.model.params, grad, run.opt, cfg);
    }
    ++run.epoch;
    run.clipped_steps += clipped;
    run.epoch_loss.push_back(total / static_cast<double>(n));
    spdlog::info("epoch {}/{}: loss {:.6f}{}", run.epoch, cfg.epochs, run.epoch_loss.back(),
                 clipped ? fmt::format(" ({} clipped steps)", clipped) : std::string());
    if (on_epoch) on_epoch(run);
  }
}

template <typename T>
std::vector<double> predict_tp(const Model<T>& model, const SequenceSet<T>& data, std::size_t batch_size) {
  const std::size_t n = data.items.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Similar lengths share a batch; results do not depend on the grouping.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return data.items[a].ctx.size() < data.items[b].ctx.size(); });
  std::vector<double> out(n);
  Mat<double> probs;
  for (std::size_t start = 0; start < n; start += std::max<std::size_t>(batch_size, 1)) {
    const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                       order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + batch_size)));
    Batch<T> batch = make_batch(data, idx, model.config.use_stmt_branch);
    batch.labels.clear();
    forward_backward<T>(model, batch, ForwardOptions{}, nullptr, &probs);
    for (std::size_t j = 0; j < idx.size(); ++j) out[idx[j]] = probs(0, static_cast<Eigen::Index>(j));
  }
  return out;
}

namespace {

template <typename T>
void put_values(ByteWriter& w, const ParamVector<T>& v) {
  w.u64(v.size());
  for (T x : v) {
    if constexpr (sizeof(T) == 4) w.f32(x);
    else w.f64(x);
  }
}

template <typename T>
ParamVector<T> get_values(ByteReader& r, std::uint8_t width) {
  const std::uint64_t n = r.u64();
  ParamVector<T> v;
  v.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 26)));
  for (std::uint64_t i = 0; i < n; ++i) v.push_back(static_cast<T>(width == 4 ? r.f32() : r.f64()));
  return v;
}

}  // namespace

template <typename T>
std::string serialize_run(const TrainingRun<T>& run) {
  ByteWriter w;
  w.bytes(kRunMagic);
  w.u8(sizeof(T));
  const auto& mc = run.model.config;
  w.u64(mc.hidden);
  w.u32(static_cast<std::uint32_t>(mc.dense_sizes.size()));
  for (auto s : mc.dense_sizes) w.u64(s);
  w.f64(mc.dropout);
  w.u8(mc.use_stmt_branch ? 1 : 0);
  w.u64(mc.seed);
  w.u64(run.model.input_dim);
  const auto& tc = run.train;
  w.u64(tc.epochs);
  w.u64(tc.batch_size);
  w.f64(tc.lr);
  w.f64(tc.beta1);
  w.f64(tc.beta2);
  w.f64(tc.epsilon);
  w.f64(tc.clip_norm);
  w.u64(tc.seed);
  w.u64(run.epoch);
  w.u64(run.clipped_steps);
  w.u64(run.epoch_loss.size());
  for (double l : run.epoch_loss) w.f64(l);
  w.u64(run.opt.step);
  put_values(w, run.model.params);
  put_values(w, run.opt.m);
  put_values(w, run.opt.u);
  return w.data();
}

template <typename T>
TrainingRun<T> deserialize_run(const std::string& bytes) {
  ByteReader r(bytes, "model checkpoint");
  if (r.bytes(kRunMagic.size()) != kRunMagic) throw SchemaError("not a model checkpoint");
  const std::uint8_t width = r.u8();
  if (width != 4 && width != 8) throw SchemaError("model checkpoint has an unknown value width");
  ModelConfig mc;
  mc.hidden = r.u64();
  mc.dense_sizes.resize(r.u32());
  for (auto& s : mc.dense_sizes) s = r.u64();
  mc.dropout = r.f64();
  mc.use_stmt_branch = r.u8() != 0;
  mc.seed = r.u64();
  const std::size_t input_dim = r.u64();
  TrainConfig tc;
  tc.epochs = r.u64();
  tc.batch_size = r.u64();
  tc.lr = r.f64();
  tc.beta1 = r.f64();
  tc.beta2 = r.f64();
  tc.epsilon = r.f64();
  tc.clip_norm = r.f64();
  tc.seed = r.u64();
  mc.validate();
  tc.validate();

  TrainingRun<T> run;
  run.train = tc;
  run.model.config = mc;
  run.model.input_dim = input_dim;
  run.model.layout = ParamLayout(mc, input_dim);
  run.epoch = r.u64();
  run.clipped_steps = r.u64();
  const std::uint64_t nl = r.u64();
  for (std::uint64_t i = 0; i < nl; ++i) run.epoch_loss.push_back(r.f64());
  run.opt.step = r.u64();
  run.model.params = get_values<T>(r, width);
  run.opt.m = get_values<T>(r, width);
  run.opt.u = get_values<T>(r, width);
  if (!r.at_end()) throw SchemaError("model checkpoint has trailing bytes");
  const std::size_t total = run.model.layout.total();
  if (run.model.params.size() != total) throw SchemaError("model checkpoint parameter count does not match its config");
  if (!run.opt.m.empty() && (run.opt.m.size() != total || run.opt.u.size() != total)) {
    throw SchemaError("optimizer state size does not match the parameters");
  }
  return run;
}

template <typename T>
void save_run(const TrainingRun<T>& run, const std::filesystem::path& path) {
  write_file(path, serialize_run(run));
}

template <typename T>
TrainingRun<T> load_run(const std::filesystem::path& path) {
  return deserialize_run<T>(read_file(path));
}

#define WARNRANK_NN_INSTANTIATE(T)                                                                       \
  template Batch<T> make_batch<T>(const SequenceSet<T>&, const std::vector<std::size_t>&, bool);         \
  template void adamax_update<T>(ParamVector<T>&, const ParamVector<T>&, AdamaxState<T>&,                \
                                 const TrainConfig&);                                                   \
  template double clip_global_norm<T>(ParamVector<T>&, double);                                          \
  template TrainingRun<T> new_training_run<T>(const ModelConfig&, std::size_t, const TrainConfig&);      \
  template void train_epochs<T>(TrainingRun<T>&, const SequenceSet<T>&, std::size_t,                     \
                                const std::function<void(const TrainingRun<T>&)>&);                      \
  template std::vector<double> predict_tp<T>(const Model<T>&, const SequenceSet<T>&, std::size_t);       \
  template std::string serialize_run<T>(const TrainingRun<T>&);                                          \
  template TrainingRun<T> deserialize_run<T>(const std::string&);                                        \
  template void save_run<T>(const TrainingRun<T>&, const std::filesystem::path&);                        \
  template TrainingRun<T> load_run<T>(const std::filesystem::path&);
WARNRANK_NN_INSTANTIATE(float)
WARNRANK_NN_INSTANTIATE(double)

}  // namespace warnrank::nn
