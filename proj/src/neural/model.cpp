#include "neural/model.hpp"

#include <cmath>

#include "util/error.hpp"
#include "util/rng.hpp"

namespace warnrank::nn {

void ModelConfig::validate() const {
  if (hidden < 1) throw ConfigError("hidden must be at least 1");
  if (dense_sizes.empty() || dense_sizes.back() != 2) throw ConfigError("the last dense layer must have width 2");
  for (auto w : dense_sizes) {
    if (w < 1) throw ConfigError("dense widths must be positive");
  }
  if (!(dropout >= 0 && dropout < 1)) throw ConfigError("dropout must lie in [0, 1)");
}

ParamLayout::ParamLayout(const ModelConfig& cfg, std::size_t input_dim) {
  const auto h = static_cast<Eigen::Index>(cfg.hidden);
  const auto d = static_cast<Eigen::Index>(input_dim);
  std::vector<std::string> branches{"slice"};
  if (cfg.use_stmt_branch) branches.push_back("stmt");
  for (const auto& br : branches) {
    for (const char* dir : {"fwd", "bwd"}) {
      const std::string p = br + "." + dir + ".";
      add(p + "W", 4 * h, d);
      add(p + "U", 4 * h, h);
      add(p + "b", 4 * h, 1);
    }
  }
  auto in = static_cast<Eigen::Index>((cfg.use_stmt_branch ? 4 : 2) * cfg.hidden);
  for (std::size_t k = 0; k < cfg.dense_sizes.size(); ++k) {
    const auto out = static_cast<Eigen::Index>(cfg.dense_sizes[k]);
    add("dense" + std::to_string(k + 1) + ".W", out, in);
    add("dense" + std::to_string(k + 1) + ".b", out, 1);
    in = out;
  }
}

void ParamLayout::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  index_[name] = blocks_.size();
  blocks_.push_back({std::move(name), rows, cols, total_});
  total_ += static_cast<std::size_t>(rows * cols);
}

const ParamBlock& ParamLayout::block(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InternalError("no parameter block named " + name);
  return blocks_[it->second];
}

template <typename T>
Model<T> init_model(const ModelConfig& cfg, std::size_t input_dim) {
  cfg.validate();
  if (input_dim < 1) throw ConfigError("input dimension must be at least 1");
  Model<T> m;
  m.config = cfg;
  m.input_dim = input_dim;
  m.layout = ParamLayout(cfg, input_dim);
  m.params.assign(m.layout.total(), T(0));
  Rng rng(derive_seed(cfg.seed, "init"));
  const double h = static_cast<double>(cfg.hidden);
  for (const auto& b : m.layout.blocks()) {
    T* p = m.params.data() + b.offset;
    const std::string kind = b.name.substr(b.name.rfind('.') + 1);
    if (kind == "W") {
      // Keras-style fan: the kernel maps `cols` inputs to `rows` outputs.
      const double limit = std::sqrt(6.0 / static_cast<double>(b.rows + b.cols));
      for (std::size_t i = 0; i < b.size(); ++i) p[i] = static_cast<T>(rng.uniform(-limit, limit));
    } else if (kind == "U") {
      const double limit = 1.0 / std::sqrt(h);
      for (std::size_t i = 0; i < b.size(); ++i) p[i] = static_cast<T>(rng.uniform(-limit, limit));
    } else if (kind == "b" && b.name.rfind("dense", 0) != 0) {
      for (std::size_t i = cfg.hidden; i < 2 * cfg.hidden; ++i) p[i] = T(1);
    }
  }
  return m;
}

template Model<float> init_model<float>(const ModelConfig&, std::size_t);
template Model<double> init_model<double>(const ModelConfig&, std::size_t);

}  // namespace warnrank::nn
