#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace warnrank::nn {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Flat buffers that Eigen maps over. Vectorized reductions split their work
// by the pointer's alignment at run time, so plain heap storage would make
// results depend on where the allocator happened to place the buffer.
template <typename T>
using ParamVector = std::vector<T, Eigen::aligned_allocator<T>>;

struct ModelConfig {
  std::size_t hidden = 256;                          // LSTM units per direction
  std::vector<std::size_t> dense_sizes{256, 64, 2};  // last layer is the 2-way output
  double dropout = 0.1;                              // on the input of every dense layer
  bool use_stmt_branch = true;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct ParamBlock {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::size_t offset = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(rows * cols); }
};

// All learned parameters live in one flat buffer; blocks are column-major
// views into it. Gate order inside LSTM blocks is (input, forget, cell, output).
//   <branch>.<dir>.W  4h x d     input weights      (branch: slice | stmt, dir: fwd | bwd)
//   <branch>.<dir>.U  4h x h     recurrent weights
//   <branch>.<dir>.b  4h x 1
//   dense<k>.W        out x in,  dense<k>.b  out x 1   (k = 1..3)
class ParamLayout {
 public:
  ParamLayout() = default;
  ParamLayout(const ModelConfig& cfg, std::size_t input_dim);

  const std::vector<ParamBlock>& blocks() const noexcept { return blocks_; }
  const ParamBlock& block(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) > 0; }
  std::size_t total() const noexcept { return total_; }

 private:
  void add(std::string name, Eigen::Index rows, Eigen::Index cols);

  std::vector<ParamBlock> blocks_;
  std::map<std::string, std::size_t> index_;
  std::size_t total_ = 0;
};

// Parameters (or gradients, or optimizer moments) laid out per ParamLayout.
template <typename T>
struct ParamBuffer {
  const ParamLayout* layout = nullptr;
  ParamVector<T> data;

  Eigen::Map<Mat<T>> mat(const std::string& name) {
    const auto& b = layout->block(name);
    return Eigen::Map<Mat<T>>(data.data() + b.offset, b.rows, b.cols);
  }
  Eigen::Map<const Mat<T>> mat(const std::string& name) const {
    const auto& b = layout->block(name);
    return Eigen::Map<const Mat<T>>(data.data() + b.offset, b.rows, b.cols);
  }
  Eigen::Map<Vec<T>> vec(const std::string& name) {
    const auto& b = layout->block(name);
    return Eigen::Map<Vec<T>>(data.data() + b.offset, b.rows * b.cols);
  }
  Eigen::Map<const Vec<T>> vec(const std::string& name) const {
    const auto& b = layout->block(name);
    return Eigen::Map<const Vec<T>>(data.data() + b.offset, b.rows * b.cols);
  }
};

template <typename T>
struct Model {
  ModelConfig config;
  std::size_t input_dim = 0;
  ParamLayout layout;
  ParamVector<T> params;

  Model() = default;
  Model(const Model& o) : config(o.config), input_dim(o.input_dim), layout(o.layout), params(o.params) {}
  Model& operator=(const Model& o) {
    config = o.config;
    input_dim = o.input_dim;
    layout = o.layout;
    params = o.params;
    return *this;
  }

  std::size_t concat_width() const { return (config.use_stmt_branch ? 4 : 2) * config.hidden; }

  Eigen::Map<const Mat<T>> mat(const std::string& name) const {
    const auto& b = layout.block(name);
    return Eigen::Map<const Mat<T>>(params.data() + b.offset, b.rows, b.cols);
  }
  Eigen::Map<Mat<T>> mat(const std::string& name) {
    const auto& b = layout.block(name);
    return Eigen::Map<Mat<T>>(params.data() + b.offset, b.rows, b.cols);
  }
  Eigen::Map<const Vec<T>> vec(const std::string& name) const {
    const auto& b = layout.block(name);
    return Eigen::Map<const Vec<T>>(params.data() + b.offset, b.rows * b.cols);
  }
  Eigen::Map<Vec<T>> vec(const std::string& name) {
    const auto& b = layout.block(name);
    return Eigen::Map<Vec<T>>(params.data() + b.offset, b.rows * b.cols);
  }

  template <typename U>
  Model<U> cast() const {
    Model<U> m;
    m.config = config;
    m.input_dim = input_dim;
    m.layout = layout;
    m.params.assign(params.begin(), params.end());
    return m;
  }
};

// Glorot-uniform input and dense weights, U(-1/sqrt(h), 1/sqrt(h)) recurrent
// weights, zero biases except the forget gate (+1).
template <typename T>
Model<T> init_model(const ModelConfig& cfg, std::size_t input_dim);

extern template Model<float> init_model<float>(const ModelConfig&, std::size_t);
extern template Model<double> init_model<double>(const ModelConfig&, std::size_t);

}  // namespace warnrank::nn
