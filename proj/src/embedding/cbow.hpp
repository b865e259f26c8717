#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "preprocess/sequence.hpp"

namespace warnrank::embed {

struct CbowConfig {
  std::size_t dim = 96;
  std::size_t window = 5;      // context radius
  std::size_t negatives = 5;
  std::size_t epochs = 10;
  double lr = 0.025;           // decays linearly to lr * 1e-4
  double unk_rate = 0.01;      // fraction of training tokens relabeled <unk>
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const CbowConfig&) const = default;
};

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EmbeddingMatrix {
  prep::Vocabulary vocab;
  CbowConfig config;
  Matrix vectors;  // V x dim; row 0 (<pad>) is zero

  std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors.cols()); }
};

struct CbowResult {
  EmbeddingMatrix embedding;
  Matrix output_vectors;             // negative-sampling output weights
  std::vector<double> epoch_loss;    // mean loss per training example
};

// One training example: the mean of the context input vectors predicts the
// center (label 1) against sampled negatives (label 0) under the logistic loss
//   -log s(u_c . h) - sum_k log s(-u_k . h).
struct CbowExample {
  std::vector<std::int32_t> context;
  std::int32_t center = 0;
  std::vector<std::int32_t> negatives;
};

struct CbowGradient {
  double loss = 0;
  Eigen::VectorXd grad_hidden;                // d loss / d h
  std::vector<std::int32_t> targets;          // center, then negatives
  std::vector<double> target_coeff;           // s(u_j . h) - label_j
  Eigen::VectorXd hidden;
};

CbowGradient cbow_example_gradient(const Matrix& w_in, const Matrix& w_out, const CbowExample& ex);

// Dense loss and gradients with respect to both matrices (for checking).
double cbow_loss_and_grads(const Matrix& w_in, const Matrix& w_out, const CbowExample& ex, Matrix* g_in,
                           Matrix* g_out);

// Sequences hold vocabulary ids of real tokens only (no <pad>). Throws
// EmptyCorpus when there is no token to train on.
CbowResult train_cbow(const std::vector<std::vector<std::int32_t>>& sequences, const prep::Vocabulary& vocab,
                      const CbowConfig& cfg);

// Row t = vector of ids[t]; <pad> rows are zero.
template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> embed(const std::vector<std::int32_t>& ids,
                                                                        const EmbeddingMatrix& emb) {
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(static_cast<Eigen::Index>(ids.size()),
                                                                        emb.vectors.cols());
  for (std::size_t t = 0; t < ids.size(); ++t) {
    out.row(static_cast<Eigen::Index>(t)) = emb.vectors.row(ids[t]).template cast<T>();
  }
  return out;
}

// Binary layout (little-endian):
//   "WREMB001" | u32 version=1 | u64 V | u64 dim | u64 seed
//   | u64 window | u64 negatives | u64 epochs | f64 lr | f64 unk_rate
//   | V x (u32 length, bytes) vocabulary | V*dim f64 row-major vectors
std::string serialize_embedding(const EmbeddingMatrix& emb);
EmbeddingMatrix deserialize_embedding(std::string_view bytes);
void save_embedding(const EmbeddingMatrix& emb, const std::filesystem::path& path);
EmbeddingMatrix load_embedding(const std::filesystem::path& path);

}  // namespace warnrank::embed
