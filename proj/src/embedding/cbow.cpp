#include "embedding/cbow.hpp"

#include <algorithm>
#include <cmath>

#include "util/binio.hpp"
#include "util/error.hpp"
#include "util/hash.hpp"
#include "util/rng.hpp"

namespace warnrank::embed {

void CbowConfig::validate() const {
  if (dim < 1 || window < 1 || negatives < 1) throw ConfigError("CBOW needs dim, window, negatives >= 1");
  if (!(lr > 0)) throw ConfigError("CBOW learning rate must be positive");
  if (unk_rate < 0 || unk_rate >= 1) throw ConfigError("unk_rate must lie in [0, 1)");
}

namespace {

double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

// log s(x), stable for large |x|.
double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

}  // namespace

CbowGradient cbow_example_gradient(const Matrix& w_in, const Matrix& w_out, const CbowExample& ex) {
  CbowGradient g;
  const auto d = w_in.cols();
  g.hidden = Eigen::VectorXd::Zero(d);
  for (auto c : ex.context) g.hidden += w_in.row(c).transpose();
  g.hidden /= static_cast<double>(ex.context.size());
  g.grad_hidden = Eigen::VectorXd::Zero(d);

  g.targets.push_back(ex.center);
  g.targets.insert(g.targets.end(), ex.negatives.begin(), ex.negatives.end());
  for (std::size_t j = 0; j < g.targets.size(); ++j) {
    const double label = j == 0 ? 1.0 : 0.0;
    const double score = w_out.row(g.targets[j]).dot(g.hidden);
    g.loss -= label == 1.0 ? log_sigmoid(score) : log_sigmoid(-score);
    const double coeff = sigmoid(score) - label;
    g.target_coeff.push_back(coeff);
    g.grad_hidden += coeff * w_out.row(g.targets[j]).transpose();
  }
  return g;
}

double cbow_loss_and_grads(const Matrix& w_in, const Matrix& w_out, const CbowExample& ex, Matrix* g_in,
                           Matrix* g_out) {
  const CbowGradient g = cbow_example_gradient(w_in, w_out, ex);
  if (g_in) {
    g_in->setZero(w_in.rows(), w_in.cols());
    for (auto c : ex.context) g_in->row(c) += g.grad_hidden.transpose() / static_cast<double>(ex.context.size());
  }
  if (g_out) {
    g_out->setZero(w_out.rows(), w_out.cols());
    for (std::size_t j = 0; j < g.targets.size(); ++j) g_out->row(g.targets[j]) += g.target_coeff[j] * g.hidden.transpose();
  }
  return g.loss;
}

CbowResult train_cbow(const std::vector<std::vector<std::int32_t>>& sequences, const prep::Vocabulary& vocab,
                      const CbowConfig& cfg) {
  cfg.validate();
  const auto V = static_cast<Eigen::Index>(vocab.size());
  const auto d = static_cast<Eigen::Index>(cfg.dim);

  Rng rng(derive_seed(cfg.seed, "embedding"));
  // Relabel a small fraction of tokens as <unk> so the unknown-token vector is trained.
  std::vector<std::vector<std::int32_t>> seqs = sequences;
  std::size_t n_tokens = 0;
  for (auto& s : seqs) {
    s.erase(std::remove(s.begin(), s.end(), prep::Vocabulary::kPadId), s.end());
    for (auto& t : s) {
      if (t < 0 || t >= V) throw InternalError("CBOW input id outside the vocabulary");
      if (rng.bernoulli(cfg.unk_rate)) t = prep::Vocabulary::kUnkId;
    }
    n_tokens += s.size();
  }
  if (n_tokens == 0) throw EmptyCorpus("CBOW training data holds no tokens");

  // Negative-sampling distribution: unigram counts to the power 0.75.
  std::vector<double> counts(static_cast<std::size_t>(V), 0.0);
  for (const auto& s : seqs) {
    for (auto t : s) counts[static_cast<std::size_t>(t)] += 1.0;
  }
  std::vector<double> cdf(counts.size());
  double acc = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    acc += std::pow(counts[i], 0.75);
    cdf[i] = acc;
  }
  for (auto& c : cdf) c /= acc;
  auto sample = [&] {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<std::int32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), V - 1));
  };

  CbowResult result;
  Matrix w_in(V, d);
  for (Eigen::Index r = 0; r < V; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) w_in(r, c) = r == 0 ? 0.0 : rng.uniform(-0.5, 0.5) / static_cast<double>(d);
  }
  Matrix w_out = Matrix::Zero(V, d);

  const double total_steps = static_cast<double>(cfg.epochs) * static_cast<double>(n_tokens);
  double step = 0;
  const auto win = static_cast<std::ptrdiff_t>(cfg.window);
  CbowExample ex;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0;
    std::size_t examples = 0;
    for (const auto& s : seqs) {
      const auto n = static_cast<std::ptrdiff_t>(s.size());
      for (std::ptrdiff_t c = 0; c < n; ++c, step += 1) {
        ex.context.clear();
        for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, c - win); k <= std::min(n - 1, c + win); ++k) {
          if (k != c) ex.context.push_back(s[static_cast<std::size_t>(k)]);
        }
        if (ex.context.empty()) continue;
        ex.center = s[static_cast<std::size_t>(c)];
        ex.negatives.clear();
        for (std::size_t k = 0; k < cfg.negatives; ++k) {
          const auto neg = sample();
          if (neg != ex.center) ex.negatives.push_back(neg);
        }
        const double lr = cfg.lr * std::max(1e-4, 1.0 - step / total_steps);
        const CbowGradient g = cbow_example_gradient(w_in, w_out, ex);
        loss_sum += g.loss;
        ++examples;
        for (std::size_t j = 0; j < g.targets.size(); ++j) {
          w_out.row(g.targets[j]) -= lr * g.target_coeff[j] * g.hidden.transpose();
        }
        const Eigen::RowVectorXd delta = (lr / static_cast<double>(ex.context.size())) * g.grad_hidden.transpose();
        for (auto t : ex.context) w_in.row(t) -= delta;
      }
    }
    result.epoch_loss.push_back(examples ? loss_sum / static_cast<double>(examples) : 0.0);
  }
  w_in.row(0).setZero();

  result.embedding.vocab = vocab;
  result.embedding.config = cfg;
  result.embedding.vectors = std::move(w_in);
  result.output_vectors = std::move(w_out);
  return result;
}

namespace {
constexpr std::string_view kMagic = "WREMB001";
}

std::string serialize_embedding(const EmbeddingMatrix& emb) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(1);
  w.u64(static_cast<std::uint64_t>(emb.vectors.rows()));
  w.u64(static_cast<std::uint64_t>(emb.vectors.cols()));
  w.u64(emb.config.seed);
  w.u64(emb.config.window);
  w.u64(emb.config.negatives);
  w.u64(emb.config.epochs);
  w.f64(emb.config.lr);
  w.f64(emb.config.unk_rate);
  for (const auto& t : emb.vocab.tokens()) w.str(t);
  for (Eigen::Index i = 0; i < emb.vectors.size(); ++i) w.f64(emb.vectors.data()[i]);
  return w.data();
}

EmbeddingMatrix deserialize_embedding(std::string_view bytes) {
  ByteReader r(bytes, "embedding checkpoint");
  if (r.bytes(kMagic.size()) != kMagic) throw SchemaError("not an embedding checkpoint");
  if (r.u32() != 1) throw SchemaError("unsupported embedding checkpoint version");
  EmbeddingMatrix emb;
  const auto V = r.u64(), d = r.u64();
  emb.config.dim = d;
  emb.config.seed = r.u64();
  emb.config.window = r.u64();
  emb.config.negatives = r.u64();
  emb.config.epochs = r.u64();
  emb.config.lr = r.f64();
  emb.config.unk_rate = r.f64();
  std::vector<std::string> tokens;
  for (std::uint64_t i = 0; i < V; ++i) tokens.push_back(r.str());
  emb.vocab = prep::Vocabulary::from_tokens(std::move(tokens));
  emb.vectors.resize(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < emb.vectors.size(); ++i) emb.vectors.data()[i] = r.f64();
  if (!r.at_end()) throw SchemaError("embedding checkpoint has trailing bytes");
  return emb;
}

void save_embedding(const EmbeddingMatrix& emb, const std::filesystem::path& path) {
  write_file(path, serialize_embedding(emb));
}

EmbeddingMatrix load_embedding(const std::filesystem::path& path) { return deserialize_embedding(read_file(path)); }

}  // namespace warnrank::embed
