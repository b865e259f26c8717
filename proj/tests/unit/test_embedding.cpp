#include <cmath>

#include "doctest.h"
#include "embedding/cbow.hpp"
#include "oracles.hpp"
#include "util/error.hpp"
#include "util/rng.hpp"

using namespace warnrank;
using namespace warnrank::embed;

namespace {

Matrix random_matrix(Rng& rng, int rows, int cols, double scale) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
  return m;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<std::vector<std::int32_t>> toy_corpus(Rng& rng, int sentences) {
  // Two "topics": tokens 2..5 co-occur, tokens 6..9 co-occur.
  std::vector<std::vector<std::int32_t>> out;
  for (int s = 0; s < sentences; ++s) {
    const int base = s % 2 == 0 ? 2 : 6;
    std::vector<std::int32_t> seq;
    for (int t = 0; t < 8; ++t) seq.push_back(base + static_cast<int>(rng.uniform_index(4)));
    out.push_back(seq);
  }
  return out;
}

prep::Vocabulary toy_vocab() {
  std::vector<std::string> toks{"<pad>", "<unk>"};
  for (int i = 2; i < 10; ++i) toks.push_back("w" + std::to_string(i));
  return prep::Vocabulary::from_tokens(toks);
}

}  // namespace

TEST_CASE("example loss matches the logistic formula") {
  Rng rng(1);
  const Matrix w_in = random_matrix(rng, 6, 4, 0.5);
  const Matrix w_out = random_matrix(rng, 6, 4, 0.5);
  const CbowExample ex{{1, 2, 4}, 3, {5, 0}};
  Eigen::VectorXd h = (w_in.row(1) + w_in.row(2) + w_in.row(4)).transpose() / 3.0;
  const double expected = -std::log(sigmoid(w_out.row(3).dot(h))) - std::log(sigmoid(-w_out.row(5).dot(h))) -
                          std::log(sigmoid(-w_out.row(0).dot(h)));
  const auto g = cbow_example_gradient(w_in, w_out, ex);
  CHECK(g.loss == doctest::Approx(expected).epsilon(1e-12));
  CHECK((g.hidden - h).norm() < 1e-12);
  Matrix gi, go;
  CHECK(cbow_loss_and_grads(w_in, w_out, ex, &gi, &go) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("analytic CBOW gradients match central differences") {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix w_in = random_matrix(rng, 7, 5, 0.8);
    Matrix w_out = random_matrix(rng, 7, 5, 0.8);
    const CbowExample ex{{1, 3, 3, 6}, 2, {4, 5, 1}};
    Matrix gi, go;
    cbow_loss_and_grads(w_in, w_out, ex, &gi, &go);
    const double eps = 1e-6;
    double worst = 0;
    for (Matrix* w : {&w_in, &w_out}) {
      const Matrix& g = w == &w_in ? gi : go;
      for (int i = 0; i < w->rows(); ++i) {
        for (int j = 0; j < w->cols(); ++j) {
          const double keep = (*w)(i, j);
          (*w)(i, j) = keep + eps;
          const double up = cbow_loss_and_grads(w_in, w_out, ex, nullptr, nullptr);
          (*w)(i, j) = keep - eps;
          const double down = cbow_loss_and_grads(w_in, w_out, ex, nullptr, nullptr);
          (*w)(i, j) = keep;
          worst = std::max(worst, oracle::rel_error(g(i, j), (up - down) / (2 * eps), 1e-6));
        }
      }
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("training lowers the loss and is reproducible") {
  Rng rng(3);
  const auto corpus = toy_corpus(rng, 60);
  CbowConfig cfg;
  cfg.dim = 8;
  cfg.window = 2;
  cfg.epochs = 15;
  cfg.seed = 4;
  const auto a = train_cbow(corpus, toy_vocab(), cfg);
  const auto b = train_cbow(corpus, toy_vocab(), cfg);
  REQUIRE(a.epoch_loss.size() == 15);
  CHECK(a.epoch_loss.back() < a.epoch_loss.front());
  CHECK(a.embedding.vectors == b.embedding.vectors);
  CHECK(a.embedding.vectors.row(0).norm() == 0.0);
  CHECK(a.embedding.dim() == 8);

  // Words of the same topic end up closer than words of different topics.
  auto cos = [&](int x, int y) {
    const auto u = a.embedding.vectors.row(x), v = a.embedding.vectors.row(y);
    return u.dot(v) / (u.norm() * v.norm());
  };
  CHECK(cos(2, 3) > cos(2, 7));
  CHECK(cos(6, 8) > cos(6, 4));

  cfg.seed = 5;
  CHECK(train_cbow(corpus, toy_vocab(), cfg).embedding.vectors != a.embedding.vectors);
}

TEST_CASE("empty training data is rejected") {
  CHECK_THROWS_AS(train_cbow({{}, {}}, toy_vocab(), CbowConfig{}), EmptyCorpus);
}

TEST_CASE("config validation") {
  CbowConfig c;
  c.dim = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.unk_rate = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("embedding serialization round trips") {
  Rng rng(6);
  CbowConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 2;
  const auto r = train_cbow(toy_corpus(rng, 10), toy_vocab(), cfg);
  const auto bytes = serialize_embedding(r.embedding);
  const auto back = deserialize_embedding(bytes);
  CHECK(back.vocab == r.embedding.vocab);
  CHECK(back.config == r.embedding.config);
  CHECK(back.vectors == r.embedding.vectors);
  CHECK(serialize_embedding(back) == bytes);
  CHECK_THROWS_AS(deserialize_embedding(bytes.substr(0, bytes.size() - 3)), SchemaError);
  CHECK_THROWS_AS(deserialize_embedding("NOTANEMBEDDING"), SchemaError);
}

TEST_CASE("embed looks up rows") {
  EmbeddingMatrix e;
  e.vocab = toy_vocab();
  e.vectors = Matrix::Zero(10, 2);
  e.vectors(3, 0) = 1.5;
  e.vectors(4, 1) = -2;
  const auto x = embed<float>({3, 0, 4}, e);
  CHECK(x.rows() == 3);
  CHECK(x(0, 0) == 1.5f);
  CHECK(x(1, 0) == 0.0f);
  CHECK(x(2, 1) == -2.0f);
}
