#include <cmath>

#include "doctest.h"
#include "neural/lstm.hpp"
#include "neural/model.hpp"
#include "neural/network.hpp"
#include "neural/train.hpp"
#include "oracles.hpp"
#include "util/error.hpp"
#include "util/rng.hpp"

using namespace warnrank;
using namespace warnrank::nn;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

ModelConfig tiny_model(std::uint64_t seed = 3) {
  ModelConfig cfg;
  cfg.hidden = 3;
  cfg.dense_sizes = {5, 4, 2};
  cfg.dropout = 0.2;
  cfg.seed = seed;
  return cfg;
}

// Labels follow whether token 2 appears in the context.
template <typename T>
SequenceSet<T> toy_set(Rng& rng, int n, int d) {
  SequenceSet<T> s;
  s.table = Mat<T>::Zero(d, 8);
  for (int v = 1; v < 8; ++v)
    for (int i = 0; i < d; ++i) s.table(i, v) = static_cast<T>(rng.uniform(-1, 1));
  s.ctx_capacity = 6;
  s.stmt_capacity = 3;
  for (int k = 0; k < n; ++k) {
    SequenceExample e;
    const int len = rng.uniform_int(1, 6);
    for (int t = 0; t < len; ++t) e.ctx.push_back(rng.uniform_int(3, 7));
    e.label = k % 3 == 0 ? 0 : 1;
    if (e.label == 0) e.ctx[rng.uniform_index(e.ctx.size())] = 2;
    e.stmt.assign(e.ctx.begin(), e.ctx.begin() + std::min<std::size_t>(e.ctx.size(), 3));
    s.items.push_back(e);
  }
  return s;
}

template <typename T>
void perturb(Model<T>& m, Rng& rng, double scale) {
  for (auto& p : m.params) p += static_cast<T>(rng.uniform(-scale, scale));
}

}  // namespace

TEST_CASE("one LSTM unit matches a hand computation") {
  LstmWeights<double> w;
  w.W = Mat<double>(4, 1);
  w.W << 0.5, -0.5, 1.0, 0.25;
  w.U = Mat<double>(4, 1);
  w.U << 0.1, 0.2, -0.3, 0.4;
  w.b = Vec<double>(4);
  w.b << 0.0, 1.0, 0.0, -0.1;
  Mat<double> X(2, 1);
  X << 1.0, -2.0;

  auto cell = [&](double x, double h, double c) {
    const double i = sig(0.5 * x + 0.1 * h);
    const double f = sig(-0.5 * x + 0.2 * h + 1.0);
    const double g = std::tanh(1.0 * x - 0.3 * h);
    const double o = sig(0.25 * x + 0.4 * h - 0.1);
    const double c2 = f * c + i * g;
    return std::pair{o * std::tanh(c2), c2};
  };
  const auto [h1, c1] = cell(1.0, 0, 0);
  const auto [h2, c2] = cell(-2.0, h1, c1);
  const auto fwd = lstm_sequence(w, X, false);
  CHECK(fwd(0, 0) == doctest::Approx(h1).epsilon(1e-14));
  CHECK(fwd(1, 0) == doctest::Approx(h2).epsilon(1e-14));

  const auto [r1, rc1] = cell(-2.0, 0, 0);
  const auto [r0, rc0] = cell(1.0, r1, rc1);
  (void)rc0;
  const auto rev = lstm_sequence(w, X, true);
  CHECK(rev(1, 0) == doctest::Approx(r1).epsilon(1e-14));
  CHECK(rev(0, 0) == doctest::Approx(r0).epsilon(1e-14));

  const auto bi = bilstm_sequence(w, w, X);
  CHECK(bi.cols() == 2);
  CHECK(bi(0, 0) == fwd(0, 0));
  CHECK(bi(0, 1) == rev(0, 0));
}

TEST_CASE("global max pooling skips masked steps and picks the earliest maximum") {
  Mat<double> H(4, 2);
  H << 1, 5,
       3, 2,
       3, 9,
       0, 5;
  auto p = global_max_pool(H, {1, 1, 1, 1});
  CHECK(p.value(0) == 3);
  CHECK(p.argmax[0] == 1);
  CHECK(p.value(1) == 9);
  p = global_max_pool(H, {1, 0, 0, 1});
  CHECK(p.value(0) == 1);
  CHECK(p.argmax[1] == 0);
  CHECK_THROWS_AS(global_max_pool(H, {0, 0, 0, 0}), AllMasked);
}

TEST_CASE("softmax columns sum to one") {
  Mat<float> logits(2, 4);
  logits << 30.f, -5.f, 0.f, 80.f,
            -40.f, 7.f, 0.f, 79.5f;
  const auto p = softmax_columns(logits);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(p.col(j).sum() - 1.0) < 1e-12);
  CHECK(p(0, 2) == doctest::Approx(0.5));
  CHECK(p(0, 3) == doctest::Approx(sig(0.5)).epsilon(1e-6));
}

TEST_CASE("parameter layout and initialization") {
  const auto cfg = tiny_model();
  const auto m = init_model<double>(cfg, 4);
  CHECK(m.layout.block("slice.fwd.W").rows == 12);
  CHECK(m.layout.block("slice.fwd.W").cols == 4);
  CHECK(m.layout.block("stmt.bwd.U").cols == 3);
  CHECK(m.layout.block("dense1.W").cols == 12);
  CHECK(m.layout.block("dense3.W").rows == 2);
  CHECK(m.params.size() == m.layout.total());
  const auto b = m.vec("slice.fwd.b");
  for (int k = 0; k < 12; ++k) CHECK(b(k) == (k >= 3 && k < 6 ? 1.0 : 0.0));
  const double lim = std::sqrt(6.0 / (12 + 4));
  CHECK(m.mat("slice.fwd.W").cwiseAbs().maxCoeff() <= lim);
  CHECK_THROWS_AS(m.layout.block("nothing"), InternalError);

  ModelConfig no_stmt = cfg;
  no_stmt.use_stmt_branch = false;
  const auto m2 = init_model<double>(no_stmt, 4);
  CHECK_FALSE(m2.layout.has("stmt.fwd.W"));
  CHECK(m2.layout.block("dense1.W").cols == 6);
  CHECK(init_model<double>(cfg, 4).params == m.params);
}

TEST_CASE("config validation") {
  ModelConfig m;
  m.dense_sizes = {8, 3};
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = {};
  m.dropout = 1.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  TrainConfig t;
  t.batch_size = 0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
}

TEST_CASE("full model gradients match central differences") {
  Rng rng(8);
  auto data = toy_set<double>(rng, 5, 4);
  auto m = init_model<double>(tiny_model(), 4);
  perturb(m, rng, 0.3);
  std::vector<std::size_t> idx{0, 1, 2, 3, 4};
  const auto batch = make_batch(data, idx, true);
  const ForwardOptions opt{true, 99};
  ParamVector<double> g;
  InputGrads<double> ig;
  forward_backward(m, batch, opt, &g, nullptr, &ig);
  const double eps = 1e-5;
  double worst = 0;
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    auto mp = m, mm = m;
    mp.params[i] += eps;
    mm.params[i] -= eps;
    const double fd = (forward_backward(mp, batch, opt, static_cast<ParamVector<double>*>(nullptr)) -
                       forward_backward(mm, batch, opt, static_cast<ParamVector<double>*>(nullptr))) /
                      (2 * eps);
    worst = std::max(worst, oracle::rel_error(g[i], fd, 1e-6));
  }
  CHECK(worst < 1e-4);

  double worst_in = 0;
  for (Eigen::Index i = 0; i < batch.slice.x.size(); ++i) {
    auto bp = batch, bm = batch;
    bp.slice.x.data()[i] += eps;
    bm.slice.x.data()[i] -= eps;
    const double fd = (forward_backward(m, bp, opt, static_cast<ParamVector<double>*>(nullptr)) -
                       forward_backward(m, bm, opt, static_cast<ParamVector<double>*>(nullptr))) /
                      (2 * eps);
    worst_in = std::max(worst_in, oracle::rel_error(ig.slice.data()[i], fd, 1e-6));
  }
  CHECK(worst_in < 1e-4);
}

TEST_CASE("trailing padding does not change loss or gradient") {
  Rng rng(9);
  auto data = toy_set<double>(rng, 4, 3);
  auto m = init_model<double>(tiny_model(), 3);
  perturb(m, rng, 0.2);
  const auto b = make_batch(data, {0, 1, 2, 3}, true);
  // The same batch laid out over the full capacity.
  auto full = b;
  full.slice.steps = b.slice.capacity;
  full.slice.x = Mat<double>::Zero(3, static_cast<Eigen::Index>(full.slice.steps) * b.slice.batch);
  full.slice.x.leftCols(b.slice.x.cols()) = b.slice.x;
  const ForwardOptions opt{true, 5};
  ParamVector<double> g, gf;
  const double l = forward_backward(m, b, opt, &g);
  const double lf = forward_backward(m, full, opt, &gf);
  CHECK(std::abs(l - lf) < 1e-12);
  double diff = 0;
  for (std::size_t i = 0; i < g.size(); ++i) diff = std::max(diff, std::abs(g[i] - gf[i]));
  CHECK(diff < 1e-12);
}

TEST_CASE("predictions do not depend on batch composition") {
  Rng rng(10);
  auto data = toy_set<float>(rng, 20, 4);
  auto m = init_model<float>(tiny_model(), 4);
  perturb(m, rng, 0.2);
  const auto one = predict_tp(m, data, 1);
  const auto many = predict_tp(m, data, 64);
  REQUIRE(one.size() == 20);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(std::abs(one[i] - many[i]) < 1e-5);
    CHECK(one[i] >= 0.0);
    CHECK(one[i] <= 1.0);
  }
}

TEST_CASE("dropout masks depend only on the seed") {
  Rng rng(11);
  auto data = toy_set<double>(rng, 4, 3);
  auto cfg = tiny_model();
  cfg.dropout = 0.5;
  const auto m = init_model<double>(cfg, 3);
  const auto b = make_batch(data, {0, 1, 2, 3}, true);
  auto loss = [&](bool train, std::uint64_t seed) {
    return forward_backward(m, b, ForwardOptions{train, seed}, static_cast<ParamVector<double>*>(nullptr));
  };
  CHECK(loss(true, 1) == loss(true, 1));
  CHECK(loss(true, 1) != loss(true, 2));
  CHECK(loss(false, 1) == loss(false, 2));
}

TEST_CASE("gradients need labels") {
  Rng rng(12);
  auto data = toy_set<double>(rng, 2, 3);
  for (auto& e : data.items) e.label = -1;
  const auto m = init_model<double>(tiny_model(), 3);
  const auto b = make_batch(data, {0, 1}, true);
  ParamVector<double> g;
  CHECK_THROWS_AS(forward_backward(m, b, ForwardOptions{}, &g), UnlabeledError);
  Mat<double> probs;
  CHECK(forward_backward(m, b, ForwardOptions{}, static_cast<ParamVector<double>*>(nullptr), &probs) == 0.0);
  CHECK(probs.cols() == 2);
}

TEST_CASE("adamax follows its update rule for three steps") {
  TrainConfig cfg;
  cfg.lr = 0.002;
  ParamVector<double> p{1.0, -0.5, 0.0};
  const std::vector<ParamVector<double>> grads{{0.3, -2.0, 0.0}, {-0.1, -1.0, 0.5}, {0.2, 4.0, -0.5}};
  AdamaxState<double> st;
  std::vector<double> ref(p.begin(), p.end()), m(3, 0.0), u(3, 0.0);
  for (int t = 1; t <= 3; ++t) {
    const auto before = p;
    adamax_update(p, grads[static_cast<std::size_t>(t - 1)], st, cfg);
    for (std::size_t i = 0; i < 3; ++i) {
      const double g = grads[static_cast<std::size_t>(t - 1)][i];
      m[i] = 0.9 * m[i] + 0.1 * g;
      u[i] = std::max(0.999 * u[i], std::abs(g));
      ref[i] -= (0.002 / (1.0 - std::pow(0.9, t))) * m[i] / (u[i] + 1e-8);
      CHECK(p[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
    if (t == 1) {
      // The first step moves every parameter with a nonzero gradient by about lr.
      CHECK(std::abs(p[0] - before[0]) == doctest::Approx(0.002).epsilon(1e-6));
      CHECK(std::abs(p[1] - before[1]) == doctest::Approx(0.002).epsilon(1e-6));
      CHECK(p[2] == before[2]);
    }
  }
  CHECK(st.step == 3);
}

TEST_CASE("global norm clipping") {
  ParamVector<double> g{3.0, 4.0};
  CHECK(clip_global_norm(g, 1.0) == doctest::Approx(5.0));
  CHECK(g[0] == doctest::Approx(0.6));
  CHECK(g[1] == doctest::Approx(0.8));
  ParamVector<double> small{0.3, 0.4};
  CHECK(clip_global_norm(small, 1.0) == doctest::Approx(0.5));
  CHECK(small == ParamVector<double>{0.3, 0.4});
  ParamVector<float> off{30.f, 40.f};
  clip_global_norm(off, 0.0);
  CHECK(off[0] == 30.f);
}

TEST_CASE("training fits a separable toy set") {
  Rng rng(13);
  auto data = toy_set<float>(rng, 48, 4);
  ModelConfig mc = tiny_model();
  mc.hidden = 8;
  mc.dense_sizes = {8, 8, 2};
  mc.dropout = 0.0;
  TrainConfig tc;
  tc.epochs = 40;
  tc.batch_size = 8;
  tc.lr = 0.02;
  auto run = new_training_run<float>(mc, 4, tc);
  train_epochs(run, data, tc.epochs);
  CHECK(run.epoch == 40);
  CHECK(run.epoch_loss.back() < 0.5 * run.epoch_loss.front());
  const auto p = predict_tp(run.model, data);
  int correct = 0;
  for (std::size_t i = 0; i < p.size(); ++i) correct += (p[i] > 0.5) == (data.items[i].label == 0);
  CHECK(correct >= 44);
}

TEST_CASE("a resumed run matches an uninterrupted one") {
  Rng rng(14);
  auto data = toy_set<float>(rng, 30, 4);
  TrainConfig tc;
  tc.epochs = 6;
  tc.batch_size = 7;
  tc.seed = 21;
  auto straight = new_training_run<float>(tiny_model(), 4, tc);
  train_epochs(straight, data, 6);

  auto first = new_training_run<float>(tiny_model(), 4, tc);
  train_epochs(first, data, 3);
  auto resumed = deserialize_run<float>(serialize_run(first));
  CHECK(resumed.epoch == 3);
  train_epochs(resumed, data, 6);
  CHECK(serialize_run(resumed) == serialize_run(straight));
  CHECK(resumed.epoch_loss == straight.epoch_loss);
}

TEST_CASE("checkpoints load across widths and reject garbage") {
  TrainConfig tc;
  tc.epochs = 1;
  const auto run = new_training_run<float>(tiny_model(), 4, tc);
  const auto bytes = serialize_run(run);
  const auto wide = deserialize_run<double>(bytes);
  REQUIRE(wide.model.params.size() == run.model.params.size());
  for (std::size_t i = 0; i < run.model.params.size(); ++i) {
    CHECK(wide.model.params[i] == static_cast<double>(run.model.params[i]));
  }
  CHECK(wide.model.config == run.model.config);
  CHECK(wide.train == run.train);
  CHECK_THROWS_AS(deserialize_run<float>(bytes.substr(0, bytes.size() / 2)), SchemaError);
  CHECK_THROWS_AS(deserialize_run<float>(std::string("garbage")), SchemaError);
}
