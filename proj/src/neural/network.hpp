#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "neural/lstm.hpp"
#include "neural/model.hpp"
#include "util/rng.hpp"

namespace warnrank::nn {

// One input branch of a batch, time-major: column t*batch + j holds the
// embedded token at step t of sample j (zero past the sample's length).
template <typename T>
struct BranchBatch {
  Mat<T> x;
  int steps = 0;     // longest real length in the batch
  int batch = 0;
  int capacity = 0;  // padded sequence length L
  std::vector<int> lengths;
};

template <typename T>
struct Batch {
  BranchBatch<T> slice;
  BranchBatch<T> stmt;      // unused when the model has no statement branch
  std::vector<int> labels;  // 0 = TP, 1 = FP; may be empty at inference
  int size() const { return slice.batch; }
};

struct ForwardOptions {
  bool train = false;               // enables dropout
  std::uint64_t dropout_seed = 0;   // same seed, same masks
};

template <typename T>
struct InputGrads {
  Mat<T> slice;
  Mat<T> stmt;
};

// Builds one branch from per-sample sequences of embedding columns.
template <typename T>
BranchBatch<T> make_branch(const Mat<T>& table, const std::vector<const std::vector<std::int32_t>*>& seqs,
                           int capacity) {
  BranchBatch<T> br;
  br.batch = static_cast<int>(seqs.size());
  br.capacity = capacity;
  for (const auto* s : seqs) {
    if (static_cast<int>(s->size()) > capacity) throw InternalError("sequence longer than its capacity");
    br.lengths.push_back(static_cast<int>(s->size()));
    br.steps = std::max(br.steps, static_cast<int>(s->size()));
  }
  br.x = Mat<T>::Zero(table.rows(), static_cast<Eigen::Index>(br.steps) * br.batch);
  for (int j = 0; j < br.batch; ++j) {
    const auto& s = *seqs[static_cast<std::size_t>(j)];
    for (std::size_t t = 0; t < s.size(); ++t) {
      br.x.col(static_cast<Eigen::Index>(t) * br.batch + j) = table.col(s[t]);
    }
  }
  return br;
}

namespace detail {

template <typename T>
struct BranchTrace {
  LstmTrace<T> fwd, bwd;
  Mat<T> pooled;            // 2h x batch
  std::vector<int> argmax;  // 2h x batch, column-major; step index
};

template <typename T>
void branch_forward(const Model<T>& m, const std::string& name, const BranchBatch<T>& in, BranchTrace<T>& tr) {
  const Eigen::Index h = static_cast<Eigen::Index>(m.config.hidden);
  for (int len : in.lengths) {
    if (len < 1) throw AllMasked("a " + name + " sequence has no unmasked position");
  }
  if (in.steps > in.capacity) throw InternalError("batch longer than its capacity");
  lstm_forward<T>(m.mat(name + ".fwd.W"), m.mat(name + ".fwd.U"), m.vec(name + ".fwd.b"), in.x, in.steps, in.batch,
                  false, 0, tr.fwd);
  lstm_forward<T>(m.mat(name + ".bwd.W"), m.mat(name + ".bwd.U"), m.vec(name + ".bwd.b"), in.x, in.steps, in.batch,
                  true, in.capacity - in.steps, tr.bwd);
  tr.pooled.resize(2 * h, in.batch);
  tr.argmax.assign(static_cast<std::size_t>(2 * h * in.batch), -1);
  for (int j = 0; j < in.batch; ++j) {
    auto out = tr.pooled.col(j);
    int* arg = tr.argmax.data() + static_cast<std::ptrdiff_t>(j) * 2 * h;
    for (int t = 0; t < in.lengths[static_cast<std::size_t>(j)]; ++t) {
      const Eigen::Index col = static_cast<Eigen::Index>(t) * in.batch + j;
      const T* hf = tr.fwd.h.col(col).data();
      const T* hb = tr.bwd.h.col(col).data();
      for (Eigen::Index c = 0; c < h; ++c) {
        if (t == 0 || hf[c] > out(c)) {
          out(c) = hf[c];
          arg[c] = t;
        }
        if (t == 0 || hb[c] > out(h + c)) {
          out(h + c) = hb[c];
          arg[h + c] = t;
        }
      }
    }
  }
}

template <typename T>
void branch_backward(const Model<T>& m, const std::string& name, const BranchBatch<T>& in, const BranchTrace<T>& tr,
                     const Eigen::Ref<const Mat<T>>& dpooled, ParamBuffer<T>& g, Mat<T>* dx) {
  const Eigen::Index h = static_cast<Eigen::Index>(m.config.hidden);
  const Eigen::Index n = static_cast<Eigen::Index>(in.steps) * in.batch;
  Mat<T> dhf = Mat<T>::Zero(h, n);
  Mat<T> dhb = Mat<T>::Zero(h, n);
  for (int j = 0; j < in.batch; ++j) {
    const int* arg = tr.argmax.data() + static_cast<std::ptrdiff_t>(j) * 2 * h;
    for (Eigen::Index c = 0; c < h; ++c) {
      dhf(c, static_cast<Eigen::Index>(arg[c]) * in.batch + j) += dpooled(c, j);
      dhb(c, static_cast<Eigen::Index>(arg[h + c]) * in.batch + j) += dpooled(h + c, j);
    }
  }
  Mat<T> dxf, dxb;
  lstm_backward<T>(m.mat(name + ".fwd.W"), m.mat(name + ".fwd.U"), in.x, tr.fwd, dhf, g.mat(name + ".fwd.W"),
                   g.mat(name + ".fwd.U"), g.vec(name + ".fwd.b"), dx ? &dxf : nullptr);
  lstm_backward<T>(m.mat(name + ".bwd.W"), m.mat(name + ".bwd.U"), in.x, tr.bwd, dhb, g.mat(name + ".bwd.W"),
                   g.mat(name + ".bwd.U"), g.vec(name + ".bwd.b"), dx ? &dxb : nullptr);
  if (dx) *dx = dxf + dxb;
}

}  // namespace detail

// Class probabilities (row 0 = TP, row 1 = FP), normalized in double.
template <typename T>
Mat<double> softmax_columns(const Mat<T>& logits) {
  Mat<double> p = logits.template cast<double>();
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    const double mx = p.col(j).maxCoeff();
    p.col(j) = (p.col(j).array() - mx).exp().matrix();
    p.col(j) /= p.col(j).sum();
  }
  return p;
}

// Full forward pass; when `grad` is non-null also runs the backward pass and
// writes the gradient of the mean cross-entropy into it (resized to the
// parameter count). Returns the mean cross-entropy, or 0 when the batch has no
// labels. `probs`, if given, receives the 2 x batch class probabilities.
template <typename T>
double forward_backward(const Model<T>& m, const Batch<T>& batch, const ForwardOptions& opt, ParamVector<T>* grad,
                        Mat<double>* probs = nullptr, InputGrads<T>* input_grads = nullptr) {
  const int B = batch.size();
  const bool stmt = m.config.use_stmt_branch;
  if (stmt && batch.stmt.batch != B) throw InternalError("branch batch sizes differ");
  const Eigen::Index h = static_cast<Eigen::Index>(m.config.hidden);

  detail::BranchTrace<T> ts, tt;
  detail::branch_forward(m, "slice", batch.slice, ts);
  if (stmt) detail::branch_forward(m, "stmt", batch.stmt, tt);

  const std::size_t n_dense = m.config.dense_sizes.size();
  std::vector<Mat<T>> a(n_dense + 1);  // layer inputs before dropout; a[n] = logits
  std::vector<Mat<T>> mask(n_dense);   // empty when dropout is off
  std::vector<Mat<T>> xin(n_dense);    // layer inputs after dropout
  a[0].resize(static_cast<Eigen::Index>(m.concat_width()), B);
  a[0].topRows(2 * h) = ts.pooled;
  if (stmt) a[0].bottomRows(2 * h) = tt.pooled;

  const double p = opt.train ? m.config.dropout : 0.0;
  Rng rng(opt.dropout_seed);
  for (std::size_t k = 0; k < n_dense; ++k) {
    if (p > 0) {
      mask[k].resize(a[k].rows(), a[k].cols());
      const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
      for (Eigen::Index i = 0; i < mask[k].size(); ++i) mask[k].data()[i] = rng.uniform01() < p ? T(0) : keep_scale;
      xin[k] = a[k].cwiseProduct(mask[k]);
    } else {
      xin[k] = a[k];
    }
    const std::string l = "dense" + std::to_string(k + 1);
    a[k + 1].noalias() = m.mat(l + ".W") * xin[k];
    a[k + 1].colwise() += m.vec(l + ".b");
    if (k + 1 < n_dense) a[k + 1] = a[k + 1].cwiseMax(T(0));
  }

  const Mat<double> pr = softmax_columns<T>(a[n_dense]);
  if (probs) *probs = pr;
  double loss = 0;
  const bool labeled = !batch.labels.empty();
  if (labeled) {
    if (static_cast<int>(batch.labels.size()) != B) throw InternalError("label count does not match the batch");
    for (int j = 0; j < B; ++j) {
      const int y = batch.labels[static_cast<std::size_t>(j)];
      const double mx = a[n_dense].col(j).template cast<double>().maxCoeff();
      const double lse = mx + std::log((a[n_dense].col(j).template cast<double>().array() - mx).exp().sum());
      loss += lse - static_cast<double>(a[n_dense](y, j));
    }
    loss /= B;
  }
  if (!grad) return loss;
  if (!labeled) throw UnlabeledError("gradients need labeled samples");

  ParamBuffer<T> g{&m.layout, {}};
  g.data.assign(m.layout.total(), T(0));
  Mat<T> dz = (pr / static_cast<double>(B)).template cast<T>();
  for (int j = 0; j < B; ++j) dz(batch.labels[static_cast<std::size_t>(j)], j) -= static_cast<T>(1.0 / B);
  Mat<T> da;
  for (std::size_t k = n_dense; k-- > 0;) {
    const std::string l = "dense" + std::to_string(k + 1);
    g.mat(l + ".W").noalias() += dz * xin[k].transpose();
    g.vec(l + ".b") += dz.rowwise().sum();
    da.noalias() = m.mat(l + ".W").transpose() * dz;
    if (p > 0) da = da.cwiseProduct(mask[k]);
    if (k > 0) dz = (a[k].array() > T(0)).select(da, T(0));
  }

  Mat<T>* dxs = input_grads ? &input_grads->slice : nullptr;
  Mat<T>* dxt = input_grads ? &input_grads->stmt : nullptr;
  detail::branch_backward<T>(m, "slice", batch.slice, ts, da.topRows(2 * h), g, dxs);
  if (stmt) detail::branch_backward<T>(m, "stmt", batch.stmt, tt, da.bottomRows(2 * h), g, dxt);
  *grad = std::move(g.data);
  return loss;
}

}  // namespace warnrank::nn
