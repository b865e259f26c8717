#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "neural/model.hpp"
#include "util/error.hpp"

namespace warnrank::nn {

template <typename T>
using MatRef = Eigen::Ref<const Mat<T>>;
template <typename T>
using VecRef = Eigen::Ref<const Vec<T>>;

template <typename T>
struct LstmWeights {
  Mat<T> W;  // 4h x d
  Mat<T> U;  // 4h x h
  Vec<T> b;  // 4h
};

// Activations recorded by one batched pass over a time-major input
// (column t*batch + j holds step t of sample j).
template <typename T>
struct LstmTrace {
  int steps = 0;
  int batch = 0;
  bool reverse = false;
  Mat<T> act;     // 4h x N: i, f, g, o after their nonlinearities
  Mat<T> c;       // cell state after each step
  Mat<T> h;       // output after each step
  Mat<T> h_prev;  // state entering each step
  Mat<T> c_prev;
  // Reverse direction only: the shared state after k steps of zero input,
  // k = 0..K, standing in for the K all-padding positions past the batch's
  // longest sequence. pad_act[k-1] holds the gates of step k.
  std::vector<Vec<T>> pad_h, pad_c, pad_act;
};

namespace detail {

template <typename Derived>
void activate_gates(Eigen::MatrixBase<Derived>& z, Eigen::Index h) {
  using T = typename Derived::Scalar;
  auto sig = [](auto&& block) { block = (T(1) / (T(1) + (-block.array()).exp())).matrix(); };
  auto top = z.topRows(2 * h);
  sig(top);
  auto g = z.middleRows(2 * h, h);
  g = g.array().tanh().matrix();
  auto o = z.bottomRows(h);
  sig(o);
}

// Backward through one step given the total output gradient dh and the cell
// gradient flowing in from the next step. Writes the pre-activation gradient
// into dz and leaves the gradient for the previous cell state in dc_next.
template <typename T, typename A, typename C, typename CP, typename DH, typename DZ, typename DC>
void step_backward(const Eigen::MatrixBase<A>& act, const Eigen::MatrixBase<C>& c, const Eigen::MatrixBase<CP>& c_prev,
                   const Eigen::MatrixBase<DH>& dh, Eigen::MatrixBase<DZ>& dz, Eigen::MatrixBase<DC>& dc_next,
                   Eigen::Index h) {
  const auto i = act.topRows(h).array();
  const auto f = act.middleRows(h, h).array();
  const auto g = act.middleRows(2 * h, h).array();
  const auto o = act.bottomRows(h).array();
  const auto tc = c.array().tanh().eval();
  const auto dc = (dc_next.array() + dh.array() * o * (T(1) - tc.square())).eval();
  dz.topRows(h) = (dc * g * i * (T(1) - i)).matrix();
  dz.middleRows(h, h) = (dc * c_prev.array() * f * (T(1) - f)).matrix();
  dz.middleRows(2 * h, h) = (dc * i * (T(1) - g.square())).matrix();
  dz.bottomRows(h) = (dh.array() * tc * o * (T(1) - o)).matrix();
  dc_next = (dc * f).matrix();
}

}  // namespace detail

// Runs one direction over `steps` positions of `batch` sequences. A reverse
// pass first advances through `pad_steps` zero-input positions, which is
// exactly what a full-length pass over trailing padding would compute.
template <typename T>
void lstm_forward(const MatRef<T>& W, const MatRef<T>& U, const VecRef<T>& b, const MatRef<T>& x, int steps, int batch,
                  bool reverse, int pad_steps, LstmTrace<T>& tr) {
  const Eigen::Index h = U.cols();
  const Eigen::Index n = static_cast<Eigen::Index>(steps) * batch;
  if (x.rows() != W.cols() || x.cols() != n) throw InternalError("lstm input has the wrong shape");
  tr.steps = steps;
  tr.batch = batch;
  tr.reverse = reverse;
  tr.act.resize(4 * h, n);
  tr.c.resize(h, n);
  tr.h.resize(h, n);
  tr.h_prev.resize(h, n);
  tr.c_prev.resize(h, n);
  tr.pad_h.assign(1, Vec<T>::Zero(h));
  tr.pad_c.assign(1, Vec<T>::Zero(h));
  tr.pad_act.clear();

  if (reverse) {
    Vec<T> z(4 * h);
    for (int k = 0; k < pad_steps; ++k) {
      z.noalias() = U * tr.pad_h.back();
      z += b;
      detail::activate_gates(z, h);
      Vec<T> c = (z.middleRows(h, h).array() * tr.pad_c.back().array() +
                  z.topRows(h).array() * z.middleRows(2 * h, h).array())
                     .matrix();
      Vec<T> hv = (z.bottomRows(h).array() * c.array().tanh()).matrix();
      tr.pad_act.push_back(z);
      tr.pad_c.push_back(std::move(c));
      tr.pad_h.push_back(std::move(hv));
    }
  }
  if (n == 0) return;

  tr.act.noalias() = W * x;
  for (int s = 0; s < steps; ++s) {
    const int t = reverse ? steps - 1 - s : s;
    const Eigen::Index col = static_cast<Eigen::Index>(t) * batch;
    auto hp = tr.h_prev.middleCols(col, batch);
    auto cp = tr.c_prev.middleCols(col, batch);
    if (s == 0) {
      hp = tr.pad_h.back().replicate(1, batch);
      cp = tr.pad_c.back().replicate(1, batch);
    } else {
      const Eigen::Index pcol = static_cast<Eigen::Index>(reverse ? t + 1 : t - 1) * batch;
      hp = tr.h.middleCols(pcol, batch);
      cp = tr.c.middleCols(pcol, batch);
    }
    auto z = tr.act.middleCols(col, batch);
    z.noalias() += U * hp;
    z.colwise() += b;
    detail::activate_gates(z, h);
    auto c = tr.c.middleCols(col, batch);
    c = (z.middleRows(h, h).array() * cp.array() + z.topRows(h).array() * z.middleRows(2 * h, h).array()).matrix();
    tr.h.middleCols(col, batch) = (z.bottomRows(h).array() * c.array().tanh()).matrix();
  }
}

// Accumulates parameter gradients into dW, dU, db given the gradient of the
// loss with respect to every output column. If dx is non-null it receives the
// gradient with respect to the input.
template <typename T>
void lstm_backward(const MatRef<T>& W, const MatRef<T>& U, const MatRef<T>& x, const LstmTrace<T>& tr,
                   const MatRef<T>& dh_out, Eigen::Ref<Mat<T>> dW, Eigen::Ref<Mat<T>> dU, Eigen::Ref<Vec<T>> db,
                   Mat<T>* dx) {
  const Eigen::Index h = U.cols();
  const int batch = tr.batch;
  const Eigen::Index n = static_cast<Eigen::Index>(tr.steps) * batch;
  Mat<T> dz(4 * h, n);
  Mat<T> dh_next = Mat<T>::Zero(h, batch);
  Mat<T> dc_next = Mat<T>::Zero(h, batch);
  Mat<T> dh(h, batch);
  for (int s = tr.steps - 1; s >= 0; --s) {
    const int t = tr.reverse ? tr.steps - 1 - s : s;
    const Eigen::Index col = static_cast<Eigen::Index>(t) * batch;
    dh = dh_out.middleCols(col, batch) + dh_next;
    auto dzb = dz.middleCols(col, batch);
    detail::step_backward<T>(tr.act.middleCols(col, batch), tr.c.middleCols(col, batch),
                             tr.c_prev.middleCols(col, batch), dh, dzb, dc_next, h);
    dh_next.noalias() = U.transpose() * dzb;
  }
  if (n > 0) {
    dW.noalias() += dz * x.transpose();
    dU.noalias() += dz * tr.h_prev.transpose();
    db += dz.rowwise().sum();
  }
  if (dx) dx->noalias() = W.transpose() * dz;

  const int pad_steps = static_cast<int>(tr.pad_act.size());
  if (pad_steps == 0) return;
  // Every sequence in the batch started from the same padded state, so its
  // gradient is the batch sum.
  Vec<T> dhp = dh_next.rowwise().sum();
  Vec<T> dcp = dc_next.rowwise().sum();
  Vec<T> dzp(4 * h);
  for (int k = pad_steps; k >= 1; --k) {
    const auto ku = static_cast<std::size_t>(k);
    detail::step_backward<T>(tr.pad_act[ku - 1], tr.pad_c[ku], tr.pad_c[ku - 1], dhp, dzp, dcp, h);
    dU.noalias() += dzp * tr.pad_h[ku - 1].transpose();
    db += dzp;
    dhp.noalias() = U.transpose() * dzp;
  }
}

// Unbatched reference path: X is L x d (one row per step), result L x h.
template <typename T>
Mat<T> lstm_sequence(const LstmWeights<T>& w, const Mat<T>& X, bool reverse) {
  LstmTrace<T> tr;
  const Mat<T> xt = X.transpose();
  lstm_forward<T>(w.W, w.U, w.b, xt, static_cast<int>(X.rows()), 1, reverse, 0, tr);
  return tr.h.transpose();
}

// L x 2h: forward outputs in the first h columns, reverse in the last h.
template <typename T>
Mat<T> bilstm_sequence(const LstmWeights<T>& fwd, const LstmWeights<T>& bwd, const Mat<T>& X) {
  const Mat<T> f = lstm_sequence(fwd, X, false);
  const Mat<T> r = lstm_sequence(bwd, X, true);
  Mat<T> out(X.rows(), f.cols() + r.cols());
  out << f, r;
  return out;
}

template <typename T>
struct PoolResult {
  Vec<T> value;
  std::vector<int> argmax;  // per channel, earliest step attaining the max
};

// Max over the rows of H whose mask entry is set. Throws AllMasked if none is.
template <typename T>
PoolResult<T> global_max_pool(const Mat<T>& H, const std::vector<std::uint8_t>& mask) {
  if (mask.size() != static_cast<std::size_t>(H.rows())) throw InternalError("mask length does not match the sequence");
  PoolResult<T> r;
  r.value.resize(H.cols());
  r.argmax.assign(static_cast<std::size_t>(H.cols()), -1);
  for (Eigen::Index c = 0; c < H.cols(); ++c) {
    for (Eigen::Index t = 0; t < H.rows(); ++t) {
      if (!mask[static_cast<std::size_t>(t)]) continue;
      auto& a = r.argmax[static_cast<std::size_t>(c)];
      if (a < 0 || H(t, c) > r.value(c)) {
        a = static_cast<int>(t);
        r.value(c) = H(t, c);
      }
    }
    if (r.argmax[static_cast<std::size_t>(c)] < 0) throw AllMasked("every position of the sequence is masked");
  }
  return r;
}

}  // namespace warnrank::nn
