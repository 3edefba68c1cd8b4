#include "lseq/nn/attention.hpp"

#include "lseq/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace lseq::nn {

template <typename S>
AttentionPool<S>::AttentionPool(const std::string& name, Index width, Index attention)
    : w_a(name + ".w_a", width, attention), b_a(name + ".b_a", 1, attention), context(name + ".context", attention, 1) {}

template <typename S>
void AttentionPool<S>::init(Rng& rng) {
  init_fan_in_uniform(w_a, w_a.value.rows(), rng);
  b_a.value.setZero();
  init_fan_in_uniform(context, context.value.rows(), rng);
}

template <typename S>
Mat<S> AttentionPool<S>::forward(const Mat<S>& x, Index frames, Index epochs, Cache& cache) const {
  if (frames < 1 || x.rows() != frames * epochs || x.cols() != w_a.value.rows()) {
    throw ShapeError(w_a.name + ": input shape does not match frames x epochs x width");
  }
  cache.frames = frames;
  cache.epochs = epochs;
  cache.input = x;
  cache.u = x * w_a.value;
  cache.u.rowwise() += b_a.value.row(0);
  cache.u = cache.u.array().tanh().matrix();
  const Mat<S> scores = cache.u * context.value;  // (T*E) x 1, row t*E + e

  cache.weights.resize(frames, epochs);
  for (Index e = 0; e < epochs; ++e) {
    S peak = scores(e, 0);
    for (Index t = 1; t < frames; ++t) peak = std::max(peak, scores(t * epochs + e, 0));
    S total = 0;
    for (Index t = 0; t < frames; ++t) {
      const S v = std::exp(scores(t * epochs + e, 0) - peak);
      cache.weights(t, e) = v;
      total += v;
    }
    cache.weights.col(e) /= total;
  }

  Mat<S> pooled = Mat<S>::Zero(epochs, x.cols());
  for (Index t = 0; t < frames; ++t) {
    pooled += cache.weights.row(t).transpose().asDiagonal() * x.middleRows(t * epochs, epochs);
  }
  return pooled;
}

template <typename S>
Mat<S> AttentionPool<S>::backward(const Mat<S>& d_pooled, const Cache& cache) {
  const Index frames = cache.frames;
  const Index epochs = cache.epochs;
  Mat<S> dx(frames * epochs, cache.input.cols());
  // g[t, e] = d_pooled[e] . x_t[e]
  Mat<S> g(frames, epochs);
  for (Index t = 0; t < frames; ++t) {
    const auto xt = cache.input.middleRows(t * epochs, epochs);
    g.row(t) = xt.cwiseProduct(d_pooled).rowwise().sum().transpose();
    dx.middleRows(t * epochs, epochs) = cache.weights.row(t).transpose().asDiagonal() * d_pooled;
  }
  const RowVec<S> mean_g = cache.weights.cwiseProduct(g).colwise().sum();
  Mat<S> d_scores(frames * epochs, 1);
  for (Index t = 0; t < frames; ++t) {
    for (Index e = 0; e < epochs; ++e) {
      d_scores(t * epochs + e, 0) = cache.weights(t, e) * (g(t, e) - mean_g(e));
    }
  }
  context.grad.noalias() += cache.u.transpose() * d_scores;
  const Mat<S> du = (d_scores * context.value.transpose()).cwiseProduct(
      (S(1) - cache.u.array().square()).matrix());
  w_a.grad.noalias() += cache.input.transpose() * du;
  b_a.grad += du.colwise().sum();
  dx.noalias() += du * w_a.value.transpose();
  return dx;
}

template <typename S>
void AttentionPool<S>::collect(ParamList<S>& out) {
  out.push_back(&w_a);
  out.push_back(&b_a);
  out.push_back(&context);
}

template class AttentionPool<float>;
template class AttentionPool<double>;

}  // namespace lseq::nn
