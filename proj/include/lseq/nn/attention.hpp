#pragma once

#include "lseq/core/params.hpp"
#include "lseq/core/rng.hpp"
#include "lseq/core/tensor.hpp"

#include <string>

namespace lseq::nn {

// Attention pooling over the frames of each epoch:
//   u_t = tanh(x_t W_a + b_a),  w_t = softmax_t(u_t . a),  x = sum_t w_t x_t
// Frames are time-major: row t*E + e is frame t of epoch e.
template <typename S>
class AttentionPool {
 public:
  struct Cache {
    Index frames = 0;
    Index epochs = 0;
    Mat<S> input;    // (T*E) x H
    Mat<S> u;        // (T*E) x A
    Mat<S> weights;  // T x E
  };

  AttentionPool() = default;
  AttentionPool(const std::string& name, Index width, Index attention);

  void init(Rng& rng);
  // Returns E x H pooled embeddings.
  Mat<S> forward(const Mat<S>& x, Index frames, Index epochs, Cache& cache) const;
  Mat<S> backward(const Mat<S>& d_pooled, const Cache& cache);
  void collect(ParamList<S>& out);

  Param<S> w_a;      // H x A
  Param<S> b_a;      // 1 x A
  Param<S> context;  // A x 1
};

extern template class AttentionPool<float>;
extern template class AttentionPool<double>;

}  // namespace lseq::nn
