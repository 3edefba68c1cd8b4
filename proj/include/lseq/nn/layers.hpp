#pragma once

#include "lseq/core/params.hpp"
#include "lseq/core/rng.hpp"
#include "lseq/core/tensor.hpp"

#include <string>

namespace lseq::nn {

// Per-call state shared by every layer of one forward pass.
struct ForwardContext {
  Mode mode = Mode::Eval;
  Rng* rng = nullptr;  // dropout masks; required in Train mode when dropout > 0

  bool training() const { return mode == Mode::Train; }
};

// y = x W + b, with W stored in x W orientation (in x out).
template <typename S>
class Dense {
 public:
  Dense() = default;
  Dense(const std::string& name, Index in, Index out);

  void init(Rng& rng);
  Mat<S> forward(const Mat<S>& x) const;
  // Accumulates parameter gradients; returns dL/dx.
  Mat<S> backward(const Mat<S>& x, const Mat<S>& dy);
  void collect(ParamList<S>& out);

  Index in_features() const { return weight.value.rows(); }
  Index out_features() const { return weight.value.cols(); }

  Param<S> weight;
  Param<S> bias;
};

// Row-wise layer normalization with learned gain and shift.
template <typename S>
class LayerNorm {
 public:
  struct Cache {
    Mat<S> xhat;
    Eigen::Matrix<S, Eigen::Dynamic, 1> inv_std;
  };

  LayerNorm() = default;
  LayerNorm(const std::string& name, Index width);

  Mat<S> forward(const Mat<S>& x, Cache& cache) const;
  Mat<S> backward(const Mat<S>& dy, const Cache& cache);
  void collect(ParamList<S>& out);

  Param<S> gain;
  Param<S> shift;
  static constexpr double kEps = 1e-5;
};

// Inverted dropout. The mask is empty when the layer is inactive.
template <typename S>
struct DropoutMask {
  Mat<S> scale;
  bool active() const { return scale.size() > 0; }
};

template <typename S>
Mat<S> dropout_forward(const Mat<S>& x, double rate, const ForwardContext& ctx, DropoutMask<S>& mask);

template <typename S>
Mat<S> dropout_backward(const Mat<S>& dy, const DropoutMask<S>& mask);

template <typename S>
Mat<S> relu(const Mat<S>& x) {
  return x.cwiseMax(S(0));
}

// dL/dx of relu given its output.
template <typename S>
Mat<S> relu_backward(const Mat<S>& y, const Mat<S>& dy) {
  return (y.array() > S(0)).select(dy, S(0));
}

// Out-of-line definitions live in layers.cpp with explicit float/double instantiations.
extern template class Dense<float>;
extern template class Dense<double>;
extern template class LayerNorm<float>;
extern template class LayerNorm<double>;

}  // namespace lseq::nn
