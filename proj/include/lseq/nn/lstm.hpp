#pragma once

#include "lseq/core/params.hpp"
#include "lseq/core/rng.hpp"
#include "lseq/core/tensor.hpp"
#include "lseq/nn/batch_norm.hpp"

#include <string>
#include <vector>

namespace lseq::nn {

// One direction of an LSTM with recurrent batch normalization:
//
//   pre = BN_x(x_t W_x) + BN_h(h_{t-1} W_h) + b        gates i, f, o, g
//   c_t = f * c_{t-1} + i * g
//   h_t = o * tanh(BN_c(c_t))
//
// The recurrent path is absent at the first processed step (h_0 = 0).
// Sequences are time-major: rows [t*N, (t+1)*N) hold timestep t of all N
// sequences in the batch.
template <typename S>
class LstmDirection {
 public:
  struct Cache {
    Index steps = 0;
    Index batch = 0;
    Index iterations = 0;  // recurrent loop iterations actually executed
    Mat<S> input;      // (T*N) x D
    Mat<S> gates;      // (T*N) x 4H, activated [i f o g]
    Mat<S> cell;       // (T*N) x H
    Mat<S> cell_tanh;  // (T*N) x H
    Mat<S> hidden;     // (T*N) x H
    std::vector<typename RecurrentBatchNorm<S>::StepCache> bn_x, bn_h, bn_c;  // by processing step
  };

  LstmDirection() = default;
  LstmDirection(const std::string& name, Index input, Index hidden, bool reverse);

  void init(Rng& rng);
  Mat<S> forward(const Mat<S>& x, Index steps, Index batch, Mode mode, Cache& cache);
  Mat<S> backward(const Mat<S>& d_hidden, const Cache& cache, Mode mode);
  void collect(ParamList<S>& out);

  Index input_size() const { return w_x.value.rows(); }
  Index hidden_size() const { return w_h.value.rows(); }
  bool reverse() const { return reverse_; }

  Param<S> w_x;
  Param<S> w_h;
  Param<S> bias;
  RecurrentBatchNorm<S> bn_x;
  RecurrentBatchNorm<S> bn_h;
  RecurrentBatchNorm<S> bn_c;

  static constexpr double kGammaInit = 0.1;
  static constexpr double kForgetBias = 1.0;

 private:
  bool reverse_ = false;
};

// Bidirectional wrapper: output row = [forward hidden | backward hidden].
template <typename S>
class Blstm {
 public:
  struct Cache {
    typename LstmDirection<S>::Cache fw;
    typename LstmDirection<S>::Cache bw;
  };

  Blstm() = default;
  Blstm(const std::string& name, Index input, Index hidden_per_direction);

  void init(Rng& rng);
  // Throws NumericError naming the first timestep with a non-finite output.
  Mat<S> forward(const Mat<S>& x, Index steps, Index batch, Mode mode, Cache& cache);
  Mat<S> backward(const Mat<S>& d_out, const Cache& cache, Mode mode);
  void collect(ParamList<S>& out);

  Index output_size() const { return 2 * fw.hidden_size(); }

  LstmDirection<S> fw;
  LstmDirection<S> bw;
};

extern template class LstmDirection<float>;
extern template class LstmDirection<double>;
extern template class Blstm<float>;
extern template class Blstm<double>;

}  // namespace lseq::nn
