#pragma once

#include "lseq/core/params.hpp"
#include "lseq/core/tensor.hpp"
#include "lseq/nn/attention.hpp"
#include "lseq/nn/filterbank.hpp"
#include "lseq/nn/layers.hpp"
#include "lseq/nn/lstm.hpp"

#include <string>

namespace lseq::nn {

struct EpochEncoderShape {
  Index frames = 29;
  Index bins = 129;
  Index filters = 32;
  Index hidden = 128;  // both directions together
  Index attention = 64;
};

// Time-frequency image -> epoch embedding:
// filterbank, BLSTM over frames, dropout, attention pooling.
template <typename S>
class EpochEncoder {
 public:
  struct Cache {
    Index epochs = 0;
    Mat<S> input;           // (E*T) x F, epoch-major
    Mat<S> filtered;        // (T*E) x M, time-major
    typename Blstm<S>::Cache blstm;
    DropoutMask<S> dropout;
    typename AttentionPool<S>::Cache attention;
  };

  EpochEncoder() = default;
  EpochEncoder(const std::string& name, const EpochEncoderShape& shape, double dropout);

  void init(Rng& rng);
  // images: (E*T) x F with row e*T + t holding frame t of epoch e.
  // Returns E x H_e embeddings.
  Mat<S> forward(const Mat<S>& images, Index epochs, const ForwardContext& ctx, Cache& cache);
  void backward(const Mat<S>& d_embeddings, const Cache& cache, Mode mode);
  void collect(ParamList<S>& out);

  const EpochEncoderShape& shape() const { return shape_; }

  Filterbank<S> filterbank;
  Blstm<S> blstm;
  AttentionPool<S> attention;

 private:
  EpochEncoderShape shape_;
  double dropout_ = 0.0;
};

// Index map from epoch-major rows (e*T + t) to time-major rows (t*E + e):
// out[t*E + e] = e*T + t.
std::vector<Index> epoch_to_time_major(Index frames, Index epochs);

extern template class EpochEncoder<float>;
extern template class EpochEncoder<double>;

}  // namespace lseq::nn
