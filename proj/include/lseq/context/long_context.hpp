#pragma once

#include "lseq/context/fold.hpp"
#include "lseq/core/params.hpp"
#include "lseq/nn/layers.hpp"
#include "lseq/nn/lstm.hpp"

#include <string>

namespace lseq::context {

// BLSTM followed by a normalized residual projection:
//   o~ = BLSTM(x),  out = o~ + LN(o~ W + b)
// Input and output are time-major (row t*batch + n).
template <typename S>
class ResidualBlstm {
 public:
  struct Cache {
    typename nn::Blstm<S>::Cache blstm;
    nn::DropoutMask<S> dropout;
    Mat<S> recurrent;  // o~ after dropout
    typename nn::LayerNorm<S>::Cache norm;
  };

  ResidualBlstm() = default;
  ResidualBlstm(const std::string& name, Index input, Index width, double dropout);

  void init(Rng& rng);
  Mat<S> forward(const Mat<S>& x, Index steps, Index batch, const nn::ForwardContext& ctx, Cache& cache);
  Mat<S> backward(const Mat<S>& d_out, const Cache& cache, Mode mode);
  void collect(ParamList<S>& out);

  Index width() const { return blstm.output_size(); }

  nn::Blstm<S> blstm;
  nn::Dense<S> proj;
  nn::LayerNorm<S> norm;

 private:
  double dropout_ = 0.0;
};

// Long-context encoder over a batch of embedding sequences. Folded: intra
// pass over each length-K subsequence, then inter pass over the B cells at
// each subsequence position. Flat: a single pass over all L positions.
template <typename S>
class LongContextEncoder {
 public:
  struct Cache {
    Index batch = 0;
    typename ResidualBlstm<S>::Cache intra;
    typename ResidualBlstm<S>::Cache inter;
  };

  LongContextEncoder() = default;
  // Folded encoder.
  LongContextEncoder(const std::string& name, const FoldSpec& spec, Index input, Index intra_width, Index inter_width,
                     double dropout);
  // Flat encoder over length L.
  static LongContextEncoder flat(const std::string& name, Index length, Index input, Index width, double dropout);

  void init(Rng& rng);
  // x: (N*L) x D sample-major. Returns (N*L) x output_width() sample-major.
  Mat<S> forward(const Mat<S>& x, Index batch, const nn::ForwardContext& ctx, Cache& cache);
  Mat<S> backward(const Mat<S>& d_out, const Cache& cache, Mode mode);
  void collect(ParamList<S>& out);

  bool folded() const { return folded_; }
  const FoldSpec& spec() const { return spec_; }
  Index output_width() const { return folded_ && !bypass_inter ? inter.width() : intra.width(); }
  // Sequential recurrent steps per sample: K + B folded, L flat.
  Index sequential_steps() const { return folded_ ? spec_.K + spec_.B : spec_.L; }
  // Steps actually taken by the most recent forward pass.
  Index last_forward_steps() const { return last_steps_; }

  ResidualBlstm<S> intra;
  ResidualBlstm<S> inter;  // unused when flat
  // Test hook: replaces the inter stage with the identity.
  bool bypass_inter = false;

 private:
  FoldSpec spec_;
  bool folded_ = true;
  Index last_steps_ = 0;
};

// Single-sample stage operations on a folded grid.
template <typename S>
FoldedGrid<S> intra_subsequence(const FoldedGrid<S>& grid, ResidualBlstm<S>& block, const nn::ForwardContext& ctx);
template <typename S>
FoldedGrid<S> inter_subsequence(const FoldedGrid<S>& grid, ResidualBlstm<S>& block, const nn::ForwardContext& ctx);

extern template class ResidualBlstm<float>;
extern template class ResidualBlstm<double>;
extern template class LongContextEncoder<float>;
extern template class LongContextEncoder<double>;

}  // namespace lseq::context
