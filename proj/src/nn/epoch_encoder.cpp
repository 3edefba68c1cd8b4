#include "lseq/nn/epoch_encoder.hpp"

#include "lseq/core/error.hpp"

namespace lseq::nn {

std::vector<Index> epoch_to_time_major(Index frames, Index epochs) {
  std::vector<Index> index(static_cast<std::size_t>(frames * epochs));
  for (Index t = 0; t < frames; ++t) {
    for (Index e = 0; e < epochs; ++e) index[static_cast<std::size_t>(t * epochs + e)] = e * frames + t;
  }
  return index;
}

template <typename S>
EpochEncoder<S>::EpochEncoder(const std::string& name, const EpochEncoderShape& shape, double dropout)
    : filterbank(name + ".filterbank", shape.bins, shape.filters),
      blstm(name + ".blstm", shape.filters, shape.hidden / 2),
      attention(name + ".attention", shape.hidden, shape.attention),
      shape_(shape),
      dropout_(dropout) {
  if (shape.hidden % 2 != 0) throw ShapeError(name + ": encoder width must be even");
}

template <typename S>
void EpochEncoder<S>::init(Rng& rng) {
  filterbank.init_triangular();
  blstm.init(rng);
  attention.init(rng);
}

template <typename S>
Mat<S> EpochEncoder<S>::forward(const Mat<S>& images, Index epochs, const ForwardContext& ctx, Cache& cache) {
  const Index frames = shape_.frames;
  if (images.rows() != epochs * frames) {
    throw ShapeError("epoch encoder: expected " + std::to_string(epochs * frames) + " frame rows, got " +
                     std::to_string(images.rows()));
  }
  cache.epochs = epochs;
  cache.input = images;
  cache.filtered = gather_rows(filterbank.forward(images), epoch_to_time_major(frames, epochs));
  Mat<S> hidden = blstm.forward(cache.filtered, frames, epochs, ctx.mode, cache.blstm);
  hidden = dropout_forward(hidden, dropout_, ctx, cache.dropout);
  return attention.forward(hidden, frames, epochs, cache.attention);
}

template <typename S>
void EpochEncoder<S>::backward(const Mat<S>& d_embeddings, const Cache& cache, Mode mode) {
  Mat<S> d_hidden = attention.backward(d_embeddings, cache.attention);
  d_hidden = dropout_backward(d_hidden, cache.dropout);
  const Mat<S> d_filtered = blstm.backward(d_hidden, cache.blstm, mode);
  const auto order = epoch_to_time_major(shape_.frames, cache.epochs);
  filterbank.backward(cache.input, scatter_rows(d_filtered, order, d_filtered.rows()));
}

template <typename S>
void EpochEncoder<S>::collect(ParamList<S>& out) {
  filterbank.collect(out);
  blstm.collect(out);
  attention.collect(out);
}

template class EpochEncoder<float>;
template class EpochEncoder<double>;

}  // namespace lseq::nn
