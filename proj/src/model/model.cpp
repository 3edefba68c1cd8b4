#include "lseq/model/model.hpp"

#include "lseq/core/error.hpp"
#include "lseq/core/rng.hpp"

#include <cmath>

namespace lseq::model {

namespace {

nn::EpochEncoderShape encoder_shape(const ModelConfig& c) {
  c.validate();
  return {c.frames, c.bins, c.filters, c.epoch_width, c.attention};
}

template <typename S>
context::LongContextEncoder<S> make_context(const ModelConfig& c) {
  const double drop = c.context_dropout ? c.dropout : 0.0;
  if (c.variant == Variant::Flat) {
    return context::LongContextEncoder<S>::flat("context", c.fold.L, c.epoch_width, c.intra_width, drop);
  }
  return context::LongContextEncoder<S>("context", c.fold, c.epoch_width, c.intra_width, c.inter_width, drop);
}

}  // namespace

ModelConfig flat_baseline_config(ModelConfig config) {
  config.variant = Variant::Flat;
  config.fold = context::FoldSpec{config.fold.L, 1, config.fold.L};
  return config;
}

template <typename S>
Mat<S> softmax_rows(const Mat<S>& logits) {
  Mat<S> p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp().matrix();
  const Eigen::Matrix<S, Eigen::Dynamic, 1> sums = p.rowwise().sum();
  return sums.cwiseInverse().asDiagonal() * p;
}

template <typename S>
Model<S>::Model(const ModelConfig& config)
    : encoder("encoder", encoder_shape(config), config.dropout),
      context(make_context<S>(config)),
      fc1("head.fc1", context.output_width(), config.fc_width),
      fc2("head.fc2", config.fc_width, config.fc_width),
      out("head.out", config.fc_width, config.classes),
      config_(config) {
  encoder.collect(params_);
  context.collect(params_);
  fc1.collect(params_);
  fc2.collect(params_);
  out.collect(params_);
}

template <typename S>
void Model<S>::init(std::uint64_t seed) {
  Rng enc = substream(seed, "init.encoder");
  Rng ctx = substream(seed, "init.context");
  Rng head = substream(seed, "init.head");
  encoder.init(enc);
  context.init(ctx);
  fc1.init(head);
  fc2.init(head);
  out.init(head);
}

template <typename S>
Mat<S> Model<S>::forward(const Mat<S>& images, Index sequences, const nn::ForwardContext& ctx, Cache& cache) {
  const Index L = config_.fold.L;
  const Index epochs = sequences * L;
  if (images.rows() != epochs * config_.frames || images.cols() != config_.bins) {
    throw ShapeError("model: expected images of shape " + std::to_string(epochs * config_.frames) + " x " +
                     std::to_string(config_.bins) + ", got " + std::to_string(images.rows()) + " x " +
                     std::to_string(images.cols()));
  }
  cache.sequences = sequences;
  const Mat<S> embeddings = encoder.forward(images, epochs, ctx, cache.encoder);
  cache.context_out = context.forward(embeddings, sequences, ctx, cache.context);

  cache.h1 = nn::relu(fc1.forward(cache.context_out));
  cache.d1 = nn::dropout_forward(cache.h1, config_.dropout, ctx, cache.drop1);
  cache.h2 = nn::relu(fc2.forward(cache.d1));
  cache.d2 = nn::dropout_forward(cache.h2, config_.dropout, ctx, cache.drop2);
  cache.logits = out.forward(cache.d2);
  if (!cache.logits.allFinite()) {
    for (Index r = 0; r < cache.logits.rows(); ++r) {
      if (!cache.logits.row(r).allFinite()) {
        throw NumericError("model: non-finite logits at sequence " + std::to_string(r / L) + ", position " +
                           std::to_string(r % L));
      }
    }
  }
  cache.probs = softmax_rows(cache.logits);
  return cache.probs;
}

template <typename S>
void Model<S>::backward(const Mat<S>& d_logits, const Cache& cache, Mode mode) {
  Mat<S> d = out.backward(cache.d2, d_logits);
  d = nn::relu_backward(cache.h2, nn::dropout_backward(d, cache.drop2));
  d = fc2.backward(cache.d1, d);
  d = nn::relu_backward(cache.h1, nn::dropout_backward(d, cache.drop1));
  d = fc1.backward(cache.context_out, d);
  const Mat<S> d_embeddings = context.backward(d, cache.context, mode);
  encoder.backward(d_embeddings, cache.encoder, mode);
}

template <typename S>
LossValue Model<S>::loss(const Mat<S>& probs, const Mat<S>& logits, const std::vector<int>& labels,
                         const std::vector<std::uint8_t>& mask, Mat<S>* d_logits) const {
  const Index n = probs.rows();
  if (static_cast<Index>(labels.size()) != n || static_cast<Index>(mask.size()) != n || logits.rows() != n ||
      probs.cols() != config_.classes) {
    throw ShapeError("loss: predictions, labels, and mask disagree in shape");
  }
  LossValue v;
  for (Index i = 0; i < n; ++i) v.scored += mask[static_cast<std::size_t>(i)] ? 1 : 0;
  if (d_logits) d_logits->setZero(n, probs.cols());
  const double log_floor = std::log(kProbFloor);
  if (v.scored > 0) {
    const double inv = 1.0 / static_cast<double>(v.scored);
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (!mask[static_cast<std::size_t>(i)]) continue;
      const int y = labels[static_cast<std::size_t>(i)];
      if (y < 0 || y >= config_.classes) throw ShapeError("loss: label out of range at row " + std::to_string(i));
      const double zmax = logits.row(i).maxCoeff();
      const double lse = zmax + std::log((logits.row(i).array() - static_cast<S>(zmax)).exp().sum());
      const double logp = static_cast<double>(logits(i, y)) - lse;
      const bool clamped = logp < log_floor;
      sum -= clamped ? log_floor : logp;
      if (d_logits && !clamped) {
        d_logits->row(i) = probs.row(i) * static_cast<S>(inv);
        (*d_logits)(i, y) -= static_cast<S>(inv);
      }
    }
    v.data = sum * inv;
  }
  v.regularizer = config_.l2 * squared_l2(params_);
  v.total = v.data + v.regularizer;
  return v;
}

template <typename S>
LossValue Model<S>::forward_backward(const SequenceBatch<S>& batch, const nn::ForwardContext& ctx, Cache& cache) {
  if (batch.length != config_.fold.L) {
    throw ShapeError("model: batch sequence length " + std::to_string(batch.length) + " does not match L=" +
                     std::to_string(config_.fold.L));
  }
  forward(batch.images, batch.sequences, ctx, cache);
  Mat<S> d_logits;
  const LossValue v = loss(cache.probs, cache.logits, batch.labels, batch.mask, &d_logits);
  backward(d_logits, cache, ctx.mode);
  if (config_.l2 > 0.0) {
    const S scale = static_cast<S>(2.0 * config_.l2);
    for (auto* p : params_) {
      if (p->trainable) p->grad += scale * p->value;
    }
  }
  return v;
}

template <typename S>
std::vector<CensusRow> Model<S>::census() const {
  std::vector<CensusRow> rows;
  for (const auto* p : params_) rows.push_back({p->name, p->value.rows(), p->value.cols(), p->trainable});
  return rows;
}

template <typename S>
Index Model<S>::trainable_parameters() const {
  return trainable_count(params_);
}

template Mat<float> softmax_rows(const Mat<float>&);
template Mat<double> softmax_rows(const Mat<double>&);
template class Model<float>;
template class Model<double>;

}  // namespace lseq::model
