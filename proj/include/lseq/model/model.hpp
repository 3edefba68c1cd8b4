#pragma once

#include "lseq/context/long_context.hpp"
#include "lseq/core/params.hpp"
#include "lseq/model/config.hpp"
#include "lseq/nn/epoch_encoder.hpp"
#include "lseq/nn/layers.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lseq::model {

inline constexpr double kProbFloor = 1e-12;

// N sequences of L epochs. images row ((n*L + l)*T + t) is frame t of epoch l
// of sequence n; labels/mask are indexed n*L + l.
template <typename S>
struct SequenceBatch {
  Index sequences = 0;
  Index length = 0;
  Mat<S> images;
  std::vector<int> labels;
  std::vector<std::uint8_t> mask;

  Index epochs() const { return sequences * length; }
};

struct CensusRow {
  std::string name;
  Index rows = 0;
  Index cols = 0;
  bool trainable = true;
  Index count() const { return rows * cols; }
};

struct LossValue {
  double total = 0.0;
  double data = 0.0;         // masked mean cross-entropy
  double regularizer = 0.0;  // lambda * ||theta||^2
  Index scored = 0;
};

template <typename S>
class Model {
 public:
  struct Cache {
    Index sequences = 0;
    typename nn::EpochEncoder<S>::Cache encoder;
    typename context::LongContextEncoder<S>::Cache context;
    Mat<S> context_out;
    Mat<S> h1, h2;
    nn::DropoutMask<S> drop1, drop2;
    Mat<S> d1, d2;
    Mat<S> logits;
    Mat<S> probs;
  };

  explicit Model(const ModelConfig& config);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  void init(std::uint64_t seed);
  const ModelConfig& config() const { return config_; }

  // Returns (N*L) x C posteriors.
  Mat<S> forward(const Mat<S>& images, Index sequences, const nn::ForwardContext& ctx, Cache& cache);
  // Back-propagates dL/dlogits through the network, accumulating gradients.
  void backward(const Mat<S>& d_logits, const Cache& cache, Mode mode);

  // Masked cross-entropy plus L2 penalty; fills d_logits for the data term.
  LossValue loss(const Mat<S>& probs, const Mat<S>& logits, const std::vector<int>& labels,
                 const std::vector<std::uint8_t>& mask, Mat<S>* d_logits) const;

  // Forward, loss, and full backward (including the L2 gradient).
  LossValue forward_backward(const SequenceBatch<S>& batch, const nn::ForwardContext& ctx, Cache& cache);

  ParamList<S>& params() { return params_; }
  std::vector<CensusRow> census() const;
  Index trainable_parameters() const;
  Index sequential_steps() const { return context.sequential_steps(); }

  nn::EpochEncoder<S> encoder;
  context::LongContextEncoder<S> context;
  nn::Dense<S> fc1;
  nn::Dense<S> fc2;
  nn::Dense<S> out;

 private:
  ModelConfig config_;
  ParamList<S> params_;
};

// The flat baseline configuration derived from any config: same encoder and
// head, a single recurrent pass over all L epochs.
ModelConfig flat_baseline_config(ModelConfig config);

template <typename S>
Mat<S> softmax_rows(const Mat<S>& logits);

extern template class Model<float>;
extern template class Model<double>;

}  // namespace lseq::model
