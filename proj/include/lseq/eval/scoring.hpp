#pragma once

#include "lseq/frontend/recording_io.hpp"
#include "lseq/model/model.hpp"

#include <memory>
#include <vector>

namespace lseq::eval {

using frontend::FeatureArchive;

// Anything that maps a batch of length-L windows to per-epoch posteriors.
class Stager {
 public:
  virtual ~Stager() = default;
  virtual Index length() const = 0;
  // Returns (N*L) x 5 posteriors, sample-major.
  virtual MatD posteriors(const model::SequenceBatch<float>& batch) = 0;
};

// Eval-mode wrapper around a trained model.
class ModelStager : public Stager {
 public:
  explicit ModelStager(model::Model<float>& model) : model_(model) {}
  Index length() const override { return model_.config().fold.L; }
  MatD posteriors(const model::SequenceBatch<float>& batch) override;

 private:
  model::Model<float>& model_;
  model::Model<float>::Cache cache_;
};

// Test stub that reads the reference labels carried by the batch and returns
// one-hot posteriors.
class OracleStager : public Stager {
 public:
  explicit OracleStager(Index length) : length_(length) {}
  Index length() const override { return length_; }
  MatD posteriors(const model::SequenceBatch<float>& batch) override;

 private:
  Index length_;
};

struct ScoredRecording {
  std::vector<std::uint8_t> predicted;  // one label per epoch
  MatD posteriors;                      // R x 5 averaged posteriors
  std::vector<Index> coverage;          // windows covering each epoch
};

// Window start positions: 0, stride, 2*stride, ... plus R-L when the last
// regular start does not end exactly at the recording end.
std::vector<Index> window_starts(Index R, Index L, Index stride);

// Slides length-L windows over the recording, averages the posteriors of
// overlapping windows and takes the argmax. Recordings shorter than L are
// right-padded with copies of their final epoch; padded positions are dropped.
ScoredRecording score_recording(Stager& stager, const FeatureArchive& recording, Index stride, Index batch_size = 8);

double recording_accuracy(const FeatureArchive& recording, const ScoredRecording& scored);

}  // namespace lseq::eval
