#pragma once

#include "lseq/frontend/recording_io.hpp"
#include "lseq/io/checkpoint.hpp"
#include "lseq/model/model.hpp"
#include "lseq/train/adam.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lseq::train {

struct TrainConfig {
  AdamConfig adam;
  Index batch_size = 8;
  Index max_train_epochs = 10;
  Index max_steps = 0;        // 0: limited by max_train_epochs only
  Index validate_every = 100;
  int patience = 50;
  bool early_stopping = true;
  Index max_validations = 0;  // 0: unlimited
  double clip_norm = 5.0;     // 0 disables clipping
  std::uint64_t seed = 1;
  Index workers = 1;
  Index validation_stride = 0;  // 0: non-overlapping windows (stride L)

  void validate() const;
};

struct ValidationRecord {
  Index step = 0;
  double train_loss = 0.0;  // mean minibatch loss since the previous validation
  double val_accuracy = 0.0;
  double seconds_per_step = 0.0;
};

struct TrainCallbacks {
  std::function<void(const ValidationRecord&)> on_validation;
  std::function<void(const io::Checkpoint&)> on_best;
  std::function<void(const std::string&)> log;
};

struct TrainResult {
  std::vector<ValidationRecord> history;
  double best_accuracy = 0.0;
  Index best_step = 0;
  Index steps = 0;
  std::string stop_reason;
  io::Checkpoint best;
  io::Checkpoint last;
  std::vector<std::string> warnings;

  // First validated step whose accuracy reaches `target`, or -1.
  Index steps_to_reach(double target) const;
};

// Overall accuracy over all valid epochs of the given recordings, scored
// with non-overlapping windows (or `stride` when positive).
double validation_accuracy(model::Model<float>& model, const std::vector<frontend::FeatureArchive>& recordings,
                           Index stride = 0);

// Trains an already initialized model. Throws NumericError naming the step
// if the loss becomes non-finite; the best checkpoint has already been
// handed to on_best by then. With `resume`, parameters and optimizer state
// are restored from it and training continues at its step; model selection
// starts over from the first validation after resuming.
TrainResult train_model(model::Model<float>& model, const std::vector<frontend::FeatureArchive>& train_set,
                        const std::vector<frontend::FeatureArchive>& validation_set, const TrainConfig& config,
                        const TrainCallbacks& callbacks = {}, const io::Checkpoint* resume = nullptr);

}  // namespace lseq::train
