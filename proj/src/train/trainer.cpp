#include "lseq/train/trainer.hpp"

#include "lseq/core/error.hpp"
#include "lseq/core/rng.hpp"
#include "lseq/eval/scoring.hpp"
#include "lseq/train/early_stopping.hpp"
#include "lseq/train/sampler.hpp"

#include <chrono>
#include <cmath>
#include <set>

namespace lseq::train {

void TrainConfig::validate() const {
  adam.validate();
  if (batch_size < 1) throw Error("train: batch_size must be positive");
  if (max_train_epochs < 1) throw Error("train: max_train_epochs must be positive");
  if (max_steps < 0) throw Error("train: max_steps must be non-negative");
  if (validate_every < 1) throw Error("train: validate_every must be positive");
  if (patience < 1) throw Error("train: patience must be at least 1");
  if (max_validations < 0) throw Error("train: max_validations must be non-negative");
  if (clip_norm < 0.0) throw Error("train: clip_norm must be non-negative");
  if (workers < 1) throw Error("train: workers must be at least 1");
  if (validation_stride < 0) throw Error("train: validation_stride must be non-negative");
}

Index TrainResult::steps_to_reach(double target) const {
  for (const auto& r : history) {
    if (r.val_accuracy >= target) return r.step;
  }
  return -1;
}

double validation_accuracy(model::Model<float>& model, const std::vector<frontend::FeatureArchive>& recordings,
                           Index stride) {
  eval::ModelStager stager(model);
  const Index L = model.config().fold.L;
  Index hits = 0, total = 0;
  for (const auto& rec : recordings) {
    const auto scored = eval::score_recording(stager, rec, stride > 0 ? stride : L);
    for (Index e = 0; e < rec.epochs(); ++e) {
      const auto i = static_cast<std::size_t>(e);
      if (!rec.hypnogram.valid[i]) continue;
      ++total;
      hits += scored.predicted[i] == rec.hypnogram.stages[i] ? 1 : 0;
    }
  }
  if (total == 0) throw Error("validation set has no valid epochs");
  return static_cast<double>(hits) / static_cast<double>(total);
}

TrainResult train_model(model::Model<float>& model, const std::vector<frontend::FeatureArchive>& train_set,
                        const std::vector<frontend::FeatureArchive>& validation_set, const TrainConfig& config,
                        const TrainCallbacks& callbacks, const io::Checkpoint* resume) {
  config.validate();
  if (validation_set.empty()) throw Error("train: validation set is empty");
  std::set<std::string> train_ids;
  for (const auto& r : train_set) train_ids.insert(r.recording_id);
  for (const auto& r : validation_set) {
    if (train_ids.count(r.recording_id)) {
      throw Error("train: recording " + r.recording_id + " is in both the training and validation sets");
    }
  }
  auto log = [&](const std::string& msg) {
    if (callbacks.log) callbacks.log(msg);
  };

  const Index L = model.config().fold.L;
  TrainResult result;
  auto pool = build_sequence_pool(train_set, L, &result.warnings);
  for (const auto& w : result.warnings) log("warning: " + w);
  if (pool.empty()) throw Error("train: no training recording has at least L=" + std::to_string(L) + " epochs");
  const MinibatchSchedule schedule(std::move(pool), config.batch_size, config.seed);
  const Index epoch_steps = schedule.batches_per_epoch();
  Index total_steps = epoch_steps * config.max_train_epochs;
  if (config.max_steps > 0) total_steps = std::min(total_steps, config.max_steps);

  Adam<float> adam(model.params(), config.adam);
  Index step = 0;
  if (resume != nullptr) {
    io::restore(model, *resume, &adam);
    step = resume->step;
    log("resumed at step " + std::to_string(step));
  }
  // Dropout masks are drawn from a per-step stream so a resumed run matches
  // an uninterrupted one.
  Rng dropout_rng;
  nn::ForwardContext ctx{Mode::Train, &dropout_rng};
  model::Model<float>::Cache cache;
  EarlyStopping stopper(config.patience, config.early_stopping);

  double loss_sum = 0.0;
  Index loss_count = 0;
  auto window_start = std::chrono::steady_clock::now();
  Index window_steps = 0;
  result.stop_reason = "max_train_epochs";
  if (config.max_steps > 0 && config.max_steps <= epoch_steps * config.max_train_epochs) result.stop_reason = "max_steps";

  auto run_validation = [&](Index step) -> bool {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - window_start).count();
    ValidationRecord rec;
    rec.step = step;
    rec.train_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    rec.val_accuracy = validation_accuracy(model, validation_set, config.validation_stride);
    rec.seconds_per_step = window_steps > 0 ? elapsed / static_cast<double>(window_steps) : 0.0;
    result.history.push_back(rec);
    if (callbacks.on_validation) callbacks.on_validation(rec);
    const auto decision = stopper.observe(rec.val_accuracy);
    if (decision.improved) {
      result.best_accuracy = rec.val_accuracy;
      result.best_step = step;
      result.best = io::capture(model, &adam, step, rec.val_accuracy, R"({"kind":"best"})");
      if (callbacks.on_best) callbacks.on_best(result.best);
    }
    log("step " + std::to_string(step) + ": train loss " + std::to_string(rec.train_loss) + ", validation accuracy " +
        std::to_string(rec.val_accuracy));
    loss_sum = 0.0;
    loss_count = 0;
    window_steps = 0;
    window_start = std::chrono::steady_clock::now();
    if (decision.stop) {
      result.stop_reason = "early_stopping";
      return true;
    }
    if (config.max_validations > 0 && stopper.checks() >= config.max_validations) {
      result.stop_reason = "max_validations";
      return true;
    }
    return false;
  };

  const Index first_step = step;
  Prefetcher<model::SequenceBatch<float>> batches(
      [&](Index i) { return assemble_batch(train_set, schedule.batch(first_step + i), L); }, config.workers);
  bool stopped = false;
  while (step < total_steps && !stopped) {
    const auto batch = batches.next();
    dropout_rng = substream(config.seed, "dropout", static_cast<std::uint64_t>(step));
    zero_grads(model.params());
    model::LossValue loss;
    try {
      loss = model.forward_backward(batch, ctx, cache);
    } catch (const NumericError& e) {
      throw NumericError("training aborted at step " + std::to_string(step + 1) + ": " + e.what());
    }
    if (!std::isfinite(loss.total)) {
      throw NumericError("training aborted at step " + std::to_string(step + 1) + ": non-finite loss");
    }
    if (config.clip_norm > 0.0) clip_global_norm(model.params(), config.clip_norm);
    adam.step();
    ++step;
    ++window_steps;
    loss_sum += loss.total;
    ++loss_count;
    if (step % config.validate_every == 0) stopped = run_validation(step);
  }
  if (!stopped && (result.history.empty() || result.history.back().step != step)) run_validation(step);

  result.steps = step;
  result.last = io::capture(model, &adam, step, result.best_accuracy, R"({"kind":"last"})");
  return result;
}

}  // namespace lseq::train
