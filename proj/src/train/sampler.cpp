#include "lseq/train/sampler.hpp"

#include "lseq/core/error.hpp"
#include "lseq/core/rng.hpp"

#include <algorithm>

namespace lseq::train {

Index sequence_count(Index R, Index L) {
  return R >= L ? R - L + 1 : 0;
}

std::vector<SequenceRef> build_sequence_pool(const std::vector<FeatureArchive>& recordings, Index L,
                                             std::vector<std::string>* warnings) {
  if (L < 1) throw Error("sampler: sequence length must be positive");
  std::vector<SequenceRef> pool;
  for (std::size_t r = 0; r < recordings.size(); ++r) {
    const Index R = recordings[r].epochs();
    if (R < L) {
      if (warnings) {
        warnings->push_back("recording " + recordings[r].recording_id + " has " + std::to_string(R) +
                            " epochs, fewer than L=" + std::to_string(L) + "; skipped");
      }
      continue;
    }
    for (Index s = 0; s + L <= R; ++s) pool.push_back({static_cast<Index>(r), s});
  }
  return pool;
}

MinibatchSchedule::MinibatchSchedule(std::vector<SequenceRef> pool, Index batch_size, std::uint64_t seed)
    : pool_(std::move(pool)), batch_size_(batch_size), seed_(seed) {
  if (pool_.empty()) throw Error("sampler: no training sequences (all recordings shorter than L?)");
  if (batch_size < 1) throw Error("sampler: batch size must be positive");
  batches_per_epoch_ = (static_cast<Index>(pool_.size()) + batch_size - 1) / batch_size;
}

std::vector<SequenceRef> MinibatchSchedule::epoch_order(Index epoch) const {
  std::vector<SequenceRef> order = pool_;
  Rng rng = substream(seed_, "shuffle", static_cast<std::uint64_t>(epoch));
  shuffle(order.begin(), order.end(), rng);
  return order;
}

std::vector<SequenceRef> MinibatchSchedule::batch(Index i) const {
  const Index epoch = i / batches_per_epoch_;
  const Index within = i % batches_per_epoch_;
  std::lock_guard lock(cache_mutex_);
  if (epoch != cached_epoch_) {
    cached_order_ = epoch_order(epoch);
    cached_epoch_ = epoch;
  }
  const Index begin = within * batch_size_;
  const Index end = std::min(begin + batch_size_, static_cast<Index>(cached_order_.size()));
  return {cached_order_.begin() + begin, cached_order_.begin() + end};
}

namespace {

model::SequenceBatch<float> empty_batch(Index sequences, Index L, Index T, Index F) {
  model::SequenceBatch<float> batch;
  batch.sequences = sequences;
  batch.length = L;
  batch.images.resize(sequences * L * T, F);
  batch.labels.resize(static_cast<std::size_t>(sequences * L));
  batch.mask.resize(static_cast<std::size_t>(sequences * L));
  return batch;
}

void copy_window(const FeatureArchive& rec, Index start, Index L, Index n, model::SequenceBatch<float>& batch) {
  const Index T = rec.frames;
  const Index F = rec.bins;
  if (batch.images.cols() != F || batch.images.rows() != batch.sequences * L * T) {
    throw ShapeError("assemble_batch: recordings disagree in image shape");
  }
  if (start < 0 || start + L > rec.epochs()) throw ShapeError("assemble_batch: window out of range");
  const float* src = rec.values.data() + start * T * F;
  std::copy(src, src + L * T * F, batch.images.data() + n * L * T * F);
  for (Index l = 0; l < L; ++l) {
    const auto e = static_cast<std::size_t>(start + l);
    const auto row = static_cast<std::size_t>(n * L + l);
    batch.labels[row] = static_cast<int>(rec.hypnogram.stages[e]);
    batch.mask[row] = rec.hypnogram.valid[e] ? 1 : 0;
  }
}

}  // namespace

model::SequenceBatch<float> assemble_batch(const std::vector<FeatureArchive>& recordings,
                                           const std::vector<SequenceRef>& refs, Index L) {
  if (refs.empty()) throw Error("assemble_batch: empty batch");
  const auto& first = recordings.at(static_cast<std::size_t>(refs.front().recording));
  auto batch = empty_batch(static_cast<Index>(refs.size()), L, first.frames, first.bins);
  for (std::size_t n = 0; n < refs.size(); ++n) {
    copy_window(recordings.at(static_cast<std::size_t>(refs[n].recording)), refs[n].start, L, static_cast<Index>(n),
                batch);
  }
  return batch;
}

model::SequenceBatch<float> assemble_windows(const FeatureArchive& recording, const std::vector<Index>& starts,
                                             Index L) {
  if (starts.empty()) throw Error("assemble_windows: no windows");
  auto batch = empty_batch(static_cast<Index>(starts.size()), L, recording.frames, recording.bins);
  for (std::size_t n = 0; n < starts.size(); ++n) copy_window(recording, starts[n], L, static_cast<Index>(n), batch);
  return batch;
}

}  // namespace lseq::train
