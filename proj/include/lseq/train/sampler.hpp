#pragma once

#include "lseq/frontend/recording_io.hpp"
#include "lseq/model/model.hpp"

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace lseq::train {

using frontend::FeatureArchive;

struct SequenceRef {
  Index recording = 0;
  Index start = 0;
  bool operator==(const SequenceRef&) const = default;
};

// Number of length-L windows with shift one in a recording of R epochs.
Index sequence_count(Index R, Index L);

// Every (recording, start) pair with start in [0, R-L]. Recordings shorter
// than L are skipped and reported through `warnings`.
std::vector<SequenceRef> build_sequence_pool(const std::vector<FeatureArchive>& recordings, Index L,
                                             std::vector<std::string>* warnings = nullptr);

// Minibatch order over a sequence pool. The pool is reshuffled once per
// training epoch from a per-epoch substream of the seed, so batch i is a pure
// function of (pool, batch_size, seed, i). The final batch of an epoch may be
// smaller than batch_size; every pool entry appears once per epoch.
class MinibatchSchedule {
 public:
  MinibatchSchedule(std::vector<SequenceRef> pool, Index batch_size, std::uint64_t seed);

  Index batches_per_epoch() const { return batches_per_epoch_; }
  Index pool_size() const { return static_cast<Index>(pool_.size()); }
  std::vector<SequenceRef> batch(Index i) const;
  std::vector<SequenceRef> epoch_order(Index epoch) const;

 private:
  std::vector<SequenceRef> pool_;
  Index batch_size_;
  Index batches_per_epoch_;
  std::uint64_t seed_;
  mutable Index cached_epoch_ = -1;
  mutable std::vector<SequenceRef> cached_order_;
  mutable std::mutex cache_mutex_;
};

// Copies the referenced windows into a model batch (images, labels, mask).
model::SequenceBatch<float> assemble_batch(const std::vector<FeatureArchive>& recordings,
                                           const std::vector<SequenceRef>& refs, Index L);

// Same for windows of a single recording.
model::SequenceBatch<float> assemble_windows(const FeatureArchive& recording, const std::vector<Index>& starts,
                                             Index L);

// Produces items 0, 1, 2, ... in order. With workers <= 1 items are built on
// the caller's thread; otherwise `workers` threads build ahead into a bounded
// buffer. Item contents never depend on the worker count, and a failure is
// raised by the next() call that would have returned the failed item.
template <typename T>
class Prefetcher {
 public:
  Prefetcher(std::function<T(Index)> make, Index workers, Index capacity = 0);
  ~Prefetcher();
  Prefetcher(const Prefetcher&) = delete;
  Prefetcher& operator=(const Prefetcher&) = delete;

  T next();

 private:
  void run(Index worker);

  std::function<T(Index)> make_;
  Index workers_;
  Index capacity_;
  Index next_out_ = 0;
  Index next_claim_ = 0;
  bool stop_ = false;
  std::map<Index, T> ready_;
  std::map<Index, std::exception_ptr> failed_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<std::thread> threads_;
};

template <typename T>
Prefetcher<T>::Prefetcher(std::function<T(Index)> make, Index workers, Index capacity)
    : make_(std::move(make)), workers_(workers), capacity_(capacity > 0 ? capacity : 2 * std::max<Index>(workers, 1)) {
  if (workers_ > 1) {
    for (Index w = 0; w < workers_; ++w) threads_.emplace_back([this, w] { run(w); });
  }
}

template <typename T>
Prefetcher<T>::~Prefetcher() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  cv_.notify_all();
  for (auto& t : threads_) t.join();
}

template <typename T>
void Prefetcher<T>::run(Index) {
  for (;;) {
    Index item;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [&] { return stop_ || next_claim_ < next_out_ + capacity_; });
      if (stop_) return;
      item = next_claim_++;
    }
    try {
      T value = make_(item);
      std::lock_guard lock(mutex_);
      ready_.emplace(item, std::move(value));
    } catch (...) {
      std::lock_guard lock(mutex_);
      failed_.emplace(item, std::current_exception());
    }
    cv_.notify_all();
  }
}

template <typename T>
T Prefetcher<T>::next() {
  if (workers_ <= 1) return make_(next_out_++);
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return failed_.count(next_out_) > 0 || ready_.count(next_out_) > 0; });
  if (auto it = failed_.find(next_out_); it != failed_.end()) std::rethrow_exception(it->second);
  auto node = ready_.extract(next_out_);
  ++next_out_;
  lock.unlock();
  cv_.notify_all();
  return std::move(node.mapped());
}

}  // namespace lseq::train
