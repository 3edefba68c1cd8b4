#pragma once

#include "lseq/core/tensor.hpp"

#include <vector>

namespace lseq::frontend {

inline constexpr double kEpochSeconds = 30.0;
inline constexpr double kCanonicalRate = 100.0;
inline constexpr double kLogFloor = 1e-12;

struct RawEpoch {
  std::vector<float> samples;  // microvolts
  double sample_rate = kCanonicalRate;

  // Throws if the sample count does not match 30 s at sample_rate or a 2 s
  // window would not fit a 256-point transform.
  void validate(Index fft_size = 256) const;
};

// Log-magnitude spectrogram of one epoch, rows = time frames, cols = bins.
struct TimeFreqImage {
  MatF values;

  Index frames() const { return values.rows(); }
  Index bins() const { return values.cols(); }
};

struct StftOptions {
  double window_seconds = 2.0;
  double overlap_fraction = 0.5;
  Index fft_size = 256;
  double log_floor = kLogFloor;
};

// Frame count of the sliding window: floor((n - window) / hop) + 1.
Index stft_frame_count(Index n_samples, Index window, Index hop);

// Symmetric Hamming window of length n.
std::vector<double> hamming_window(Index n);

// log(|STFT| + floor) with a Hamming window, zero-padded to fft_size.
TimeFreqImage stft_epoch(const RawEpoch& epoch, const StftOptions& options = {});

}  // namespace lseq::frontend
