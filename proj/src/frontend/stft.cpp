#include "lseq/frontend/stft.hpp"

#include "lseq/core/error.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <string>

namespace lseq::frontend {

void RawEpoch::validate(Index fft_size) const {
  if (!(sample_rate > 0.0)) throw Error("RawEpoch: sample_rate must be positive");
  const auto expected = static_cast<std::size_t>(std::llround(sample_rate * kEpochSeconds));
  if (samples.size() != expected) {
    throw ShapeError("RawEpoch: expected " + std::to_string(expected) + " samples at " +
                     std::to_string(sample_rate) + " Hz, got " + std::to_string(samples.size()));
  }
  if (sample_rate * 2.0 > static_cast<double>(fft_size)) {
    throw Error("RawEpoch: a 2-s window at " + std::to_string(sample_rate) +
                " Hz does not fit a " + std::to_string(fft_size) + "-point transform");
  }
}

Index stft_frame_count(Index n_samples, Index window, Index hop) {
  if (window <= 0 || hop <= 0 || n_samples < window) return 0;
  return (n_samples - window) / hop + 1;
}

std::vector<double> hamming_window(Index n) {
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  if (n <= 1) return w;
  const double pi = std::acos(-1.0);
  for (Index i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] =
        0.54 - 0.46 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return w;
}

TimeFreqImage stft_epoch(const RawEpoch& epoch, const StftOptions& options) {
  const Index window = static_cast<Index>(std::llround(options.window_seconds * epoch.sample_rate));
  const Index hop = static_cast<Index>(std::llround(window * (1.0 - options.overlap_fraction)));
  const Index n = static_cast<Index>(epoch.samples.size());
  if (window <= 0 || hop <= 0) throw Error("stft_epoch: window and hop must be positive");
  if (window > options.fft_size) {
    throw Error("stft_epoch: window of " + std::to_string(window) + " samples exceeds fft_size " +
                std::to_string(options.fft_size));
  }
  if (n < window) {
    throw ShapeError("stft_epoch: signal of " + std::to_string(n) +
                     " samples is shorter than one window (" + std::to_string(window) + ")");
  }
  for (Index i = 0; i < n; ++i) {
    if (!std::isfinite(epoch.samples[static_cast<std::size_t>(i)])) {
      throw NumericError("stft_epoch: non-finite sample at index " + std::to_string(i));
    }
  }

  const Index frames = stft_frame_count(n, window, hop);
  const Index bins = options.fft_size / 2 + 1;
  const auto win = hamming_window(window);

  TimeFreqImage image;
  image.values.resize(frames, bins);

  Eigen::FFT<double> fft;
  std::vector<double> buf(static_cast<std::size_t>(options.fft_size), 0.0);
  std::vector<std::complex<double>> spec;
  for (Index f = 0; f < frames; ++f) {
    const Index start = f * hop;
    for (Index i = 0; i < window; ++i) {
      buf[static_cast<std::size_t>(i)] =
          static_cast<double>(epoch.samples[static_cast<std::size_t>(start + i)]) *
          win[static_cast<std::size_t>(i)];
    }
    std::fill(buf.begin() + window, buf.end(), 0.0);
    fft.fwd(spec, buf);
    for (Index k = 0; k < bins; ++k) {
      image.values(f, k) =
          static_cast<float>(std::log(std::abs(spec[static_cast<std::size_t>(k)]) + options.log_floor));
    }
  }
  return image;
}

}  // namespace lseq::frontend
