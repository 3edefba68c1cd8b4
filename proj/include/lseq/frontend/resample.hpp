#pragma once

#include <vector>

namespace lseq::frontend {

// Rational polyphase resampler for integer sample rates. Upsamples by p,
// low-pass filters with a Hamming-windowed sinc at min(from, to)/2 and
// decimates by q, where p/q = to/from in lowest terms.
std::vector<float> resample(const std::vector<float>& signal, double from_rate, double to_rate);

}  // namespace lseq::frontend
