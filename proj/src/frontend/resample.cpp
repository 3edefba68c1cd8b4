#include "lseq/frontend/resample.hpp"

#include "lseq/core/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace lseq::frontend {

namespace {

constexpr long kTapsPerPhase = 10;

std::vector<double> design_lowpass(long p, long q, long half_len) {
  const double pi = std::acos(-1.0);
  const double cutoff = 1.0 / static_cast<double>(std::max(p, q));  // fraction of upsampled Nyquist
  const long len = 2 * half_len + 1;
  std::vector<double> h(static_cast<std::size_t>(len));
  for (long i = 0; i < len; ++i) {
    const double t = static_cast<double>(i - half_len);
    const double sinc = t == 0.0 ? 1.0 : std::sin(pi * cutoff * t) / (pi * cutoff * t);
    const double w = 0.54 - 0.46 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(len - 1));
    h[static_cast<std::size_t>(i)] = static_cast<double>(p) * cutoff * sinc * w;
  }
  return h;
}

}  // namespace

std::vector<float> resample(const std::vector<float>& signal, double from_rate, double to_rate) {
  const long from = std::lround(from_rate);
  const long to = std::lround(to_rate);
  if (from <= 0 || to <= 0 || std::abs(from_rate - static_cast<double>(from)) > 1e-9 ||
      std::abs(to_rate - static_cast<double>(to)) > 1e-9) {
    throw Error("resample: rates must be positive integers (got " + std::to_string(from_rate) + " -> " +
                std::to_string(to_rate) + ")");
  }
  if (from == to) return signal;
  const long g = std::gcd(from, to);
  const long p = to / g;
  const long q = from / g;
  const long half_len = kTapsPerPhase * std::max(p, q);
  const auto h = design_lowpass(p, q, half_len);

  const long n_in = static_cast<long>(signal.size());
  const long n_out = (n_in * p + q - 1) / q;
  std::vector<float> out(static_cast<std::size_t>(n_out));
  for (long m = 0; m < n_out; ++m) {
    // Upsampled position of output m is m*q; input i sits at i*p.
    const long pos = m * q;
    const long i_lo = std::max<long>(0, (pos - half_len + p - 1) / p);
    const long i_hi = std::min<long>(n_in - 1, (pos + half_len) / p);
    double acc = 0.0;
    for (long i = i_lo; i <= i_hi; ++i) {
      acc += static_cast<double>(signal[static_cast<std::size_t>(i)]) *
             h[static_cast<std::size_t>(pos - i * p + half_len)];
    }
    out[static_cast<std::size_t>(m)] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace lseq::frontend
