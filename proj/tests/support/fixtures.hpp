#pragma once

#include "lseq/core/rng.hpp"
#include "lseq/frontend/recording_io.hpp"
#include "lseq/model/config.hpp"

#include <string>
#include <vector>

namespace lseq::testing {

// Miniature model used by gradient checks and fast training tests.
inline model::ModelConfig miniature(model::Variant v = model::Variant::Folded) {
  model::ModelConfig c;
  c.variant = v;
  c.fold = v == model::Variant::Folded ? context::FoldSpec{8, 2, 4} : context::FoldSpec{8, 1, 8};
  c.frames = 4;
  c.bins = 9;
  c.filters = 3;
  c.attention = 5;
  c.epoch_width = 8;
  c.intra_width = 8;
  c.inter_width = 8;
  c.fc_width = 8;
  c.dropout = 0.0;
  c.l2 = 1e-3;
  return c;
}

// Recordings whose stage is readable from a single epoch: bin 2*stage
// carries a bump on top of unit noise.
inline std::vector<frontend::FeatureArchive> learnable_recordings(const model::ModelConfig& c, Index count,
                                                                  Index epochs, std::uint64_t seed,
                                                                  const std::string& prefix = "rec") {
  std::vector<frontend::FeatureArchive> out;
  for (Index r = 0; r < count; ++r) {
    Rng rng = substream(seed, prefix, static_cast<std::uint64_t>(r));
    frontend::FeatureArchive a;
    a.recording_id = prefix + std::to_string(r);
    a.subject_id = "subject" + std::to_string(r);
    a.frames = c.frames;
    a.bins = c.bins;
    int stage = 2;
    for (Index e = 0; e < epochs; ++e) {
      if (uniform01(rng) < 0.3) stage = static_cast<int>(uniform_below(rng, 5));
      a.hypnogram.stages.push_back(static_cast<std::uint8_t>(stage));
      a.hypnogram.valid.push_back(1);
      for (Index t = 0; t < c.frames; ++t) {
        for (Index f = 0; f < c.bins; ++f) {
          const double bump = f == (2 * stage) % c.bins ? 2.0 : 0.0;
          a.values.push_back(static_cast<float>(normal01(rng) * 0.5 + bump));
        }
      }
    }
    a.hypnogram.recording_id = a.recording_id;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace lseq::testing
