#include "lseq/eval/scoring.hpp"

#include "lseq/eval/metrics.hpp"

#include "lseq/core/error.hpp"
#include "lseq/train/sampler.hpp"

#include <algorithm>

namespace lseq::eval {

MatD ModelStager::posteriors(const model::SequenceBatch<float>& batch) {
  nn::ForwardContext ctx{Mode::Eval, nullptr};
  return model_.forward(batch.images, batch.sequences, ctx, cache_).cast<double>();
}

MatD OracleStager::posteriors(const model::SequenceBatch<float>& batch) {
  MatD p = MatD::Zero(batch.epochs(), kClasses);
  for (Index i = 0; i < batch.epochs(); ++i) p(i, batch.labels[static_cast<std::size_t>(i)]) = 1.0;
  return p;
}

std::vector<Index> window_starts(Index R, Index L, Index stride) {
  if (stride < 1) throw Error("scoring: stride must be positive");
  if (R < L) return {0};
  std::vector<Index> starts;
  for (Index s = 0; s + L <= R; s += stride) starts.push_back(s);
  if (starts.back() != R - L) starts.push_back(R - L);
  return starts;
}

ScoredRecording score_recording(Stager& stager, const FeatureArchive& recording, Index stride, Index batch_size) {
  const Index L = stager.length();
  const Index R = recording.epochs();
  if (R == 0) throw Error("scoring: recording " + recording.recording_id + " has no epochs");

  // Short recordings are padded to one full window.
  const FeatureArchive* source = &recording;
  FeatureArchive padded;
  if (R < L) {
    padded = recording;
    const Index block = recording.frames * recording.bins;
    padded.values.reserve(static_cast<std::size_t>(L * block));
    for (Index e = R; e < L; ++e) {
      padded.values.insert(padded.values.end(), recording.values.end() - block, recording.values.end());
      padded.hypnogram.stages.push_back(recording.hypnogram.stages.back());
      padded.hypnogram.valid.push_back(0);
    }
    source = &padded;
  }
  const Index span = std::max(R, L);
  ScoredRecording out;
  out.posteriors = MatD::Zero(span, kClasses);
  out.coverage.assign(static_cast<std::size_t>(span), 0);

  const auto starts = window_starts(R, L, stride);
  for (std::size_t first = 0; first < starts.size(); first += static_cast<std::size_t>(batch_size)) {
    const std::size_t last = std::min(starts.size(), first + static_cast<std::size_t>(batch_size));
    const std::vector<Index> group(starts.begin() + static_cast<std::ptrdiff_t>(first),
                                   starts.begin() + static_cast<std::ptrdiff_t>(last));
    const auto batch = train::assemble_windows(*source, group, L);
    const MatD p = stager.posteriors(batch);
    for (std::size_t n = 0; n < group.size(); ++n) {
      for (Index l = 0; l < L; ++l) {
        const Index e = group[n] + l;
        out.posteriors.row(e) += p.row(static_cast<Index>(n) * L + l);
        ++out.coverage[static_cast<std::size_t>(e)];
      }
    }
  }
  out.posteriors.conservativeResize(R, kClasses);
  out.coverage.resize(static_cast<std::size_t>(R));
  out.predicted.resize(static_cast<std::size_t>(R));
  for (Index e = 0; e < R; ++e) {
    out.posteriors.row(e) /= static_cast<double>(out.coverage[static_cast<std::size_t>(e)]);
    Index best = 0;
    out.posteriors.row(e).maxCoeff(&best);
    out.predicted[static_cast<std::size_t>(e)] = static_cast<std::uint8_t>(best);
  }
  return out;
}

double recording_accuracy(const FeatureArchive& recording, const ScoredRecording& scored) {
  Index hits = 0, total = 0;
  for (Index e = 0; e < recording.epochs(); ++e) {
    const auto i = static_cast<std::size_t>(e);
    if (!recording.hypnogram.valid[i]) continue;
    ++total;
    hits += scored.predicted[i] == recording.hypnogram.stages[i] ? 1 : 0;
  }
  return total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

}  // namespace lseq::eval
