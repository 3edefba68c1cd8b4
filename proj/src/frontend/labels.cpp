#include "lseq/frontend/labels.hpp"

#include "lseq/core/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

namespace lseq::frontend {

std::string_view stage_name(int stage) {
  static constexpr std::array<std::string_view, kNumStages> kNames = {"W", "N1", "N2", "N3", "REM"};
  if (stage < 0 || stage >= kNumStages) return "?";
  return kNames[static_cast<std::size_t>(stage)];
}

std::string_view raw_label_token(RawLabel label) {
  switch (label) {
    case RawLabel::W: return "W";
    case RawLabel::N1: return "N1";
    case RawLabel::N2: return "N2";
    case RawLabel::N3: return "N3";
    case RawLabel::N4: return "N4";
    case RawLabel::REM: return "REM";
    case RawLabel::Movement: return "MOVEMENT";
    case RawLabel::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

RawLabel parse_raw_label(std::string_view token, std::size_t position) {
  std::string up(token);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "W" || up == "WAKE") return RawLabel::W;
  if (up == "N1") return RawLabel::N1;
  if (up == "N2") return RawLabel::N2;
  if (up == "N3") return RawLabel::N3;
  if (up == "N4") return RawLabel::N4;
  if (up == "REM" || up == "R") return RawLabel::REM;
  if (up == "MOVEMENT" || up == "MT") return RawLabel::Movement;
  if (up == "UNKNOWN" || up == "?") return RawLabel::Unknown;
  throw FormatError("unknown label token '" + std::string(token) + "' at position " +
                    std::to_string(position));
}

Index Hypnogram::usable() const {
  return static_cast<Index>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

void Hypnogram::validate() const {
  if (stages.size() != valid.size()) throw ShapeError("Hypnogram: stages/valid_mask length mismatch");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (valid[i] > 1) throw FormatError("Hypnogram: mask entries must be 0 or 1");
    if (valid[i] && stages[i] >= kNumStages) {
      throw FormatError("Hypnogram: stage code " + std::to_string(stages[i]) + " at " + std::to_string(i));
    }
  }
}

Hypnogram harmonize_labels(const RawLabelStream& raw, std::string recording_id) {
  Hypnogram hyp;
  hyp.recording_id = std::move(recording_id);
  hyp.stages.reserve(raw.labels.size());
  hyp.valid.reserve(raw.labels.size());
  for (RawLabel l : raw.labels) {
    std::uint8_t stage = 0;
    std::uint8_t ok = 1;
    switch (l) {
      case RawLabel::W: stage = 0; break;
      case RawLabel::N1: stage = 1; break;
      case RawLabel::N2: stage = 2; break;
      case RawLabel::N3:
      case RawLabel::N4: stage = 3; break;
      case RawLabel::REM: stage = 4; break;
      case RawLabel::Movement:
      case RawLabel::Unknown: ok = 0; break;
    }
    hyp.stages.push_back(stage);
    hyp.valid.push_back(ok);
  }
  return hyp;
}

RawLabelStream to_raw_labels(const Hypnogram& hyp) {
  static constexpr std::array<RawLabel, kNumStages> kMap = {RawLabel::W, RawLabel::N1, RawLabel::N2,
                                                           RawLabel::N3, RawLabel::REM};
  RawLabelStream raw;
  raw.labels.reserve(hyp.stages.size());
  for (std::size_t i = 0; i < hyp.stages.size(); ++i) {
    raw.labels.push_back(hyp.valid[i] ? kMap[hyp.stages[i]] : RawLabel::Unknown);
  }
  return raw;
}

TrimmedHypnogram trim_to_in_bed(const Hypnogram& hyp, Index in_bed_start, Index in_bed_end,
                                double margin_minutes) {
  const Index n = hyp.size();
  if (in_bed_start > in_bed_end) throw Error("trim_to_in_bed: in_bed_start > in_bed_end");
  if (in_bed_start < 0 || in_bed_end >= n) {
    throw Error("trim_to_in_bed: in-bed range [" + std::to_string(in_bed_start) + ", " +
                std::to_string(in_bed_end) + "] outside recording of " + std::to_string(n) + " epochs");
  }
  if (margin_minutes < 0.0) throw Error("trim_to_in_bed: negative margin");
  const auto margin = static_cast<Index>(std::llround(margin_minutes * 60.0 / 30.0));
  TrimmedHypnogram out;
  out.first = std::max<Index>(0, in_bed_start - margin);
  out.last = std::min<Index>(n - 1, in_bed_end + margin);
  if (out.last < out.first) throw Error("trim_to_in_bed: empty result");
  out.hypnogram.recording_id = hyp.recording_id;
  out.hypnogram.stages.assign(hyp.stages.begin() + out.first, hyp.stages.begin() + out.last + 1);
  out.hypnogram.valid.assign(hyp.valid.begin() + out.first, hyp.valid.begin() + out.last + 1);
  if (out.hypnogram.usable() == 0) throw Error("trim_to_in_bed: no usable epochs after trimming");
  return out;
}

}  // namespace lseq::frontend
