#pragma once

#include "lseq/core/tensor.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lseq::frontend {

inline constexpr int kNumStages = 5;

enum class Stage : std::uint8_t { W = 0, N1 = 1, N2 = 2, N3 = 3, REM = 4 };

// Eight-way scoring vocabulary of R&K-scored recordings.
enum class RawLabel : std::uint8_t { W, N1, N2, N3, N4, REM, Movement, Unknown };

std::string_view stage_name(int stage);
std::string_view raw_label_token(RawLabel label);

// Accepts W, N1, N2, N3, N4, REM, MOVEMENT, UNKNOWN (case-insensitive) plus
// the common aliases WAKE, R, MT, ?. Throws naming the token and position.
RawLabel parse_raw_label(std::string_view token, std::size_t position);

struct RawLabelStream {
  std::vector<RawLabel> labels;
  std::int64_t epoch_index_offset = 0;
};

struct Hypnogram {
  std::vector<std::uint8_t> stages;  // Stage codes; meaningless where !valid
  std::vector<std::uint8_t> valid;
  std::string recording_id;

  Index size() const { return static_cast<Index>(stages.size()); }
  Index usable() const;
  void validate() const;
};

// N4 folds into N3; MOVEMENT and UNKNOWN become invalid positions.
Hypnogram harmonize_labels(const RawLabelStream& raw, std::string recording_id = {});

// Inverse view used for round-trips: invalid positions map to UNKNOWN.
RawLabelStream to_raw_labels(const Hypnogram& hyp);

struct TrimmedHypnogram {
  Hypnogram hypnogram;
  Index first = 0;  // inclusive index into the original recording
  Index last = 0;   // inclusive
};

// Keeps [in_bed_start - margin, in_bed_end + margin] clamped to the recording,
// where margin is margin_minutes expressed in 30-s epochs.
TrimmedHypnogram trim_to_in_bed(const Hypnogram& hyp, Index in_bed_start, Index in_bed_end,
                                double margin_minutes = 30.0);

}  // namespace lseq::frontend
