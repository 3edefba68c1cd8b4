#pragma once

#include "lseq/core/tensor.hpp"
#include "lseq/frontend/labels.hpp"
#include "lseq/frontend/stft.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lseq::frontend {

// Single-channel signal file: "LSEQSIG\0", u32 major, u32 minor, f64
// sample_rate, u64 n_samples, then n_samples little-endian float32.
inline constexpr std::uint32_t kSignalMajor = 1;
inline constexpr std::uint32_t kSignalMinor = 0;

struct SignalFile {
  double sample_rate = kCanonicalRate;
  std::vector<float> samples;
};

void write_signal(const std::filesystem::path& path, const SignalFile& signal);
SignalFile read_signal(const std::filesystem::path& path);

// One stage token per line; blank lines and '#' comments are skipped.
void write_labels(const std::filesystem::path& path, const RawLabelStream& labels);
RawLabelStream read_labels(const std::filesystem::path& path);

struct ManifestRow {
  std::string recording_id;
  std::filesystem::path signal_path;
  std::filesystem::path label_path;
  std::optional<Index> in_bed_start;  // empty: whole recording is in bed
  std::optional<Index> in_bed_end;
  std::string subject_id;
};

// CSV with header recording_id,signal_path,label_path,in_bed_start,in_bed_end,subject_id.
// Relative paths are resolved against the manifest's directory.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows);

// Per-recording feature archive: spectrogram stack plus hypnogram.
// "LSEQFEA\0", u16 major, u16 minor, recording_id, subject_id, u64 n_epochs,
// u32 T, u32 F, u8 stages[n], u8 valid[n], f32 values[n*T*F].
inline constexpr std::uint16_t kFeatureMajor = 1;
inline constexpr std::uint16_t kFeatureMinor = 0;

struct FeatureArchive {
  std::string recording_id;
  std::string subject_id;
  Index frames = 0;  // T
  Index bins = 0;    // F
  Hypnogram hypnogram;
  std::vector<float> values;  // epoch-major, each epoch a row-major T x F block

  Index epochs() const { return hypnogram.size(); }
  Eigen::Map<const MatF> epoch(Index i) const {
    return Eigen::Map<const MatF>(values.data() + i * frames * bins, frames, bins);
  }
  void validate() const;
};

void write_features(const std::filesystem::path& path, const FeatureArchive& archive);
FeatureArchive read_features(const std::filesystem::path& path);

struct PrepareOptions {
  StftOptions stft;
  double target_rate = kCanonicalRate;
  double margin_minutes = 30.0;
  bool zscore_per_recording = false;
};

// Builds the feature archive of one manifest row: resample to the canonical
// rate, harmonize labels, trim to the in-bed window, transform every epoch.
FeatureArchive prepare_recording(const ManifestRow& row, const PrepareOptions& options = {});

// Transforms aligned signal/labels already in memory (used by the synthetic
// generator and by prepare_recording).
FeatureArchive build_features(const std::string& recording_id, const std::string& subject_id,
                              const std::vector<float>& signal, double sample_rate,
                              const Hypnogram& hypnogram, const PrepareOptions& options = {});

// Optional per-recording standardization of every (frame, bin) value.
void zscore_in_place(FeatureArchive& archive);

}  // namespace lseq::frontend
