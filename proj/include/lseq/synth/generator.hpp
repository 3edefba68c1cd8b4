#pragma once

#include "lseq/core/rng.hpp"
#include "lseq/frontend/labels.hpp"
#include "lseq/frontend/recording_io.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace lseq::synth {

using Matrix5 = std::array<std::array<double, 5>, 5>;

struct BandComponent {
  double center_hz = 10.0;
  double amplitude = 1.0;   // in units of config.amplitude_scale
  double jitter_hz = 0.5;   // per-epoch uniform jitter of the center
};

// One segment of the sleep cycle: the stage favoured while the cycle phase
// lies in this segment, and the segment's length in epochs of a nominal
// cycle.
struct PhaseSegment {
  frontend::Stage target = frontend::Stage::N2;
  double epochs = 24.0;
};

struct SynthConfig {
  Index n_subjects = 6;
  Index recordings_per_subject = 2;
  Index epochs_per_recording = 600;
  Matrix5 transitions = default_transitions();
  Index cycle_period = 180;           // nominal epochs per cycle
  double period_jitter = 0.1;         // per-cycle relative period jitter
  double cycle_modulation_depth = 1.0;
  double modulation_gain = 6.0;       // log-boost of the phase's target stage at full depth
  std::vector<PhaseSegment> schedule = default_schedule();
  std::array<std::vector<BandComponent>, 5> bands = default_bands();
  double amplitude_scale = 20.0;      // microvolts per unit amplitude
  double amplitude_jitter = 0.2;      // per-epoch relative amplitude jitter
  double noise_level = 0.5;           // white-noise std, in units of amplitude_scale
  double sample_rate = 100.0;
  std::uint64_t seed = 1;

  static Matrix5 default_transitions();
  static std::vector<PhaseSegment> default_schedule();
  static std::array<std::vector<BandComponent>, 5> default_bands();

  void validate() const;
  double schedule_length() const;
};

SynthConfig tiny_preset();   // 6 subjects x 2 recordings x 600 epochs
SynthConfig small_preset();  // 20 subjects x 2 recordings x 1000 epochs
SynthConfig preset_by_name(const std::string& name);

struct SynthHypnogram {
  frontend::Hypnogram hypnogram;
  std::vector<double> phase;  // cycle phase in [0, 1) of every epoch
};

// Stage of the schedule segment containing `phase`.
frontend::Stage phase_target(const SynthConfig& config, double phase);

// Transition row from `from` at cycle phase `phase`:
// P(j) proportional to P0[from][j] * exp(gain * depth * [j == target(phase)]).
std::array<double, 5> transition_row(const SynthConfig& config, int from, double phase);

SynthHypnogram generate_hypnogram(const SynthConfig& config, Rng& rng, Index epochs);

// Raw signal of the whole recording (epochs * 30 s at config.sample_rate).
std::vector<float> generate_signal(const frontend::Hypnogram& hyp, const SynthConfig& config, Rng& signal_rng,
                                   Rng& noise_rng);

struct SynthRecording {
  std::string recording_id;
  std::string subject_id;
  SynthHypnogram labels;
  std::vector<float> signal;
};

SynthRecording generate_recording(const SynthConfig& config, Index subject, Index recording);

// All recordings of the configuration transformed to feature archives.
std::vector<frontend::FeatureArchive> generate_features(const SynthConfig& config,
                                                        const frontend::PrepareOptions& options = {});

// Writes signal/label files and a manifest; returns the manifest path.
std::filesystem::path write_dataset(const SynthConfig& config, const std::filesystem::path& out_dir);

// Stationary distribution of a row-stochastic matrix (power iteration).
std::array<double, 5> stationary_distribution(const Matrix5& p);

}  // namespace lseq::synth
