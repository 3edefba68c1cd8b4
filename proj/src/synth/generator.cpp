#include "lseq/synth/generator.hpp"

#include "lseq/core/error.hpp"

#include <cmath>
#include <numbers>

namespace lseq::synth {

using frontend::Stage;

Matrix5 SynthConfig::default_transitions() {
  // N1 and REM are mirror images of each other: swapping the two stages
  // leaves the matrix unchanged, so only cycle placement separates them.
  return {{{0.920, 0.025, 0.030, 0.000, 0.025},
           {0.030, 0.880, 0.070, 0.010, 0.010},
           {0.015, 0.025, 0.920, 0.015, 0.025},
           {0.005, 0.010, 0.060, 0.915, 0.010},
           {0.030, 0.010, 0.070, 0.010, 0.880}}};
}

std::vector<PhaseSegment> SynthConfig::default_schedule() {
  return {{Stage::W, 6},  {Stage::N2, 24}, {Stage::N1, 30}, {Stage::N2, 24},
          {Stage::N3, 18}, {Stage::N2, 24}, {Stage::REM, 30}, {Stage::N2, 24}};
}

std::array<std::vector<BandComponent>, 5> SynthConfig::default_bands() {
  std::array<std::vector<BandComponent>, 5> b;
  b[static_cast<int>(Stage::W)] = {{10.0, 1.0, 0.5}, {20.0, 0.3, 1.0}};
  b[static_cast<int>(Stage::N1)] = {{5.0, 1.0, 0.5}};
  b[static_cast<int>(Stage::N2)] = {{13.0, 0.8, 0.5}, {5.0, 0.5, 0.5}};
  b[static_cast<int>(Stage::N3)] = {{1.5, 2.0, 0.3}};
  b[static_cast<int>(Stage::REM)] = b[static_cast<int>(Stage::N1)];
  return b;
}

double SynthConfig::schedule_length() const {
  double total = 0.0;
  for (const auto& s : schedule) total += s.epochs;
  return total;
}

void SynthConfig::validate() const {
  if (n_subjects < 1 || recordings_per_subject < 1 || epochs_per_recording < 1) {
    throw Error("synth: subject, recording, and epoch counts must be positive");
  }
  for (int i = 0; i < 5; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 5; ++j) {
      if (transitions[i][j] < 0.0) throw Error("synth: negative transition probability");
      sum += transitions[i][j];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error("synth: transition row " + std::to_string(i) + " does not sum to 1");
  }
  if (cycle_period <= 0) throw Error("synth: cycle_period must be positive");
  if (period_jitter < 0.0 || period_jitter >= 1.0) throw Error("synth: period_jitter must be in [0, 1)");
  if (cycle_modulation_depth < 0.0 || cycle_modulation_depth > 1.0) {
    throw Error("synth: cycle_modulation_depth must be in [0, 1]");
  }
  if (schedule.empty() || !(schedule_length() > 0.0)) throw Error("synth: empty cycle schedule");
  for (const auto& s : schedule) {
    if (!(s.epochs > 0.0)) throw Error("synth: schedule segments must have positive length");
  }
  if (!(sample_rate > 0.0) || noise_level < 0.0 || amplitude_scale <= 0.0) {
    throw Error("synth: sample rate and amplitude scale must be positive, noise non-negative");
  }
  for (const auto& stage_bands : bands) {
    for (const auto& c : stage_bands) {
      if (c.center_hz <= 0.0 || c.center_hz + c.jitter_hz >= sample_rate / 2.0) {
        throw Error("synth: band centers must lie strictly inside (0, Nyquist)");
      }
    }
  }
}

SynthConfig tiny_preset() {
  SynthConfig c;
  c.n_subjects = 6;
  c.recordings_per_subject = 2;
  c.epochs_per_recording = 600;
  return c;
}

SynthConfig small_preset() {
  SynthConfig c;
  c.n_subjects = 20;
  c.recordings_per_subject = 2;
  c.epochs_per_recording = 1000;
  return c;
}

SynthConfig preset_by_name(const std::string& name) {
  if (name == "tiny") return tiny_preset();
  if (name == "small") return small_preset();
  throw Error("unknown synthetic preset '" + name + "' (expected tiny or small)");
}

Stage phase_target(const SynthConfig& config, double phase) {
  const double at = (phase - std::floor(phase)) * config.schedule_length();
  double edge = 0.0;
  for (const auto& s : config.schedule) {
    edge += s.epochs;
    if (at < edge) return s.target;
  }
  return config.schedule.back().target;
}

std::array<double, 5> transition_row(const SynthConfig& config, int from, double phase) {
  const int target = static_cast<int>(phase_target(config, phase));
  const double boost = std::exp(config.modulation_gain * config.cycle_modulation_depth);
  std::array<double, 5> row{};
  double total = 0.0;
  for (int j = 0; j < 5; ++j) {
    row[j] = config.transitions[from][j] * (j == target ? boost : 1.0);
    total += row[j];
  }
  for (double& v : row) v /= total;
  return row;
}

SynthHypnogram generate_hypnogram(const SynthConfig& config, Rng& rng, Index epochs) {
  config.validate();
  SynthHypnogram out;
  out.hypnogram.stages.resize(static_cast<std::size_t>(epochs));
  out.hypnogram.valid.assign(static_cast<std::size_t>(epochs), 1);
  out.phase.resize(static_cast<std::size_t>(epochs));

  auto cycle_length = [&] {
    const double scale = 1.0 + config.period_jitter * (2.0 * uniform01(rng) - 1.0);
    return std::max(1.0, std::round(static_cast<double>(config.cycle_period) * scale));
  };
  double length = cycle_length();
  double pos = std::floor(uniform01(rng) * length);  // random starting phase
  int stage = static_cast<int>(phase_target(config, pos / length));
  for (Index e = 0; e < epochs; ++e) {
    const double phase = pos / length;
    if (e > 0) {
      const auto row = transition_row(config, stage, phase);
      double u = uniform01(rng);
      int next = 4;
      for (int j = 0; j < 5; ++j) {
        if (u < row[j]) {
          next = j;
          break;
        }
        u -= row[j];
      }
      stage = next;
    }
    out.hypnogram.stages[static_cast<std::size_t>(e)] = static_cast<std::uint8_t>(stage);
    out.phase[static_cast<std::size_t>(e)] = phase;
    pos += 1.0;
    if (pos >= length) {
      pos -= length;
      length = cycle_length();
    }
  }
  return out;
}

std::vector<float> generate_signal(const frontend::Hypnogram& hyp, const SynthConfig& config, Rng& signal_rng,
                                   Rng& noise_rng) {
  config.validate();
  const auto per_epoch = static_cast<std::size_t>(std::llround(config.sample_rate * 30.0));
  std::vector<float> signal(per_epoch * static_cast<std::size_t>(hyp.size()));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (Index e = 0; e < hyp.size(); ++e) {
    const auto& bands = config.bands[hyp.stages[static_cast<std::size_t>(e)]];
    float* out = signal.data() + static_cast<std::size_t>(e) * per_epoch;
    for (const auto& c : bands) {
      const double f = c.center_hz + c.jitter_hz * (2.0 * uniform01(signal_rng) - 1.0);
      const double a = c.amplitude * (1.0 + config.amplitude_jitter * (2.0 * uniform01(signal_rng) - 1.0));
      const double phi = two_pi * uniform01(signal_rng);
      for (std::size_t i = 0; i < per_epoch; ++i) {
        const double t = static_cast<double>(i) / config.sample_rate;
        out[i] += static_cast<float>(config.amplitude_scale * a * std::sin(two_pi * f * t + phi));
      }
    }
    if (config.noise_level > 0.0) {
      for (std::size_t i = 0; i < per_epoch; ++i) {
        out[i] += static_cast<float>(config.amplitude_scale * config.noise_level * normal01(noise_rng));
      }
    }
  }
  return signal;
}

SynthRecording generate_recording(const SynthConfig& config, Index subject, Index recording) {
  const auto index = static_cast<std::uint64_t>(subject * config.recordings_per_subject + recording);
  Rng hyp_rng = substream(config.seed, "hypnogram", index);
  Rng signal_rng = substream(config.seed, "signal", index);
  Rng noise_rng = substream(config.seed, "noise", index);
  SynthRecording r;
  r.subject_id = "s" + std::to_string(subject + 1);
  r.recording_id = r.subject_id + "r" + std::to_string(recording + 1);
  r.labels = generate_hypnogram(config, hyp_rng, config.epochs_per_recording);
  r.labels.hypnogram.recording_id = r.recording_id;
  r.signal = generate_signal(r.labels.hypnogram, config, signal_rng, noise_rng);
  return r;
}

std::vector<frontend::FeatureArchive> generate_features(const SynthConfig& config,
                                                        const frontend::PrepareOptions& options) {
  config.validate();
  std::vector<frontend::FeatureArchive> out;
  for (Index s = 0; s < config.n_subjects; ++s) {
    for (Index r = 0; r < config.recordings_per_subject; ++r) {
      const auto rec = generate_recording(config, s, r);
      out.push_back(frontend::build_features(rec.recording_id, rec.subject_id, rec.signal, config.sample_rate,
                                             rec.labels.hypnogram, options));
    }
  }
  return out;
}

std::filesystem::path write_dataset(const SynthConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  std::vector<frontend::ManifestRow> rows;
  for (Index s = 0; s < config.n_subjects; ++s) {
    for (Index r = 0; r < config.recordings_per_subject; ++r) {
      const auto rec = generate_recording(config, s, r);
      frontend::ManifestRow row;
      row.recording_id = rec.recording_id;
      row.subject_id = rec.subject_id;
      // Manifest entries are relative to the manifest, so the dataset can be moved.
      row.signal_path = rec.recording_id + ".sig";
      row.label_path = rec.recording_id + ".labels";
      frontend::write_signal(out_dir / row.signal_path, {config.sample_rate, rec.signal});
      frontend::write_labels(out_dir / row.label_path, frontend::to_raw_labels(rec.labels.hypnogram));
      rows.push_back(row);
    }
  }
  const auto manifest = out_dir / "manifest.csv";
  frontend::write_manifest(manifest, rows);
  return manifest;
}

std::array<double, 5> stationary_distribution(const Matrix5& p) {
  std::array<double, 5> pi{0.2, 0.2, 0.2, 0.2, 0.2};
  for (int it = 0; it < 100000; ++it) {
    std::array<double, 5> next{};
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) next[j] += pi[i] * p[i][j];
    }
    double diff = 0.0;
    for (int j = 0; j < 5; ++j) diff += std::abs(next[j] - pi[j]);
    pi = next;
    if (diff < 1e-15) break;
  }
  return pi;
}

}  // namespace lseq::synth
