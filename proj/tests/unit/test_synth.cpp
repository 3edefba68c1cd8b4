#include "lseq/core/error.hpp"
#include "lseq/frontend/recording_io.hpp"
#include "lseq/frontend/stft.hpp"
#include "lseq/synth/generator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace lseq;
using namespace lseq::synth;
using frontend::Stage;

namespace {

SynthConfig unmodulated() {
  SynthConfig c;
  c.cycle_modulation_depth = 0.0;
  return c;
}

bool is_pair(std::uint8_t s) { return s == 1 || s == 4; }

}  // namespace

TEST(Synth, PresetsAndValidation) {
  EXPECT_EQ(tiny_preset().n_subjects * tiny_preset().recordings_per_subject, 12);
  EXPECT_EQ(tiny_preset().epochs_per_recording, 600);
  EXPECT_EQ(small_preset().n_subjects * small_preset().recordings_per_subject, 40);
  EXPECT_EQ(small_preset().epochs_per_recording, 1000);
  EXPECT_THROW(preset_by_name("huge"), Error);

  SynthConfig c;
  c.cycle_period = 0;
  EXPECT_THROW(c.validate(), Error);
  c = SynthConfig{};
  c.transitions[2][2] += 0.1;
  EXPECT_THROW(c.validate(), Error);
  c = SynthConfig{};
  c.cycle_modulation_depth = 1.5;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Synth, UnmodulatedTransitionsMatchBaseMatrix) {
  const auto c = unmodulated();
  Rng rng = substream(11, "chi");
  const auto h = generate_hypnogram(c, rng, 100000);
  std::array<std::array<double, 5>, 5> counts{};
  for (std::size_t i = 1; i < h.hypnogram.stages.size(); ++i) counts[h.hypnogram.stages[i - 1]][h.hypnogram.stages[i]] += 1;
  double chi2 = 0.0;
  int dof = 0;
  for (int i = 0; i < 5; ++i) {
    double n = 0.0;
    for (double v : counts[i]) n += v;
    int cells = 0;
    for (int j = 0; j < 5; ++j) {
      const double expected = n * c.transitions[i][j];
      if (expected == 0.0) {
        EXPECT_EQ(counts[i][j], 0.0);
        continue;
      }
      chi2 += (counts[i][j] - expected) * (counts[i][j] - expected) / expected;
      ++cells;
    }
    dof += cells - 1;
  }
  EXPECT_EQ(dof, 19);
  EXPECT_LT(chi2, 43.82);  // chi-square 0.999 quantile at 19 degrees of freedom
}

TEST(Synth, UnmodulatedMarginalsMatchStationaryDistribution) {
  const auto c = unmodulated();
  const auto pi = stationary_distribution(c.transitions);
  Rng rng = substream(12, "marginals");
  const auto h = generate_hypnogram(c, rng, 100000);
  // Batch means give an honest standard error for an autocorrelated chain.
  constexpr int batches = 100;
  const std::size_t per = h.hypnogram.stages.size() / batches;
  for (int s = 0; s < 5; ++s) {
    std::vector<double> means(batches, 0.0);
    for (int b = 0; b < batches; ++b) {
      for (std::size_t i = 0; i < per; ++i) means[b] += h.hypnogram.stages[b * per + i] == s;
      means[b] /= static_cast<double>(per);
    }
    double mean = 0.0, var = 0.0;
    for (double m : means) mean += m / batches;
    for (double m : means) var += (m - mean) * (m - mean) / (batches - 1);
    const double se = std::sqrt(var / batches);
    EXPECT_LT(std::abs(mean - pi[s]), 3.0 * se) << "stage " << s;
  }
}

TEST(Synth, IdentityMatrixGivesConstantStage) {
  SynthConfig c;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) c.transitions[i][j] = i == j ? 1.0 : 0.0;
  }
  Rng rng = substream(1, "identity");
  const auto h = generate_hypnogram(c, rng, 500);
  for (auto s : h.hypnogram.stages) ASSERT_EQ(s, h.hypnogram.stages[0]);
}

TEST(Synth, Deterministic) {
  const auto c = tiny_preset();
  const auto a = generate_recording(c, 2, 1);
  const auto b = generate_recording(c, 2, 1);
  EXPECT_EQ(a.labels.hypnogram.stages, b.labels.hypnogram.stages);
  EXPECT_EQ(a.signal, b.signal);
  const auto other = generate_recording(c, 2, 0);
  EXPECT_NE(a.labels.hypnogram.stages, other.labels.hypnogram.stages);
}

TEST(Synth, ModulationBoostsPhaseTarget) {
  SynthConfig c;
  for (double phase : {0.01, 0.2, 0.5, 0.75}) {
    const int target = static_cast<int>(phase_target(c, phase));
    for (int from = 0; from < 5; ++from) {
      const auto row = transition_row(c, from, phase);
      double sum = 0.0;
      for (double v : row) sum += v;
      EXPECT_NEAR(sum, 1.0, 1e-12);
      if (c.transitions[from][target] > 0.0) {
        EXPECT_GT(row[target], c.transitions[from][target]);
      }
    }
  }
  EXPECT_EQ(phase_target(c, 0.0), Stage::W);
  EXPECT_EQ(phase_target(c, 45.0 / 180.0), Stage::N1);
  EXPECT_EQ(phase_target(c, 90.0 / 180.0), Stage::N3);
  EXPECT_EQ(phase_target(c, 140.0 / 180.0), Stage::REM);
}

TEST(Synth, N3PeakBin) {
  SynthConfig c;
  c.noise_level = 0.0;
  frontend::Hypnogram h{std::vector<std::uint8_t>(4, 3), std::vector<std::uint8_t>(4, 1), "n3"};
  Rng sig = substream(2, "signal"), noise = substream(2, "noise");
  const auto signal = generate_signal(h, c, sig, noise);
  const auto archive = frontend::build_features("n3", "s", signal, c.sample_rate, h);
  const Index expected = std::lround(1.5 * 256.0 / 100.0);
  for (Index e = 0; e < archive.epochs(); ++e) {
    const auto img = archive.epoch(e);
    for (Index t = 0; t < img.rows(); ++t) {
      Index argmax;
      img.row(t).maxCoeff(&argmax);
      ASSERT_LE(std::abs(argmax - expected), 1) << "epoch " << e << " frame " << t;
    }
  }
}

TEST(Synth, ConfusablePairIsLocallySymmetric) {
  // Identical spectra and a transition matrix invariant under swapping N1
  // and REM: an epoch-local classifier cannot beat chance on the pair.
  SynthConfig c;
  const auto& n1 = c.bands[1];
  const auto& rem = c.bands[4];
  ASSERT_EQ(n1.size(), rem.size());
  for (std::size_t i = 0; i < n1.size(); ++i) {
    EXPECT_EQ(n1[i].center_hz, rem[i].center_hz);
    EXPECT_EQ(n1[i].amplitude, rem[i].amplitude);
  }
  auto swap = [](int s) { return s == 1 ? 4 : s == 4 ? 1 : s; };
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) EXPECT_EQ(c.transitions[i][j], c.transitions[swap(i)][swap(j)]);
  }
}

TEST(Synth, PhaseSeparatesPairButShortWindowsDoNot) {
  const auto c = small_preset();
  constexpr int bins = 60;
  std::vector<std::array<long, 2>> votes(bins, {0, 0});
  std::vector<SynthHypnogram> held_out;
  long pair_epochs = 0;
  double window_sees_cue = 0.0;
  for (Index s = 0; s < c.n_subjects; ++s) {
    for (Index r = 0; r < c.recordings_per_subject; ++r) {
      Rng rng = substream(c.seed, "hypnogram", static_cast<std::uint64_t>(s * c.recordings_per_subject + r));
      auto h = generate_hypnogram(c, rng, c.epochs_per_recording);
      const auto& st = h.hypnogram.stages;
      const Index n = h.hypnogram.size();
      for (Index e = 0; e < n; ++e) {
        if (!is_pair(st[e])) continue;
        ++pair_epochs;
        if (s % 2 == 0) votes[static_cast<int>(h.phase[e] * bins)][st[e] == 4]++;
        // Fraction of the length-20 windows containing e that also contain W or N3.
        int windows = 0, seen = 0;
        for (Index w = std::max<Index>(0, e - 19); w <= std::min<Index>(e, n - 20); ++w) {
          ++windows;
          bool cue = false;
          for (Index k = w; k < w + 20; ++k) cue = cue || st[k] == 0 || st[k] == 3;
          seen += cue;
        }
        if (windows > 0) window_sees_cue += static_cast<double>(seen) / windows;
      }
      if (s % 2 == 1) held_out.push_back(std::move(h));
    }
  }
  long correct = 0, total = 0;
  for (const auto& h : held_out) {
    for (Index e = 0; e < h.hypnogram.size(); ++e) {
      const auto s = h.hypnogram.stages[e];
      if (!is_pair(s)) continue;
      const auto& v = votes[static_cast<int>(h.phase[e] * bins)];
      correct += (v[1] > v[0] ? 4 : 1) == s;
      ++total;
    }
  }
  const double cheating = static_cast<double>(correct) / total;
  EXPECT_GE(cheating, 0.95);
  // A window without W or N3 is exchangeable between the pair, so a short
  // context can at best be right on the cue-bearing fraction q.
  const double q = window_sees_cue / pair_epochs;
  EXPECT_LE(0.5 * (1.0 - q) + q, 0.55);
}

TEST(Synth, DatasetRoundTripsThroughFrontend) {
  SynthConfig c;
  c.n_subjects = 2;
  c.recordings_per_subject = 1;
  c.epochs_per_recording = 12;
  const auto dir = std::filesystem::temp_directory_path() / "lseq_test_synth_ds";
  std::filesystem::remove_all(dir);
  const auto manifest = write_dataset(c, dir);
  const auto rows = frontend::read_manifest(manifest);
  ASSERT_EQ(rows.size(), 2u);
  const auto direct = generate_features(c);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto archive = frontend::prepare_recording(rows[i]);
    EXPECT_EQ(archive.epochs(), 12);
    EXPECT_EQ(archive.frames, 29);
    EXPECT_EQ(archive.bins, 129);
    EXPECT_EQ(archive.values, direct[i].values);
    EXPECT_EQ(archive.hypnogram.stages, direct[i].hypnogram.stages);
  }
}
