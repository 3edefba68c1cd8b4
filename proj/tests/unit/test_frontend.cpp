#include "lseq/core/error.hpp"
#include "lseq/core/rng.hpp"
#include "lseq/frontend/labels.hpp"
#include "lseq/frontend/recording_io.hpp"
#include "lseq/frontend/resample.hpp"
#include "lseq/frontend/stft.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace lseq;
using namespace lseq::frontend;

namespace {

RawEpoch sinusoid(double hz, double amplitude = 10.0) {
  RawEpoch e;
  e.samples.resize(3000);
  for (std::size_t i = 0; i < e.samples.size(); ++i) {
    e.samples[i] = static_cast<float>(amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / 100.0));
  }
  return e;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lseq_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Stft, EpochShape) {
  const auto image = stft_epoch(sinusoid(3.0));
  EXPECT_EQ(image.frames(), 29);
  EXPECT_EQ(image.bins(), 129);
  EXPECT_EQ(stft_frame_count(3000, 200, 100), 29);
}

TEST(Stft, ZeroSignalIsConstantFloor) {
  RawEpoch e;
  e.samples.assign(3000, 0.0f);
  const auto image = stft_epoch(e);
  const float expected = static_cast<float>(std::log(kLogFloor));
  for (Index t = 0; t < image.frames(); ++t) {
    for (Index k = 0; k < image.bins(); ++k) ASSERT_EQ(image.values(t, k), expected);
  }
}

TEST(Stft, MatchesBruteForceDft) {
  Rng rng = substream(3, "stft");
  RawEpoch e = sinusoid(10.0);
  for (auto& v : e.samples) v += static_cast<float>(normal01(rng));
  const auto image = stft_epoch(e);
  for (Index frame : {Index{0}, Index{13}, Index{28}}) {
    Index argmax = 0;
    for (Index k = 0; k < 129; ++k) {
      std::complex<double> acc = 0.0;
      for (Index i = 0; i < 200; ++i) {
        const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / 199.0);
        const double x = e.samples[static_cast<std::size_t>(frame * 100 + i)] * w;
        acc += x * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * i) / 256.0);
      }
      const double expected = std::log(std::abs(acc) + kLogFloor);
      ASSERT_NEAR(image.values(frame, k), expected, 1e-4 * std::max(1.0, std::abs(expected))) << "bin " << k;
      if (image.values(frame, k) > image.values(frame, argmax)) argmax = k;
    }
    EXPECT_LE(std::abs(argmax - 26), 1) << "frame " << frame;
  }
}

TEST(Stft, RejectsBadInput) {
  RawEpoch e;
  e.samples.assign(100, 0.0f);
  EXPECT_THROW(e.validate(), ShapeError);
  e = sinusoid(5.0);
  e.samples[17] = std::nanf("");
  EXPECT_THROW(stft_epoch(e), NumericError);
}

TEST(Resample, HalvesRateAndKeepsLowFrequency) {
  std::vector<float> x(6000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(std::sin(2.0 * std::numbers::pi * 3.0 * static_cast<double>(i) / 200.0));
  const auto y = resample(x, 200.0, 100.0);
  ASSERT_EQ(y.size(), 3000u);
  double max_err = 0.0;
  for (std::size_t i = 200; i < 2800; ++i) {
    const double expected = std::sin(2.0 * std::numbers::pi * 3.0 * static_cast<double>(i) / 100.0);
    max_err = std::max(max_err, std::abs(y[i] - expected));
  }
  EXPECT_LT(max_err, 0.02);
  EXPECT_EQ(resample(x, 100.0, 100.0), x);
}

TEST(Labels, MergeAndDiscard) {
  RawLabelStream raw{{RawLabel::W, RawLabel::N4, RawLabel::Movement, RawLabel::REM}, 0};
  const auto h = harmonize_labels(raw);
  EXPECT_EQ(h.stages[0], 0);
  EXPECT_EQ(h.stages[1], 3);
  EXPECT_EQ(h.stages[3], 4);
  EXPECT_EQ(h.valid, (std::vector<std::uint8_t>{1, 1, 0, 1}));
  EXPECT_EQ(h.usable(), 3);
}

TEST(Labels, AllWakeAndAllUnknown) {
  const auto w = harmonize_labels({std::vector<RawLabel>(5, RawLabel::W), 0});
  EXPECT_EQ(w.stages, std::vector<std::uint8_t>(5, 0));
  EXPECT_EQ(w.valid, std::vector<std::uint8_t>(5, 1));
  const auto u = harmonize_labels({std::vector<RawLabel>(4, RawLabel::Unknown), 0});
  EXPECT_EQ(u.valid, std::vector<std::uint8_t>(4, 0));
  EXPECT_EQ(u.usable(), 0);
}

TEST(Labels, ParseTokens) {
  EXPECT_EQ(parse_raw_label("wake", 0), RawLabel::W);
  EXPECT_EQ(parse_raw_label("R", 0), RawLabel::REM);
  EXPECT_EQ(parse_raw_label("n4", 0), RawLabel::N4);
  try {
    parse_raw_label("N5", 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("N5"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find('7'), std::string::npos);
  }
}

TEST(Labels, InBedTrim) {
  Hypnogram h;
  h.stages.assign(2000, 2);
  h.valid.assign(2000, 1);
  const auto t = trim_to_in_bed(h, 500, 1400);
  EXPECT_EQ(t.first, 440);
  EXPECT_EQ(t.last, 1460);
  EXPECT_EQ(t.hypnogram.size(), 1021);
  const auto whole = trim_to_in_bed(h, 0, 1999);
  EXPECT_EQ(whole.first, 0);
  EXPECT_EQ(whole.last, 1999);
  const auto exact = trim_to_in_bed(h, 500, 1400, 0.0);
  EXPECT_EQ(exact.first, 500);
  EXPECT_EQ(exact.last, 1400);
}

TEST(RecordingIo, SignalLabelManifestRoundTrip) {
  const auto dir = scratch_dir("io");
  SignalFile sig{100.0, {1.0f, -2.5f, 3.25f}};
  write_signal(dir / "a.sig", sig);
  const auto back = read_signal(dir / "a.sig");
  EXPECT_EQ(back.sample_rate, 100.0);
  EXPECT_EQ(back.samples, sig.samples);

  RawLabelStream labels{{RawLabel::W, RawLabel::N2, RawLabel::Unknown}, 0};
  write_labels(dir / "a.labels", labels);
  EXPECT_EQ(read_labels(dir / "a.labels").labels, labels.labels);

  std::vector<ManifestRow> rows(1);
  rows[0].recording_id = "a";
  rows[0].subject_id = "s1";
  rows[0].signal_path = "a.sig";
  rows[0].label_path = "a.labels";
  rows[0].in_bed_start = 0;
  rows[0].in_bed_end = 2;
  write_manifest(dir / "manifest.csv", rows);
  const auto parsed = read_manifest(dir / "manifest.csv");
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].recording_id, "a");
  EXPECT_EQ(parsed[0].subject_id, "s1");
  EXPECT_EQ(parsed[0].signal_path, dir / "a.sig");
  EXPECT_EQ(parsed[0].in_bed_end, 2);
}

TEST(RecordingIo, FeatureArchiveRoundTrip) {
  std::vector<float> signal(3000 * 3);
  Rng rng = substream(5, "features");
  for (auto& v : signal) v = static_cast<float>(normal01(rng));
  Hypnogram h{{0, 2, 4}, {1, 1, 1}, "r"};
  const auto archive = build_features("r", "s", signal, 100.0, h);
  EXPECT_EQ(archive.epochs(), 3);
  EXPECT_EQ(archive.frames, 29);
  EXPECT_EQ(archive.bins, 129);
  const auto dir = scratch_dir("features");
  write_features(dir / "r.lsf", archive);
  const auto back = read_features(dir / "r.lsf");
  EXPECT_EQ(back.values, archive.values);
  EXPECT_EQ(back.hypnogram.stages, archive.hypnogram.stages);
  EXPECT_EQ(back.subject_id, "s");
}

TEST(RecordingIo, RefusesNewerMajor) {
  const auto dir = scratch_dir("major");
  write_signal(dir / "a.sig", {100.0, {0.0f}});
  std::fstream f(dir / "a.sig", std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(8);
  const std::uint32_t major = kSignalMajor + 1;
  f.write(reinterpret_cast<const char*>(&major), sizeof major);
  f.close();
  EXPECT_THROW(read_signal(dir / "a.sig"), FormatError);
}
