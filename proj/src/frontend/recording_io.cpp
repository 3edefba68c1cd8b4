#include "lseq/frontend/recording_io.hpp"

#include "lseq/core/binary_io.hpp"
#include "lseq/core/error.hpp"
#include "lseq/frontend/resample.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lseq::frontend {

namespace fs = std::filesystem;

namespace {

constexpr char kSignalMagic[9] = "LSEQSIG";
constexpr char kFeatureMagic[9] = "LSEQFEA";

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  return is;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  return os;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_signal(const fs::path& path, const SignalFile& signal) {
  auto os = open_out(path);
  bin::write_magic(os, kSignalMagic);
  bin::write<std::uint32_t>(os, kSignalMajor);
  bin::write<std::uint32_t>(os, kSignalMinor);
  bin::write<double>(os, signal.sample_rate);
  bin::write<std::uint64_t>(os, signal.samples.size());
  bin::write_array(os, signal.samples.data(), signal.samples.size());
  if (!os) throw Error("failed writing " + path.string());
}

SignalFile read_signal(const fs::path& path) {
  auto is = open_in(path);
  bin::expect_magic(is, kSignalMagic, path.string());
  const auto major = bin::read<std::uint32_t>(is);
  bin::read<std::uint32_t>(is);
  if (major > kSignalMajor) {
    throw FormatError(path.string() + ": signal format major " + std::to_string(major) + " is newer than " +
                      std::to_string(kSignalMajor));
  }
  SignalFile signal;
  signal.sample_rate = bin::read<double>(is);
  const auto n = bin::read<std::uint64_t>(is);
  if (n > (1ULL << 34)) throw FormatError(path.string() + ": implausible sample count");
  signal.samples.resize(n);
  bin::read_array(is, signal.samples.data(), n);
  return signal;
}

void write_labels(const fs::path& path, const RawLabelStream& labels) {
  auto os = open_out(path);
  for (RawLabel l : labels.labels) os << raw_label_token(l) << '\n';
}

RawLabelStream read_labels(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  RawLabelStream out;
  std::string line;
  std::size_t position = 0;
  while (std::getline(is, line)) {
    const auto token = trim(line);
    if (token.empty() || token.front() == '#') continue;
    out.labels.push_back(parse_raw_label(token, position));
    ++position;
  }
  return out;
}

std::vector<ManifestRow> read_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open manifest " + path.string());
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::string line;
  if (!std::getline(is, line)) throw FormatError(path.string() + ": empty manifest");
  const auto header = split_csv(line);
  const std::vector<std::string> expected = {"recording_id", "signal_path", "label_path",
                                             "in_bed_start", "in_bed_end",  "subject_id"};
  if (header != expected) throw FormatError(path.string() + ": unexpected manifest header '" + line + "'");

  std::vector<ManifestRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != expected.size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 6 fields");
    }
    ManifestRow row;
    row.recording_id = cells[0];
    row.signal_path = fs::path(cells[1]).is_absolute() ? fs::path(cells[1]) : base / cells[1];
    row.label_path = fs::path(cells[2]).is_absolute() ? fs::path(cells[2]) : base / cells[2];
    try {
      if (!cells[3].empty()) row.in_bed_start = std::stoll(cells[3]);
      if (!cells[4].empty()) row.in_bed_end = std::stoll(cells[4]);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad in-bed index");
    }
    if (row.in_bed_start.has_value() != row.in_bed_end.has_value()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": in-bed bounds must both be set");
    }
    row.subject_id = cells[5];
    if (row.recording_id.empty() || row.subject_id.empty()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": empty recording or subject id");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

// Relative paths are kept as given; absolute paths under the manifest's
// directory are written relative to it.
std::string manifest_path(const fs::path& p, const fs::path& base) {
  if (p.is_relative()) return p.generic_string();
  const auto rel = p.lexically_relative(fs::absolute(base));
  if (rel.empty() || *rel.begin() == "..") return p.generic_string();
  return rel.generic_string();
}

}  // namespace

void write_manifest(const fs::path& path, const std::vector<ManifestRow>& rows) {
  auto os = open_out(path);
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  os << "recording_id,signal_path,label_path,in_bed_start,in_bed_end,subject_id\n";
  for (const auto& r : rows) {
    os << r.recording_id << ',' << manifest_path(r.signal_path, base) << ','
       << manifest_path(r.label_path, base) << ','
       << (r.in_bed_start ? std::to_string(*r.in_bed_start) : "") << ','
       << (r.in_bed_end ? std::to_string(*r.in_bed_end) : "") << ',' << r.subject_id << '\n';
  }
}

void FeatureArchive::validate() const {
  hypnogram.validate();
  if (frames <= 0 || bins <= 0) throw ShapeError("FeatureArchive: empty image shape");
  if (values.size() != static_cast<std::size_t>(epochs() * frames * bins)) {
    throw ShapeError("FeatureArchive: value count does not match n_epochs*T*F");
  }
}

void write_features(const fs::path& path, const FeatureArchive& a) {
  a.validate();
  auto os = open_out(path);
  bin::write_magic(os, kFeatureMagic);
  bin::write<std::uint16_t>(os, kFeatureMajor);
  bin::write<std::uint16_t>(os, kFeatureMinor);
  bin::write_string(os, a.recording_id);
  bin::write_string(os, a.subject_id);
  bin::write<std::uint64_t>(os, static_cast<std::uint64_t>(a.epochs()));
  bin::write<std::uint32_t>(os, static_cast<std::uint32_t>(a.frames));
  bin::write<std::uint32_t>(os, static_cast<std::uint32_t>(a.bins));
  bin::write_array(os, a.hypnogram.stages.data(), a.hypnogram.stages.size());
  bin::write_array(os, a.hypnogram.valid.data(), a.hypnogram.valid.size());
  bin::write_array(os, a.values.data(), a.values.size());
  if (!os) throw Error("failed writing " + path.string());
}

FeatureArchive read_features(const fs::path& path) {
  auto is = open_in(path);
  bin::expect_magic(is, kFeatureMagic, path.string());
  const auto major = bin::read<std::uint16_t>(is);
  bin::read<std::uint16_t>(is);
  if (major > kFeatureMajor) {
    throw FormatError(path.string() + ": feature format major " + std::to_string(major) + " is newer than " +
                      std::to_string(kFeatureMajor));
  }
  FeatureArchive a;
  a.recording_id = bin::read_string(is);
  a.subject_id = bin::read_string(is);
  const auto n = bin::read<std::uint64_t>(is);
  a.frames = bin::read<std::uint32_t>(is);
  a.bins = bin::read<std::uint32_t>(is);
  if (n > (1ULL << 24) || a.frames > 4096 || a.bins > 65536) throw FormatError(path.string() + ": implausible shape");
  a.hypnogram.recording_id = a.recording_id;
  a.hypnogram.stages.resize(n);
  a.hypnogram.valid.resize(n);
  bin::read_array(is, a.hypnogram.stages.data(), n);
  bin::read_array(is, a.hypnogram.valid.data(), n);
  a.values.resize(static_cast<std::size_t>(n * a.frames * a.bins));
  bin::read_array(is, a.values.data(), a.values.size());
  a.validate();
  return a;
}

FeatureArchive build_features(const std::string& recording_id, const std::string& subject_id,
                              const std::vector<float>& signal, double sample_rate, const Hypnogram& hypnogram,
                              const PrepareOptions& options) {
  std::vector<float> canonical = resample(signal, sample_rate, options.target_rate);
  const auto per_epoch = static_cast<std::size_t>(std::llround(options.target_rate * kEpochSeconds));
  const Index n_epochs = std::min<Index>(hypnogram.size(), static_cast<Index>(canonical.size() / per_epoch));
  if (n_epochs == 0) throw Error(recording_id + ": no complete epochs");

  FeatureArchive a;
  a.recording_id = recording_id;
  a.subject_id = subject_id;
  a.hypnogram.recording_id = recording_id;
  a.hypnogram.stages.assign(hypnogram.stages.begin(), hypnogram.stages.begin() + n_epochs);
  a.hypnogram.valid.assign(hypnogram.valid.begin(), hypnogram.valid.begin() + n_epochs);

  RawEpoch epoch;
  epoch.sample_rate = options.target_rate;
  epoch.samples.resize(per_epoch);
  for (Index e = 0; e < n_epochs; ++e) {
    std::copy_n(canonical.begin() + static_cast<std::ptrdiff_t>(e * per_epoch), per_epoch, epoch.samples.begin());
    const auto image = stft_epoch(epoch, options.stft);
    if (e == 0) {
      a.frames = image.frames();
      a.bins = image.bins();
      a.values.reserve(static_cast<std::size_t>(n_epochs * a.frames * a.bins));
    }
    a.values.insert(a.values.end(), image.values.data(), image.values.data() + image.values.size());
  }
  if (options.zscore_per_recording) zscore_in_place(a);
  return a;
}

FeatureArchive prepare_recording(const ManifestRow& row, const PrepareOptions& options) {
  const auto signal = read_signal(row.signal_path);
  const auto raw = read_labels(row.label_path);
  auto hyp = harmonize_labels(raw, row.recording_id);

  const auto per_epoch = static_cast<Index>(std::llround(signal.sample_rate * kEpochSeconds));
  const Index signal_epochs = static_cast<Index>(signal.samples.size()) / per_epoch;
  const Index n = std::min(signal_epochs, hyp.size());
  if (n == 0) throw Error(row.recording_id + ": no complete epochs");
  hyp.stages.resize(static_cast<std::size_t>(n));
  hyp.valid.resize(static_cast<std::size_t>(n));

  Index start = 0;
  Index end = n - 1;
  if (row.in_bed_start) {
    start = *row.in_bed_start;
    end = std::min(*row.in_bed_end, n - 1);
  }
  const auto trimmed = trim_to_in_bed(hyp, start, end, options.margin_minutes);
  std::vector<float> cut(signal.samples.begin() + trimmed.first * per_epoch,
                         signal.samples.begin() + (trimmed.last + 1) * per_epoch);
  return build_features(row.recording_id, row.subject_id, cut, signal.sample_rate, trimmed.hypnogram, options);
}

void zscore_in_place(FeatureArchive& archive) {
  if (archive.values.empty()) return;
  double sum = 0.0, sq = 0.0;
  for (float v : archive.values) {
    sum += v;
    sq += static_cast<double>(v) * v;
  }
  const double n = static_cast<double>(archive.values.size());
  const double mean = sum / n;
  const double sd = std::sqrt(std::max(sq / n - mean * mean, 1e-12));
  for (float& v : archive.values) v = static_cast<float>((v - mean) / sd);
}

}  // namespace lseq::frontend
